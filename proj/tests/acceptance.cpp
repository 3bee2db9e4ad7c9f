// Acceptance suite: one [PASS]/[FAIL] line per criterion. Exit status is the
// number of failed criteria.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "fairgate/demo.hpp"
#include "fairgate/dynamics.hpp"
#include "fairgate/genlab.hpp"
#include "fairgate/static_solver.hpp"
#include "test_support.hpp"

using namespace fairgate;
using Clock = std::chrono::steady_clock;

namespace {

// Tolerances and budgets.
constexpr double kStaticTol = 1e-9;
constexpr double kStaticBudgetMs = 1.0;
constexpr double kTrajectoryTol = 1e-6;
constexpr double kTrajectoryBudgetS = 1.0;
constexpr double kEqualizeTol = 1e-6;
constexpr double kEqualizeBudgetS = 30.0;
constexpr double kContractionSlack = 1e-10;
constexpr double kOracleTol = 1e-4;
constexpr double kOracleStep = 1e-5;
constexpr double kOracleBudgetS = 60.0;
constexpr double kParityTol = 1e-9;
constexpr double kProfitSlack = 1e-10;
constexpr double kFixedPointTol = 1e-10;
constexpr double kBirthDeathTol = 1e-8;
constexpr double kBandMedianTol = 1e-3;
constexpr int kLongHorizon = 100000;

struct Outcome {
  bool pass = true;
  std::string detail;
};

struct Report {
  int failures = 0;

  void run(int id, const char* title, const std::function<Outcome()>& body) {
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = body();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
    if (!o.pass) ++failures;
    std::printf("[%s] %2d %s (%.1f ms)%s%s\n", o.pass ? "PASS" : "FAIL", id, title, ms, o.detail.empty() ? "" : ": ",
                o.detail.c_str());
    std::fflush(stdout);
  }
};

void require(Outcome& o, bool ok, const std::string& what) {
  if (!ok) {
    o.pass = false;
    if (o.detail.empty()) o.detail = what;
  }
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

/// Fastest of several runs, in milliseconds.
double best_ms(const std::function<void()>& f, int reps = 20) {
  double best = 1e300;
  for (int i = 0; i < reps; ++i) {
    const auto t0 = Clock::now();
    f();
    best = std::min(best, std::chrono::duration<double, std::milli>(Clock::now() - t0).count());
  }
  return best;
}

bool contraction_holds(const TrajectoryRecord& r, const DynamicsKernel& k) {
  const double factor = contraction_factor(k).factor;
  for (std::size_t t = 0; t + 1 < r.steps.size(); ++t) {
    if (r.steps[t + 1].tv > factor * r.steps[t].tv + kContractionSlack) return false;
  }
  if (!r.steps.empty() && tv_distance(r.final_state.dist_a, r.final_state.dist_b) >
                              factor * r.steps.back().tv + kContractionSlack) {
    return false;
  }
  return true;
}

struct Run {
  TrajectoryRecord record;
  DynamicsKernel kernel;
};

// Trajectories shared between the dynamics criteria and the contraction check.
std::vector<Run> g_runs;

Outcome static_golden() {
  Outcome o;
  const PopulationState s = demo::three_level_population();
  const Penalty g = Penalty::linear();
  struct Case {
    double lambda, delta, objective;
  };
  for (const Case c : {Case{0.7, 0.1, 0.88}, Case{1.5, 0.0, 0.85}, Case{0.0, 0.2, 1.0}}) {
    const StaticSolution sol = solve_penalized(s, g, c.lambda);
    require(o, std::abs(sol.delta - c.delta) <= kStaticTol, "delta at lambda " + std::to_string(c.lambda));
    require(o, std::abs(sol.objective - c.objective) <= kStaticTol, "objective at lambda " + std::to_string(c.lambda));
    const double ms = best_ms([&] { (void)solve_penalized(s, g, c.lambda); });
    require(o, ms < kStaticBudgetMs, "runtime " + fmt::format("{:.3g}", ms) + " ms");
  }
  const StaticSolution mid = solve_penalized(s, g, 0.7);
  require(o, (mid.policy.select_a - Vector{{0, 0, 1}}).cwiseAbs().maxCoeff() <= kStaticTol, "policy A");
  require(o, (mid.policy.select_b - Vector{{0, 1, 1}}).cwiseAbs().maxCoeff() <= kStaticTol, "policy B");
  return o;
}

Outcome thresholds() {
  Outcome o;
  const PopulationState s = demo::three_level_population();
  const double be = beta_e(s);
  const double bs = beta_s(s);
  require(o, be == 0.5, "beta_e = " + fmt::format("{:.3g}", be));
  require(o, bs == 1.0, "beta_s = " + fmt::format("{:.3g}", bs));
  return o;
}

Outcome golden_trajectory() {
  Outcome o;
  const PopulationState s = demo::three_level_population();
  const DynamicsKernel k = demo::three_level_kernel();
  const auto t0 = Clock::now();
  TrajectoryRecord r = simulate(s, k, Penalty::linear(), 0.7, {1000, 1e-12, 0});
  const double secs = seconds_since(t0);
  const Vector a{{1.0 / 3, 0.1, 17.0 / 30}};
  const Vector b{{17.0 / 30, 0.1, 1.0 / 3}};
  require(o, (r.final_state.dist_a - a).cwiseAbs().maxCoeff() <= kTrajectoryTol, "group A limit");
  require(o, (r.final_state.dist_b - b).cwiseAbs().maxCoeff() <= kTrajectoryTol, "group B limit");
  const double delta_end = solve_penalized(r.final_state, Penalty::linear(), 0.7).delta;
  require(o, std::abs(delta_end - 4.0 / 30) <= kTrajectoryTol, "limiting disparity " + fmt::format("{:.3g}", delta_end));
  require(o, secs < kTrajectoryBudgetS, "runtime");
  g_runs.push_back({std::move(r), k});
  return o;
}

Outcome zero_penalty_equalizes() {
  Outcome o;
  std::mt19937_64 rng(4);
  const auto t0 = Clock::now();
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const int n = 2 + static_cast<int>(rng() % 9);
    const QualificationGrid grid = testing::random_grid(rng, n);
    const DynamicsKernel k = random_kernel(seed, grid);
    TrajectoryRecord r = simulate(testing::random_state_on(rng, grid), k, Penalty::linear(), 0.0, {2000, 0.0, 0});
    const double tv = tv_distance(r.final_state.dist_a, r.final_state.dist_b);
    worst = std::max(worst, tv);
    g_runs.push_back({std::move(r), k});
  }
  require(o, worst < kEqualizeTol, "largest final tv " + fmt::format("{:.3g}", worst));
  require(o, seconds_since(t0) < kEqualizeBudgetS, "runtime");
  if (o.pass) o.detail = "largest final tv " + fmt::format("{:.3g}", worst);
  return o;
}

Outcome contraction_bound() {
  Outcome o;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> lam(0.0, 3.0);
  for (int i = 0; i < 20; ++i) {
    const int n = 2 + static_cast<int>(rng() % 7);
    const QualificationGrid grid = testing::random_grid(rng, n);
    const DynamicsKernel k{grid, testing::random_stochastic(rng, n), testing::random_stochastic(rng, n)};
    const Penalty g = testing::random_penalty(rng);
    TrajectoryRecord r = simulate(testing::random_state_on(rng, grid), k, g, lam(rng), {500, 0.0, 0});
    g_runs.push_back({std::move(r), k});
  }
  std::size_t steps = 0;
  for (std::size_t i = 0; i < g_runs.size(); ++i) {
    steps += g_runs[i].record.steps.size();
    require(o, contraction_holds(g_runs[i].record, g_runs[i].kernel), "violated on trajectory " + std::to_string(i));
  }
  if (o.pass) o.detail = std::to_string(g_runs.size()) + " trajectories, " + std::to_string(steps) + " steps";
  return o;
}

Outcome oracle_equivalence() {
  Outcome o;
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> lam(0.0, 3.0);
  const auto t0 = Clock::now();
  double worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    const int n = 2 + static_cast<int>(rng() % 4);
    const PopulationState s = testing::random_population(rng, n);
    const Penalty g = testing::random_penalty(rng);
    const double lambda = lam(rng);
    const StaticSolution sol = solve_penalized(s, g, lambda);
    const OracleResult ref = oracle_solve(s, g, lambda, kOracleStep);
    worst = std::max(worst, std::abs(sol.objective - ref.objective));
    const auto violations = check_policy_structure(s, sol.policy);
    require(o, violations.empty(), "instance " + std::to_string(i) + ": " + (violations.empty() ? "" : violations[0]));
  }
  require(o, worst <= kOracleTol, "largest objective gap " + fmt::format("{:.3g}", worst));
  require(o, seconds_since(t0) < kOracleBudgetS, "runtime");
  if (o.pass) o.detail = "largest objective gap " + fmt::format("{:.3g}", worst);
  return o;
}

Outcome parity_not_reached_by_smooth_penalty() {
  Outcome o;
  std::mt19937_64 rng(7);
  int done = 0;
  const Penalty quad = Penalty::power(2.0);
  const Penalty lin = Penalty::linear();
  while (done < 50) {
    const PopulationState s = testing::random_population(rng, 2 + static_cast<int>(rng() % 4));
    if (!(utility_max(s).delta_um > 0.01)) continue;
    ++done;
    require(o, solve_penalized(s, quad, 1e4).delta > 0.0, "quadratic reached parity on instance " + std::to_string(done));
    const double lambda = min_lambda_satisfactory(s, lin);
    require(o, solve_penalized(s, lin, lambda).delta <= kParityTol, "linear missed parity on instance " + std::to_string(done));
  }
  return o;
}

Outcome profit_monotone() {
  Outcome o;
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> lam(0.0, 3.0);
  double worst_drop = 0.0;
  for (int i = 0; i < 20; ++i) {
    const int n = 2 + static_cast<int>(rng() % 7);
    const QualificationGrid grid = testing::random_grid(rng, n);
    const DynamicsKernel k = testing::growth_kernel(rng, grid);
    require(o, check_growth_condition(k), "generated kernel fails the growth condition");
    const TrajectoryRecord r =
        simulate(testing::random_state_on(rng, grid), k, testing::random_penalty(rng), lam(rng), {500, 0.0, 0});
    for (std::size_t t = 0; t + 1 < r.steps.size(); ++t) {
      worst_drop = std::max(worst_drop, r.steps[t].profit - r.steps[t + 1].profit);
    }
  }
  require(o, worst_drop <= kProfitSlack, "largest one-step drop " + fmt::format("{:.3g}", worst_drop));
  return o;
}

Outcome stationarity() {
  Outcome o;
  std::vector<DynamicsKernel> kernels{demo::three_level_kernel()};
  const QualificationGrid grid({-1.5, -0.5, 0.5, 1.5, 2.5});
  kernels.push_back({grid, Matrix::Identity(5, 5), Matrix::Identity(5, 5)});
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    kernels.push_back(random_kernel(seed, grid));
    kernels.push_back(band_kernel(sample_band_params(seed), grid));
    kernels.push_back(random_band_kernel(seed, grid));
  }
  std::size_t candidates = 0;
  for (const DynamicsKernel& k : kernels) {
    for (const StationaryState& st : stationary_candidates(k)) {
      ++candidates;
      const PopulationState s = make_population(k.grid, 0.5, st.distribution, st.distribution);
      const PopulationState next = step(s, solve_penalized(s, Penalty::linear(), 1.0).policy, k);
      require(o, (next.dist_a - st.distribution).cwiseAbs().maxCoeff() <= kFixedPointTol, "candidate moved");
      require(o, (next.dist_b - st.distribution).cwiseAbs().maxCoeff() <= kFixedPointTol, "candidate moved");
    }
  }

  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.01, 0.49);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 10);
    Matrix p = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i) {
      if (i + 1 < n) p(i, i + 1) = u(rng);
      if (i > 0) p(i, i - 1) = u(rng);
      p(i, i) = 1.0 - p.row(i).sum();
    }
    worst = std::max(worst, (birth_death_stationary(p) - stationary_linear_solve(p)).cwiseAbs().maxCoeff());
  }
  require(o, worst <= kBirthDeathTol, "product formula gap " + fmt::format("{:.3g}", worst));
  if (o.pass) o.detail = std::to_string(candidates) + " candidates checked";
  return o;
}

Outcome qualitative_reproduction() {
  Outcome o;
  const PopulationState s = demo::gpa_like_population();
  const Penalty g = Penalty::linear();

  // Band kernels with lambda ~ U(0,1): the median tv across runs at t = 200.
  std::vector<double> tv_at_200;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng lambda_rng(1000 + seed);
    const double lambda = lambda_rng.uniform();
    const TrajectoryRecord r = simulate(s, band_kernel(sample_band_params(seed), s.grid), g, lambda, {201, 0.0, 0});
    tv_at_200.push_back(r.steps.at(200).tv);
  }
  std::nth_element(tv_at_200.begin(), tv_at_200.begin() + 50, tv_at_200.end());
  const double median = tv_at_200[50];
  require(o, median < kBandMedianTol, "median tv at t=200 is " + fmt::format("{:.3g}", median));

  // Unconstrained random tridiagonal kernels at a penalty that is effective
  // but not fully satisfactory at t = 0.
  const double lambda = 0.03;
  require(o, is_effective(s, g, lambda) && !is_fully_satisfactory(s, g, lambda), "lambda not in the partial band");
  int persistent = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const TrajectoryRecord r = simulate(s, random_band_kernel(seed, s.grid), g, lambda, {kLongHorizon, 1e-14, 0});
    const double start = r.steps.front().delta;
    const double end = solve_penalized(r.final_state, g, lambda).delta;
    if (end > start + 1e-6) ++persistent;
  }
  require(o, persistent >= 1, "no run ended above its initial disparity");

  // Dense random kernels, reported only.
  int dense_persistent = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const TrajectoryRecord r = simulate(s, random_kernel(seed, s.grid), g, lambda, {kLongHorizon, 1e-14, 0});
    if (solve_penalized(r.final_state, g, lambda).delta > r.steps.front().delta + 1e-6) ++dense_persistent;
  }
  o.detail += (o.detail.empty() ? "" : "; ") + std::string("median tv(200) ") + fmt::format("{:.3g}", median) +
              ", persistent gap in " + std::to_string(persistent) + "/20 tridiagonal and " +
              std::to_string(dense_persistent) + "/20 dense kernels";
  return o;
}

}  // namespace

int main() {
  Report rep;
  rep.run(1, "static golden values on the three-level example", static_golden);
  rep.run(2, "effectiveness and satisfaction thresholds", thresholds);
  rep.run(3, "golden trajectory to the persistent-gap stationary state", golden_trajectory);
  rep.run(4, "zero penalty equalizes groups on positive kernels", zero_penalty_equalizes);
  rep.run(5, "per-step contraction bound", contraction_bound);
  rep.run(6, "solver matches brute-force oracle; optimal policy structure", oracle_equivalence);
  rep.run(7, "smooth penalty never forces parity; linear does at its threshold", parity_not_reached_by_smooth_penalty);
  rep.run(8, "profit is nondecreasing under the growth condition", profit_monotone);
  rep.run(9, "stationary candidates are fixed points; product formula", stationarity);
  rep.run(10, "band-kernel convergence and persistent-gap counterexamples", qualitative_reproduction);
  std::printf("%d of 10 criteria failed\n", rep.failures);
  return rep.failures;
}
