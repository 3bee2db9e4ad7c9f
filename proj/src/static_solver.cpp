#include "fairgate/static_solver.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <limits>
#include <tuple>
#include <utility>

namespace fairgate {

namespace {

constexpr double kObjectiveTieTol = 1e-12;
constexpr double kBisectionTol = 1e-12;
constexpr double kStructureTol = 1e-9;

Eigen::Index idx(std::size_t i) { return static_cast<Eigen::Index>(i); }

void check_lambda(double lambda) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw ValidationError(fmt::format("lambda must be finite and >= 0, got {}", lambda));
  }
}

struct Prepared {
  OrientedPopulation oriented;
  UtilityMax um;
};

Prepared prepare(const PopulationState& state) {
  validate_population(state);
  Prepared p{normalize_orientation(state), {}};
  p.um = utility_max(p.oriented.state);
  return p;
}

void require_tension(const UtilityMax& um, const char* what) {
  if (!has_tension(um.delta_um)) {
    throw DegenerateError(fmt::format("{} is undefined: utility-maximizing policy already has zero disparity", what));
  }
}

// Builds the solution for removed mass `mass` on the oriented state and maps
// it back to the caller's labels.
StaticSolution assemble(const Prepared& prep, const CostCurve& curve, double mass, const Penalty& penalty,
                        double lambda) {
  StaticSolution sol;
  sol.swapped = prep.oriented.swapped;
  sol.u_um = prep.um.u_um;
  sol.delta_um = prep.um.delta_um;
  sol.policy = prep.um.policy;

  const std::vector<double> z = curve.allocate(mass);
  double spent = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (z[i] <= 0.0) continue;
    const ReductionItem& item = curve.items()[i];
    const double frac = std::clamp(z[i] / item.capacity, 0.0, 1.0);
    if (item.group == Group::A) {
      sol.policy.select_a[idx(item.level)] = 1.0 - frac;
    } else {
      sol.policy.select_b[idx(item.level)] = frac;
    }
    sol.total_mass += z[i];
    spent += z[i] * item.unit_cost;
    sol.z_allocation.push_back(
        {item.qualification, item.level, sol.swapped ? other(item.group) : item.group, z[i]});
  }
  sol.delta = std::max(0.0, prep.um.delta_um - sol.total_mass);
  sol.objective = prep.um.u_um - spent - (lambda == 0.0 ? 0.0 : lambda * penalty(sol.delta));
  if (sol.swapped) sol.policy = swap_groups(sol.policy);
  return sol;
}

StaticSolution utility_max_solution(const Prepared& prep) {
  StaticSolution sol;
  sol.swapped = prep.oriented.swapped;
  sol.u_um = prep.um.u_um;
  sol.delta_um = prep.um.delta_um;
  sol.delta = prep.um.delta_um;
  sol.objective = prep.um.u_um;
  sol.policy = prep.um.policy;
  return sol;
}

}  // namespace

OrientedPopulation normalize_orientation(const PopulationState& state) {
  if (positive_mass(state, Group::B) > positive_mass(state, Group::A)) {
    return {swap_groups(state), true};
  }
  return {state, false};
}

UtilityMax utility_max(const PopulationState& state) {
  const PopulationState s = normalize_orientation(state).state;
  UtilityMax um;
  um.policy = utility_max_policy(s.grid);
  um.u_um = utility(s, um.policy);
  um.delta_um = positive_mass(s, Group::A) - positive_mass(s, Group::B);
  return um;
}

bool has_tension(double delta_um) { return delta_um > kProbTol; }

std::vector<ReductionItem> reduction_items(const PopulationState& s) {
  if (positive_mass(s, Group::B) > positive_mass(s, Group::A)) {
    throw std::invalid_argument("reduction_items requires normalized group orientation");
  }
  std::vector<ReductionItem> items;
  for (std::size_t i = 0; i < s.grid.size(); ++i) {
    const double y = s.grid[i];
    const Group g = y > 0.0 ? Group::A : Group::B;
    const double cap = s.dist(g)[idx(i)];
    if (cap > 0.0) items.push_back({y, i, g, s.weight(g) * std::abs(y), cap});
  }
  std::stable_sort(items.begin(), items.end(), [](const ReductionItem& a, const ReductionItem& b) {
    return std::tuple(a.unit_cost, a.group == Group::B, a.qualification) <
           std::tuple(b.unit_cost, b.group == Group::B, b.qualification);
  });
  if (items.empty() && has_tension(positive_mass(s, Group::A) - positive_mass(s, Group::B))) {
    throw std::logic_error("no reduction items although the utility-maximizing disparity is positive");
  }
  return items;
}

CostCurve::CostCurve(std::vector<ReductionItem> items, double max_mass)
    : items_(std::move(items)), max_mass_(max_mass) {
  breakpoints_.push_back({0.0, 0.0});
  double mass = 0.0;
  double cost = 0.0;
  for (const ReductionItem& item : items_) {
    if (mass >= max_mass_ - kProbTol) break;
    const double take = std::min(item.capacity, max_mass_ - mass);
    mass += take;
    cost += take * item.unit_cost;
    if (mass >= max_mass_ - kProbTol) mass = max_mass_;
    breakpoints_.push_back({mass, cost});
    slopes_.push_back(item.unit_cost);
  }
  if (breakpoints_.back().mass < max_mass_) {
    throw std::logic_error(fmt::format("reduction capacity {} below required mass {}", breakpoints_.back().mass,
                                       max_mass_));
  }
}

double CostCurve::cost(double mass) const {
  mass = std::clamp(mass, 0.0, max_mass_);
  for (std::size_t k = 0; k < slopes_.size(); ++k) {
    if (mass <= breakpoints_[k + 1].mass) {
      return breakpoints_[k].cost + (mass - breakpoints_[k].mass) * slopes_[k];
    }
  }
  return breakpoints_.back().cost;
}

std::vector<double> CostCurve::allocate(double mass) const {
  std::vector<double> z(items_.size(), 0.0);
  double remaining = std::clamp(mass, 0.0, max_mass_);
  for (std::size_t i = 0; i < items_.size() && remaining > kProbTol; ++i) {
    z[i] = std::min(items_[i].capacity, remaining);
    remaining -= z[i];
  }
  return z;
}

StaticSolution solve_dp_constrained(const PopulationState& state) {
  const Prepared prep = prepare(state);
  if (!has_tension(prep.um.delta_um)) return utility_max_solution(prep);
  const CostCurve curve(reduction_items(prep.oriented.state), prep.um.delta_um);
  return assemble(prep, curve, prep.um.delta_um, Penalty::linear(), 0.0);
}

StaticSolution solve_penalized(const PopulationState& state, const Penalty& penalty, double lambda) {
  check_lambda(lambda);
  const Prepared prep = prepare(state);
  if (!has_tension(prep.um.delta_um) || lambda == 0.0) return utility_max_solution(prep);

  const double delta_um = prep.um.delta_um;
  const CostCurve curve(reduction_items(prep.oriented.state), delta_um);
  auto objective = [&](double mass) {
    return prep.um.u_um - curve.cost(mass) - lambda * penalty(std::max(0.0, delta_um - mass));
  };
  // Marginal penalty relief of removing mass just below `mass`.
  auto worth_reaching = [&](double mass, double slope) {
    return lambda * penalty.right_derivative(std::max(0.0, delta_um - mass)) >= slope;
  };

  std::vector<double> candidates;
  const auto& bps = curve.breakpoints();
  const auto& slopes = curve.segment_slopes();
  for (const auto& bp : bps) candidates.push_back(bp.mass);
  for (std::size_t k = 0; k < slopes.size(); ++k) {
    double lo = bps[k].mass;
    double hi = bps[k + 1].mass;
    if (worth_reaching(hi, slopes[k])) continue;  // segment end is already a candidate
    while (hi - lo > kBisectionTol) {
      const double mid = 0.5 * (lo + hi);
      if (worth_reaching(mid, slopes[k])) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    candidates.push_back(lo);
  }
  std::sort(candidates.begin(), candidates.end());

  double best_mass = 0.0;
  double best_value = objective(0.0);
  for (double m : candidates) {
    const double v = objective(m);
    if (v > best_value + kObjectiveTieTol || (v >= best_value - kObjectiveTieTol && m > best_mass)) {
      best_value = std::max(best_value, v);
      best_mass = m;
    }
  }
  return assemble(prep, curve, best_mass, penalty, lambda);
}

double beta_e(const PopulationState& state) {
  const Prepared prep = prepare(state);
  require_tension(prep.um, "beta_e");
  return reduction_items(prep.oriented.state).front().unit_cost;
}

double beta_s(const PopulationState& state) {
  const Prepared prep = prepare(state);
  require_tension(prep.um, "beta_s");
  const CostCurve curve(reduction_items(prep.oriented.state), prep.um.delta_um);
  const std::vector<double> z = curve.allocate(prep.um.delta_um);
  double worst = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (z[i] > 0.0) worst = std::max(worst, curve.items()[i].unit_cost);
  }
  return worst;
}

bool is_effective(const PopulationState& state, const Penalty& penalty, double lambda) {
  check_lambda(lambda);
  const double be = beta_e(state);
  return be < lambda * penalty.left_derivative(utility_max(state).delta_um);
}

bool is_fully_satisfactory(const PopulationState& state, const Penalty& penalty, double lambda) {
  check_lambda(lambda);
  validate_population(state);
  if (!has_tension(utility_max(state).delta_um)) return true;
  return beta_s(state) <= lambda * penalty.right_derivative(0.0);
}

double min_lambda_effective(const PopulationState& state, const Penalty& penalty) {
  const double be = beta_e(state);
  const double d = penalty.left_derivative(utility_max(state).delta_um);
  return d > 0.0 ? be / d : std::numeric_limits<double>::infinity();
}

double min_lambda_satisfactory(const PopulationState& state, const Penalty& penalty) {
  const double bs = beta_s(state);
  const double d = penalty.right_derivative(0.0);
  return d > 0.0 ? bs / d : std::numeric_limits<double>::infinity();
}

OracleResult oracle_solve(const PopulationState& state, const Penalty& penalty, double lambda, double step) {
  check_lambda(lambda);
  if (!(step > 0.0)) throw ValidationError(fmt::format("oracle step must be > 0, got {}", step));
  const Prepared prep = prepare(state);
  const double delta_um = prep.um.delta_um;
  if (!has_tension(delta_um)) return {prep.um.u_um, delta_um};

  const std::vector<ReductionItem> items = reduction_items(prep.oriented.state);
  auto greedy_cost = [&](double mass) {
    double cost = 0.0;
    for (const ReductionItem& item : items) {
      if (mass <= 0.0) break;
      const double take = std::min(item.capacity, mass);
      cost += take * item.unit_cost;
      mass -= take;
    }
    return cost;
  };
  auto value = [&](double mass) {
    return prep.um.u_um - greedy_cost(mass) - lambda * penalty(std::max(0.0, delta_um - mass));
  };

  OracleResult best{value(0.0), delta_um};
  for (long k = 1;; ++k) {
    const double mass = static_cast<double>(k) * step;
    if (mass >= delta_um) break;
    const double v = value(mass);
    if (v > best.objective) best = {v, delta_um - mass};
  }
  if (const double v = value(delta_um); v > best.objective) best = {v, 0.0};
  return best;
}

std::vector<std::string> check_policy_structure(const PopulationState& state, const SelectionPolicy& policy) {
  validate_population(state);
  validate_policy(policy, state.grid.size());
  const OrientedPopulation o = normalize_orientation(state);
  const PopulationState& s = o.state;
  const SelectionPolicy p = o.swapped ? swap_groups(policy) : policy;

  std::vector<std::string> out;
  for (Group g : {Group::A, Group::B}) {
    const Vector& d = s.dist(g);
    const Vector& sel = p.select(g);
    double prev = -1.0;
    double prev_y = 0.0;
    int fractional = 0;
    for (std::size_t i = 0; i < s.grid.size(); ++i) {
      if (!(d[idx(i)] > 0.0)) continue;
      const double y = s.grid[i];
      const double v = sel[idx(i)];
      if (prev > v + kStructureTol) {
        out.push_back(fmt::format("group {}: selection decreases from {} at y={} to {} at y={}", to_string(g), prev,
                                  prev_y, v, y));
      }
      if (v > kStructureTol && v < 1.0 - kStructureTol) ++fractional;
      if (g == Group::A && y < 0.0 && v > kStructureTol) {
        out.push_back(fmt::format("group A selects negative level y={} with probability {}", y, v));
      }
      if (g == Group::B && y > 0.0 && v < 1.0 - kStructureTol) {
        out.push_back(fmt::format("group B rejects positive level y={} with probability {}", y, 1.0 - v));
      }
      prev = v;
      prev_y = y;
    }
    if (fractional > 1) {
      out.push_back(fmt::format("group {} has {} fractional selection levels", to_string(g), fractional));
    }
  }
  const double rate_a = selection_rate(s, p, Group::A);
  const double rate_b = selection_rate(s, p, Group::B);
  if (rate_a + kStructureTol < rate_b) {
    out.push_back(fmt::format("advantaged group selection rate {} below other group's {}", rate_a, rate_b));
  }
  return out;
}

}  // namespace fairgate
