#include "fairgate/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>

namespace fairgate {

namespace {

Eigen::Index idx(std::size_t i) { return static_cast<Eigen::Index>(i); }

void check_stochastic(const Matrix& m, std::size_t n, const char* name) {
  if (static_cast<std::size_t>(m.rows()) != n || static_cast<std::size_t>(m.cols()) != n) {
    throw ValidationError(fmt::format("{} matrix is {}x{}, grid has {} levels", name, m.rows(), m.cols(), n));
  }
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (!std::isfinite(m(i, j)) || m(i, j) < 0.0) {
        throw ValidationError(fmt::format("{} matrix entry ({},{}) = {} is negative or non-finite", name, i, j,
                                          m(i, j)));
      }
    }
    const double sum = m.row(i).sum();
    if (std::abs(sum - 1.0) > kProbTol) {
      throw ValidationError(fmt::format("{} matrix row {} sums to {:.17g}", name, i, sum));
    }
  }
}

Vector advance(const Vector& dist, const Vector& select, const DynamicsKernel& k) {
  const Vector chosen = dist.cwiseProduct(select);
  const Vector passed = dist - chosen;
  Vector next = k.selected.transpose() * chosen + k.rejected.transpose() * passed;
  next = next.cwiseMax(0.0);
  return next / next.sum();
}

}  // namespace

void validate_kernel(const DynamicsKernel& k) {
  QualificationGrid check(k.grid.values());
  check_stochastic(k.selected, k.grid.size(), "selected");
  check_stochastic(k.rejected, k.grid.size(), "rejected");
}

PopulationState step(const PopulationState& s, const SelectionPolicy& policy, const DynamicsKernel& k) {
  if (!(s.grid == k.grid)) throw ValidationError("grid mismatch between population and kernel");
  validate_policy(policy, s.grid.size());
  PopulationState next = s;
  next.dist_a = advance(s.dist_a, policy.select_a, k);
  next.dist_b = advance(s.dist_b, policy.select_b, k);
  return next;
}

TrajectoryRecord simulate(const PopulationState& initial, const DynamicsKernel& kernel, const Penalty& penalty,
                          double lambda, const SimulationOptions& options) {
  validate_population(initial);
  validate_kernel(kernel);
  if (!(initial.grid == kernel.grid)) throw ValidationError("grid mismatch between population and kernel");
  if (options.t_max < 0) throw ValidationError(fmt::format("t_max must be >= 0, got {}", options.t_max));

  TrajectoryRecord rec;
  rec.steps.reserve(static_cast<std::size_t>(std::min(options.t_max, 100000)));
  PopulationState state = initial;
  for (int t = 0; t < options.t_max; ++t) {
    const StaticSolution sol = solve_penalized(state, penalty, lambda);
    StepRecord r;
    r.t = t;
    r.delta = disparity(state, sol.policy);
    r.utility = utility(state, sol.policy);
    r.profit = profit(state, sol.policy, penalty, lambda);
    r.tv = tv_distance(state.dist_a, state.dist_b);
    r.policy = sol.policy;
    if (options.keep_state_every > 0 && t % options.keep_state_every == 0) r.state = state;
    rec.steps.push_back(std::move(r));

    PopulationState next = step(state, sol.policy, kernel);
    const double moved =
        std::max(tv_distance(next.dist_a, state.dist_a), tv_distance(next.dist_b, state.dist_b));
    state = std::move(next);
    if (moved < options.convergence_tol) {
      rec.converged = true;
      break;
    }
  }
  rec.final_state = std::move(state);
  return rec;
}

ContractionInfo contraction_factor(const DynamicsKernel& k) {
  validate_kernel(k);
  const double n = static_cast<double>(k.grid.size());
  ContractionInfo c;
  c.alpha = std::min(k.selected.minCoeff(), k.rejected.minCoeff());
  c.factor = 2.0 * (1.0 - c.alpha * n);
  c.guaranteed = c.alpha > 1.0 / (2.0 * n);
  return c;
}

Matrix utility_max_transition(const DynamicsKernel& k) {
  const std::size_t n = k.grid.size();
  Matrix t(idx(n), idx(n));
  for (std::size_t i = 0; i < n; ++i) t.row(idx(i)) = k.matrix(k.grid[i] > 0.0).row(idx(i));
  return t;
}

std::vector<std::vector<std::size_t>> recurrent_classes(const Matrix& p) {
  const auto n = static_cast<std::size_t>(p.rows());
  // reach[i][j]: j reachable from i in zero or more steps
  std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::size_t> stack{i};
    reach[i][i] = true;
    while (!stack.empty()) {
      const std::size_t u = stack.back();
      stack.pop_back();
      for (std::size_t v = 0; v < n; ++v) {
        if (p(idx(u), idx(v)) > 0.0 && !reach[i][v]) {
          reach[i][v] = true;
          stack.push_back(v);
        }
      }
    }
  }
  std::vector<std::vector<std::size_t>> classes;
  std::vector<bool> assigned(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    if (assigned[i]) continue;
    std::vector<std::size_t> cls;
    for (std::size_t j = 0; j < n; ++j) {
      if (reach[i][j] && reach[j][i]) cls.push_back(j);
    }
    for (std::size_t j : cls) assigned[j] = true;
    // Closed iff everything reachable from i lies inside the class.
    bool closed = true;
    for (std::size_t j = 0; j < n && closed; ++j) {
      if (reach[i][j] && !reach[j][i]) closed = false;
    }
    if (closed) classes.push_back(std::move(cls));
  }
  return classes;
}

Vector stationary_linear_solve(const Matrix& p) {
  const Eigen::Index m = p.rows();
  Matrix a(m + 1, m);
  a.topRows(m) = p.transpose() - Matrix::Identity(m, m);
  a.row(m).setOnes();
  Vector b = Vector::Zero(m + 1);
  b[m] = 1.0;
  Vector pi = a.colPivHouseholderQr().solve(b);
  pi = pi.cwiseMax(0.0);
  return pi / pi.sum();
}

std::vector<StationaryState> stationary_candidates(const DynamicsKernel& k) {
  validate_kernel(k);
  const Matrix t = utility_max_transition(k);
  const std::size_t n = k.grid.size();
  std::vector<StationaryState> out;
  for (const auto& cls : recurrent_classes(t)) {
    Matrix sub(idx(cls.size()), idx(cls.size()));
    for (std::size_t a = 0; a < cls.size(); ++a) {
      for (std::size_t b = 0; b < cls.size(); ++b) sub(idx(a), idx(b)) = t(idx(cls[a]), idx(cls[b]));
    }
    const Vector local = stationary_linear_solve(sub);
    StationaryState st;
    st.distribution = Vector::Zero(idx(n));
    for (std::size_t a = 0; a < cls.size(); ++a) st.distribution[idx(cls[a])] = local[idx(a)];
    st.policy = utility_max_policy(k.grid);
    const PopulationState here{k.grid, 0.5, 0.5, st.distribution, st.distribution};
    const PopulationState next = step(here, st.policy, k);
    st.residual = std::max(tv_distance(next.dist_a, here.dist_a), tv_distance(next.dist_b, here.dist_b));
    out.push_back(std::move(st));
  }
  return out;
}

BirthDeathCheck check_birth_death(const DynamicsKernel& k) {
  validate_kernel(k);
  const auto n = static_cast<Eigen::Index>(k.grid.size());
  BirthDeathCheck c;
  c.band_ok = true;
  for (const Matrix* m : {&k.selected, &k.rejected}) {
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        const bool near = std::abs(i - j) <= 1;
        if (near != ((*m)(i, j) > 0.0)) c.band_ok = false;
      }
    }
  }
  c.monotone_ok = true;
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    if (k.selected(i, i + 1) < k.rejected(i, i + 1)) c.monotone_ok = false;
  }
  for (Eigen::Index i = 1; i < n; ++i) {
    if (k.selected(i, i - 1) > k.rejected(i, i - 1)) c.monotone_ok = false;
  }
  c.unique_stationary = c.band_ok && c.monotone_ok;
  return c;
}

Vector birth_death_stationary(const Matrix& p) {
  const Eigen::Index n = p.rows();
  if (p.cols() != n || n < 1) throw ValidationError("birth-death transition must be square and nonempty");
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (std::abs(i - j) > 1 && p(i, j) != 0.0) {
        throw ValidationError(fmt::format("transition not tridiagonal: entry ({},{}) = {}", i, j, p(i, j)));
      }
    }
  }
  Vector pi(n);
  pi[0] = 1.0;
  for (Eigen::Index k = 0; k + 1 < n; ++k) {
    if (!(p(k + 1, k) > 0.0) || !(p(k, k + 1) > 0.0)) {
      throw ValidationError(fmt::format("birth-death neighbour entries between {} and {} must be positive", k, k + 1));
    }
    pi[k + 1] = pi[k] * (p(k, k + 1) / p(k + 1, k));
  }
  return pi / pi.sum();
}

bool check_growth_condition(const DynamicsKernel& k) {
  validate_kernel(k);
  const Vector y = k.grid.as_vector();
  const Vector expected = k.selected * y;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    if (expected[i] < y[i] - 1e-12 * (1.0 + std::abs(y[i]))) return false;
  }
  return true;
}

}  // namespace fairgate
