#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "fairgate/core.hpp"
#include "fairgate/penalty.hpp"
#include "fairgate/static_solver.hpp"

namespace fairgate {

/// Time-homogeneous qualification transition law. Row i holds the
/// distribution of the next level given current level i.
struct DynamicsKernel {
  QualificationGrid grid;
  Matrix selected;  // q(. | y', 1)
  Matrix rejected;  // q(. | y', 0)

  const Matrix& matrix(bool select) const { return select ? selected : rejected; }
};

/// Throws ValidationError unless both matrices are n x n, nonnegative and
/// row-stochastic within 1e-12.
void validate_kernel(const DynamicsKernel& kernel);

/// Sum of absolute differences; lies in [0, 2] for probability vectors.
template <typename DerivedA, typename DerivedB>
double tv_distance(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  if (a.size() != b.size()) throw ValidationError("tv_distance: length mismatch");
  return (a - b).template lpNorm<1>();
}

/// Next-step group distributions under `policy`; weights are unchanged.
PopulationState step(const PopulationState& state, const SelectionPolicy& policy, const DynamicsKernel& kernel);

struct StepRecord {
  int t = 0;
  double delta = 0.0;
  double profit = 0.0;
  double utility = 0.0;
  double tv = 0.0;
  SelectionPolicy policy;
  std::optional<PopulationState> state;
};

struct TrajectoryRecord {
  std::vector<StepRecord> steps;
  PopulationState final_state;
  bool converged = false;
};

struct SimulationOptions {
  int t_max = 1000;
  /// Stop once both groups move less than this (total variation) in one step.
  double convergence_tol = 1e-12;
  /// Keep every k-th state in the record; 0 keeps none.
  int keep_state_every = 0;
};

/// Myopic re-optimization: at each step solve the penalized problem on the
/// current state, record it, then advance the population.
TrajectoryRecord simulate(const PopulationState& initial, const DynamicsKernel& kernel, const Penalty& penalty,
                          double lambda, const SimulationOptions& options = {});

struct ContractionInfo {
  double alpha = 0.0;
  double factor = 0.0;
  bool guaranteed = false;
};

/// alpha = smallest kernel entry; factor = 2 (1 - alpha n); guaranteed iff alpha > 1/(2n).
ContractionInfo contraction_factor(const DynamicsKernel& kernel);

struct StationaryState {
  Vector distribution;
  SelectionPolicy policy;
  /// Total variation moved by one step from (distribution, distribution).
  double residual = 0.0;
};

/// Chain followed by both groups under the utility-maximizing policy: rows of
/// positive levels come from `selected`, the rest from `rejected`.
Matrix utility_max_transition(const DynamicsKernel& kernel);

/// Closed communicating classes of the positive-entry graph of `transition`,
/// each as ascending level indices.
std::vector<std::vector<std::size_t>> recurrent_classes(const Matrix& transition);

/// Stationary vector of an irreducible row-stochastic matrix via a direct
/// linear solve of (P^T - I) pi = 0 with the normalization row appended.
Vector stationary_linear_solve(const Matrix& transition);

/// One equal-distribution stationary state per recurrent class of the
/// utility-maximizing chain.
std::vector<StationaryState> stationary_candidates(const DynamicsKernel& kernel);

struct BirthDeathCheck {
  bool band_ok = false;
  bool monotone_ok = false;
  bool unique_stationary = false;
};

BirthDeathCheck check_birth_death(const DynamicsKernel& kernel);

/// Product-formula stationary distribution of a tridiagonal chain. Throws
/// ValidationError if the matrix is not tridiagonal or an off-diagonal
/// neighbour entry is zero.
Vector birth_death_stationary(const Matrix& transition);

/// Whether selection never lowers expected qualification: sum_y y q(y|y',1) >= y'.
bool check_growth_condition(const DynamicsKernel& kernel);

}  // namespace fairgate
