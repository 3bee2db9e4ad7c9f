#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "fairgate/core.hpp"
#include "fairgate/penalty.hpp"

namespace fairgate {

/// Raised when a threshold is requested for a state with no utility/parity
/// tension (the utility-maximizing policy already has zero disparity).
class DegenerateError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A state whose group labels were exchanged, if needed, so that group A has
/// at least as much positive-qualification mass as group B.
struct OrientedPopulation {
  PopulationState state;
  bool swapped = false;
};

OrientedPopulation normalize_orientation(const PopulationState& state);

struct UtilityMax {
  double u_um = 0.0;
  /// Pr(Y>0|A) - Pr(Y>0|B) after orientation; always >= 0.
  double delta_um = 0.0;
  SelectionPolicy policy;
};

/// Orientation-independent: computed on the normalized state.
UtilityMax utility_max(const PopulationState& state);

/// True when delta_um exceeds the probability tolerance.
bool has_tension(double delta_um);

/// One unit of parity-restoring mass: forgo selecting (y > 0, A) or add
/// selection of (y < 0, B). Each unit lowers disparity by one.
struct ReductionItem {
  double qualification = 0.0;
  std::size_t level = 0;
  Group group = Group::A;
  double unit_cost = 0.0;  // p(c) * |y|
  double capacity = 0.0;   // p(y|c)
};

/// Items sorted by unit cost; ties go to group A first, then ascending
/// qualification. Requires normalized orientation and delta_um > 0.
std::vector<ReductionItem> reduction_items(const PopulationState& state);

/// Minimal convex cost C(Z) of removing Z units of disparity: the greedy
/// fill of reduction items in order, truncated at delta_um.
class CostCurve {
 public:
  struct Breakpoint {
    double mass;
    double cost;
  };

  CostCurve(std::vector<ReductionItem> items, double max_mass);

  const std::vector<ReductionItem>& items() const { return items_; }
  const std::vector<Breakpoint>& breakpoints() const { return breakpoints_; }
  /// Slope of segment k, between breakpoints k and k+1.
  const std::vector<double>& segment_slopes() const { return slopes_; }
  double max_mass() const { return max_mass_; }

  double cost(double mass) const;
  /// Greedy per-item allocation summing to `mass` (clamped to [0, max_mass]).
  std::vector<double> allocate(double mass) const;

 private:
  std::vector<ReductionItem> items_;
  std::vector<Breakpoint> breakpoints_;
  std::vector<double> slopes_;
  double max_mass_;
};

struct ZAllocation {
  double qualification = 0.0;
  std::size_t level = 0;
  Group group = Group::A;  // in the caller's labels
  double mass = 0.0;
};

struct StaticSolution {
  std::vector<ZAllocation> z_allocation;
  double total_mass = 0.0;
  double delta = 0.0;
  double objective = 0.0;
  SelectionPolicy policy;
  bool swapped = false;
  double u_um = 0.0;
  double delta_um = 0.0;
};

/// Best policy under exact demographic parity.
StaticSolution solve_dp_constrained(const PopulationState& state);

/// Maximizes E[DY] - lambda * g(disparity) exactly. Among optima the one with
/// the largest removed mass (smallest disparity) is returned.
StaticSolution solve_penalized(const PopulationState& state, const Penalty& penalty, double lambda);

/// Cheapest unit cost of reducing disparity. Throws DegenerateError when
/// delta_um = 0.
double beta_e(const PopulationState& state);

/// Most expensive unit cost used by the parity-constrained optimum. Throws
/// DegenerateError when delta_um = 0.
double beta_s(const PopulationState& state);

/// beta_e < lambda * g'_-(delta_um), strict. Throws DegenerateError when delta_um = 0.
bool is_effective(const PopulationState& state, const Penalty& penalty, double lambda);

/// beta_s <= lambda * g'_+(0); true when delta_um = 0.
bool is_fully_satisfactory(const PopulationState& state, const Penalty& penalty, double lambda);

/// Infimum of effective lambdas (itself not effective); +inf if g'_-(delta_um) = 0.
double min_lambda_effective(const PopulationState& state, const Penalty& penalty);

/// Smallest fully satisfactory lambda; +inf if g'_+(0) = 0.
double min_lambda_satisfactory(const PopulationState& state, const Penalty& penalty);

struct OracleResult {
  double objective = 0.0;
  double delta = 0.0;
};

/// Brute-force grid search over removed mass {0, step, 2 step, ..., delta_um}.
OracleResult oracle_solve(const PopulationState& state, const Penalty& penalty, double lambda, double step);

/// Structural violations of an optimal policy (empty when consistent).
/// Only levels with positive mass are inspected; tolerance 1e-9.
std::vector<std::string> check_policy_structure(const PopulationState& state, const SelectionPolicy& policy);

}  // namespace fairgate
