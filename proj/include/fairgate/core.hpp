#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "fairgate/penalty.hpp"

namespace fairgate {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Tolerance on probability sums and allocated masses.
inline constexpr double kProbTol = 1e-12;

/// Raised when an input violates a documented invariant.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when a file cannot be read or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Group { A, B };

inline Group other(Group g) { return g == Group::A ? Group::B : Group::A; }
inline const char* to_string(Group g) { return g == Group::A ? "A" : "B"; }

/// Finite, strictly increasing set of nonzero qualification levels.
class QualificationGrid {
 public:
  QualificationGrid() = default;
  /// Throws ValidationError unless values are strictly increasing, nonzero, n >= 2.
  explicit QualificationGrid(std::vector<double> values);

  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  const std::vector<double>& values() const { return values_; }
  Vector as_vector() const { return Eigen::Map<const Vector>(values_.data(), static_cast<Eigen::Index>(values_.size())); }

  friend bool operator==(const QualificationGrid&, const QualificationGrid&) = default;

 private:
  std::vector<double> values_;
};

struct PopulationState {
  QualificationGrid grid;
  double weight_a = 0.5;
  double weight_b = 0.5;
  Vector dist_a;
  Vector dist_b;

  double weight(Group g) const { return g == Group::A ? weight_a : weight_b; }
  const Vector& dist(Group g) const { return g == Group::A ? dist_a : dist_b; }
};

/// Builds a state with weight_b = 1 - weight_a, clamps entries in [-1e-12, 0) to
/// zero and validates the result.
PopulationState make_population(QualificationGrid grid, double weight_a, Vector dist_a, Vector dist_b);

/// Throws ValidationError naming the first violated invariant.
void validate_population(const PopulationState& state);

/// Per-(group, level) selection probabilities.
struct SelectionPolicy {
  Vector select_a;
  Vector select_b;

  const Vector& select(Group g) const { return g == Group::A ? select_a : select_b; }
  Vector& select(Group g) { return g == Group::A ? select_a : select_b; }
};

void validate_policy(const SelectionPolicy& policy, std::size_t n);

/// Selects every level with y > 0 in both groups.
SelectionPolicy utility_max_policy(const QualificationGrid& grid);

/// Pr(D=1 | C=g).
double selection_rate(const PopulationState& state, const SelectionPolicy& policy, Group g);

/// |Pr(D=1|A) - Pr(D=1|B)|.
double disparity(const PopulationState& state, const SelectionPolicy& policy);

/// E[D Y].
double utility(const PopulationState& state, const SelectionPolicy& policy);

/// E[D Y] - lambda * g(disparity).
double profit(const PopulationState& state, const SelectionPolicy& policy, const Penalty& penalty, double lambda);

/// Pr(Y > 0 | C = g).
double positive_mass(const PopulationState& state, Group g);

/// Exchanges group labels: weights, distributions.
PopulationState swap_groups(const PopulationState& state);
SelectionPolicy swap_groups(const SelectionPolicy& policy);

}  // namespace fairgate
