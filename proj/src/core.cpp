#include "fairgate/core.hpp"

#include <cmath>
#include <fmt/format.h>
#include <utility>

namespace fairgate {

QualificationGrid::QualificationGrid(std::vector<double> values) : values_(std::move(values)) {
  if (values_.size() < 2) {
    throw ValidationError(fmt::format("qualification grid needs at least 2 levels, got {}", values_.size()));
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) throw ValidationError(fmt::format("non-finite qualification at index {}", i));
    if (values_[i] == 0.0) throw ValidationError(fmt::format("zero qualification at index {}", i));
    if (i > 0 && !(values_[i - 1] < values_[i])) {
      throw ValidationError(fmt::format("qualification grid not strictly increasing at index {} ({} >= {})", i,
                                        values_[i - 1], values_[i]));
    }
  }
}

namespace {

void clamp_rounding(Vector& v) {
  for (auto& x : v) {
    if (x < 0.0 && x >= -kProbTol) x = 0.0;
  }
}

void check_distribution(const Vector& d, std::size_t n, const char* name) {
  if (static_cast<std::size_t>(d.size()) != n) {
    throw ValidationError(fmt::format("{} has {} entries, grid has {}", name, d.size(), n));
  }
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    if (!std::isfinite(d[i]) || d[i] < 0.0) {
      throw ValidationError(fmt::format("{} has negative or non-finite entry {} at index {}", name, d[i], i));
    }
  }
  const double sum = d.sum();
  if (std::abs(sum - 1.0) > kProbTol) {
    throw ValidationError(fmt::format("{} distribution sum is {:.17g}, expected 1", name, sum));
  }
}

}  // namespace

PopulationState make_population(QualificationGrid grid, double weight_a, Vector dist_a, Vector dist_b) {
  clamp_rounding(dist_a);
  clamp_rounding(dist_b);
  PopulationState s{std::move(grid), weight_a, 1.0 - weight_a, std::move(dist_a), std::move(dist_b)};
  validate_population(s);
  return s;
}

void validate_population(const PopulationState& s) {
  // Re-run grid validation in case the state was assembled by hand.
  QualificationGrid check(s.grid.values());
  if (!(s.weight_a > 0.0) || !(s.weight_b > 0.0) || s.weight_a > 1.0 || s.weight_b > 1.0) {
    throw ValidationError(fmt::format("group weights must lie in (0,1], got {} and {}", s.weight_a, s.weight_b));
  }
  if (std::abs(s.weight_a + s.weight_b - 1.0) > kProbTol) {
    throw ValidationError(fmt::format("group weight sum is {:.17g}, expected 1", s.weight_a + s.weight_b));
  }
  check_distribution(s.dist_a, s.grid.size(), "dist_a");
  check_distribution(s.dist_b, s.grid.size(), "dist_b");
}

void validate_policy(const SelectionPolicy& p, std::size_t n) {
  for (Group g : {Group::A, Group::B}) {
    const Vector& v = p.select(g);
    if (static_cast<std::size_t>(v.size()) != n) {
      throw ValidationError(fmt::format("policy row {} has {} entries, grid has {}", to_string(g), v.size(), n));
    }
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      if (!(v[i] >= 0.0 && v[i] <= 1.0)) {
        throw ValidationError(fmt::format("policy row {} entry {} = {} outside [0,1]", to_string(g), i, v[i]));
      }
    }
  }
}

SelectionPolicy utility_max_policy(const QualificationGrid& grid) {
  Vector sel = (grid.as_vector().array() > 0.0).cast<double>();
  return {sel, sel};
}

double selection_rate(const PopulationState& s, const SelectionPolicy& p, Group g) {
  return s.dist(g).dot(p.select(g));
}

double disparity(const PopulationState& s, const SelectionPolicy& p) {
  return std::abs(selection_rate(s, p, Group::A) - selection_rate(s, p, Group::B));
}

double utility(const PopulationState& s, const SelectionPolicy& p) {
  const Vector y = s.grid.as_vector();
  return s.weight_a * s.dist_a.cwiseProduct(p.select_a).dot(y) +
         s.weight_b * s.dist_b.cwiseProduct(p.select_b).dot(y);
}

double profit(const PopulationState& s, const SelectionPolicy& p, const Penalty& penalty, double lambda) {
  const double u = utility(s, p);
  if (lambda == 0.0) return u;
  return u - lambda * penalty(disparity(s, p));
}

double positive_mass(const PopulationState& s, Group g) {
  const Vector& d = s.dist(g);
  double m = 0.0;
  for (std::size_t i = 0; i < s.grid.size(); ++i) {
    if (s.grid[i] > 0.0) m += d[static_cast<Eigen::Index>(i)];
  }
  return m;
}

PopulationState swap_groups(const PopulationState& s) {
  return PopulationState{s.grid, s.weight_b, s.weight_a, s.dist_b, s.dist_a};
}

SelectionPolicy swap_groups(const SelectionPolicy& p) { return {p.select_b, p.select_a}; }

}  // namespace fairgate
