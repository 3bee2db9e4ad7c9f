#include "fairgate/demo.hpp"

#include <cmath>

namespace fairgate::demo {

PopulationState three_level_population() {
  return make_population(QualificationGrid({-2.0, -1.0, 2.0}), 0.5, Vector{{0.3, 0.1, 0.6}},
                         Vector{{0.5, 0.1, 0.4}});
}

DynamicsKernel three_level_kernel() {
  Matrix selected{{0.8, 0.1, 0.1}, {0.8, 0.1, 0.1}, {0.1, 0.1, 0.8}};
  Matrix rejected{{0.8, 0.1, 0.1}, {0.1, 0.1, 0.8}, {0.1, 0.1, 0.8}};
  DynamicsKernel k{QualificationGrid({-2.0, -1.0, 2.0}), std::move(selected), std::move(rejected)};
  validate_kernel(k);
  return k;
}

namespace {

Vector discretized_normal(const std::vector<double>& gpa, double mean, double sd) {
  Vector p(static_cast<Eigen::Index>(gpa.size()));
  for (std::size_t i = 0; i < gpa.size(); ++i) {
    const double z = (gpa[i] - mean) / sd;
    p[static_cast<Eigen::Index>(i)] = std::exp(-0.5 * z * z);
  }
  return p / p.sum();
}

}  // namespace

PopulationState gpa_like_population() {
  std::vector<double> gpa;
  std::vector<double> levels;
  for (int tenths = 15; tenths <= 40; ++tenths) {
    gpa.push_back(tenths / 10.0);
    levels.push_back((tenths * 10 - 295) / 100.0);
  }
  const double weight_a = 17921.0 / (17921.0 + 3485.0);
  return make_population(QualificationGrid(std::move(levels)), weight_a, discretized_normal(gpa, 3.25, 0.40),
                         discretized_normal(gpa, 2.95, 0.45));
}

}  // namespace fairgate::demo
