#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

#include "fairgate/dynamics.hpp"

namespace fairgate {

/// Identifier of the draw algorithm below; recorded in every generated file.
inline constexpr std::string_view kGeneratorVersion = "fairgate-rng/1:mt19937_64+u53open+expinv+boxmuller";

/// Seedable source of the few continuous draws the generators need. The
/// transforms from raw 64-bit words are spelled out here (rather than using
/// std:: distributions) so streams are identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on the open interval (0, 1).
  double uniform() { return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Unit-rate exponential, strictly positive.
  double exponential() { return -std::log(uniform()); }
  /// Standard normal (Box-Muller, one value per call).
  double normal();

 private:
  std::mt19937_64 engine_;
};

struct BandKernelParams {
  double q1_up = 0.0;
  double q1_down = 0.0;
  double q0_up = 0.0;
  double q0_down = 0.0;
};

/// Throws ValidationError unless the selected/rejected move probabilities are
/// feasible and selection favours moving up.
void validate_band_params(const BandKernelParams& params);

/// q1_up ~ U(0,1), q1_down ~ U(0, 1-q1_up), q0_up ~ U(0, q1_up),
/// q0_down ~ U(q1_down, 1-q0_up).
BandKernelParams sample_band_params(std::uint64_t seed);

/// Tridiagonal kernel with level-independent up/down probabilities; the
/// impossible move at each boundary row is folded into staying put.
DynamicsKernel band_kernel(const BandKernelParams& params, const QualificationGrid& grid);

/// Every row drawn uniformly from the open simplex (normalized exponentials).
DynamicsKernel random_kernel(std::uint64_t seed, const QualificationGrid& grid);

/// Tridiagonal kernel whose rows are drawn uniformly from the simplex over
/// {stay, up, down} (two entries at the boundary rows). No ordering between
/// the selected and rejected moves is imposed.
DynamicsKernel random_band_kernel(std::uint64_t seed, const QualificationGrid& grid);

/// Adds N(0, sigma^2) noise to each entry, takes absolute values and
/// renormalizes rows. sigma = 0 returns the kernel unchanged.
DynamicsKernel perturb_kernel(const DynamicsKernel& kernel, double sigma, std::uint64_t seed);

}  // namespace fairgate
