#include "fairgate/genlab.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <numbers>

namespace fairgate {

double Rng::normal() {
  const double r = std::sqrt(-2.0 * std::log(uniform()));
  return r * std::cos(2.0 * std::numbers::pi * uniform());
}

void validate_band_params(const BandKernelParams& p) {
  for (double v : {p.q1_up, p.q1_down, p.q0_up, p.q0_down}) {
    if (!(v >= 0.0 && v <= 1.0)) throw ValidationError(fmt::format("band probability {} outside [0,1]", v));
  }
  if (p.q1_up + p.q1_down > 1.0) throw ValidationError("band params: q1_up + q1_down > 1");
  if (p.q0_up + p.q0_down > 1.0) throw ValidationError("band params: q0_up + q0_down > 1");
  if (p.q0_down < p.q1_down) throw ValidationError("band params: q0_down < q1_down");
  if (p.q1_up < p.q0_up) throw ValidationError("band params: q1_up < q0_up");
}

BandKernelParams sample_band_params(std::uint64_t seed) {
  Rng rng(seed);
  BandKernelParams p;
  p.q1_up = rng.uniform();
  p.q1_down = rng.uniform(0.0, 1.0 - p.q1_up);
  p.q0_up = rng.uniform(0.0, p.q1_up);
  p.q0_down = rng.uniform(p.q1_down, 1.0 - p.q0_up);
  return p;
}

namespace {

Matrix band_matrix(double up, double down, std::size_t n) {
  const auto m = static_cast<Eigen::Index>(n);
  Matrix q = Matrix::Zero(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    double stay = 1.0;
    if (i + 1 < m) {
      q(i, i + 1) = up;
      stay -= up;
    }
    if (i > 0) {
      q(i, i - 1) = down;
      stay -= down;
    }
    q(i, i) = stay;
  }
  return q;
}

Matrix simplex_rows(Rng& rng, std::size_t n) {
  const auto m = static_cast<Eigen::Index>(n);
  Matrix q(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) q(i, j) = rng.exponential();
    q.row(i) /= q.row(i).sum();
  }
  return q;
}

Matrix tridiagonal_rows(Rng& rng, std::size_t n) {
  const auto m = static_cast<Eigen::Index>(n);
  Matrix q = Matrix::Zero(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = std::max<Eigen::Index>(0, i - 1); j <= std::min(m - 1, i + 1); ++j) q(i, j) = rng.exponential();
    q.row(i) /= q.row(i).sum();
  }
  return q;
}

Matrix perturb(const Matrix& q, double sigma, Rng& rng) {
  Matrix out(q.rows(), q.cols());
  for (Eigen::Index i = 0; i < q.rows(); ++i) {
    double sum = 0.0;
    while (!(sum > 0.0)) {
      for (Eigen::Index j = 0; j < q.cols(); ++j) out(i, j) = std::abs(q(i, j) + sigma * rng.normal());
      sum = out.row(i).sum();
    }
    out.row(i) /= sum;
  }
  return out;
}

}  // namespace

DynamicsKernel band_kernel(const BandKernelParams& params, const QualificationGrid& grid) {
  validate_band_params(params);
  DynamicsKernel k{grid, band_matrix(params.q1_up, params.q1_down, grid.size()),
                   band_matrix(params.q0_up, params.q0_down, grid.size())};
  validate_kernel(k);
  return k;
}

DynamicsKernel random_kernel(std::uint64_t seed, const QualificationGrid& grid) {
  Rng rng(seed);
  Matrix selected = simplex_rows(rng, grid.size());
  Matrix rejected = simplex_rows(rng, grid.size());
  return {grid, std::move(selected), std::move(rejected)};
}

DynamicsKernel random_band_kernel(std::uint64_t seed, const QualificationGrid& grid) {
  Rng rng(seed);
  Matrix selected = tridiagonal_rows(rng, grid.size());
  Matrix rejected = tridiagonal_rows(rng, grid.size());
  return {grid, std::move(selected), std::move(rejected)};
}

DynamicsKernel perturb_kernel(const DynamicsKernel& kernel, double sigma, std::uint64_t seed) {
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
    throw ValidationError(fmt::format("sigma must be finite and >= 0, got {}", sigma));
  }
  validate_kernel(kernel);
  if (sigma == 0.0) return kernel;
  Rng rng(seed);
  Matrix selected = perturb(kernel.selected, sigma, rng);
  Matrix rejected = perturb(kernel.rejected, sigma, rng);
  return {kernel.grid, std::move(selected), std::move(rejected)};
}

}  // namespace fairgate
