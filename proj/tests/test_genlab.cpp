#include "doctest.h"

#include "fairgate/demo.hpp"
#include "fairgate/genlab.hpp"

using namespace fairgate;
using doctest::Approx;

namespace {

void check_stochastic(const Matrix& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) CHECK(std::abs(m.row(i).sum() - 1.0) < 1e-12);
  CHECK(m.minCoeff() >= 0.0);
}

const QualificationGrid kGrid({-1.5, -0.5, 0.5, 1.5});

}  // namespace

TEST_CASE("Rng draws") {
  Rng a(42);
  Rng b(42);
  for (int i = 0; i < 1000; ++i) {
    const double u = a.uniform();
    CHECK(u == b.uniform());
    CHECK(u > 0.0);
    CHECK(u < 1.0);
  }
  Rng c(3);
  double sum = 0.0;
  double sq = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const double z = c.normal();
    sum += z;
    sq += z * z;
  }
  CHECK(std::abs(sum / n) < 0.03);
  CHECK(std::abs(sq / n - 1.0) < 0.05);
}

TEST_CASE("sample_band_params") {
  double mean = 0.0;
  for (std::uint64_t seed = 0; seed < 10000; ++seed) {
    const BandKernelParams p = sample_band_params(seed);
    CHECK_NOTHROW(validate_band_params(p));
    mean += p.q1_up;
  }
  CHECK(std::abs(mean / 10000 - 0.5) < 0.02);

  const BandKernelParams x = sample_band_params(9);
  const BandKernelParams y = sample_band_params(9);
  CHECK(x.q1_up == y.q1_up);
  CHECK(x.q0_down == y.q0_down);

  CHECK_THROWS_AS(validate_band_params({0.1, 0.1, 0.2, 0.4}), ValidationError);  // q1_up < q0_up
  CHECK_THROWS_AS(validate_band_params({0.3, 0.5, 0.2, 0.4}), ValidationError);  // q0_down < q1_down
  CHECK_THROWS_AS(validate_band_params({0.7, 0.4, 0.2, 0.4}), ValidationError);
}

TEST_CASE("band_kernel") {
  const DynamicsKernel k = band_kernel({0.3, 0.1, 0.2, 0.4}, QualificationGrid({-1.0, 1.0, 2.0}));
  CHECK((k.selected.row(1) - Eigen::RowVectorXd{{0.1, 0.6, 0.3}}).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(k.selected(2, 1) == 0.1);
  CHECK(k.selected(2, 2) == Approx(0.9).epsilon(1e-15));
  CHECK(k.selected(0, 0) == Approx(0.7).epsilon(1e-15));
  CHECK(k.rejected(1, 0) == 0.4);
  const BirthDeathCheck c = check_birth_death(k);
  CHECK(c.band_ok);
  CHECK(c.monotone_ok);
  CHECK(c.unique_stationary);

  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const DynamicsKernel b = band_kernel(sample_band_params(seed), kGrid);
    check_stochastic(b.selected);
    check_stochastic(b.rejected);
    CHECK(check_birth_death(b).unique_stationary);
  }
}

TEST_CASE("random_kernel") {
  const DynamicsKernel a = random_kernel(5, kGrid);
  const DynamicsKernel b = random_kernel(5, kGrid);
  CHECK(a.selected == b.selected);
  CHECK(a.rejected == b.rejected);
  CHECK(a.selected != random_kernel(6, kGrid).selected);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const DynamicsKernel k = random_kernel(seed, kGrid);
    check_stochastic(k.selected);
    check_stochastic(k.rejected);
    CHECK(k.selected.minCoeff() > 0.0);
    CHECK(k.rejected.minCoeff() > 0.0);
  }
}

TEST_CASE("random_band_kernel") {
  const DynamicsKernel a = random_band_kernel(5, kGrid);
  CHECK(a.selected == random_band_kernel(5, kGrid).selected);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const DynamicsKernel k = random_band_kernel(seed, kGrid);
    check_stochastic(k.selected);
    check_stochastic(k.rejected);
    CHECK(check_birth_death(k).band_ok);
    CHECK(k.selected(0, 2) == 0.0);
    CHECK(k.rejected(3, 1) == 0.0);
  }
}

TEST_CASE("perturb_kernel") {
  const DynamicsKernel base = demo::three_level_kernel();
  const DynamicsKernel same = perturb_kernel(base, 0.0, 1);
  CHECK(same.selected == base.selected);
  CHECK(same.rejected == base.rejected);

  const double sigma = std::sqrt(0.1);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const DynamicsKernel k = perturb_kernel(base, sigma, seed);
    CHECK_NOTHROW(validate_kernel(k));
    check_stochastic(k.selected);
    check_stochastic(k.rejected);
    CHECK(k.selected != base.selected);
    CHECK(k.selected == perturb_kernel(base, sigma, seed).selected);
  }
  CHECK_THROWS_AS(perturb_kernel(base, -0.1, 1), ValidationError);
}
