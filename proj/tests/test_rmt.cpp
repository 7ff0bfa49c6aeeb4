#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "ergodic_mi/estimators.hpp"
#include "ergodic_mi/rmt.hpp"
#include "test_support.hpp"

using namespace ergodic_mi;
using namespace ergodic_mi::testing;

TEST_CASE("closed form examples") {
  CHECK(mp_closed_form(0.0) == 0.0);
  CHECK(mp_closed_form(1e-8) / 1e-8 == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(std::abs(mp_closed_form(1.0) - 0.580458) <= 1e-6);
  CHECK(std::abs(mp_closed_form(1e6) - (std::log(1e6) - 1.0)) < 2e-3);
  CHECK_THROWS(mp_closed_form(-1.0));
}

TEST_CASE("closed form against an independent Simpson oracle") {
  // x = 4 sin^2 t on [0, pi/2], density (2/pi) * 2 cos^2 t dt.
  for (double rho : {0.1, 1.0, 10.0}) {
    const double oracle = simpson(
        [rho](double t) {
          const double s = std::sin(t);
          return std::log1p(4.0 * rho * s * s) * (4.0 / std::numbers::pi) * std::cos(t) * std::cos(t);
        },
        0.0, std::numbers::pi / 2.0, 20000);
    CHECK(std::abs(mp_closed_form(rho) - oracle) < 1e-10);
    CHECK(std::abs(mp_integral(rho, 512) - mp_closed_form(rho)) < 1e-8);
  }
}

TEST_CASE("closed form shape") {
  std::vector<double> v;
  for (int i = 0; i < 100; ++i) v.push_back(mp_closed_form(0.1 * (i + 1)));
  for (std::size_t i = 1; i < v.size(); ++i) CHECK(v[i] > v[i - 1]);
  for (std::size_t i = 1; i + 1 < v.size(); ++i) CHECK(v[i + 1] - 2.0 * v[i] + v[i - 1] < 0.0);
  CHECK(v.front() >= 0.0);
}

TEST_CASE("quadrature") {
  CHECK(mp_integral(0.0, 64) == 0.0);
  CHECK(std::abs(mp_total_mass(512) - 1.0) < 1e-10);
  CHECK_THROWS(mp_integral(1.0, 32));
  const double rho = 1e6;
  const double e256 = std::abs(mp_integral(rho, 256) - mp_closed_form(rho));
  const double e512 = std::abs(mp_integral(rho, 512) - mp_closed_form(rho));
  CHECK(e512 <= e256 + 1e-14);
}

TEST_CASE("density and cdf") {
  CHECK(mp_cdf(0.0) == 0.0);
  CHECK(mp_cdf(4.0) == 1.0);
  CHECK(mp_density(5.0) == 0.0);
  const double mass = simpson([](double x) { return mp_density(x); }, 1.0, 3.0, 20000);
  CHECK(std::abs(mp_cdf(3.0) - mp_cdf(1.0) - mass) < 1e-9);
}

TEST_CASE("ring matrix structure") {
  Rng rng(1);
  const std::vector<ChannelPair> two{{random_matrix(1, 1, rng), random_matrix(1, 1, rng)},
                                     {random_matrix(1, 1, rng), random_matrix(1, 1, rng)}};
  const ComplexMatrix r = build_ring_matrix(two);
  CHECK(r(0, 0) == two[0].g(0, 0));
  CHECK(r(0, 1) == two[0].f(0, 0));
  CHECK(r(1, 0) == two[1].f(0, 0));
  CHECK(r(1, 1) == two[1].g(0, 0));

  std::vector<ChannelPair> four;
  for (int i = 0; i < 4; ++i) four.push_back({random_matrix(2, 3, rng), random_matrix(2, 3, rng)});
  const ComplexMatrix r4 = build_ring_matrix(four);
  CHECK(r4.rows() == 8);
  CHECK(r4.cols() == 12);
  CHECK((r4.block(0, 9, 2, 3) - four[0].f).norm() == 0.0);
  int nonzero = 0;
  for (Index i = 0; i < 4; ++i) {
    for (Index j = 0; j < 4; ++j) {
      if (r4.block(2 * i, 3 * j, 2, 3).norm() != 0.0) ++nonzero;
    }
  }
  CHECK(nonzero == 8);
  CHECK_THROWS_AS(build_ring_matrix(std::vector<ChannelPair>(1, four[0])), DimensionError);

  CHECK(ring_mi(four, 0.0) == 0.0);
  const ComplexMatrix gram = ComplexMatrix::Identity(8, 8) + 2.0 * r4 * r4.adjoint();
  CHECK(ring_mi(four, 2.0) == doctest::Approx(log_det_oracle(gram) / 8.0).epsilon(1e-12));
}

TEST_CASE("telescoping identity") {
  Rng rng(2);
  for (int i = 0; i < 50; ++i) {
    const Index n = 1 + i % 4;
    const double rho = 0.3 + i;
    const HpdMatrix w0 = random_hpd(n, rng);
    const ChannelPair prev{random_matrix(n, n, rng), random_matrix(n, n, rng)};
    const ChannelPair cur{random_matrix(n, n, rng), random_matrix(n, n, rng)};
    const HpdMatrix w1 = psi_step(prev.f, prev.g, rho, w0);
    const double lhs = xi_increment(cur.f, cur.g, rho, w1) + xi_increment(prev.f, prev.g, rho, w0);
    CHECK(std::abs(lhs - telescoped_pair_log_det(prev, cur, rho, w0)) < 1e-8);
  }
}
