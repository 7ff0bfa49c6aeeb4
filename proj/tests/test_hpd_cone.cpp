#include <doctest.h>

#include <cmath>

#include "ergodic_mi/hpd_cone.hpp"
#include "test_support.hpp"

using namespace ergodic_mi;
using namespace ergodic_mi::testing;

namespace {

ComplexMatrix diag(std::initializer_list<double> d) {
  ComplexMatrix m = ComplexMatrix::Zero(static_cast<Index>(d.size()), static_cast<Index>(d.size()));
  Index i = 0;
  for (double x : d) m(i, i) = x, ++i;
  return m;
}

ComplexMatrix random_invertible(Index k, Rng& rng) {
  ComplexMatrix a = random_matrix(k, k, rng);
  a.diagonal().array() += 2.0;
  return a;
}

}  // namespace

TEST_CASE("HpdMatrix validates definiteness") {
  CHECK_NOTHROW(HpdMatrix::strict(diag({1.0, 2.0})));
  CHECK_THROWS_AS(HpdMatrix::strict(diag({1.0, -1.0})), NotPositiveDefinite);
  CHECK_THROWS_AS(HpdMatrix::strict(diag({1.0, 0.0})), NotPositiveDefinite);
  CHECK_NOTHROW(HpdMatrix::semidefinite(diag({1.0, 0.0})));
  CHECK_THROWS_AS(HpdMatrix::semidefinite(diag({1.0, -1e-3})), NotPositiveDefinite);

  ComplexMatrix asym = diag({1.0, 1.0});
  asym(0, 1) = 0.5;
  CHECK_THROWS_AS(HpdMatrix::strict(asym), DimensionError);
  CHECK_THROWS_AS(HpdMatrix::strict(ComplexMatrix::Zero(2, 3)), DimensionError);

  ComplexMatrix bad = diag({1.0, 1.0});
  bad(1, 1) = std::nan("");
  CHECK_THROWS_AS(HpdMatrix::strict(bad), DimensionError);
}

TEST_CASE("hermitize absorbs rounding asymmetry") {
  ComplexMatrix m = diag({2.0, 3.0});
  m(0, 1) = Complex(1.0, 1e-14);
  m(1, 0) = Complex(1.0, 0.0);
  const ComplexMatrix h = hermitize(m);
  CHECK(h(0, 1) == std::conj(h(1, 0)));
}

TEST_CASE("geodesic distance examples") {
  Rng rng(1);
  const HpdMatrix x = random_hpd(3, rng);
  CHECK(geodesic_distance(x, x) < 1e-12);
  CHECK(geodesic_distance(HpdMatrix::strict(diag({1.0})), HpdMatrix::strict(diag({std::exp(2.0)}))) ==
        doctest::Approx(2.0).epsilon(1e-14));
  CHECK(geodesic_distance(HpdMatrix::scaled_identity(2, std::exp(1.0)), HpdMatrix::identity(2)) ==
        doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
  CHECK_THROWS_AS(geodesic_distance(HpdMatrix::identity(2), HpdMatrix::identity(3)), DimensionError);
}

TEST_CASE("geodesic distance invariances") {
  Rng rng(2);
  for (int i = 0; i < 500; ++i) {
    const Index k = 1 + i % 4;
    const HpdMatrix x = random_hpd(k, rng);
    const HpdMatrix y = random_hpd(k, rng);
    const double d = geodesic_distance(x, y);
    CHECK(geodesic_distance(y, x) == doctest::Approx(d).epsilon(1e-10));

    const ComplexMatrix a = random_invertible(k, rng);
    const double dc = geodesic_distance(HpdMatrix::strict(a * x.matrix() * a.adjoint()),
                                        HpdMatrix::strict(a * y.matrix() * a.adjoint()));
    CHECK(std::abs(dc - d) <= 1e-8 * (1.0 + d));

    const double di = geodesic_distance(HpdMatrix::strict(x.matrix().inverse()),
                                        HpdMatrix::strict(y.matrix().inverse()));
    CHECK(std::abs(di - d) <= 1e-8 * (1.0 + d));

    CHECK(std::abs(geodesic_oracle(x.matrix(), y.matrix()) - d) <= 1e-8);
  }
}

TEST_CASE("shift contraction") {
  Rng rng(3);
  for (int i = 0; i < 300; ++i) {
    const Index k = 1 + i % 4;
    const HpdMatrix x = random_hpd(k, rng);
    const HpdMatrix y = random_hpd(k, rng);
    const ComplexMatrix s = random_hpd_matrix(k, rng, 0.01);
    const double m = std::max(spectral_norm(x.matrix()), spectral_norm(y.matrix()));
    const double smin = extreme_eigenvalues_hermitian(s).min;
    const double lhs =
        geodesic_distance(HpdMatrix::strict(x.matrix() + s), HpdMatrix::strict(y.matrix() + s));
    CHECK(lhs <= m / (m + smin) * geodesic_distance(x, y) + 1e-9);
  }
}

TEST_CASE("log_det_hpd") {
  CHECK(log_det_hpd(HpdMatrix::identity(4)) == 0.0);
  CHECK(log_det_hpd(HpdMatrix::strict(diag({2.0, 3.0}))) == doctest::Approx(std::log(6.0)).epsilon(1e-15));
  Rng rng(4);
  for (int i = 0; i < 50; ++i) {
    const HpdMatrix x = random_hpd(1 + i % 5, rng);
    CHECK(std::abs(log_det_hpd(x) - log_det_oracle(x.matrix())) <= 1e-12);
  }
  CHECK_THROWS_AS(log_det_pd(diag({1.0, -2.0})), NotPositiveDefinite);
}

TEST_CASE("orthogonal projector") {
  ComplexMatrix e1 = ComplexMatrix::Zero(3, 1);
  e1(0, 0) = 1.0;
  CHECK((orthogonal_projector(e1) - diag({1.0, 0.0, 0.0})).norm() < 1e-14);

  ComplexMatrix v(2, 1);
  v << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  CHECK((orthogonal_projector(v) - ComplexMatrix::Constant(2, 2, 0.5)).norm() < 1e-14);

  Rng rng(5);
  for (int i = 0; i < 50; ++i) {
    const ComplexMatrix a = random_matrix(4, 1 + i % 3, rng);
    const ComplexMatrix p = orthogonal_projector(a);
    CHECK((p * p - p).norm() < 1e-12);
    CHECK((p.adjoint() - p).norm() < 1e-12);
    CHECK((p * a - a).norm() < 1e-12 * a.norm());
    const ComplexMatrix direct = a * (a.adjoint() * a).inverse() * a.adjoint();
    CHECK((p - direct).norm() < 1e-10);
  }

  ComplexMatrix rank1(3, 2);
  rank1.col(0) = random_matrix(3, 1, rng);
  rank1.col(1) = 2.0 * rank1.col(0);
  CHECK_THROWS_AS(orthogonal_projector(rank1), RankDeficient);
  CHECK_FALSE(has_full_column_rank(rank1));
  CHECK(has_full_column_rank(random_matrix(3, 2, rng)));
}

TEST_CASE("hermitian square root") {
  CHECK((hermitian_sqrt(HpdMatrix::identity(3)).matrix() - ComplexMatrix::Identity(3, 3)).norm() < 1e-14);
  CHECK((hermitian_sqrt(HpdMatrix::strict(diag({4.0, 9.0}))).matrix() - diag({2.0, 3.0})).norm() < 1e-14);
  Rng rng(6);
  for (int i = 0; i < 50; ++i) {
    // Rank-deficient PSD input.
    const ComplexMatrix b = random_matrix(4, 2, rng);
    const HpdMatrix z = HpdMatrix::semidefinite(b * b.adjoint());
    const ComplexMatrix s = hermitian_sqrt(z).matrix();
    CHECK((s * s - z.matrix()).norm() <= 1e-10 * z.matrix().norm());
    CHECK(extreme_eigenvalues_hermitian(s).min >= -1e-12);
  }
}

TEST_CASE("extreme eigenvalues and spectral norm") {
  const EigenRange id = extreme_eigenvalues(HpdMatrix::identity(3));
  CHECK(id.min == doctest::Approx(1.0));
  CHECK(id.max == doctest::Approx(1.0));
  const EigenRange d = extreme_eigenvalues(HpdMatrix::strict(diag({0.5, 2.0})));
  CHECK(d.min == doctest::Approx(0.5));
  CHECK(d.max == doctest::Approx(2.0));

  Rng rng(7);
  for (int i = 0; i < 50; ++i) {
    const ComplexMatrix a = random_matrix(4, 4, rng);
    const ComplexMatrix h = (a + a.adjoint()) * 0.5;
    Eigen::ComplexEigenSolver<ComplexMatrix> es(h);
    const auto ev = es.eigenvalues().real();
    const EigenRange r = extreme_eigenvalues_hermitian(h);
    CHECK(std::abs(r.min - ev.minCoeff()) < 1e-12);
    CHECK(std::abs(r.max - ev.maxCoeff()) < 1e-12);

    const HpdMatrix p = random_hpd(3, rng);
    CHECK(std::abs(extreme_eigenvalues(p).max - spectral_norm(p.matrix())) < 1e-12);

    const ComplexMatrix rect = random_matrix(3, 2, rng);
    const double oracle =
        std::sqrt(extreme_eigenvalues_hermitian(rect.adjoint() * rect).max);
    CHECK(std::abs(spectral_norm(rect) - oracle) < 1e-12);
  }
}
