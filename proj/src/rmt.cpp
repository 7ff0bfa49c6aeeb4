#include "ergodic_mi/rmt.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ergodic_mi/estimators.hpp"
#include "ergodic_mi/kernels.hpp"

namespace ergodic_mi {

double mp_closed_form(double rho) {
  if (!(rho >= 0.0)) throw DimensionError("mp_closed_form: rho must be >= 0");
  if (rho == 0.0) return 0.0;
  const double s = std::sqrt(4.0 * rho + 1.0);
  // Cancellation-free rewrites of log((s+1)/2) and (2 rho + 1 - s) / (2 rho).
  const double first = 2.0 * std::log1p(2.0 * rho / (s + 1.0));
  const double second = 2.0 * rho / (2.0 * rho + 1.0 + s);
  return first - second;
}

double mp_density(double x) {
  if (!(x > 0.0) || x > 4.0) return 0.0;
  return std::sqrt(4.0 / x - 1.0) / (2.0 * std::numbers::pi);
}

double mp_cdf(double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 4.0) return 1.0;
  const double theta = std::asin(std::sqrt(x / 4.0));
  return (2.0 / std::numbers::pi) * (theta + 0.5 * std::sin(2.0 * theta));
}

namespace {

template <class F>
double midpoint_theta(int n, F&& integrand) {
  if (n < 1) throw DimensionError("mp quadrature: need at least one point");
  const double h = 0.5 * std::numbers::pi / n;
  double acc = 0.0;
  for (int j = 0; j < n; ++j) {
    const double theta = (j + 0.5) * h;
    const double c = std::cos(theta);
    acc += integrand(theta) * (4.0 / std::numbers::pi) * c * c;
  }
  return acc * h;
}

}  // namespace

double mp_integral(double rho, int n_quad_points) {
  if (!(rho >= 0.0)) throw DimensionError("mp_integral: rho must be >= 0");
  if (n_quad_points < 64) throw DimensionError("mp_integral: needs at least 64 points");
  return midpoint_theta(n_quad_points, [rho](double theta) {
    const double s = std::sin(theta);
    return std::log1p(4.0 * rho * s * s);
  });
}

double mp_total_mass(int n_quad_points) {
  return midpoint_theta(n_quad_points, [](double) { return 1.0; });
}

ComplexMatrix build_ring_matrix(std::span<const ChannelPair> pairs) {
  if (pairs.size() < 2) throw DimensionError("build_ring_matrix: needs at least two pairs");
  const Index n = pairs[0].f.rows();
  const Index k = pairs[0].f.cols();
  const auto blocks = static_cast<Index>(pairs.size());
  ComplexMatrix r = ComplexMatrix::Zero(blocks * n, blocks * k);
  for (Index i = 0; i < blocks; ++i) {
    const ChannelPair& p = pairs[static_cast<std::size_t>(i)];
    if (p.f.rows() != n || p.f.cols() != k || p.g.rows() != n || p.g.cols() != k) {
      throw DimensionError("build_ring_matrix: mixed block shapes");
    }
    r.block(i * n, i * k, n, k) = p.g;
    if (i > 0) r.block(i * n, (i - 1) * k, n, k) = p.f;
  }
  r.block(0, (blocks - 1) * k, n, k) = pairs[0].f;
  return r;
}

double ring_mi(std::span<const ChannelPair> pairs, double rho) {
  if (!(rho >= 0.0)) throw DimensionError("ring_mi: rho must be >= 0");
  const ComplexMatrix gram = identity_plus_ring_gram(pairs, rho);
  return log_det_pd(gram) / static_cast<double>(gram.rows());
}

double telescoped_pair_log_det(const ChannelPair& prev, const ChannelPair& cur, double rho,
                               const HpdMatrix& w_prevprev) {
  const Index n = cur.f.rows();
  const Index k = cur.f.cols();
  ComplexMatrix b = ComplexMatrix::Zero(2 * n, 2 * k);
  b.block(0, 0, n, k) = prev.g;
  b.block(n, 0, n, k) = cur.f;
  b.block(n, k, n, k) = cur.g;
  ComplexMatrix m = rho * (b * b.adjoint());
  m.block(0, 0, n, n) += rho * (prev.f * w_prevprev.matrix() * prev.f.adjoint());
  m.diagonal().array() += 1.0;
  return log_det_pd((m + m.adjoint()) * 0.5);
}

}  // namespace ergodic_mi
