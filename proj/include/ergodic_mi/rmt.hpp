#pragma once

// Large-dimensional limits: the Marchenko-Pastur law of a square i.i.d.
// matrix and the ring-matrix approximation of the mutual information.

#include <span>

#include "ergodic_mi/channel_models.hpp"
#include "ergodic_mi/hpd_cone.hpp"

namespace ergodic_mi {

// Closed form of the integral of log(1 + rho x) against the Marchenko-Pastur
// law on [0, 4]:
//   2 log((sqrt(4 rho + 1) + 1) / 2) - (2 rho + 1 - sqrt(4 rho + 1)) / (2 rho).
// Returns exactly 0 at rho = 0.
double mp_closed_form(double rho);

// Density (2 pi)^{-1} sqrt(4/x - 1) on (0, 4], zero elsewhere.
double mp_density(double x);
// Cumulative distribution, (2/pi)(theta + sin(2 theta)/2) with x = 4 sin^2 theta.
double mp_cdf(double x);

// Midpoint rule in theta for x = 4 sin^2 theta, which turns the integrand into
// log(1 + 4 rho sin^2 theta) (4/pi) cos^2 theta on [0, pi/2].
double mp_integral(double rho, int n_quad_points);
// Same rule applied to the density alone; equals 1 up to rounding.
double mp_total_mass(int n_quad_points);

// (M+1)N x (M+1)K ring matrix from M+1 pairs: G_i on the diagonal, F_{i+1} on
// the first sub-diagonal and F_0 in the top-right corner.
ComplexMatrix build_ring_matrix(std::span<const ChannelPair> pairs);

// (1/((M+1)N)) log det(I + rho R R*) for the ring matrix R.
double ring_mi(std::span<const ChannelPair> pairs, double rho);

// Right-hand side of the two-step telescoping identity:
//   log det(I + diag(V, 0) + rho B B*),  B = [[G_prev, 0], [F, G]],
// with V = rho F_prev W_prevprev F_prev*. Equals xi_n + xi_{n-1}.
double telescoped_pair_log_det(const ChannelPair& prev, const ChannelPair& cur, double rho,
                               const HpdMatrix& w_prevprev);

}  // namespace ergodic_mi
