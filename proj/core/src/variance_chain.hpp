// SPDX-License-Identifier: Apache-2.0
#pragma once

// Internal helpers shared by the outage/DMT derivative in z and the phase
// gradient: the 3x3 sensitivity system of the fixed point and the chain rule
// turning resolvent-trace slopes into a variance slope.

#include <irsmimo/rmt_core.hpp>

namespace irsmimo::detail {

inline Eigen::Matrix3d sensitivity_matrix(const TableOneQuantities& tq, const FixedPoint& fp,
                                          const SystemDims& dims, double rho) {
  const double z = 1.0 / rho;
  const double d = fp.delta;
  const int m = dims.n_tx, l = dims.n_irs;
  Eigen::Matrix3d a;
  a << z * tq.gamma_RI, m * fp.gbar * tq.gamma_R / l, m * fp.g * tq.gamma_R / l,
      -tq.gamma_SI / (d * d), 1.0, tq.gamma_S,
      0.0, tq.gamma_T, 1.0;
  return a;
}

// Closed-form determinant of the sensitivity system; positive at every
// converged fixed point, which makes the 3x3 solve well posed.
inline double sensitivity_determinant(const TableOneQuantities& tq, const FixedPoint& fp,
                                      const SystemDims& dims, double rho) {
  const double z = 1.0 / rho;
  const double d = fp.delta;
  return z * tq.gamma_RI * tq.Delta_Y +
         dims.n_tx * tq.gamma_R * tq.gamma_SI * tq.gamma_TI / (dims.n_irs * d * d);
}

struct TraceSlopes {
  double gamma_R;
  double gamma_S;
  double gamma_T;
  double gamma_TI;
};

// dV along any scalar parameter, given the slopes of the Table quantities and
// of (delta, g) along that parameter.
inline double variance_slope(const TableOneQuantities& tq, const FixedPoint& fp,
                             const SystemDims& dims, double d_delta, double d_g,
                             const TraceSlopes& ts) {
  const double d = fp.delta, g = fp.g;
  const int m = dims.n_tx, l = dims.n_irs;
  const double dy = tq.Delta_Y;
  const double gamma_prime =
      (m / (l * d * d)) *
          (2.0 * tq.gamma_TI * ts.gamma_TI * tq.gamma_S / dy +
           tq.gamma_TI * tq.gamma_TI * (ts.gamma_S + tq.gamma_S * tq.gamma_S * ts.gamma_T) /
               (dy * dy) +
           2.0 * g * d_g * tq.gamma_T + g * g * ts.gamma_T) -
      (2.0 * m * d_delta / (l * d * d * d)) *
          (tq.gamma_S * tq.gamma_TI * tq.gamma_TI / dy + g * g * tq.gamma_T);
  return (tq.gamma_S * ts.gamma_T + ts.gamma_S * tq.gamma_T) / dy +
         (tq.gamma_R * gamma_prime + ts.gamma_R * tq.Gamma) / tq.Delta_X;
}

}  // namespace irsmimo::detail
