// SPDX-License-Identifier: Apache-2.0
#include <irsmimo/outage_dmt.hpp>

#include "variance_chain.hpp"

#include <cmath>

namespace irsmimo {

namespace {

constexpr double kSqrt2 = 1.4142135623730950488;
constexpr double kSqrt2Pi = 2.5066282746310005024;
constexpr double kLnSqrt2Pi = 0.91893853320467274178;

}  // namespace

double norm_cdf(double x) { return 0.5 * std::erfc(-x / kSqrt2); }

double log_norm_cdf(double x) {
  if (x > -36.0) {
    return std::log(norm_cdf(x));
  }
  // Deep lower tail: log of the Mills-ratio expansion of Phi(x).
  const double x2 = x * x;
  const double series = -1.0 / x2 + 3.0 / (x2 * x2) - 15.0 / (x2 * x2 * x2) +
                        105.0 / (x2 * x2 * x2 * x2);
  return -0.5 * x2 - std::log(-x) - kLnSqrt2Pi + std::log1p(series);
}

double norm_cdf_inv(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::invalid_argument("norm_cdf_inv requires p in (0, 1)");
  }
  // Acklam's rational approximation followed by one Halley refinement.
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double p_low = 0.02425;
  double x;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - p_low) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double e = norm_cdf(x) - p;
  const double u = e * kSqrt2Pi * std::exp(0.5 * x * x);
  x -= u / (1.0 + 0.5 * x * u);
  return x;
}

OutageResult outage_probability(double mean_nats, double var_nats2, double rate_nats) {
  if (!(var_nats2 > 0.0)) {
    throw std::invalid_argument("outage_probability requires positive variance");
  }
  const double p = norm_cdf((rate_nats - mean_nats) / std::sqrt(var_nats2));
  return OutageResult{p, rate_nats, mean_nats, var_nats2};
}

double outage_rate(double mean_nats, double var_nats2, double p_out) {
  if (!(var_nats2 > 0.0)) {
    throw std::invalid_argument("outage_rate requires positive variance");
  }
  if (!(p_out > 0.0 && p_out < 1.0)) {
    throw std::invalid_argument("outage_rate requires p_out in (0, 1)");
  }
  return mean_nats + std::sqrt(var_nats2) * norm_cdf_inv(p_out);
}

MiSlopes mi_slopes_in_z(const EffectiveSpectra& spectra, const SystemDims& dims, double rho) {
  const int m = dims.n_tx, n = dims.n_rx, l = dims.n_irs;
  const double z = 1.0 / rho;
  const FixedPoint fp = solve_canonical(spectra, dims, rho);
  const TableOneQuantities tq = table_quantities(spectra, dims, fp, rho);
  const double d = fp.delta, g = fp.g, gb = fp.gbar;

  if (detail::sensitivity_determinant(tq, fp, dims, rho) <= 0.0) {
    throw NumericalError("sensitivity system is singular at the fixed point");
  }
  const Eigen::Matrix3d a = detail::sensitivity_matrix(tq, fp, dims, rho);
  const Eigen::Vector3d rhs(-d * tq.gamma_RI, 0.0, 0.0);
  const Eigen::Vector3d p = a.partialPivLu().solve(rhs);
  const double dp = p[0], gp = p[1], gbp = p[2];

  const double c = m * g * gb / (l * d);
  const double mean_slope =
      -n / z + (z + c * spectra.r.array()).inverse().sum();

  detail::TraceSlopes ts;
  ts.gamma_T = -2.0 * gp * tq.eta_T;
  ts.gamma_TI = -2.0 * gp * tq.eta_TI;
  ts.gamma_S = -2.0 * gbp * tq.eta_S + 2.0 * dp * tq.eta_SI / (d * d);
  ts.gamma_R = -2.0 * m * tq.eta_R * (d * gp * gb + d * g * gbp - g * gb * dp) / (l * d * d) -
               2.0 * tq.eta_RI;
  const double var_slope = detail::variance_slope(tq, fp, dims, dp, gp, ts);

  MiSlopes out;
  out.mean = emi(spectra, dims, fp, rho);
  out.var = variance(tq, VarianceVariant::large_irs);
  out.dmean_dz = mean_slope;
  out.dvar_dz = var_slope;
  out.H = out.mean / std::sqrt(out.var);
  out.dH_dz = (mean_slope * out.var - 0.5 * out.mean * var_slope) / std::pow(out.var, 1.5);
  return out;
}

DmtPoint finite_snr_dmt(double m, double rho, const EffectiveSpectra& spectra,
                        const SystemDims& dims) {
  const int k = std::min({dims.n_irs, dims.n_tx, dims.n_rx});
  if (m < 0.0 || m > k) {
    throw std::invalid_argument("multiplexing gain must lie in [0, k]");
  }
  const MiSlopes sl = mi_slopes_in_z(spectra, dims, rho);
  const double z = 1.0 / rho;
  DmtPoint out;
  out.m = m;
  out.k = k;
  out.H = sl.H;
  out.H_prime = sl.dH_dz;
  if (m == static_cast<double>(k)) {
    out.d = 0.0;
    return out;
  }
  const double x = (m - k) * sl.H / k;
  // The Gaussian density and Phi(x) both underflow in the deep tail; the
  // ratio is formed in log domain.
  out.d = z * (m - k) / (k * kSqrt2Pi) * sl.dH_dz *
          std::exp(-0.5 * x * x - log_norm_cdf(x));
  return out;
}

double dmt_quick_approx(double m, double rho, const EffectiveSpectra& spectra,
                        const SystemDims& dims) {
  const int k = std::min({dims.n_irs, dims.n_tx, dims.n_rx});
  if (m < 0.0 || m > k) {
    throw std::invalid_argument("multiplexing gain must lie in [0, k]");
  }
  const MiSlopes sl = mi_slopes_in_z(spectra, dims, rho);
  const double z = 1.0 / rho;
  return -z * (m - k) * (m - k) * sl.H * sl.dH_dz / (static_cast<double>(k) * k);
}

double irs_efficiency(double mean_at_l, double mean_inf) {
  if (!(mean_inf > 0.0)) {
    throw std::invalid_argument("irs_efficiency requires a positive asymptotic mean");
  }
  return mean_at_l / mean_inf;
}

SizingAnswer min_irs_size(double eta_target, int n, double rho) {
  if (!(eta_target > 0.0 && eta_target < 1.0)) {
    throw std::invalid_argument("eta target must lie in (0, 1)");
  }
  const double mean_inf = asymptotic_limit(n, rho).mean_inf;
  const double goal = eta_target * mean_inf;
  const long cap = 1000000;
  auto mean_at = [&](long l) { return iid_emi(n, static_cast<double>(n) / l, rho); };

  SizingAnswer out;
  out.eta_target = eta_target;
  out.mean_inf = mean_inf;
  if (mean_at(cap) < goal) {
    out.reachable = false;
    out.l_min = cap;
    out.mean_at_l = mean_at(cap);
    return out;
  }
  long lo = 1, hi = cap;
  if (mean_at(lo) >= goal) {
    hi = lo;
  }
  while (hi - lo > 1) {
    const long mid = lo + (hi - lo) / 2;
    if (mean_at(mid) >= goal) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  out.reachable = true;
  out.l_min = hi;
  out.mean_at_l = mean_at(hi);
  return out;
}

}  // namespace irsmimo
