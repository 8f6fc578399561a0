// SPDX-License-Identifier: Apache-2.0
#include <irsmimo/rmt_core.hpp>

#include <cmath>

namespace irsmimo {

namespace {

double cubic_residual(double g, double b, double c, double d) {
  return ((g + b) * g + c) * g + d;
}

// Unique positive root of g^3 + b g^2 + c g + d by bisection from the first
// sign change. The product of roots is -d > 0 and their sum is -b < 0, so
// exactly one root is positive.
double cubic_bisect(double b, double c, double d) {
  double lo = 0.0;
  double hi = 1.0;
  while (cubic_residual(hi, b, c, d) < 0.0) {
    hi *= 2.0;
    if (hi > 1e150) throw NumericalError("cubic bisection bracket overflow");
  }
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (cubic_residual(mid, b, c, d) < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

FixedPoint solve_canonical(const EffectiveSpectra& spectra, const SystemDims& dims,
                           double rho, const SolveOptions& opts) {
  if (rho <= 0.0) {
    throw std::invalid_argument("solve_canonical requires rho > 0");
  }
  const int m = dims.n_tx, n = dims.n_rx, l = dims.n_irs;
  if (spectra.r.size() != n || spectra.s.size() != l || spectra.t.size() != m) {
    throw std::invalid_argument("spectra lengths do not match SystemDims");
  }
  if (spectra.r.sum() <= 0.0 || spectra.s.sum() <= 0.0 || spectra.t.sum() <= 0.0) {
    throw std::invalid_argument("each spectrum must have positive trace");
  }
  const double z = 1.0 / rho;
  const double r_max = spectra.r.maxCoeff();
  const double t_max = spectra.t.maxCoeff();

  double delta = n * r_max / (l * z);
  double gbar_init = t_max;
  if (opts.warm_start) {
    delta = opts.warm_start->delta;
    gbar_init = opts.warm_start->gbar;
  }

  double g = 0.0, gbar = gbar_init, residual = 0.0;
  int outer = 0, inner_total = 0;
  if (opts.delta_trace) opts.delta_trace->push_back(delta);
  bool done = false;
  for (outer = 1; outer <= opts.max_outer; ++outer) {
    gbar = gbar_init;
    for (int it = 1; it <= opts.max_inner; ++it) {
      ++inner_total;
      g = (spectra.s.array() / (1.0 / delta + gbar * spectra.s.array())).sum() / m;
      const double gbar_new = (spectra.t.array() / (1.0 + g * spectra.t.array())).sum() / m;
      const bool inner_done = std::abs(gbar_new - gbar) < opts.eps * 0.01;
      gbar = gbar_new;
      if (inner_done) break;
    }
    const double delta_new =
        (spectra.r.array() / (z + m * g * gbar * spectra.r.array() / (l * delta))).sum() / l;
    residual = std::abs(delta_new - delta);
    delta = delta_new;
    if (opts.delta_trace) opts.delta_trace->push_back(delta);
    if (residual < opts.eps) {
      done = true;
      break;
    }
  }
  if (!done) {
    throw NonConvergence("canonical fixed point did not converge, residual " +
                         std::to_string(residual));
  }
  if (!(delta > 0.0) || !(g > 0.0) || !(gbar > 0.0)) {
    throw NumericalError("canonical fixed point produced a non-positive iterate");
  }
  return FixedPoint{delta, g, gbar, residual, outer, inner_total};
}

TableOneQuantities table_quantities(const EffectiveSpectra& spectra, const SystemDims& dims,
                                    const FixedPoint& fp, double rho) {
  const int m = dims.n_tx, l = dims.n_irs;
  const double z = 1.0 / rho;
  const double d = fp.delta, g = fp.g, gb = fp.gbar;
  const double c = m * g * gb / (l * d);

  const auto& r = spectra.r.array();
  const auto& s = spectra.s.array();
  const auto& t = spectra.t.array();
  const auto qr = (z + c * r).inverse();
  const auto qs = (1.0 / d + gb * s).inverse();
  const auto qt = (1.0 + g * t).inverse();

  TableOneQuantities q;
  q.gamma_R = (r.square() * qr.square()).sum() / l;
  q.gamma_RI = (r * qr.square()).sum() / l;
  q.gamma_S = (s.square() * qs.square()).sum() / m;
  q.gamma_SI = (s * qs.square()).sum() / m;
  q.gamma_T = (t.square() * qt.square()).sum() / m;
  q.gamma_TI = (t * qt.square()).sum() / m;
  q.eta_R = (r.cube() * qr.cube()).sum() / l;
  q.eta_RI = (r.square() * qr.cube()).sum() / l;
  q.eta_S = (s.cube() * qs.cube()).sum() / m;
  q.eta_SI = (s.square() * qs.cube()).sum() / m;
  q.eta_T = (t.cube() * qt.cube()).sum() / m;
  q.eta_TI = (t.square() * qt.cube()).sum() / m;
  q.psi_T = (t.square() * qt.square().square()).sum() / m;
  q.Delta_Y = 1.0 - q.gamma_S * q.gamma_T;
  if (q.Delta_Y <= 0.0) {
    throw NumericalError("variance ingredients outside their validity region (Delta_Y <= 0)");
  }
  q.Gamma = m / (l * d * d) *
            (q.gamma_TI * q.gamma_TI * q.gamma_S / q.Delta_Y + g * g * q.gamma_T);
  q.Delta_X = 1.0 - q.gamma_R * q.Gamma;
  if (q.Delta_X <= 0.0) {
    throw NumericalError("variance ingredients outside their validity region (Delta_X <= 0)");
  }
  q.Gamma_L = q.Gamma - q.gamma_S * q.psi_T / (l * d * d * q.Delta_Y);
  return q;
}

double emi(const EffectiveSpectra& spectra, const SystemDims& dims, const FixedPoint& fp,
           double rho) {
  const int m = dims.n_tx, l = dims.n_irs;
  const double d = fp.delta, g = fp.g, gb = fp.gbar;
  const double c = rho * m * g * gb / (l * d);
  return (c * spectra.r.array()).log1p().sum() + (d * gb * spectra.s.array()).log1p().sum() +
         (g * spectra.t.array()).log1p().sum() - 2.0 * m * g * gb;
}

double variance(const TableOneQuantities& tq, VarianceVariant variant) {
  const double gamma = variant == VarianceVariant::small_irs ? tq.Gamma_L : tq.Gamma;
  const double arg = 1.0 - tq.gamma_R * gamma;
  if (arg <= 0.0 || tq.Delta_Y <= 0.0) {
    throw NumericalError("variance log argument non-positive");
  }
  return -std::log(arg) - std::log(tq.Delta_Y);
}

GaussianMi gaussian_mi(const EffectiveSpectra& spectra, const SystemDims& dims, double rho,
                       VarianceVariant variant) {
  const FixedPoint fp = solve_canonical(spectra, dims, rho);
  const TableOneQuantities tq = table_quantities(spectra, dims, fp, rho);
  return GaussianMi{emi(spectra, dims, fp, rho), variance(tq, variant), variant};
}

double iid_g(double tau, double rho) {
  if (tau <= 0.0 || rho <= 0.0) {
    throw std::invalid_argument("iid_g requires tau > 0 and rho > 0");
  }
  const double b = 2.0;
  const double c = 1.0 + rho * tau - rho;
  const double d = -rho;

  // Cardano on the depressed cubic y^3 + p y + q with g = y - b/3.
  const double p = c - b * b / 3.0;
  const double q = 2.0 * b * b * b / 27.0 - b * c / 3.0 + d;
  const double disc = 0.25 * q * q + p * p * p / 27.0;
  double root = -1.0;
  if (disc >= 0.0) {
    const double sq = std::sqrt(disc);
    root = std::cbrt(-0.5 * q + sq) + std::cbrt(-0.5 * q - sq) - b / 3.0;
  } else {
    const double rad = std::sqrt(-p / 3.0);
    const double phi = std::acos(std::clamp(-0.5 * q / (rad * rad * rad), -1.0, 1.0));
    for (int k = 0; k < 3; ++k) {
      const double cand =
          2.0 * rad * std::cos((phi + 2.0 * M_PI * k) / 3.0) - b / 3.0;
      if (cand > 0.0 && 1.0 + (1.0 - tau) * cand > 0.0) {
        root = cand;
        break;
      }
    }
  }
  const double scale = std::max({1.0, rho, rho * tau});
  if (root <= 0.0 || 1.0 + (1.0 - tau) * root <= 0.0 ||
      std::abs(cubic_residual(root, b, c, d)) > 1e-10 * scale) {
    root = cubic_bisect(b, c, d);
  }
  return root;
}

double iid_emi(int n, double tau, double rho) {
  const double g = iid_g(tau, rho);
  return 2.0 * n * std::log1p(g) + (n / tau) * std::log1p(tau * rho / ((1.0 + g) * (1.0 + g))) -
         2.0 * n * g / (1.0 + g);
}

double iid_variance(double rho, double g) {
  return std::log(rho * (1.0 + g) * (1.0 + g)) - std::log(rho + 2.0 * g * g * g + 2.0 * g * g);
}

AsymptoticLimit asymptotic_limit(int n, double rho) {
  if (rho <= 0.0) {
    throw std::invalid_argument("asymptotic_limit requires rho > 0");
  }
  const double delta = 0.5 * (std::sqrt(1.0 + 4.0 * rho) - 1.0);
  AsymptoticLimit out;
  out.g_inf = delta;
  out.mean_inf = n * std::log(delta + 1.0 + rho) - n * delta / (1.0 + delta);
  out.var_inf = std::log((1.0 + delta) * (1.0 + delta) / (2.0 * delta + 1.0));
  return out;
}

HighSnrApprox high_snr_approx(int n, int l, double rho, HighSnrRegime regime) {
  if (rho <= 0.0) {
    throw std::invalid_argument("high_snr_approx requires rho > 0");
  }
  const double tau = static_cast<double>(n) / l;
  if (tau >= 1.0) {
    throw std::invalid_argument("high_snr_approx requires N < L");
  }
  HighSnrApprox out;
  out.regime_warning = rho < 100.0;
  const double inv_sqrt_rho = 1.0 / std::sqrt(rho);
  if (regime == HighSnrRegime::small_L) {
    const double a = std::sqrt(1.0 - tau);
    const double b = 1.0 / (2.0 * (1.0 - tau)) - 1.0;
    out.mean_nats = n * (std::log(rho) - 2.0 - (1.0 / tau - 1.0) * std::log(1.0 - tau) +
                         2.0 / a * inv_sqrt_rho);
    out.var_nats2 = 0.5 * std::log(rho / (4.0 * a * a)) +
                    (2.0 * a * a * (1.0 - b) - 1.0) / (2.0 * a * a * a) * inv_sqrt_rho;
  } else {
    out.mean_nats = n * (std::log(rho) - 1.0 - 2.0 * static_cast<double>(n) / l +
                         2.0 * inv_sqrt_rho);
    out.var_nats2 = 0.5 * std::log(rho / 4.0) + n / (2.0 * static_cast<double>(l)) +
                    inv_sqrt_rho;
  }
  return out;
}

}  // namespace irsmimo
