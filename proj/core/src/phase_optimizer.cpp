// SPDX-License-Identifier: Apache-2.0
#include <irsmimo/phase_optimizer.hpp>

#include "variance_chain.hpp"

#include <cmath>
#include <complex>

namespace irsmimo {

namespace {

constexpr double kSqrt2Pi = 2.5066282746310005024;

using std::complex;

// G_l masked by R2: row l carries j e^{j(theta_l - theta_q)}, column l the
// conjugate pattern, diagonal zero.
CMat masked_derivative(const CMat& r2, const Vec& theta, int l) {
  const Eigen::Index n = r2.rows();
  CMat out = CMat::Zero(n, n);
  const complex<double> j(0.0, 1.0);
  for (Eigen::Index q = 0; q < n; ++q) {
    if (q == l) continue;
    const complex<double> rot = std::exp(j * (theta[l] - theta[q]));
    out(l, q) = j * rot * r2(l, q);
    out(q, l) = -j * std::conj(rot) * r2(q, l);
  }
  return out;
}

struct Objective {
  double value;  // Phi((R - mean)/sqrt(var))
  double mean;
  double var;
  FixedPoint fp;
};

Objective evaluate(const Scenario& scenario, const Vec& theta, double r_nats,
                   const FixedPoint* warm) {
  const Scenario sc = scenario.with_phases(PhaseShifts(theta));
  const EffectiveSpectra sp = sc.spectra();
  SolveOptions opts;
  if (warm) opts.warm_start = *warm;
  FixedPoint fp;
  try {
    fp = solve_canonical(sp, sc.dims, sc.rho_eff, opts);
  } catch (const NonConvergence&) {
    fp = solve_canonical(sp, sc.dims, sc.rho_eff);
  }
  const TableOneQuantities tq = table_quantities(sp, sc.dims, fp, sc.rho_eff);
  const double mean = emi(sp, sc.dims, fp, sc.rho_eff);
  const double var = variance(tq, VarianceVariant::large_irs);
  const double t = (r_nats - mean) / std::sqrt(var);
  return Objective{0.5 * std::erfc(-t / std::sqrt(2.0)), mean, var, fp};
}

}  // namespace

CMat perturbation_matrix(const CMat& t1, const CMat& r2, const Vec& theta, int l) {
  if (l < 0 || l >= theta.size()) {
    throw std::invalid_argument("perturbation index out of range");
  }
  const CMat t1h = hermitian_sqrt(t1);
  return t1h * masked_derivative(r2, theta, l) * t1h;
}

Eigen::Vector3d lemma1_sensitivities(const TableOneQuantities& tq, const FixedPoint& fp,
                                     const SystemDims& dims, double rho, double g_f,
                                     double gamma_s_f) {
  if (detail::sensitivity_determinant(tq, fp, dims, rho) <= 0.0) {
    throw NumericalError("sensitivity system is singular at the fixed point");
  }
  const Eigen::Matrix3d a = detail::sensitivity_matrix(tq, fp, dims, rho);
  const Eigen::Vector3d rhs(0.0, g_f - fp.gbar * gamma_s_f, 0.0);
  return a.partialPivLu().solve(rhs);
}

GradientReport gradient(const Scenario& scenario, const Vec& theta, double r_nats) {
  const int m = scenario.dims.n_tx, l_count = scenario.dims.n_irs;
  if (theta.size() != l_count) {
    throw std::invalid_argument("theta length does not match the IRS size");
  }
  const double rho = scenario.rho_eff;

  const CMat t1h = hermitian_sqrt(scenario.corr.tx_irs);
  const Scenario sc = scenario.with_phases(PhaseShifts(theta));
  const EffectiveSpectra sp = sc.spectra();
  Vec s_vals;
  CMat s_basis;
  hermitian_eigensystem(dressed_irs_matrix(scenario.corr.tx_irs, scenario.corr.rx_irs,
                                           PhaseShifts(theta)),
                        s_vals, s_basis);

  const FixedPoint fp = solve_canonical(sp, scenario.dims, rho);
  const TableOneQuantities tq = table_quantities(sp, scenario.dims, fp, rho);
  const double d = fp.delta, g = fp.g, gb = fp.gbar;
  const Vec qs = (1.0 / d + gb * s_vals.array()).inverse();

  if (detail::sensitivity_determinant(tq, fp, scenario.dims, rho) <= 0.0) {
    throw NumericalError("sensitivity system is singular at the fixed point");
  }
  const Eigen::Matrix3d a = detail::sensitivity_matrix(tq, fp, scenario.dims, rho);
  const auto a_lu = a.partialPivLu();

  const double mean = emi(sp, scenario.dims, fp, rho);
  const double var = variance(tq, VarianceVariant::large_irs);

  GradientReport rep;
  rep.dI.resize(l_count);
  rep.dV.resize(l_count);
  rep.dG.resize(l_count);
  rep.mean_nats = mean;
  rep.var_nats2 = var;

  const Vec theta_wrapped = PhaseShifts(theta).theta();
  for (int l = 0; l < l_count; ++l) {
    const CMat f = t1h * masked_derivative(scenario.corr.rx_irs, theta_wrapped, l) * t1h;
    const Vec fd = (s_basis.adjoint() * f * s_basis).diagonal().real();
    const auto qsa = qs.array();
    const auto sa = s_vals.array();
    const auto fda = fd.array();
    const double g_f = (fda * qsa).sum() / m;
    const double gamma_s_f = (sa * qsa.square() * fda).sum() / m;
    const double eta_s_f = (sa.square() * qsa.cube() * fda).sum() / m;

    const Eigen::Vector3d p = a_lu.solve(Eigen::Vector3d(0.0, g_f - gb * gamma_s_f, 0.0));
    const double dp = p[0], gp = p[1], gbp = p[2];

    rep.dI[l] = gb * (qsa * fda).sum();

    detail::TraceSlopes ts;
    ts.gamma_T = -2.0 * gp * tq.eta_T;
    ts.gamma_TI = -2.0 * gp * tq.eta_TI;
    ts.gamma_S = -2.0 * gbp * tq.eta_S - 2.0 * gb * eta_s_f + 2.0 * dp * tq.eta_SI / (d * d) +
                 2.0 * gamma_s_f;
    ts.gamma_R =
        -2.0 * m * tq.eta_R * (d * gp * gb + d * g * gbp - g * gb * dp) / (l_count * d * d);
    rep.dV[l] = detail::variance_slope(tq, fp, scenario.dims, dp, gp, ts);
  }

  const double t = (r_nats - mean) / std::sqrt(var);
  rep.objective = 0.5 * std::erfc(-t / std::sqrt(2.0));
  const double density = std::exp(-0.5 * t * t) / kSqrt2Pi;
  for (int l = 0; l < l_count; ++l) {
    const double t_slope =
        (-rep.dI[l] * var - 0.5 * (r_nats - mean) * rep.dV[l]) / std::pow(var, 1.5);
    rep.dG[l] = density * t_slope;
  }
  return rep;
}

OptimizeResult optimize(const Scenario& scenario, const PhaseShifts& theta0, double r_nats,
                        const OptimizerConfig& cfg) {
  if (!(cfg.alpha0 > 0.0) || !(cfg.shrink > 0.0 && cfg.shrink < 1.0) ||
      !(cfg.control > 0.0 && cfg.control < 1.0)) {
    throw std::invalid_argument("optimizer configuration out of range");
  }
  Vec theta = theta0.theta();
  OptimizeResult res{PhaseShifts(theta), {}, false, false, 0};

  GradientReport rep = gradient(scenario, theta, r_nats);
  res.trajectory.push_back(rep.objective);

  FixedPoint warm{};
  bool have_warm = false;
  for (int it = 0; it < cfg.max_outer; ++it) {
    const double gnorm = rep.dG.norm();
    if (gnorm < cfg.grad_tol) {
      res.converged = true;
      break;
    }
    const Vec dir = rep.dG / gnorm;

    double alpha = cfg.alpha0;
    bool accepted = false;
    Objective trial{};
    for (int bt = 0; bt < cfg.max_backtrack; ++bt) {
      const Vec cand = theta - alpha * dir;
      trial = evaluate(scenario, cand, r_nats, have_warm ? &warm : nullptr);
      if (rep.objective - trial.value >= alpha * cfg.control * gnorm) {
        theta = PhaseShifts(cand).theta();
        accepted = true;
        break;
      }
      alpha *= cfg.shrink;
    }
    if (!accepted) {
      res.backtracking_exhausted = true;
      break;
    }
    warm = trial.fp;
    have_warm = true;
    res.iterations = it + 1;
    res.trajectory.push_back(trial.value);
    rep = gradient(scenario, theta, r_nats);
  }
  res.theta_star = PhaseShifts(theta);
  return res;
}

}  // namespace irsmimo
