// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <irsmimo/phase_optimizer.hpp>

#include <cmath>

using namespace irsmimo;

namespace {

Scenario correlated_scenario(int m, int n, int l, double mu, double rho) {
  CorrelationSet corr(exponential_correlation(n, mu).cast<std::complex<double>>(),
                      exponential_correlation(l, mu).cast<std::complex<double>>(),
                      exponential_correlation(l, mu).cast<std::complex<double>>(),
                      exponential_correlation(m, mu).cast<std::complex<double>>());
  return Scenario(SystemDims(m, n, l), std::move(corr), PhaseShifts::zeros(l), rho);
}

Vec fixed_theta(int l) {
  Vec theta(l);
  for (int i = 0; i < l; ++i) {
    theta[i] = std::fmod(2.7 * (i + 1) + 0.31 * (i + 1) * (i + 1), 2.0 * M_PI);
  }
  return theta;
}

double objective_at(const Scenario& scenario, const Vec& theta, double r_nats) {
  const Scenario sc = scenario.with_phases(PhaseShifts(theta));
  const auto gm = gaussian_mi(sc.spectra(), sc.dims, sc.rho_eff, VarianceVariant::large_irs);
  return norm_cdf((r_nats - gm.mean_nats) / std::sqrt(gm.var_nats2));
}

}  // namespace

TEST_CASE("perturbation matrix vanishes for identity rx_irs") {
  const CMat t1 = exponential_correlation(5, 0.6).cast<std::complex<double>>();
  const CMat r2 = CMat::Identity(5, 5);
  const Vec theta = fixed_theta(5);
  for (int l = 0; l < 5; ++l) {
    CHECK(perturbation_matrix(t1, r2, theta, l).cwiseAbs().maxCoeff() < 1e-14);
  }
}

TEST_CASE("perturbation matrix is Hermitian and matches finite differences") {
  const CMat t1 = exponential_correlation(6, 0.7).cast<std::complex<double>>();
  const CMat r2 = exponential_correlation(6, 0.5).cast<std::complex<double>>();
  const Vec theta = fixed_theta(6);
  const double h = 1e-6;
  for (int l = 0; l < 6; ++l) {
    const CMat f = perturbation_matrix(t1, r2, theta, l);
    CHECK((f - f.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
    Vec tp = theta, tm = theta;
    tp[l] += h;
    tm[l] -= h;
    const CMat fd = (dressed_irs_matrix(t1, r2, PhaseShifts(tp)) -
                     dressed_irs_matrix(t1, r2, PhaseShifts(tm))) /
                    (2.0 * h);
    CHECK((f - fd).cwiseAbs().maxCoeff() < 1e-6);
  }
}

TEST_CASE("fixed-point sensitivities match a re-solved fixed point") {
  const int m = 4, n = 4, l_count = 8;
  const double mu = 0.8, rho = 5.0;
  const Scenario base = correlated_scenario(m, n, l_count, mu, rho);
  const Vec theta = fixed_theta(l_count);

  const Scenario sc = base.with_phases(PhaseShifts(theta));
  const auto sp = sc.spectra();
  const auto fp = solve_canonical(sp, sc.dims, rho);
  const auto tq = table_quantities(sp, sc.dims, fp, rho);

  // Zero right-hand side gives zero sensitivities.
  const Eigen::Vector3d zero = lemma1_sensitivities(tq, fp, sc.dims, rho, 0.0, 0.0);
  CHECK(zero.norm() == 0.0);

  Vec s_vals;
  CMat s_basis;
  hermitian_eigensystem(dressed_irs_matrix(base.corr.tx_irs, base.corr.rx_irs,
                                           PhaseShifts(theta)),
                        s_vals, s_basis);
  const Vec qs = (1.0 / fp.delta + fp.gbar * s_vals.array()).inverse();

  const double h = 1e-6;
  for (int l : {0, 3, 7}) {
    const CMat f = perturbation_matrix(base.corr.tx_irs, base.corr.rx_irs, theta, l);
    const Vec fd = (s_basis.adjoint() * f * s_basis).diagonal().real();
    const double g_f = (fd.array() * qs.array()).sum() / m;
    const double gamma_s_f = (s_vals.array() * qs.array().square() * fd.array()).sum() / m;
    const Eigen::Vector3d p = lemma1_sensitivities(tq, fp, sc.dims, rho, g_f, gamma_s_f);

    Vec tp = theta, tm = theta;
    tp[l] += h;
    tm[l] -= h;
    const auto fpp = solve_canonical(base.with_phases(PhaseShifts(tp)).spectra(), sc.dims, rho);
    const auto fpm = solve_canonical(base.with_phases(PhaseShifts(tm)).spectra(), sc.dims, rho);
    const Eigen::Vector3d fd3((fpp.delta - fpm.delta) / (2.0 * h), (fpp.g - fpm.g) / (2.0 * h),
                              (fpp.gbar - fpm.gbar) / (2.0 * h));
    for (int i = 0; i < 3; ++i) {
      CHECK(std::abs(p[i] - fd3[i]) <= 1e-5 * std::max(1e-8, std::abs(fd3[i])));
    }
  }
}

TEST_CASE("gradient vanishes for identity correlations") {
  Scenario sc(SystemDims(4, 4, 8), CorrelationSet::identity(SystemDims(4, 4, 8)),
              PhaseShifts::zeros(8), 5.0);
  const auto rep = gradient(sc, fixed_theta(8), 8.0);
  CHECK(rep.dG.cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("gradient matches finite differences and the chain rule") {
  const Scenario base = correlated_scenario(4, 4, 8, 0.8, 5.0);
  const Vec theta = fixed_theta(8);
  // Threshold near the mean keeps the Gaussian density away from the deep
  // tail, where finite differences of the objective drown in rounding noise.
  const auto gm0 =
      gaussian_mi(base.with_phases(PhaseShifts(theta)).spectra(), base.dims, base.rho_eff,
                  VarianceVariant::large_irs);
  const double r_nats = gm0.mean_nats - 0.5 * std::sqrt(gm0.var_nats2);
  const auto rep = gradient(base, theta, r_nats);

  const double h = 1e-6;
  for (int l = 0; l < 8; ++l) {
    Vec tp = theta, tm = theta;
    tp[l] += h;
    tm[l] -= h;
    const double fd = (objective_at(base, tp, r_nats) - objective_at(base, tm, r_nats)) /
                      (2.0 * h);
    if (std::abs(rep.dG[l]) > 1e-10) {
      CHECK(std::abs(rep.dG[l] - fd) <= 1e-4 * std::abs(fd));
    }
    // Chain consistency between (dI, dV) and dG.
    const double t = (r_nats - rep.mean_nats) / std::sqrt(rep.var_nats2);
    const double t_slope = (-rep.dI[l] * rep.var_nats2 -
                            0.5 * (r_nats - rep.mean_nats) * rep.dV[l]) /
                           std::pow(rep.var_nats2, 1.5);
    const double direct = std::exp(-0.5 * t * t) / std::sqrt(2.0 * M_PI) * t_slope;
    CHECK(std::abs(rep.dG[l] - direct) < 1e-12);
  }

  // A uniform phase shift does not change the objective, so the gradient sums
  // to zero.
  CHECK(std::abs(rep.dG.sum()) < 1e-10);
}

TEST_CASE("objective is invariant under phase wrap and global shift") {
  const Scenario base = correlated_scenario(4, 4, 6, 0.7, 4.0);
  const Vec theta = fixed_theta(6);
  const double r_nats = 7.0;
  const double g0 = objective_at(base, theta, r_nats);

  Vec wrapped = theta;
  wrapped[2] += 2.0 * M_PI;
  CHECK(objective_at(base, wrapped, r_nats) == doctest::Approx(g0).epsilon(1e-12));

  CHECK(objective_at(base, theta.array() + 0.77, r_nats) ==
        doctest::Approx(g0).epsilon(1e-12));
}

TEST_CASE("optimizer returns immediately from a stationary start") {
  Scenario sc(SystemDims(4, 4, 8), CorrelationSet::identity(SystemDims(4, 4, 8)),
              PhaseShifts::zeros(8), 5.0);
  const auto res = optimize(sc, PhaseShifts::zeros(8), 8.0);
  CHECK(res.converged);
  CHECK(res.iterations == 0);
  CHECK(res.trajectory.size() == 1);
  CHECK(res.theta_star.theta().isApprox(PhaseShifts::zeros(8).theta()));
}

TEST_CASE("optimizer trajectory is nonincreasing") {
  const Scenario base = correlated_scenario(4, 4, 16, 0.8, 5.0);
  OptimizerConfig cfg;
  cfg.max_outer = 25;
  const auto res = optimize(base, PhaseShifts::uniform_ramp(16), 8.0, cfg);
  REQUIRE(res.trajectory.size() >= 2);
  for (std::size_t i = 1; i < res.trajectory.size(); ++i) {
    CHECK(res.trajectory[i] <= res.trajectory[i - 1]);
  }
}
