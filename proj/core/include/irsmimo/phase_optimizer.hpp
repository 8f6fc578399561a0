// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <irsmimo/outage_dmt.hpp>

#include <vector>

namespace irsmimo {

struct OptimizerConfig {
  double alpha0 = 5e-4;       // initial step size
  double shrink = 0.5;        // backtracking scale c
  double control = 0.5;       // sufficient-decrease control beta
  int max_outer = 500;
  int max_backtrack = 60;
  double grad_tol = 1e-10;
};

struct GradientReport {
  Vec dI;            // dMean/dTheta_l, nats
  Vec dV;            // dVar/dTheta_l
  Vec dG;            // dObjective/dTheta_l
  double objective;  // Phi((R - mean)/sqrt(var)), the outage surrogate
  double mean_nats;
  double var_nats2;
};

struct OptimizeResult {
  PhaseShifts theta_star;
  std::vector<double> trajectory;  // objective per outer iteration, incl. start
  bool converged;                  // gradient below tolerance
  bool backtracking_exhausted;
  int iterations;
};

// Analytic derivative of the phase-dressed IRS matrix with respect to theta_l.
CMat perturbation_matrix(const CMat& t1, const CMat& r2, const Vec& theta, int l);

// Sensitivities (delta', g', gbar') of the fixed point along theta_l, from the
// 3x3 linear system of the implicit-function argument.
Eigen::Vector3d lemma1_sensitivities(const TableOneQuantities& tq, const FixedPoint& fp,
                                     const SystemDims& dims, double rho, double g_f,
                                     double gamma_s_f);

// Full analytic gradient of the outage surrogate at rate threshold r_nats.
GradientReport gradient(const Scenario& scenario, const Vec& theta, double r_nats);

// Projected gradient descent with backtracking line search on the surrogate.
OptimizeResult optimize(const Scenario& scenario, const PhaseShifts& theta0, double r_nats,
                        const OptimizerConfig& cfg = {});

}  // namespace irsmimo
