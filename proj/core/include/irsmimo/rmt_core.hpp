// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <irsmimo/channel_model.hpp>

#include <optional>
#include <vector>

namespace irsmimo {

// Solution of the canonical system in (delta, g, gbar) at z = 1/rho:
//   delta = (1/L) sum_i r_i / (z + M g gbar r_i / (L delta))
//   g     = (1/M) sum_j s_j / (1/delta + gbar s_j)
//   gbar  = (1/M) sum_k t_k / (1 + g t_k)
struct FixedPoint {
  double delta;
  double g;
  double gbar;
  double residual;
  int iterations_outer;
  int iterations_inner;
};

struct SolveOptions {
  double eps = 1e-12;
  int max_outer = 1000;
  int max_inner = 1000;
  std::optional<FixedPoint> warm_start;
  // When set, the outer delta iterates are appended here (monotonicity checks).
  std::vector<double>* delta_trace = nullptr;
};

// Normalized resolvent traces and the variance ingredients built from them.
struct TableOneQuantities {
  double gamma_R, gamma_RI;
  double gamma_S, gamma_SI;
  double gamma_T, gamma_TI;
  double eta_R, eta_RI;
  double eta_S, eta_SI;
  double eta_T, eta_TI;
  double psi_T;
  double Delta_X, Delta_Y;
  double Gamma, Gamma_L;
};

enum class VarianceVariant { large_irs, small_irs };

struct GaussianMi {
  double mean_nats;
  double var_nats2;
  VarianceVariant variant;
};

FixedPoint solve_canonical(const EffectiveSpectra& spectra, const SystemDims& dims,
                           double rho, const SolveOptions& opts = {});

TableOneQuantities table_quantities(const EffectiveSpectra& spectra, const SystemDims& dims,
                                    const FixedPoint& fp, double rho);

// Deterministic-equivalent mean mutual information, in nats.
double emi(const EffectiveSpectra& spectra, const SystemDims& dims, const FixedPoint& fp,
           double rho);

double variance(const TableOneQuantities& tq,
                VarianceVariant variant = VarianceVariant::large_irs);

GaussianMi gaussian_mi(const EffectiveSpectra& spectra, const SystemDims& dims, double rho,
                       VarianceVariant variant = VarianceVariant::large_irs);

// Independent-channel special case (square system, tau = M/L): positive root of
//   g^3 + 2 g^2 + (1 + rho tau - rho) g - rho = 0.
double iid_g(double tau, double rho);

double iid_emi(int n, double tau, double rho);

double iid_variance(double rho, double g);

// Infinite-IRS limit: reduces to a single-hop independent Rayleigh channel.
struct AsymptoticLimit {
  double g_inf;  // positive root of g(1+g) = rho
  double mean_inf;
  double var_inf;
};

AsymptoticLimit asymptotic_limit(int n, double rho);

enum class HighSnrRegime { small_L, large_L };

struct HighSnrApprox {
  double mean_nats;
  double var_nats2;
  bool regime_warning;  // set when rho < 100
};

HighSnrApprox high_snr_approx(int n, int l, double rho, HighSnrRegime regime);

}  // namespace irsmimo
