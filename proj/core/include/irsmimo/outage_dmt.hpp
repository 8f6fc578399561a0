// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <irsmimo/rmt_core.hpp>

namespace irsmimo {

// Standard normal CDF, complementary-form stable in both tails.
double norm_cdf(double x);

// log Phi(x), usable arbitrarily deep in the lower tail.
double log_norm_cdf(double x);

// Inverse standard normal CDF.
double norm_cdf_inv(double p);

struct OutageResult {
  double p_out;
  double rate_threshold_nats;
  double mean_nats;
  double var_nats2;
};

OutageResult outage_probability(double mean_nats, double var_nats2, double rate_nats);

double outage_rate(double mean_nats, double var_nats2, double p_out);

struct DmtPoint {
  double m;        // multiplexing gain in [0, k]
  double d;        // diversity estimate
  int k;           // min(L, M, N)
  double H;        // mean / sqrt(var) at z = 1/rho
  double H_prime;  // dH/dz
};

// Finite-SNR diversity estimate -d log P_out / d log rho evaluated in closed
// form from the Gaussian characterization and its z-derivative.
DmtPoint finite_snr_dmt(double m, double rho, const EffectiveSpectra& spectra,
                        const SystemDims& dims);

// Quadratic small-outage approximation of the same quantity.
double dmt_quick_approx(double m, double rho, const EffectiveSpectra& spectra,
                        const SystemDims& dims);

double irs_efficiency(double mean_at_l, double mean_inf);

struct SizingAnswer {
  double eta_target;
  long l_min;
  double mean_at_l;
  double mean_inf;
  bool reachable;
};

// Smallest IRS size whose independent-channel mean reaches eta times the
// infinite-IRS mean. Monotone bisection over L, search capped at 10^6.
SizingAnswer min_irs_size(double eta_target, int n, double rho);

// d(mean / sqrt(var)) / dz and the underlying mean/variance derivatives,
// shared between the two DMT evaluators.
struct MiSlopes {
  double mean;
  double var;
  double dmean_dz;
  double dvar_dz;
  double H;
  double dH_dz;
};

MiSlopes mi_slopes_in_z(const EffectiveSpectra& spectra, const SystemDims& dims, double rho);

}  // namespace irsmimo
