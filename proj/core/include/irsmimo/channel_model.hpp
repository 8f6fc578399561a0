// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <irsmimo/common.hpp>

namespace irsmimo {

// Antenna / IRS element counts. M transmit antennas at the basestation,
// N receive antennas at the UE, L reflecting elements.
struct SystemDims {
  int n_tx;   // M
  int n_rx;   // N
  int n_irs;  // L

  SystemDims(int m, int n, int l);

  double tau() const { return static_cast<double>(n_tx) / n_irs; }
};

// The four one-sided correlation matrices of the cascaded Rayleigh model.
// rx_ue is N x N, tx_irs and rx_irs are L x L, tx_bs is M x M.
struct CorrelationSet {
  CMat rx_ue;   // receive correlation at the UE
  CMat tx_irs;  // transmit correlation of the IRS-UE hop, seen at the IRS
  CMat rx_irs;  // receive correlation of the BS-IRS hop, seen at the IRS
  CMat tx_bs;   // transmit correlation at the BS

  CorrelationSet(CMat r1, CMat t1, CMat r2, CMat t2);

  static CorrelationSet identity(const SystemDims& dims);
};

// IRS phase configuration. Angles are wrapped to [0, 2*pi) at construction.
class PhaseShifts {
 public:
  explicit PhaseShifts(Vec theta);

  static PhaseShifts zeros(int n_irs);
  // theta_l = 2*pi*l/L for l = 1..L, a common deterministic initializer.
  static PhaseShifts uniform_ramp(int n_irs);

  const Vec& theta() const { return theta_; }
  int size() const { return static_cast<int>(theta_.size()); }
  CVec psi_diagonal() const;  // e^{j theta_l}

 private:
  Vec theta_;
};

// Transmit power, noise power and the two-hop path-loss geometry.
struct LinkBudget {
  double p_dbm;
  double sigma2_dbm;
  double d_bs_irs;      // meters
  double d_irs_ue;      // meters
  double alpha_bs_irs;  // path loss exponent, BS-IRS hop
  double alpha_irs_ue;  // path loss exponent, IRS-UE hop
  double c0_db;         // reference path loss at 1 m

  void validate() const;
};

// Eigenvalues of the three effective correlation matrices, sorted descending,
// plus the effective SNR. Everything downstream is a function of these.
struct EffectiveSpectra {
  Vec r;  // length N, eigenvalues of rx_ue
  Vec s;  // length L, eigenvalues of the phase-dressed IRS matrix
  Vec t;  // length M, eigenvalues of tx_bs
  double rho_eff;

  static EffectiveSpectra iid(const SystemDims& dims, double rho);
};

// Full statistical-CSI description of one link.
struct Scenario {
  SystemDims dims;
  CorrelationSet corr;
  PhaseShifts phases;
  double rho_eff;

  Scenario(SystemDims d, CorrelationSet c, PhaseShifts p, double rho);

  EffectiveSpectra spectra() const;
  Scenario with_phases(const PhaseShifts& p) const;
};

// Exponential correlation model: entry (i, j) = mu^|i-j|.
Mat exponential_correlation(int n, double mu);

// Distance-dependent path loss C0 * (d / 1 m)^(-alpha), linear gain.
double path_loss(double d_meters, double alpha, double c0_db);

// rho_eff = P / (M sigma^2) times both hop gains.
double effective_snr(const LinkBudget& budget, const SystemDims& dims);

// Hermitian square root via eigendecomposition with negative clipping.
CMat hermitian_sqrt(const CMat& a);

// The phase-dressed IRS correlation T1^{1/2} Psi R2 Psi^H T1^{1/2}.
CMat dressed_irs_matrix(const CMat& t1, const CMat& r2, const PhaseShifts& phases);

// Sorted-descending eigenvalues of a Hermitian matrix, clipped at zero.
Vec hermitian_eigenvalues(const CMat& a);

// Eigenvalues and matching eigenvectors, both ordered by descending eigenvalue.
void hermitian_eigensystem(const CMat& a, Vec& values, CMat& vectors);

EffectiveSpectra effective_spectra(const SystemDims& dims, const CorrelationSet& corr,
                                   const PhaseShifts& phases, double rho_eff);

}  // namespace irsmimo
