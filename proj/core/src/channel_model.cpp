// SPDX-License-Identifier: Apache-2.0
#include <irsmimo/channel_model.hpp>

#include <cmath>

namespace irsmimo {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

void check_hermitian_psd(const CMat& a, const char* name) {
  if (a.rows() != a.cols()) {
    throw std::invalid_argument(std::string(name) + " must be square");
  }
  const double scale = a.cwiseAbs().maxCoeff();
  if ((a - a.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, scale)) {
    throw std::invalid_argument(std::string(name) + " is not Hermitian");
  }
  Eigen::SelfAdjointEigenSolver<CMat> es(a, Eigen::EigenvaluesOnly);
  const double lam_max = es.eigenvalues().maxCoeff();
  if (es.eigenvalues().minCoeff() < -1e-10 * std::max(1.0, lam_max)) {
    throw std::invalid_argument(std::string(name) + " is not positive semi-definite");
  }
}

}  // namespace

SystemDims::SystemDims(int m, int n, int l) : n_tx(m), n_rx(n), n_irs(l) {
  if (m < 1 || n < 1 || l < 1) {
    throw std::invalid_argument("antenna and IRS element counts must be >= 1");
  }
}

CorrelationSet::CorrelationSet(CMat r1, CMat t1, CMat r2, CMat t2)
    : rx_ue(std::move(r1)), tx_irs(std::move(t1)), rx_irs(std::move(r2)), tx_bs(std::move(t2)) {
  check_hermitian_psd(rx_ue, "rx_ue correlation");
  check_hermitian_psd(tx_irs, "tx_irs correlation");
  check_hermitian_psd(rx_irs, "rx_irs correlation");
  check_hermitian_psd(tx_bs, "tx_bs correlation");
  if (tx_irs.rows() != rx_irs.rows()) {
    throw std::invalid_argument("tx_irs and rx_irs must share the IRS dimension");
  }
}

CorrelationSet CorrelationSet::identity(const SystemDims& dims) {
  return CorrelationSet(CMat::Identity(dims.n_rx, dims.n_rx),
                        CMat::Identity(dims.n_irs, dims.n_irs),
                        CMat::Identity(dims.n_irs, dims.n_irs),
                        CMat::Identity(dims.n_tx, dims.n_tx));
}

PhaseShifts::PhaseShifts(Vec theta) : theta_(std::move(theta)) {
  if (theta_.size() < 1) {
    throw std::invalid_argument("phase vector must be non-empty");
  }
  for (Eigen::Index i = 0; i < theta_.size(); ++i) {
    double v = std::fmod(theta_[i], kTwoPi);
    if (v < 0.0) v += kTwoPi;
    theta_[i] = v;
  }
}

PhaseShifts PhaseShifts::zeros(int n_irs) { return PhaseShifts(Vec::Zero(n_irs)); }

PhaseShifts PhaseShifts::uniform_ramp(int n_irs) {
  Vec theta(n_irs);
  for (int l = 0; l < n_irs; ++l) {
    theta[l] = kTwoPi * static_cast<double>(l + 1) / n_irs;
  }
  return PhaseShifts(std::move(theta));
}

CVec PhaseShifts::psi_diagonal() const {
  CVec psi(theta_.size());
  for (Eigen::Index i = 0; i < theta_.size(); ++i) {
    psi[i] = std::complex<double>(std::cos(theta_[i]), std::sin(theta_[i]));
  }
  return psi;
}

void LinkBudget::validate() const {
  if (d_bs_irs <= 0.0 || d_irs_ue <= 0.0) {
    throw std::invalid_argument("link distances must be positive");
  }
  if (alpha_bs_irs <= 0.0 || alpha_irs_ue <= 0.0) {
    throw std::invalid_argument("path loss exponents must be positive");
  }
}

Mat exponential_correlation(int n, double mu) {
  if (n < 1) {
    throw std::invalid_argument("correlation dimension must be >= 1");
  }
  if (mu < 0.0 || mu >= 1.0) {
    throw std::invalid_argument("exponential correlation requires 0 <= mu < 1");
  }
  Mat c(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      c(i, j) = std::pow(mu, std::abs(i - j));
    }
  }
  return c;
}

double path_loss(double d_meters, double alpha, double c0_db) {
  if (d_meters <= 0.0) {
    throw std::invalid_argument("path loss distance must be positive");
  }
  return db_to_linear(c0_db) * std::pow(d_meters, -alpha);
}

double effective_snr(const LinkBudget& budget, const SystemDims& dims) {
  budget.validate();
  const double p_lin = dbm_to_mw(budget.p_dbm);
  const double sigma2_lin = dbm_to_mw(budget.sigma2_dbm);
  const double gain1 = path_loss(budget.d_bs_irs, budget.alpha_bs_irs, budget.c0_db);
  const double gain2 = path_loss(budget.d_irs_ue, budget.alpha_irs_ue, budget.c0_db);
  return p_lin / (dims.n_tx * sigma2_lin) * gain1 * gain2;
}

CMat hermitian_sqrt(const CMat& a) {
  Eigen::SelfAdjointEigenSolver<CMat> es(a);
  if (es.info() != Eigen::Success) {
    throw NumericalError("eigendecomposition failed in hermitian_sqrt");
  }
  Vec w = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * w.asDiagonal() * es.eigenvectors().adjoint();
}

CMat dressed_irs_matrix(const CMat& t1, const CMat& r2, const PhaseShifts& phases) {
  const CMat t1h = hermitian_sqrt(t1);
  const CVec psi = phases.psi_diagonal();
  const CMat inner = psi.asDiagonal() * r2 * psi.asDiagonal().toDenseMatrix().adjoint();
  return t1h * inner * t1h;
}

Vec hermitian_eigenvalues(const CMat& a) {
  Eigen::SelfAdjointEigenSolver<CMat> es(a, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) {
    throw NumericalError("Hermitian eigen-solve failed; matrix may be ill-conditioned");
  }
  // Eigen returns ascending order; downstream wants descending.
  return es.eigenvalues().reverse().cwiseMax(0.0);
}

void hermitian_eigensystem(const CMat& a, Vec& values, CMat& vectors) {
  Eigen::SelfAdjointEigenSolver<CMat> es(a);
  if (es.info() != Eigen::Success) {
    throw NumericalError("Hermitian eigen-solve failed; matrix may be ill-conditioned");
  }
  values = es.eigenvalues().reverse().cwiseMax(0.0);
  vectors = es.eigenvectors().rowwise().reverse();
}

EffectiveSpectra effective_spectra(const SystemDims& dims, const CorrelationSet& corr,
                                   const PhaseShifts& phases, double rho_eff) {
  if (corr.rx_ue.rows() != dims.n_rx || corr.tx_bs.rows() != dims.n_tx ||
      corr.tx_irs.rows() != dims.n_irs || phases.size() != dims.n_irs) {
    throw std::invalid_argument("correlation/phase dimensions do not match SystemDims");
  }
  EffectiveSpectra out;
  out.r = hermitian_eigenvalues(corr.rx_ue);
  out.t = hermitian_eigenvalues(corr.tx_bs);
  out.s = hermitian_eigenvalues(dressed_irs_matrix(corr.tx_irs, corr.rx_irs, phases));
  out.rho_eff = rho_eff;
  return out;
}

EffectiveSpectra EffectiveSpectra::iid(const SystemDims& dims, double rho) {
  EffectiveSpectra out;
  out.r = Vec::Ones(dims.n_rx);
  out.s = Vec::Ones(dims.n_irs);
  out.t = Vec::Ones(dims.n_tx);
  out.rho_eff = rho;
  return out;
}

Scenario::Scenario(SystemDims d, CorrelationSet c, PhaseShifts p, double rho)
    : dims(d), corr(std::move(c)), phases(std::move(p)), rho_eff(rho) {
  // Zero is allowed so the sampler can exercise the degenerate case; the
  // deterministic-equivalent solver separately requires rho > 0.
  if (rho_eff < 0.0) {
    throw std::invalid_argument("effective SNR must be nonnegative");
  }
}

EffectiveSpectra Scenario::spectra() const {
  return effective_spectra(dims, corr, phases, rho_eff);
}

Scenario Scenario::with_phases(const PhaseShifts& p) const {
  return Scenario(dims, corr, p, rho_eff);
}

}  // namespace irsmimo
