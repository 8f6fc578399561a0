// SPDX-License-Identifier: Apache-2.0
#include <irsmimo/monte_carlo.hpp>

#include <irsmimo/philox.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

namespace irsmimo {

namespace {

// Sequential view over the per-sample Philox substream. Sample `index` owns
// the counter plane counter_hi = index; blocks are consumed in order.
class NormalStream {
 public:
  NormalStream(const Philox4x32& gen, std::uint64_t index)
      : gen_(gen), index_(index) {}

  double next() {
    if (!have_spare_) {
      const auto block = gen_(block_++, index_);
      philox_normal_pair(block, current_, spare_);
      have_spare_ = true;
      return current_;
    }
    have_spare_ = false;
    return spare_;
  }

 private:
  const Philox4x32& gen_;
  std::uint64_t index_;
  std::uint64_t block_ = 0;
  double current_ = 0.0, spare_ = 0.0;
  bool have_spare_ = false;
};

void fill_gaussian(CMat& m, NormalStream& stream, double scale) {
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      const double re = stream.next();
      const double im = stream.next();
      m(r, c) = std::complex<double>(re * scale, im * scale);
    }
  }
}

double hermitian_logdet(const CMat& gram) {
  Eigen::LLT<CMat> llt(gram);
  if (llt.info() != Eigen::Success) {
    // One retry after explicit symmetrization; rounding can push the Gram
    // matrix marginally off Hermitian.
    const CMat sym = 0.5 * (gram + gram.adjoint());
    llt.compute(sym);
    if (llt.info() != Eigen::Success) {
      throw NumericalError("Cholesky factorization of the MI Gram matrix failed");
    }
  }
  double acc = 0.0;
  const auto& l = llt.matrixLLT();
  for (Eigen::Index i = 0; i < l.rows(); ++i) {
    acc += 2.0 * std::log(l(i, i).real());
  }
  return acc;
}

}  // namespace

MiSampler::MiSampler(const Scenario& scenario)
    : m_(scenario.dims.n_tx),
      n_(scenario.dims.n_rx),
      l_(scenario.dims.n_irs),
      rho_eff_(scenario.rho_eff) {
  r1_sqrt_ = hermitian_sqrt(scenario.corr.rx_ue);
  t2_sqrt_ = hermitian_sqrt(scenario.corr.tx_bs);
  const CVec psi = scenario.phases.psi_diagonal();
  bridge_ = hermitian_sqrt(scenario.corr.tx_irs) * psi.asDiagonal() *
            hermitian_sqrt(scenario.corr.rx_irs);
}

double MiSampler::draw(std::uint64_t seed, std::uint64_t index) const {
  const Philox4x32 gen(seed);
  NormalStream stream(gen, index);

  CMat x(n_, l_);
  fill_gaussian(x, stream, 1.0 / std::sqrt(2.0 * l_));
  CMat y(l_, m_);
  fill_gaussian(y, stream, 1.0 / std::sqrt(2.0 * m_));

  const CMat h = r1_sqrt_ * x * bridge_ * y * t2_sqrt_;
  const CMat gram = CMat::Identity(n_, n_) + rho_eff_ * (h * h.adjoint());
  return hermitian_logdet(gram);
}

std::vector<double> MiSampler::draw_many(const SamplerSpec& spec) const {
  if (spec.n_samples < 1) {
    throw std::invalid_argument("n_samples must be >= 1");
  }
  std::vector<double> out(static_cast<std::size_t>(spec.n_samples));
  const int n_threads = std::max(1, spec.n_streams);
  if (n_threads == 1) {
    for (std::int64_t i = 0; i < spec.n_samples; ++i) {
      out[static_cast<std::size_t>(i)] = draw(spec.seed, static_cast<std::uint64_t>(i));
    }
    return out;
  }
  std::vector<std::thread> workers;
  workers.reserve(n_threads);
  for (int w = 0; w < n_threads; ++w) {
    workers.emplace_back([&, w] {
      for (std::int64_t i = w; i < spec.n_samples; i += n_threads) {
        out[static_cast<std::size_t>(i)] = draw(spec.seed, static_cast<std::uint64_t>(i));
      }
    });
  }
  for (auto& t : workers) t.join();
  return out;
}

EmpiricalStats MiSampler::estimate(const SamplerSpec& spec,
                                   const std::vector<double>& thresholds_nats) const {
  std::vector<double> samples = draw_many(spec);
  const std::int64_t n = spec.n_samples;

  double mean = 0.0;
  for (double v : samples) mean += v;
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double v : samples) ss += (v - mean) * (v - mean);

  EmpiricalStats st;
  st.n_samples = n;
  st.mean = mean;
  st.variance_defined = n >= 2;
  st.variance = st.variance_defined ? ss / static_cast<double>(n - 1)
                                    : std::numeric_limits<double>::quiet_NaN();

  for (double r : thresholds_nats) {
    std::int64_t hits = 0;
    for (double v : samples) {
      if (v < r) ++hits;
    }
    const double p = static_cast<double>(hits) / static_cast<double>(n);
    const double se = std::sqrt(std::max(p * (1.0 - p), 0.0) / static_cast<double>(n));
    OutageEstimate oe;
    oe.rate_threshold_nats = r;
    oe.p_hat = p;
    oe.ci_low = std::max(0.0, p - 1.96 * se);
    oe.ci_high = std::min(1.0, p + 1.96 * se);
    oe.tail_hits = hits;
    oe.few_tail_hits = hits < 30;
    st.outage.push_back(oe);
  }

  std::sort(samples.begin(), samples.end());
  const double sd = st.variance_defined ? std::sqrt(st.variance) : 1.0;
  double ks = 0.0;
  for (std::int64_t i = 0; i < n; ++i) {
    const double z = (samples[static_cast<std::size_t>(i)] - mean) / sd;
    const double f = 0.5 * std::erfc(-z / std::sqrt(2.0));
    const double hi = static_cast<double>(i + 1) / static_cast<double>(n) - f;
    const double lo = f - static_cast<double>(i) / static_cast<double>(n);
    ks = std::max({ks, std::abs(hi), std::abs(lo)});
  }
  st.ks_distance = ks;
  return st;
}

}  // namespace irsmimo
