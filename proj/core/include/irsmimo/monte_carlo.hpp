// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <irsmimo/channel_model.hpp>

#include <cstdint>
#include <vector>

namespace irsmimo {

struct SamplerSpec {
  std::uint64_t seed = 1;
  std::int64_t n_samples = 100000;
  int n_streams = 1;  // worker thread count; does not affect the output
};

struct OutageEstimate {
  double rate_threshold_nats;
  double p_hat;
  double ci_low;
  double ci_high;
  std::int64_t tail_hits;
  bool few_tail_hits;  // fewer than 30 hits, normal-approximation CI is crude
};

struct EmpiricalStats {
  double mean;
  double variance;  // unbiased; NaN when n_samples < 2
  bool variance_defined;
  std::int64_t n_samples;
  double ks_distance;  // sup distance to the normal fitted to (mean, variance)
  std::vector<OutageEstimate> outage;
};

// Draws MI realizations of the cascaded channel. Sample index i is mapped to
// a disjoint counter range of a keyed Philox stream, so results are bit-exact
// for a given (seed, i) no matter how samples are scheduled across threads.
class MiSampler {
 public:
  explicit MiSampler(const Scenario& scenario);

  // MI of realization `index` under stream `seed`, in nats.
  double draw(std::uint64_t seed, std::uint64_t index) const;

  EmpiricalStats estimate(const SamplerSpec& spec,
                          const std::vector<double>& thresholds_nats) const;

  // All samples, in index order (used for CDF output).
  std::vector<double> draw_many(const SamplerSpec& spec) const;

 private:
  int m_, n_, l_;
  double rho_eff_;
  CMat r1_sqrt_;        // N x N
  CMat bridge_;         // T1^{1/2} Psi R2^{1/2}, L x L
  CMat t2_sqrt_;        // M x M
};

}  // namespace irsmimo
