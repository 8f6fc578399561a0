// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <irsmimo/monte_carlo.hpp>
#include <irsmimo/outage_dmt.hpp>
#include <irsmimo/philox.hpp>

#include <cmath>

using namespace irsmimo;

namespace {

Scenario identity_scenario(int m, int n, int l, double rho) {
  SystemDims dims(m, n, l);
  return Scenario(dims, CorrelationSet::identity(dims), PhaseShifts::zeros(l), rho);
}

}  // namespace

TEST_CASE("philox known-answer vectors") {
  // Reference blocks for philox4x32-10 from the original publication's
  // known-answer tests.
  {
    const Philox4x32 gen(0);
    const auto out = gen(0, 0);
    CHECK(out[0] == 0x6627e8d5u);
    CHECK(out[1] == 0xe169c58du);
    CHECK(out[2] == 0xbc57ac4cu);
    CHECK(out[3] == 0x9b00dbd8u);
  }
  {
    const Philox4x32 gen(0xffffffffffffffffull);
    const auto out = gen(0xffffffffffffffffull, 0xffffffffffffffffull);
    CHECK(out[0] == 0x408f276du);
    CHECK(out[1] == 0x41c83b0eu);
    CHECK(out[2] == 0xa20bc7c6u);
    CHECK(out[3] == 0x6d5451fdu);
  }
}

TEST_CASE("philox normal transform is calibrated") {
  const Philox4x32 gen(42);
  const std::int64_t n_pairs = 500000;
  double sum = 0.0, sum_sq = 0.0;
  for (std::int64_t i = 0; i < n_pairs; ++i) {
    double z0, z1;
    philox_normal_pair(gen(static_cast<std::uint64_t>(i)), z0, z1);
    sum += z0 + z1;
    sum_sq += z0 * z0 + z1 * z1;
  }
  const double n = 2.0 * n_pairs;
  const double mean = sum / n;
  const double var = sum_sq / n - mean * mean;
  // 3-sigma bands for the sample mean and variance of a standard normal.
  CHECK(std::abs(mean) < 3.0 / std::sqrt(n));
  CHECK(std::abs(var - 1.0) < 3.0 * std::sqrt(2.0 / n));
}

TEST_CASE("zero SNR gives exactly zero mutual information") {
  const MiSampler sampler(identity_scenario(2, 2, 3, 0.0));
  CHECK(sampler.draw(1, 0) == 0.0);
  CHECK(sampler.draw(7, 123) == 0.0);
}

TEST_CASE("scalar channel sample is log(1 + rho |x|^2 |y|^2)") {
  const double rho = 2.5;
  const MiSampler sampler(identity_scenario(1, 1, 1, rho));
  for (std::uint64_t i = 0; i < 20; ++i) {
    const double v = sampler.draw(5, i);
    CHECK(v >= 0.0);
    CHECK(std::isfinite(v));
  }
}

TEST_CASE("same seed and index give bit-identical samples") {
  const MiSampler sampler(identity_scenario(3, 2, 4, 1.0));
  CHECK(sampler.draw(9, 17) == sampler.draw(9, 17));
  CHECK(sampler.draw(9, 17) != sampler.draw(9, 18));
  CHECK(sampler.draw(9, 17) != sampler.draw(10, 17));
}

TEST_CASE("thread count does not change the sample set") {
  const MiSampler sampler(identity_scenario(3, 3, 5, 2.0));
  SamplerSpec one;
  one.seed = 11;
  one.n_samples = 503;
  one.n_streams = 1;
  SamplerSpec four = one;
  four.n_streams = 4;
  const auto a = sampler.draw_many(one);
  const auto b = sampler.draw_many(four);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i] == b[i]);
  }
}

TEST_CASE("single sample leaves the variance undefined") {
  const MiSampler sampler(identity_scenario(2, 2, 2, 1.0));
  SamplerSpec spec;
  spec.n_samples = 1;
  const auto st = sampler.estimate(spec, {});
  CHECK_FALSE(st.variance_defined);
  CHECK(st.n_samples == 1);
}

TEST_CASE("disjoint seed streams behave like one longer stream") {
  const MiSampler sampler(identity_scenario(3, 3, 6, 3.0));
  SamplerSpec half;
  half.n_samples = 5000;
  half.seed = 21;
  const auto a = sampler.estimate(half, {});
  half.seed = 22;
  const auto b = sampler.estimate(half, {});
  const double merged_mean = 0.5 * (a.mean + b.mean);

  SamplerSpec full;
  full.n_samples = 10000;
  full.seed = 23;
  const auto c = sampler.estimate(full, {});
  // Same statistics within a generous CI (4 standard errors of the mean).
  const double se = std::sqrt(c.variance / full.n_samples);
  CHECK(std::abs(merged_mean - c.mean) < 4.0 * se * std::sqrt(2.0));
}

TEST_CASE("empirical outage at the deterministic mean is near one half") {
  SystemDims dims(4, 4, 8);
  const double rho = 4.0;
  Scenario scenario = identity_scenario(4, 4, 8, rho);
  const auto gm = gaussian_mi(scenario.spectra(), dims, rho);

  const MiSampler sampler(scenario);
  SamplerSpec spec;
  spec.seed = 3;
  spec.n_samples = 100000;
  spec.n_streams = 4;
  const auto st = sampler.estimate(spec, {gm.mean_nats});
  REQUIRE(st.outage.size() == 1);
  CHECK(st.outage[0].p_hat >= 0.47);
  CHECK(st.outage[0].p_hat <= 0.53);
  CHECK(st.outage[0].ci_low <= st.outage[0].p_hat);
  CHECK(st.outage[0].ci_high >= st.outage[0].p_hat);
}

TEST_CASE("empirical mean and variance track the deterministic equivalents") {
  SystemDims dims(4, 4, 16);
  CorrelationSet corr(exponential_correlation(4, 0.5).cast<std::complex<double>>(),
                      exponential_correlation(16, 0.5).cast<std::complex<double>>(),
                      exponential_correlation(16, 0.5).cast<std::complex<double>>(),
                      exponential_correlation(4, 0.5).cast<std::complex<double>>());
  const double rho = 6.0;
  Scenario scenario(dims, std::move(corr), PhaseShifts::zeros(16), rho);
  const auto gm = gaussian_mi(scenario.spectra(), dims, rho);

  const MiSampler sampler(scenario);
  SamplerSpec spec;
  spec.seed = 8;
  spec.n_samples = 100000;
  spec.n_streams = 4;
  const auto st = sampler.estimate(spec, {});
  CHECK(std::abs(st.mean - gm.mean_nats) <= 0.02 * gm.mean_nats);
  CHECK(std::abs(st.variance - gm.var_nats2) <= 0.10 * gm.var_nats2);
}
