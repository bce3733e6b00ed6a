// Copyright 2026 The sqze Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "sqze/montecarlo.hpp"

#include <cmath>
#include <vector>

#include "gtest/gtest.h"
#include "sqze/statistics.hpp"
#include "test_support.hpp"

using namespace sqze;
using sqze::testing::kDeltaH;
using sqze::testing::kMu1;
using sqze::testing::kMu2;
using sqze::testing::rabi_q;

namespace {

const HermitianOperator& rabi() {
  static const HermitianOperator h = rabi_hamiltonian(kDeltaH);
  return h;
}

StateVector ground() { return StateVector::basis(2, 0); }

// Var(P) from the exact second moment E[P^2] = (sum_k p_k q_k^2)^m.
double exact_variance(const IntervalDistribution& d, std::size_t m) {
  double first = 0.0;
  double second = 0.0;
  for (const auto& a : d.atoms()) {
    const double q = rabi_q(a.mu);
    first += a.probability * q;
    second += a.probability * q * q;
  }
  return std::pow(second, static_cast<double>(m)) - std::pow(first, 2.0 * static_cast<double>(m));
}

}  // namespace

TEST(RunEnsemble, single_atom_has_no_spread) {
  const auto d = IntervalDistribution::single(kMu2);
  const auto r = run_ensemble(rabi(), ground(), d, 100, 50, 1);
  const double expected = std::exp(100.0 * std::log(rabi_q(kMu2)));
  for (double s : r.samples) EXPECT_NEAR(s, expected, 1e-13);
  EXPECT_EQ(r.sample_variance, 0.0);
  EXPECT_EQ(r.histogram.counts()[r.mode_bin], 50u);
}

TEST(RunEnsemble, samples_equal_sequence_survival_of_sampled_sequences) {
  const auto d = IntervalDistribution::from_atoms({{1e-6, 0.2}, {4e-6, 0.5}, {9e-6, 0.3}});
  const auto r = run_ensemble(rabi(), ground(), d, 40, 64, 77);
  for (std::size_t i = 0; i < r.samples.size(); ++i) {
    const auto seq = sample_sequence(d, 40, derive_stream_seed(77, i));
    EXPECT_EQ(r.samples[i], sequence_survival(rabi(), ground(), seq)) << i;
  }
}

TEST(RunEnsemble, bit_identical_across_worker_counts) {
  const auto d = make_bimodal(kMu1, kMu2, 0.8);
  EnsembleOptions opts;
  opts.threads = 1;
  const auto serial = run_ensemble(rabi(), ground(), d, 100, 1001, 9, opts);
  for (unsigned t : {2u, 3u, 8u, 64u}) {
    opts.threads = t;
    const auto par = run_ensemble(rabi(), ground(), d, 100, 1001, 9, opts);
    EXPECT_EQ(par.samples, serial.samples);
    EXPECT_EQ(par.histogram, serial.histogram);
    EXPECT_EQ(par.sample_mean, serial.sample_mean);
    EXPECT_EQ(par.config_fingerprint, serial.config_fingerprint);
  }
}

TEST(RunEnsemble, invariants_of_result) {
  const auto d = make_bimodal(kMu1, kMu2, 0.5);
  const auto r = run_ensemble(rabi(), ground(), d, 100, 500, 3);
  double sum = 0.0;
  for (double s : r.samples) sum += s;
  EXPECT_NEAR(r.sample_mean, sum / 500.0, 1e-12);
  EXPECT_EQ(r.histogram.n_samples(), 500u);
  EXPECT_EQ(r.rng_id, kRngId);
  EXPECT_EQ(r.mode_lower, r.histogram.lower(r.mode_bin));
  EXPECT_NE(r.config_fingerprint, run_ensemble(rabi(), ground(), d, 100, 500, 4).config_fingerprint);
}

TEST(RunEnsemble, preconditions) {
  const auto d = IntervalDistribution::single(kMu1);
  EXPECT_THROW(run_ensemble(rabi(), ground(), d, 0, 10, 1), ValidationError);
  EXPECT_THROW(run_ensemble(rabi(), ground(), d, 10, 0, 1), ValidationError);
  EXPECT_THROW(run_ensemble(rabi(), ground(), d, std::size_t{1} << 30, std::size_t{1} << 20, 1),
               std::length_error);
}

TEST(RunEnsemble, sample_mean_within_four_sigma) {
  for (double p1 : {0.2, 0.5, 0.8}) {
    const auto d = make_bimodal(kMu1, kMu2, p1);
    const std::size_t n = 1000;
    const auto r = run_ensemble(rabi(), ground(), d, 100, n, 2016);
    const double sigma = std::sqrt(exact_variance(d, 100) / static_cast<double>(n));
    EXPECT_NEAR(r.sample_mean, ensemble_average(d, rabi(), ground(), 100), 4.0 * sigma) << p1;
  }
}

TEST(RunEnsemble, error_shrinks_as_inverse_sqrt_n) {
  const auto d = make_bimodal(kMu1, kMu2, 0.8);
  const double truth = ensemble_average(d, rabi(), ground(), 100);
  const double sd = std::sqrt(exact_variance(d, 100));
  for (std::size_t n : {100u, 1000u, 10000u}) {
    double sq = 0.0;
    const int seeds = 24;
    for (int s = 0; s < seeds; ++s) {
      const auto r = run_ensemble(rabi(), ground(), d, 100, n, 1000 + static_cast<std::uint64_t>(s));
      sq += std::pow(r.sample_mean - truth, 2);
    }
    const double rms = std::sqrt(sq / seeds);
    const double scaled = rms * std::sqrt(static_cast<double>(n)) / sd;
    EXPECT_GT(scaled, 0.55) << n;
    EXPECT_LT(scaled, 1.5) << n;
  }
}

TEST(RunEnsemble, mode_bin_matches_exact_law) {
  // 2/10 us bimodal parameters; the heaviest bin of the exact binomial
  // law and the empirical mode should both contain the geometric average.
  const auto d = make_bimodal(kMu1, kMu2, 0.8);
  const auto r = run_ensemble(rabi(), ground(), d, 100, 1000, 2);
  const double pg = geometric_average(d, rabi(), ground(), 100);
  const auto law = BimodalLaw::from(d, rabi(), ground(), 100);
  std::vector<double> mass(r.histogram.bins(), 0.0);
  for (std::size_t k = 0; k <= 100; ++k) {
    mass[r.histogram.bin_of(law.survival_at(static_cast<double>(k)))] += exact_prob_k(law, k);
  }
  const auto exact_mode = static_cast<std::size_t>(std::max_element(mass.begin(), mass.end()) - mass.begin());
  EXPECT_TRUE(r.histogram.contains(exact_mode, pg));
  EXPECT_TRUE(r.histogram.contains(r.mode_bin, pg));
}

TEST(EnumerateSequences, reproduces_ensemble_average) {
  for (double p1 : {0.2, 0.8}) {
    for (std::size_t m : {1u, 6u, 12u}) {
      const auto d = make_bimodal(kMu1, kMu2, p1);
      const auto law = enumerate_sequences(rabi(), ground(), d, m);
      EXPECT_EQ(law.outcomes.size(), std::size_t{1} << m);
      double total = 0.0;
      for (const auto& o : law.outcomes) total += o.weight;
      EXPECT_NEAR(total, 1.0, 1e-12);
      const double avg = ensemble_average(d, rabi(), ground(), m);
      EXPECT_NEAR(law.mean, avg, 1e-12 * avg);
    }
  }
  const auto single = enumerate_sequences(rabi(), ground(), IntervalDistribution::single(kMu1), 20);
  ASSERT_EQ(single.outcomes.size(), 1u);
  EXPECT_EQ(single.outcomes[0].weight, 1.0);
}

TEST(EnumerateSequences, limits) {
  const auto d = make_bimodal(kMu1, kMu2, 0.5);
  EXPECT_THROW(enumerate_sequences(rabi(), ground(), d, 21), ValidationError);
  EXPECT_THROW(enumerate_sequences(rabi(), ground(),
                                   IntervalDistribution::from_atoms({{1e-6, 0.3}, {2e-6, 0.3}, {3e-6, 0.4}}), 4),
               ValidationError);
}

TEST(Fingerprint, stable_and_sensitive) {
  const auto d = make_bimodal(kMu1, kMu2, 0.8);
  const auto a = ensemble_fingerprint(rabi(), ground(), d, 100, 1000, 5);
  EXPECT_EQ(a, ensemble_fingerprint(rabi(), ground(), d, 100, 1000, 5));
  EXPECT_EQ(a.size(), 16u);
  EXPECT_NE(a, ensemble_fingerprint(rabi(), ground(), d, 101, 1000, 5));
  EXPECT_NE(a, ensemble_fingerprint(rabi(), ground(), make_bimodal(kMu1, kMu2, 0.7), 100, 1000, 5));
  EXPECT_NE(a, ensemble_fingerprint(rabi(), StateVector::basis(2, 1), d, 100, 1000, 5));
}
