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

#include "sqze/large_deviation.hpp"

#include <cmath>
#include <map>
#include <numeric>
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

BimodalLaw bimodal_law(double p1 = 0.8, std::size_t m = 100) {
  return BimodalLaw(rabi_q(kMu1), rabi_q(kMu2), p1, m);
}

// Binomial pmf by direct multiplication, independent of lgamma.
double binomial_pmf(std::size_t m, std::size_t k, double p) {
  double c = 1.0;
  for (std::size_t i = 1; i <= k; ++i) c = c * static_cast<double>(m - k + i) / static_cast<double>(i);
  return c * std::pow(p, static_cast<double>(k)) * std::pow(1.0 - p, static_cast<double>(m - k));
}

}  // namespace

TEST(BimodalLaw, degenerate_inputs) {
  EXPECT_THROW(BimodalLaw(0.9, 0.9, 0.5, 10), DegenerateError);
  EXPECT_THROW(BimodalLaw(0.0, 0.9, 0.5, 10), DegenerateError);
  EXPECT_THROW(BimodalLaw(0.8, 0.9, 1.5, 10), ValidationError);
  EXPECT_THROW(BimodalLaw(0.8, 0.9, 0.5, 0), ValidationError);
  const auto h = rabi_hamiltonian(kDeltaH);
  const auto psi = StateVector::basis(2, 0);
  EXPECT_THROW(BimodalLaw::from(IntervalDistribution::single(kMu1), h, psi, 10), DegenerateError);
  // No coupling: every interval survives with q = 1.
  EXPECT_THROW(BimodalLaw::from(make_bimodal(kMu1, kMu2, 0.5), rabi_hamiltonian(0.0), psi, 10),
               DegenerateError);
}

TEST(KOfP, boundaries_and_mode) {
  const auto law = bimodal_law();
  EXPECT_NEAR(k_of_P(law, std::pow(law.q2(), 100)), 0.0, 1e-9);
  EXPECT_NEAR(k_of_P(law, std::pow(law.q1(), 100)), 100.0, 1e-9);
  EXPECT_NEAR(k_of_P(law, std::pow(law.q1(), 80) * std::pow(law.q2(), 20)), 80.0, 1e-9);
  EXPECT_THROW(k_of_P(law, 0.0), ValidationError);
  EXPECT_THROW(k_of_P(law, 1.5), ValidationError);
}

TEST(KOfP, inverts_survival_at_and_is_monotone) {
  const auto law = bimodal_law(0.3, 57);
  double prev = -1e300;
  for (int i = 0; i <= 57; ++i) {
    const double p = law.survival_at(i);
    EXPECT_NEAR(k_of_P(law, p), i, 1e-10);
  }
  for (double lp = -5.0; lp <= 0.0; lp += 0.1) {
    const double k = k_of_P(law, std::exp(lp));
    EXPECT_GT(k, prev);  // q1 > q2, so k increases with ln P
    prev = k;
  }
}

TEST(ExactProbK, reference_values) {
  EXPECT_NEAR(exact_prob_k(BimodalLaw(0.9, 0.5, 0.37, 1), 1), 0.37, 1e-15);
  EXPECT_NEAR(exact_prob_k(bimodal_law(), 80), 0.0993, 1e-4);
  EXPECT_NEAR(exact_prob_k(bimodal_law(), 80), binomial_pmf(100, 80, 0.8), 1e-13);
  EXPECT_EQ(exact_prob_k(BimodalLaw(0.9, 0.5, 1.0, 12), 12), 1.0);
  EXPECT_EQ(exact_prob_k(BimodalLaw(0.9, 0.5, 1.0, 12), 11), 0.0);
  EXPECT_EQ(exact_prob_k(BimodalLaw(0.9, 0.5, 0.0, 12), 0), 1.0);
  EXPECT_THROW(exact_prob_k(bimodal_law(), 101), ValidationError);
}

TEST(ExactProbK, normalized_and_matches_direct_product) {
  for (std::size_t m : {1u, 5u, 40u, 100u, 1000u}) {
    for (double p1 : {0.01, 0.2, 0.5, 0.8, 0.99}) {
      const auto probs = exact_law(BimodalLaw(0.95, 0.6, p1, m));
      EXPECT_NEAR(std::accumulate(probs.begin(), probs.end(), 0.0), 1.0, 1e-10);
      if (m <= 100) {
        for (std::size_t k = 0; k <= m; ++k) {
          EXPECT_NEAR(probs[k], binomial_pmf(m, k, p1), 1e-12);
        }
      }
    }
  }
}

TEST(GaussianProb, peak_and_one_sigma) {
  const auto law = bimodal_law();
  const double pg = law.survival_at(80.0);
  EXPECT_NEAR(gaussian_prob_P(law, pg), 1.0 / std::sqrt(2 * std::numbers::pi * 16.0), 1e-12);
  EXPECT_NEAR(gaussian_prob_P(law, pg), 0.0997, 1e-4);
  const double peak = gaussian_prob_k(law, 80.0);
  EXPECT_NEAR(gaussian_prob_P(law, law.survival_at(84.0)), peak * std::exp(-0.5), 1e-12);
  EXPECT_NEAR(gaussian_prob_P(law, law.survival_at(76.0)), peak * std::exp(-0.5), 1e-12);
  EXPECT_THROW(gaussian_prob_k(BimodalLaw(0.9, 0.5, 1.0, 10), 3.0), DegenerateError);
}

TEST(GaussianProb, total_variation_to_binomial) {
  for (double p1 : {0.2, 0.3, 0.5, 0.6, 0.8}) {
    const auto law = bimodal_law(p1);
    EXPECT_LE(total_variation(exact_law(law), discretized_gaussian(law)), 0.02) << p1;
  }
}

TEST(ExactLaw, mode_maps_near_geometric_average) {
  const auto h = rabi_hamiltonian(kDeltaH);
  const auto psi = StateVector::basis(2, 0);
  for (double p1 : {0.2, 0.35, 0.5, 0.8}) {
    for (std::size_t m : {10u, 33u, 100u}) {
      const auto dist = make_bimodal(kMu1, kMu2, p1);
      const auto law = BimodalLaw::from(dist, h, psi, m);
      const auto probs = exact_law(law);
      const auto kmax = static_cast<double>(std::max_element(probs.begin(), probs.end()) - probs.begin());
      const double pg = geometric_average(dist, h, psi, m);
      EXPECT_LE(std::abs(k_of_P(law, pg) - kmax), 1.0 + 1e-9);
    }
  }
}

TEST(ExactLaw, mean_equals_ensemble_average) {
  const auto h = rabi_hamiltonian(kDeltaH);
  const auto psi = StateVector::basis(2, 0);
  for (double p1 : {0.2, 0.5, 0.8}) {
    const auto dist = make_bimodal(kMu1, kMu2, p1);
    const auto law = BimodalLaw::from(dist, h, psi, 100);
    double mean = 0.0;
    for (std::size_t k = 0; k <= 100; ++k) mean += exact_prob_k(law, k) * law.survival_at(k);
    EXPECT_NEAR(mean, ensemble_average(dist, h, psi, 100), 1e-10);
  }
}

TEST(ExactLaw, pushforward_matches_enumeration) {
  // All 2^m sequences with product weights, grouped by the value of P.
  const double q1 = rabi_q(kMu1);
  const double q2 = rabi_q(kMu2);
  const double p1 = 0.8;
  for (std::size_t m : {1u, 4u, 12u}) {
    const BimodalLaw law(q1, q2, p1, m);
    std::vector<double> mass(m + 1, 0.0);
    for (std::uint32_t mask = 0; mask < (1u << m); ++mask) {
      double w = 1.0;
      std::size_t k = 0;
      for (std::size_t j = 0; j < m; ++j) {
        const bool first = !((mask >> j) & 1u);
        w *= first ? p1 : 1.0 - p1;
        k += first;
      }
      mass[k] += w;
    }
    for (std::size_t k = 0; k <= m; ++k) EXPECT_NEAR(mass[k], exact_prob_k(law, k), 1e-12);
  }
}

TEST(Histogram, edges_and_counting) {
  SurvivalHistogram h({0.0, 0.25, 0.5, 1.0});
  h.add(0.0);
  h.add(0.25);
  h.add(0.49);
  h.add(1.0);
  EXPECT_EQ(h.counts(), (std::vector<std::size_t>{1, 2, 1}));
  EXPECT_EQ(h.n_samples(), 4u);
  EXPECT_EQ(h.mode_bin(), 1u);
  EXPECT_THROW(h.add(1.01), ValidationError);
  EXPECT_THROW(h.add(-0.1), ValidationError);
  EXPECT_THROW(SurvivalHistogram({0.0, 0.5, 0.5, 1.0}), ValidationError);
  EXPECT_THROW(SurvivalHistogram({0.1, 1.0}), ValidationError);
}

TEST(Histogram, log_edges_cover_unit_interval) {
  const std::vector<double> samples{0.3, 0.5, 0.9, 1.0};
  const auto edges = make_bin_edges({BinScale::kLog, 10}, samples);
  ASSERT_EQ(edges.size(), 11u);
  EXPECT_EQ(edges.front(), 0.0);
  EXPECT_EQ(edges.back(), 1.0);
  for (std::size_t i = 2; i < edges.size(); ++i) {
    EXPECT_NEAR(std::log(edges[i]) - std::log(edges[i - 1]), -std::log(0.3) / 10, 1e-12);
  }
  const auto h = SurvivalHistogram::from_samples({BinScale::kLog, 10}, samples);
  EXPECT_EQ(h.counts().front(), 1u);
  EXPECT_EQ(h.counts().back(), 2u);

  // Degenerate inputs.
  const std::vector<double> ones(5, 1.0);
  EXPECT_EQ(SurvivalHistogram::from_samples({BinScale::kLog, 8}, ones).counts().back(), 5u);
  const std::vector<double> zeros(5, 0.0);
  EXPECT_EQ(SurvivalHistogram::from_samples({BinScale::kLog, 8}, zeros).counts().front(), 5u);
}

TEST(Histogram, merge_is_associative) {
  const std::vector<double> edges = make_bin_edges({BinScale::kLinear, 7}, {});
  sqze::testing::Generator gen(41);
  std::vector<SurvivalHistogram> parts(3, SurvivalHistogram(edges));
  SurvivalHistogram all(edges);
  for (int i = 0; i < 300; ++i) {
    const double x = gen.uniform();
    parts[static_cast<std::size_t>(i % 3)].add(x);
    all.add(x);
  }
  auto left = parts[0];
  left.merge(parts[1]).merge(parts[2]);
  auto right_tail = parts[1];
  right_tail.merge(parts[2]);
  auto right = parts[0];
  right.merge(right_tail);
  EXPECT_EQ(left, all);
  EXPECT_EQ(right, all);
  EXPECT_THROW(all.merge(SurvivalHistogram({0.0, 1.0})), ValidationError);
}

TEST(RateFunction, single_bin_and_uniform_split) {
  SurvivalHistogram one({0.0, 0.5, 1.0});
  for (int i = 0; i < 10; ++i) one.add(0.7);
  const auto r1 = empirical_rate_function(one, 100);
  ASSERT_EQ(r1.size(), 1u);
  EXPECT_EQ(r1[0].rate, 0.0);
  EXPECT_EQ(r1[0].survival, 0.75);

  SurvivalHistogram two({0.0, 0.5, 1.0});
  for (int i = 0; i < 10; ++i) two.add(i % 2 ? 0.2 : 0.8);
  const auto r2 = empirical_rate_function(two, 100);
  ASSERT_EQ(r2.size(), 2u);
  for (const auto& r : r2) EXPECT_NEAR(r.rate, -std::log(0.5) / 100, 1e-15);

  EXPECT_THROW(empirical_rate_function(SurvivalHistogram({0.0, 1.0}), 10), ValidationError);
}

TEST(RateFunction, argmin_is_mode_bin) {
  SurvivalHistogram h({0.0, 0.2, 0.4, 0.6, 0.8, 1.0});
  for (double x : {0.1, 0.5, 0.5, 0.5, 0.7, 0.7, 0.9}) h.add(x);
  const auto r = empirical_rate_function(h, 10);
  const auto best = std::min_element(r.begin(), r.end(), [](auto& a, auto& b) { return a.rate < b.rate; });
  EXPECT_EQ(best->bin, h.mode_bin());
  EXPECT_EQ(r.size(), 4u);  // empty bin omitted
}
