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

#include "sqze/intervals.hpp"

#include <cmath>
#include <set>

#include "gtest/gtest.h"
#include "test_support.hpp"

using namespace sqze;
using sqze::testing::Generator;

TEST(MakeBimodal, two_atoms_and_moments) {
  const auto d = make_bimodal(2e-6, 10e-6, 0.8);
  ASSERT_EQ(d.size(), 2u);
  EXPECT_EQ(d.atoms()[0], (IntervalAtom{2e-6, 0.8}));
  EXPECT_DOUBLE_EQ(d.atoms()[1].mu, 1e-5);
  EXPECT_NEAR(d.atoms()[1].probability, 0.2, 1e-16);
  EXPECT_NEAR(d.nu2(), 2.32e-11, 1e-15 * 2.32e-11 * 10);
  EXPECT_NEAR(d.nu4(), 2.0128e-21, 1e-15 * 2.0128e-21 * 10);
  EXPECT_NEAR(d.mean(), 3.6e-6, 1e-20);
}

TEST(MakeBimodal, degenerate_weights_and_duplicates_collapse) {
  const auto d1 = make_bimodal(2e-6, 10e-6, 1.0);
  ASSERT_EQ(d1.size(), 1u);
  EXPECT_EQ(d1.atoms()[0], (IntervalAtom{2e-6, 1.0}));

  const auto d0 = make_bimodal(2e-6, 10e-6, 0.0);
  ASSERT_EQ(d0.size(), 1u);
  EXPECT_EQ(d0.atoms()[0].mu, 1e-5);

  const auto merged = make_bimodal(2e-6, 2e-6, 0.5);
  ASSERT_EQ(merged.size(), 1u);
  EXPECT_EQ(merged.atoms()[0], (IntervalAtom{2e-6, 1.0}));
  EXPECT_EQ(merged.mu_squared_variance(), 0.0);
}

TEST(MakeBimodal, validation_errors) {
  EXPECT_THROW(make_bimodal(-1e-6, 2e-6, 0.5), ValidationError);
  EXPECT_THROW(make_bimodal(1e-6, 2e-6, 1.5), ValidationError);
  EXPECT_THROW(make_bimodal(1e-6, 2e-6, -0.1), ValidationError);
  EXPECT_THROW(IntervalDistribution::from_atoms({{1e-6, 0.5}, {2e-6, 0.4}}), ValidationError);
  EXPECT_THROW(IntervalDistribution::from_atoms({}), ValidationError);
}

TEST(IntervalDistribution, canonical_order) {
  const auto d = IntervalDistribution::from_atoms({{5e-6, 0.25}, {1e-6, 0.25}, {3e-6, 0.5}});
  ASSERT_EQ(d.size(), 3u);
  EXPECT_LT(d.atoms()[0].mu, d.atoms()[1].mu);
  EXPECT_LT(d.atoms()[1].mu, d.atoms()[2].mu);
}

TEST(IntervalDistribution, moment_properties) {
  Generator gen(21);
  for (int trial = 0; trial < 500; ++trial) {
    const auto d = gen.distribution(5, 1e-5);
    double nu2 = 0.0;
    double nu4 = 0.0;
    for (const auto& a : d.atoms()) {
      nu2 += a.probability * std::pow(a.mu, 2);
      nu4 += a.probability * std::pow(a.mu, 4);
    }
    EXPECT_NEAR(d.nu2(), nu2, 1e-14 * nu2);
    EXPECT_NEAR(d.nu4(), nu4, 1e-14 * nu4);
    // Power-mean ordering.
    EXPECT_LE(d.mean(), std::sqrt(d.nu2()) * (1 + 1e-14));
    EXPECT_LE(std::sqrt(d.nu2()), std::pow(d.nu4(), 0.25) * (1 + 1e-14));
    EXPECT_GE(d.mu_squared_variance(), 0.0);
    EXPECT_NEAR(d.mu_squared_variance(), d.nu4() - d.nu2() * d.nu2(), 1e-12 * d.nu4());
    if (d.size() == 1) {
      EXPECT_EQ(d.mu_squared_variance(), 0.0);
    } else {
      EXPECT_GT(d.mu_squared_variance(), 0.0);
    }
  }
}

TEST(MeasurementSequence, total_time) {
  const MeasurementSequence s({1e-6, 2e-6, 3.5e-6});
  EXPECT_EQ(s.m(), 3u);
  EXPECT_NEAR(s.total_time(), 6.5e-6, 1e-12 * 6.5e-6);
  EXPECT_THROW(MeasurementSequence({1e-6, -1e-6}), ValidationError);
}

TEST(SampleSequence, single_atom_repeats) {
  const auto d = IntervalDistribution::single(4e-6);
  const auto s = sample_sequence(d, 100, 987654321);
  ASSERT_EQ(s.m(), 100u);
  for (double mu : s.intervals()) EXPECT_EQ(mu, 4e-6);
  EXPECT_THROW(sample_sequence(d, 0, 1), ValidationError);
}

TEST(SampleSequence, deterministic_for_fixed_seed) {
  const auto d = make_bimodal(2e-6, 10e-6, 0.8);
  EXPECT_EQ(sample_sequence(d, 100, 42).intervals(), sample_sequence(d, 100, 42).intervals());
  EXPECT_NE(sample_sequence(d, 100, 42).intervals(), sample_sequence(d, 100, 43).intervals());
}

TEST(SampleSequence, frequencies_within_six_sigma) {
  const std::size_t m = 100'000;
  for (double p1 : {0.5, 0.8, 0.2, 0.03}) {
    const auto d = make_bimodal(2e-6, 10e-6, p1);
    const auto s = sample_sequence(d, m, 2024);
    double hits = 0;
    for (double mu : s.intervals()) hits += (mu == 2e-6);
    const double freq = hits / static_cast<double>(m);
    EXPECT_NEAR(freq, p1, 6.0 * std::sqrt(p1 * (1 - p1) / static_cast<double>(m))) << "p1=" << p1;
  }
  // The 0.5 case stated directly.
  const auto s = sample_sequence(make_bimodal(2e-6, 10e-6, 0.5), m, 7);
  double hits = 0;
  for (double mu : s.intervals()) hits += (mu == 2e-6);
  EXPECT_NEAR(hits / static_cast<double>(m), 0.5, 0.01);
}

TEST(SampleSequence, four_atom_law) {
  const auto d = IntervalDistribution::from_atoms({{1e-6, 0.1}, {2e-6, 0.2}, {3e-6, 0.3}, {4e-6, 0.4}});
  const std::size_t m = 100'000;
  const auto s = sample_sequence(d, m, 99);
  for (const auto& a : d.atoms()) {
    double hits = 0;
    for (double mu : s.intervals()) hits += (mu == a.mu);
    const double p = a.probability;
    EXPECT_NEAR(hits / static_cast<double>(m), p, 6.0 * std::sqrt(p * (1 - p) / static_cast<double>(m)));
  }
}

TEST(Rng, derived_streams_are_distinct_and_pinned) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t run = 0; run < 1000; ++run) seen.insert(derive_stream_seed(12345, run));
  EXPECT_EQ(seen.size(), 1000u);
  // Pinned outputs: changing the scheme must change kRngId.
  SplitMix64 g(0);
  EXPECT_EQ(g(), 0xE220A8397B1DCDAFULL);
  EXPECT_EQ(g(), 0x6E789E6AA1B965F4ULL);
  EXPECT_EQ(derive_stream_seed(0, 0), mix64(mix64(kGoldenGamma)));
  EXPECT_EQ(kRngId, "splitmix64/derive-v1");
}
