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

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <vector>

#include "sqze/error.hpp"
#include "sqze/rng.hpp"

namespace sqze {

inline constexpr double kProbabilitySumTolerance = 1e-12;

/// One support point of a discrete waiting-time distribution.
struct IntervalAtom {
  double mu = 0.0;           // seconds
  double probability = 0.0;  // weight in (0, 1]

  friend bool operator==(const IntervalAtom&, const IntervalAtom&) = default;
};

/// Discrete distribution p(mu) over free-evolution intervals. Atoms are kept in
/// strictly increasing order of mu; duplicates are merged and zero-weight
/// atoms dropped at construction.
class IntervalDistribution {
 public:
  static IntervalDistribution from_atoms(std::vector<IntervalAtom> atoms) {
    double total = 0.0;
    for (const auto& a : atoms) {
      if (!(a.mu >= 0.0) || !std::isfinite(a.mu)) {
        throw ValidationError("IntervalDistribution: durations must be finite and >= 0");
      }
      if (!(a.probability >= 0.0 && a.probability <= 1.0)) {
        throw ValidationError("IntervalDistribution: probabilities must lie in [0, 1]");
      }
      total += a.probability;
    }
    if (std::abs(total - 1.0) > kProbabilitySumTolerance) {
      throw ValidationError("IntervalDistribution: probabilities must sum to 1");
    }
    std::erase_if(atoms, [](const IntervalAtom& a) { return a.probability == 0.0; });
    std::ranges::sort(atoms, {}, &IntervalAtom::mu);

    std::vector<IntervalAtom> merged;
    for (const auto& a : atoms) {
      if (!merged.empty() && merged.back().mu == a.mu) {
        merged.back().probability += a.probability;
      } else {
        merged.push_back(a);
      }
    }
    return IntervalDistribution(std::move(merged));
  }

  static IntervalDistribution single(double mu) { return from_atoms({{mu, 1.0}}); }

  const std::vector<IntervalAtom>& atoms() const noexcept { return atoms_; }
  std::size_t size() const noexcept { return atoms_.size(); }

  double mean() const noexcept { return mean_; }
  double nu2() const noexcept { return nu2_; }
  double nu4() const noexcept { return nu4_; }

  /// Variance of mu^2, i.e. nu4 - nu2^2, accumulated in centered form so it is
  /// never negative and vanishes exactly for a single atom.
  double mu_squared_variance() const noexcept {
    double acc = 0.0;
    for (const auto& a : atoms_) {
      const double d = a.mu * a.mu - nu2_;
      acc += a.probability * d * d;
    }
    return acc;
  }

  /// Same weights, every duration multiplied by `factor`.
  IntervalDistribution scaled(double factor) const {
    if (!(factor >= 0.0) || !std::isfinite(factor)) {
      throw ValidationError("IntervalDistribution: scale factor must be finite and >= 0");
    }
    std::vector<IntervalAtom> atoms = atoms_;
    for (auto& a : atoms) a.mu *= factor;
    return from_atoms(std::move(atoms));
  }

 private:
  explicit IntervalDistribution(std::vector<IntervalAtom> atoms) : atoms_(std::move(atoms)) {
    if (atoms_.empty()) {
      throw ValidationError("IntervalDistribution: at least one atom with positive weight required");
    }
    for (const auto& a : atoms_) {
      const double mu2 = a.mu * a.mu;
      mean_ += a.probability * a.mu;
      nu2_ += a.probability * mu2;
      nu4_ += a.probability * mu2 * mu2;
    }
  }

  std::vector<IntervalAtom> atoms_;
  double mean_ = 0.0;
  double nu2_ = 0.0;
  double nu4_ = 0.0;
};

/// Two-atom distribution (mu1, p1), (mu2, 1 - p1). Collapses to a single atom
/// when p1 is 0 or 1 or when mu1 == mu2.
inline IntervalDistribution make_bimodal(double mu1, double mu2, double p1) {
  if (!(p1 >= 0.0 && p1 <= 1.0)) {
    throw ValidationError("make_bimodal: p1 must lie in [0, 1]");
  }
  return IntervalDistribution::from_atoms({{mu1, p1}, {mu2, 1.0 - p1}});
}

/// Ordered intervals between consecutive projective measurements.
class MeasurementSequence {
 public:
  MeasurementSequence() = default;
  explicit MeasurementSequence(std::vector<double> intervals) : intervals_(std::move(intervals)) {
    for (double mu : intervals_) {
      if (!(mu >= 0.0) || !std::isfinite(mu)) {
        throw ValidationError("MeasurementSequence: intervals must be finite and >= 0");
      }
    }
    total_time_ = std::accumulate(intervals_.begin(), intervals_.end(), 0.0);
  }

  const std::vector<double>& intervals() const noexcept { return intervals_; }
  std::size_t m() const noexcept { return intervals_.size(); }
  double total_time() const noexcept { return total_time_; }

 private:
  std::vector<double> intervals_;
  double total_time_ = 0.0;
};

/// Index of the atom selected by a uniform variate `u` in [0, 1).
inline std::size_t pick_atom(const IntervalDistribution& dist, double u) {
  const auto& atoms = dist.atoms();
  double cumulative = 0.0;
  for (std::size_t k = 0; k + 1 < atoms.size(); ++k) {
    cumulative += atoms[k].probability;
    if (u < cumulative) return k;
  }
  return atoms.size() - 1;
}

/// m i.i.d. draws from `dist`, fully determined by (dist, m, seed).
inline MeasurementSequence sample_sequence(const IntervalDistribution& dist, std::size_t m,
                                           std::uint64_t seed) {
  if (m == 0) throw ValidationError("sample_sequence: m must be at least 1");
  SplitMix64 rng(seed);
  std::vector<double> intervals(m);
  for (auto& mu : intervals) mu = dist.atoms()[pick_atom(dist, rng.uniform())].mu;
  return MeasurementSequence(std::move(intervals));
}

}  // namespace sqze
