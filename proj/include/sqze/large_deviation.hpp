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

// Distribution of the survival probability P for a two-atom p(mu).
//
// With k the number of intervals equal to mu1 in a sequence of m,
//
//   P = q1^k q2^(m-k),    k ~ Binomial(m, p1),
//
// so P lives on the m+1 points P(k) and k(P) inverts the map in log space.
// For large m the binomial law is approximated by a Gaussian in k. That
// Gaussian is a density in k; turning it into a density in P would need the
// Jacobian dk/dP = 1 / (P ln(q1/q2)), which callers apply themselves when
// they need it.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <limits>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "sqze/error.hpp"
#include "sqze/intervals.hpp"
#include "sqze/quantum.hpp"

namespace sqze {

/// Parameters of the bimodal survival law. q1 != q2 is required so that k(P)
/// is single-valued; both must lie in (0, 1].
class BimodalLaw {
 public:
  BimodalLaw(double q1, double q2, double p1, std::size_t m) : q1_(q1), q2_(q2), p1_(p1), m_(m) {
    if (!(q1 > 0.0 && q1 <= 1.0) || !(q2 > 0.0 && q2 <= 1.0)) {
      throw DegenerateError("BimodalLaw: survival probabilities must lie in (0, 1]");
    }
    log_q1_ = std::log(q1_);
    log_q2_ = std::log(q2_);
    // Equal up to rounding counts as equal: k(P) would divide by noise.
    const double scale = std::max(std::abs(log_q1_), std::abs(log_q2_));
    if (std::abs(log_q1_ - log_q2_) <= 64.0 * std::numeric_limits<double>::epsilon() * scale) {
      throw DegenerateError("BimodalLaw: q1 == q2, k(P) is not invertible");
    }
    if (!(p1 >= 0.0 && p1 <= 1.0)) {
      throw ValidationError("BimodalLaw: p1 must lie in [0, 1]");
    }
    if (m == 0) throw ValidationError("BimodalLaw: m must be at least 1");
  }

  /// Law for a two-atom distribution; the first atom (smaller mu) is mu1.
  static BimodalLaw from(const IntervalDistribution& dist, const HermitianOperator& h,
                         const StateVector& psi0, std::size_t m) {
    if (dist.size() != 2) {
      throw DegenerateError("BimodalLaw: distribution must have exactly two distinct atoms");
    }
    const auto& a = dist.atoms();
    return BimodalLaw(survival_q(h, psi0, a[0].mu), survival_q(h, psi0, a[1].mu), a[0].probability,
                      m);
  }

  double q1() const noexcept { return q1_; }
  double q2() const noexcept { return q2_; }
  double p1() const noexcept { return p1_; }
  double p2() const noexcept { return 1.0 - p1_; }
  std::size_t m() const noexcept { return m_; }
  double log_q1() const noexcept { return log_q1_; }
  double log_q2() const noexcept { return log_q2_; }

  /// m p1 p2, the binomial variance of k.
  double k_variance() const noexcept { return static_cast<double>(m_) * p1_ * p2(); }

  /// P(k) = q1^k q2^(m-k).
  double survival_at(double k) const {
    return std::exp(k * log_q1_ + (static_cast<double>(m_) - k) * log_q2_);
  }

 private:
  double q1_;
  double q2_;
  double p1_;
  std::size_t m_;
  double log_q1_ = 0.0;
  double log_q2_ = 0.0;
};

/// k(P) = (ln P - m ln q2) / (ln q1 - ln q2).
inline double k_of_P(const BimodalLaw& law, double survival) {
  if (!(survival > 0.0 && survival <= 1.0)) {
    throw ValidationError("k_of_P: P must lie in (0, 1]");
  }
  return (std::log(survival) - static_cast<double>(law.m()) * law.log_q2()) /
         (law.log_q1() - law.log_q2());
}

/// Binomial weight of k, evaluated through log-gamma.
inline double exact_prob_k(const BimodalLaw& law, std::size_t k) {
  const std::size_t m = law.m();
  if (k > m) throw ValidationError("exact_prob_k: k must lie in [0, m]");
  const double p1 = law.p1();
  const double p2 = law.p2();
  if (p1 == 0.0) return k == 0 ? 1.0 : 0.0;
  if (p2 == 0.0) return k == m ? 1.0 : 0.0;
  const double kd = static_cast<double>(k);
  const double md = static_cast<double>(m);
  const double log_choose = std::lgamma(md + 1.0) - std::lgamma(kd + 1.0) - std::lgamma(md - kd + 1.0);
  return std::exp(log_choose + kd * std::log(p1) + (md - kd) * std::log(p2));
}

inline std::vector<double> exact_law(const BimodalLaw& law) {
  std::vector<double> probs(law.m() + 1);
  for (std::size_t k = 0; k <= law.m(); ++k) probs[k] = exact_prob_k(law, k);
  return probs;
}

/// Stirling/Gaussian approximation to Prob(k), a density in k.
inline double gaussian_prob_k(const BimodalLaw& law, double k) {
  const double variance = law.k_variance();
  if (!(variance > 0.0)) {
    throw DegenerateError("gaussian_prob_k: m p1 p2 must be positive");
  }
  const double dk = k - static_cast<double>(law.m()) * law.p1();
  return std::exp(-dk * dk / (2.0 * variance)) / std::sqrt(2.0 * std::numbers::pi * variance);
}

/// Gaussian approximation evaluated at k(P); peaks at the geometric average.
inline double gaussian_prob_P(const BimodalLaw& law, double survival) {
  return gaussian_prob_k(law, k_of_P(law, survival));
}

/// Gaussian evaluated at k = 0..m and renormalized to a probability vector.
inline std::vector<double> discretized_gaussian(const BimodalLaw& law) {
  std::vector<double> probs(law.m() + 1);
  double total = 0.0;
  for (std::size_t k = 0; k <= law.m(); ++k) {
    probs[k] = gaussian_prob_k(law, static_cast<double>(k));
    total += probs[k];
  }
  for (auto& p : probs) p /= total;
  return probs;
}

inline double total_variation(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ValidationError("total_variation: size mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += std::abs(a[i] - b[i]);
  return 0.5 * acc;
}

// Histograms of sampled survival probabilities ------------------------------

enum class BinScale { kLog, kLinear };

struct HistogramBinning {
  BinScale scale = BinScale::kLog;
  std::size_t bins = 30;
};

/// Bin edges over [0, 1]. Linear: uniform. Log: geometric spacing from the
/// smallest positive sample up to 1, with the first edge then lowered to 0 so
/// the edges still cover the whole unit interval.
inline std::vector<double> make_bin_edges(const HistogramBinning& binning,
                                          std::span<const double> samples) {
  if (binning.bins == 0) throw ValidationError("histogram: at least one bin required");
  const std::size_t n = binning.bins;
  std::vector<double> edges(n + 1);
  std::optional<double> lowest;
  if (binning.scale == BinScale::kLog) {
    for (double s : samples) {
      if (s > 0.0 && (!lowest || s < *lowest)) lowest = s;
    }
  }
  if (!lowest) {
    for (std::size_t i = 0; i <= n; ++i) edges[i] = static_cast<double>(i) / static_cast<double>(n);
    edges[n] = 1.0;
    return edges;
  }
  // Keep a non-empty log range when every sample sits at 1.
  const double lo = std::min(*lowest, 1.0 - 1e-9);
  const double log_lo = std::log(lo);
  for (std::size_t i = 0; i <= n; ++i) {
    edges[i] = std::exp(log_lo * (1.0 - static_cast<double>(i) / static_cast<double>(n)));
  }
  edges[0] = 0.0;
  edges[n] = 1.0;
  return edges;
}

/// Counts of survival probabilities over bins [e_i, e_{i+1}); the last bin is
/// closed so that P = 1 is counted.
class SurvivalHistogram {
 public:
  explicit SurvivalHistogram(std::vector<double> edges)
      : edges_(std::move(edges)), counts_(edges_.empty() ? 0 : edges_.size() - 1, 0) {
    if (edges_.size() < 2) throw ValidationError("histogram: need at least two edges");
    if (edges_.front() != 0.0 || edges_.back() != 1.0) {
      throw ValidationError("histogram: edges must cover [0, 1]");
    }
    for (std::size_t i = 1; i < edges_.size(); ++i) {
      if (!(edges_[i] > edges_[i - 1])) {
        throw ValidationError("histogram: edges must be strictly increasing");
      }
    }
  }

  static SurvivalHistogram from_samples(const HistogramBinning& binning,
                                        std::span<const double> samples) {
    SurvivalHistogram h(make_bin_edges(binning, samples));
    for (double s : samples) h.add(s);
    return h;
  }

  std::size_t bin_of(double survival) const {
    if (!(survival >= 0.0 && survival <= 1.0)) {
      throw ValidationError("histogram: value outside [0, 1]");
    }
    const auto it = std::upper_bound(edges_.begin(), edges_.end(), survival);
    const auto idx = static_cast<std::size_t>(it - edges_.begin());
    return std::min(idx, counts_.size()) - 1;
  }

  void add(double survival) {
    ++counts_[bin_of(survival)];
    ++n_samples_;
  }

  /// Merging is associative and commutative; edges must match exactly.
  SurvivalHistogram& merge(const SurvivalHistogram& other) {
    if (other.edges_ != edges_) throw ValidationError("histogram: cannot merge different binnings");
    for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += other.counts_[i];
    n_samples_ += other.n_samples_;
    return *this;
  }

  const std::vector<double>& edges() const noexcept { return edges_; }
  const std::vector<std::size_t>& counts() const noexcept { return counts_; }
  std::size_t n_samples() const noexcept { return n_samples_; }
  std::size_t bins() const noexcept { return counts_.size(); }

  double lower(std::size_t bin) const { return edges_.at(bin); }
  double upper(std::size_t bin) const { return edges_.at(bin + 1); }
  double midpoint(std::size_t bin) const { return 0.5 * (lower(bin) + upper(bin)); }

  bool contains(std::size_t bin, double survival) const { return bin_of(survival) == bin; }

  /// Most populated bin; ties go to the lowest index.
  std::size_t mode_bin() const {
    return static_cast<std::size_t>(std::ranges::max_element(counts_) - counts_.begin());
  }

  friend bool operator==(const SurvivalHistogram&, const SurvivalHistogram&) = default;

 private:
  std::vector<double> edges_;
  std::vector<std::size_t> counts_;
  std::size_t n_samples_ = 0;
};

struct RatePoint {
  double survival = 0.0;  // bin midpoint
  double rate = 0.0;      // J = -ln(relative frequency) / m
  std::size_t bin = 0;
};

/// Finite-m estimate of the rate function from relative frequencies. Empty
/// bins are omitted.
inline std::vector<RatePoint> empirical_rate_function(const SurvivalHistogram& hist,
                                                      std::size_t m) {
  if (hist.n_samples() == 0) throw ValidationError("rate function: histogram is empty");
  if (m == 0) throw ValidationError("rate function: m must be at least 1");
  std::vector<RatePoint> points;
  const double n = static_cast<double>(hist.n_samples());
  for (std::size_t i = 0; i < hist.bins(); ++i) {
    const auto count = hist.counts()[i];
    if (count == 0) continue;
    const double freq = static_cast<double>(count) / n;
    points.push_back({hist.midpoint(i), -std::log(freq) / static_cast<double>(m), i});
  }
  return points;
}

}  // namespace sqze
