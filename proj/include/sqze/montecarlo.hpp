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
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "sqze/error.hpp"
#include "sqze/intervals.hpp"
#include "sqze/large_deviation.hpp"
#include "sqze/quantum.hpp"
#include "sqze/rng.hpp"

namespace sqze {

/// 64-bit FNV-1a over the canonical byte image of a configuration.
class Fingerprint {
 public:
  Fingerprint& add(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) byte(static_cast<unsigned char>(v >> (8 * i)));
    return *this;
  }
  Fingerprint& add(double v) { return add(std::bit_cast<std::uint64_t>(v)); }
  Fingerprint& add(std::string_view s) {
    add(static_cast<std::uint64_t>(s.size()));
    for (char c : s) byte(static_cast<unsigned char>(c));
    return *this;
  }

  std::uint64_t value() const noexcept { return hash_; }

  std::string hex() const {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash_));
    return buf;
  }

 private:
  void byte(unsigned char b) {
    hash_ ^= b;
    hash_ *= 0x100000001b3ULL;
  }

  std::uint64_t hash_ = 0xcbf29ce484222325ULL;
};

inline std::string ensemble_fingerprint(const HermitianOperator& h, const StateVector& psi0,
                                        const IntervalDistribution& dist, std::size_t m,
                                        std::size_t n_runs, std::uint64_t seed) {
  Fingerprint fp;
  fp.add(static_cast<std::uint64_t>(h.dimension()));
  for (Eigen::Index j = 0; j < h.dimension(); ++j) {
    for (Eigen::Index i = 0; i < h.dimension(); ++i) {
      fp.add(h.matrix()(i, j).real()).add(h.matrix()(i, j).imag());
    }
  }
  for (Eigen::Index i = 0; i < psi0.dimension(); ++i) {
    fp.add(psi0.amplitudes()(i).real()).add(psi0.amplitudes()(i).imag());
  }
  fp.add(static_cast<std::uint64_t>(dist.size()));
  for (const auto& a : dist.atoms()) fp.add(a.mu).add(a.probability);
  fp.add(static_cast<std::uint64_t>(m)).add(static_cast<std::uint64_t>(n_runs)).add(seed).add(kRngId);
  return fp.hex();
}

struct EnsembleOptions {
  /// Worker cap; 0 uses the hardware concurrency.
  unsigned threads = 0;
  HistogramBinning binning{};
};

struct EnsembleResult {
  std::vector<double> samples;  // sample i comes from run index i
  SurvivalHistogram histogram{{0.0, 1.0}};
  double sample_mean = 0.0;
  double sample_variance = 0.0;  // unbiased
  std::size_t mode_bin = 0;
  double mode_lower = 0.0;
  double mode_upper = 1.0;
  std::string config_fingerprint;
  std::string rng_id{kRngId};
};

inline constexpr std::uint64_t kMaxEnsembleWork = std::uint64_t{1} << 40;

namespace detail {

inline unsigned worker_count(unsigned requested, std::size_t n_runs) {
  unsigned n = requested != 0 ? requested : std::max(1u, std::thread::hardware_concurrency());
  return static_cast<unsigned>(std::min<std::size_t>(n, n_runs));
}

/// Runs body(begin, end, worker) over contiguous index blocks.
template <typename Body>
void parallel_blocks(std::size_t n, unsigned workers, Body&& body) {
  if (workers <= 1) {
    body(std::size_t{0}, n, 0u);
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  const std::size_t chunk = (n + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    const std::size_t begin = std::min(n, w * chunk);
    const std::size_t end = std::min(n, begin + chunk);
    pool.emplace_back([&body, begin, end, w] { body(begin, end, w); });
  }
}

inline std::vector<double> atom_log_q(const HermitianOperator& h, const StateVector& psi0,
                                      const IntervalDistribution& dist) {
  std::vector<double> log_q;
  for (const auto& a : dist.atoms()) log_q.push_back(log_survival_q(h, psi0, a.mu));
  return log_q;
}

}  // namespace detail

/// Samples P for n_runs independent random sequences. Run i uses the stream
/// derive_stream_seed(seed, i), so the result is bit-identical for any number
/// of workers.
inline EnsembleResult run_ensemble(const HermitianOperator& h, const StateVector& psi0,
                                   const IntervalDistribution& dist, std::size_t m,
                                   std::size_t n_runs, std::uint64_t seed,
                                   const EnsembleOptions& options = {}) {
  if (m == 0) throw ValidationError("run_ensemble: m must be at least 1");
  if (n_runs == 0) throw ValidationError("run_ensemble: n_runs must be at least 1");
  if (m > kMaxEnsembleWork / n_runs) {
    throw std::length_error("run_ensemble: n_runs * m exceeds the work limit");
  }
  if (h.dimension() != psi0.dimension()) {
    throw ValidationError("run_ensemble: Hamiltonian and state dimensions differ");
  }

  // Per-atom ln q, summed in sequence order: the same arithmetic as
  // sequence_survival on the sampled intervals, without re-diagonalizing.
  const auto log_q = detail::atom_log_q(h, psi0, dist);

  EnsembleResult result;
  result.samples.resize(n_runs);
  const unsigned workers = detail::worker_count(options.threads, n_runs);
  detail::parallel_blocks(n_runs, workers, [&](std::size_t begin, std::size_t end, unsigned) {
    for (std::size_t i = begin; i < end; ++i) {
      SplitMix64 rng(derive_stream_seed(seed, i));
      double log_p = 0.0;
      for (std::size_t j = 0; j < m; ++j) log_p += log_q[pick_atom(dist, rng.uniform())];
      result.samples[i] = std::exp(log_p);
    }
  });

  // Edges depend on all samples; partial histograms are then filled per
  // block and merged.
  const auto edges = make_bin_edges(options.binning, result.samples);
  std::vector<SurvivalHistogram> partial(workers, SurvivalHistogram(edges));
  detail::parallel_blocks(n_runs, workers, [&](std::size_t begin, std::size_t end, unsigned w) {
    for (std::size_t i = begin; i < end; ++i) partial[w].add(result.samples[i]);
  });
  result.histogram = SurvivalHistogram(edges);
  for (const auto& p : partial) result.histogram.merge(p);

  // Sequential reduction in run order keeps the moments independent of the
  // worker count.
  double sum = 0.0;
  for (double s : result.samples) sum += s;
  result.sample_mean = sum / static_cast<double>(n_runs);
  // Deviations from the first sample, so identical samples give exactly zero.
  const double shift = result.samples.front();
  double ds = 0.0;
  double ss = 0.0;
  for (double s : result.samples) {
    ds += s - shift;
    ss += (s - shift) * (s - shift);
  }
  ss -= ds * ds / static_cast<double>(n_runs);
  result.sample_variance = n_runs > 1 ? std::max(0.0, ss) / static_cast<double>(n_runs - 1) : 0.0;

  result.mode_bin = result.histogram.mode_bin();
  result.mode_lower = result.histogram.lower(result.mode_bin);
  result.mode_upper = result.histogram.upper(result.mode_bin);
  result.config_fingerprint = ensemble_fingerprint(h, psi0, dist, m, n_runs, seed);
  return result;
}

// Exhaustive enumeration ----------------------------------------------------

/// One distinct interval sequence with its probability weight.
struct WeightedSequence {
  double survival = 0.0;
  double weight = 0.0;
  std::size_t first_atom_count = 0;  // how many intervals equal the smallest atom
};

struct ExhaustiveLaw {
  std::vector<WeightedSequence> outcomes;
  double mean = 0.0;  // sum of weight * survival
};

inline constexpr std::size_t kMaxExhaustiveM = 20;

/// Replaces sampling by full enumeration of every ordered sequence. Limited to
/// at most two atoms and m <= 20 (at most 2^20 sequences).
inline ExhaustiveLaw enumerate_sequences(const HermitianOperator& h, const StateVector& psi0,
                                         const IntervalDistribution& dist, std::size_t m) {
  if (m == 0) throw ValidationError("enumerate_sequences: m must be at least 1");
  if (dist.size() > 2 || m > kMaxExhaustiveM) {
    throw ValidationError("enumerate_sequences: requires at most two atoms and m <= 20");
  }
  const auto& atoms = dist.atoms();
  ExhaustiveLaw law;
  const std::uint64_t count = std::uint64_t{1} << (dist.size() == 1 ? 0 : m);
  law.outcomes.reserve(count);
  const auto log_q = detail::atom_log_q(h, psi0, dist);
  for (std::uint64_t mask = 0; mask < count; ++mask) {
    double weight = 1.0;
    double log_p = 0.0;
    std::size_t first = 0;
    for (std::size_t j = 0; j < m; ++j) {
      // Bit j set selects the second atom for interval j.
      const std::size_t k = (dist.size() == 2 && ((mask >> j) & 1u)) ? 1 : 0;
      weight *= atoms[k].probability;
      log_p += log_q[k];
      if (k == 0) ++first;
    }
    const double survival = std::exp(log_p);
    law.outcomes.push_back({survival, weight, first});
    law.mean += weight * survival;
  }
  return law;
}

}  // namespace sqze
