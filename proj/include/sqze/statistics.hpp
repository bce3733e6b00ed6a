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

// Closed-form statistics of the sequence survival probability P for i.i.d.
// intervals drawn from a discrete p(mu):
//
//   ensemble    <P>   = (sum_k p_k q_k)^m
//   geometric   P_g   = exp(m sum_k p_k ln q_k)        (most probable value)
//   arithmetic  P_a   = sum_k p_k q_k^m
//
// with P_g <= <P> <= P_a. All three are evaluated from the per-atom ln q_k so
// that large m never underflows.
//
// The Zeno parameter is reported signed, m <ln q> <= 0; regime tests use its
// magnitude.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string_view>
#include <vector>

#include "sqze/error.hpp"
#include "sqze/intervals.hpp"
#include "sqze/quantum.hpp"

namespace sqze {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// Per-atom survival data shared by every average.
struct AtomSurvival {
  double mu = 0.0;
  double probability = 0.0;
  double q = 1.0;
  double log_q = 0.0;
};

class SurvivalTable {
 public:
  SurvivalTable(const IntervalDistribution& dist, const HermitianOperator& h,
                const StateVector& psi0) {
    rows_.reserve(dist.size());
    for (const auto& atom : dist.atoms()) {
      const double log_q = log_survival_q(h, psi0, atom.mu);
      rows_.push_back({atom.mu, atom.probability, std::exp(log_q), log_q});
    }
  }

  const std::vector<AtomSurvival>& rows() const noexcept { return rows_; }

  /// <ln q>; -inf when a weighted atom has q = 0.
  double mean_log_q() const {
    double acc = 0.0;
    for (const auto& r : rows_) {
      if (r.log_q == kNegInf) return kNegInf;
      acc += r.probability * r.log_q;
    }
    return acc;
  }

  double mean_q() const {
    double acc = 0.0;
    for (const auto& r : rows_) acc += r.probability * r.q;
    return acc;
  }

  /// ln sum_k p_k q_k^m via log-sum-exp.
  double log_mean_q_power(std::size_t m) const {
    const double md = static_cast<double>(m);
    double top = kNegInf;
    for (const auto& r : rows_) {
      if (r.log_q != kNegInf) top = std::max(top, md * r.log_q);
    }
    if (top == kNegInf) return kNegInf;
    double acc = 0.0;
    for (const auto& r : rows_) {
      if (r.log_q != kNegInf) acc += r.probability * std::exp(md * r.log_q - top);
    }
    return top + std::log(acc);
  }

 private:
  std::vector<AtomSurvival> rows_;
};

namespace detail {

inline void require_measurements(std::size_t m) {
  if (m == 0) throw ValidationError("number of measurements m must be at least 1");
}

}  // namespace detail

inline double zeno_parameter(const SurvivalTable& table, std::size_t m) {
  detail::require_measurements(m);
  const double mean_log = table.mean_log_q();
  return mean_log == kNegInf ? kNegInf : static_cast<double>(m) * mean_log;
}

inline double ensemble_average(const SurvivalTable& table, std::size_t m) {
  detail::require_measurements(m);
  const double mean = table.mean_q();
  if (mean <= 0.0) return 0.0;
  return std::exp(static_cast<double>(m) * std::log(mean));
}

inline double geometric_average(const SurvivalTable& table, std::size_t m) {
  return std::exp(zeno_parameter(table, m));
}

inline double arithmetic_average(const SurvivalTable& table, std::size_t m) {
  detail::require_measurements(m);
  return std::exp(table.log_mean_q_power(m));
}

/// Delta q = ln <q^m> - <ln q^m> >= 0. Undefined when P_g = 0.
inline double delta_q_exact(const SurvivalTable& table, std::size_t m) {
  const double zeta = zeno_parameter(table, m);
  if (zeta == kNegInf) {
    throw DegenerateError("delta_q_exact: geometric average is zero");
  }
  // ln sum_i p_i exp(m (ln q_i - <ln q>)), centered so that the near-Zeno
  // case does not subtract two almost equal logarithms.
  const double md = static_cast<double>(m);
  const double mean_log = table.mean_log_q();
  double top = 0.0;
  for (const auto& r : table.rows()) top = std::max(top, md * (r.log_q - mean_log));
  if (top > 1.0) return std::max(0.0, table.log_mean_q_power(m) - zeta);
  double acc = 0.0;
  for (const auto& r : table.rows()) acc += r.probability * std::expm1(md * (r.log_q - mean_log));
  return std::max(0.0, std::log1p(acc));
}

/// Normalized discrepancy D = (P_a - P_g) / P_a = 1 - exp(-Delta q).
inline double discrepancy(const SurvivalTable& table, std::size_t m) {
  detail::require_measurements(m);
  if (table.log_mean_q_power(m) == kNegInf) {
    throw DegenerateError("discrepancy: arithmetic average is zero");
  }
  if (zeno_parameter(table, m) == kNegInf) return 1.0;
  return -std::expm1(-delta_q_exact(table, m));
}

inline double ensemble_average(const IntervalDistribution& dist, const HermitianOperator& h,
                               const StateVector& psi0, std::size_t m) {
  return ensemble_average(SurvivalTable(dist, h, psi0), m);
}

inline double geometric_average(const IntervalDistribution& dist, const HermitianOperator& h,
                                const StateVector& psi0, std::size_t m) {
  return geometric_average(SurvivalTable(dist, h, psi0), m);
}

inline double arithmetic_average(const IntervalDistribution& dist, const HermitianOperator& h,
                                 const StateVector& psi0, std::size_t m) {
  return arithmetic_average(SurvivalTable(dist, h, psi0), m);
}

inline double zeno_parameter(const IntervalDistribution& dist, const HermitianOperator& h,
                             const StateVector& psi0, std::size_t m) {
  return zeno_parameter(SurvivalTable(dist, h, psi0), m);
}

inline double delta_q_exact(const IntervalDistribution& dist, const HermitianOperator& h,
                            const StateVector& psi0, std::size_t m) {
  return delta_q_exact(SurvivalTable(dist, h, psi0), m);
}

inline double discrepancy(const IntervalDistribution& dist, const HermitianOperator& h,
                          const StateVector& psi0, std::size_t m) {
  return discrepancy(SurvivalTable(dist, h, psi0), m);
}

/// Leading non-vanishing order of Delta q in the interval durations:
/// (m^2 / 2) (Delta^2 H)^2 (nu4 - nu2^2).
inline double delta_q_fourth_order(const HamiltonianMoments& moments,
                                   const IntervalDistribution& dist, std::size_t m) {
  detail::require_measurements(m);
  const double md = static_cast<double>(m);
  return 0.5 * md * md * moments.variance * moments.variance * dist.mu_squared_variance();
}

/// Fourth-order truncation of q(mu)^m.
inline double series_q_m(const HamiltonianMoments& moments, double mu, std::size_t m) {
  const double md = static_cast<double>(m);
  const double var = moments.variance;
  const double mu2 = mu * mu;
  return 1.0 - md * var * mu2 +
         md / 12.0 * (moments.kurtosis + 3.0 * (2.0 * md - 1.0) * var * var) * mu2 * mu2;
}

/// Fourth-order truncation of ln q(mu)^m.
inline double series_ln_q_m(const HamiltonianMoments& moments, double mu, std::size_t m) {
  const double md = static_cast<double>(m);
  const double var = moments.variance;
  const double mu2 = mu * mu;
  return -md * var * mu2 + md / 12.0 * (moments.kurtosis - 3.0 * var * var) * mu2 * mu2;
}

enum class ZenoRegime { kStrict, kLoose, kOutside };

struct ZenoThresholds {
  double strict = 0.01;
  double loose = 0.1;
};

inline ZenoRegime classify_zeno(double zeno_param, const ZenoThresholds& thresholds = {}) {
  const double magnitude = std::abs(zeno_param);
  if (magnitude <= thresholds.strict) return ZenoRegime::kStrict;
  if (magnitude <= thresholds.loose) return ZenoRegime::kLoose;
  return ZenoRegime::kOutside;
}

constexpr std::string_view to_string(ZenoRegime regime) {
  switch (regime) {
    case ZenoRegime::kStrict: return "strict";
    case ZenoRegime::kLoose: return "loose";
    case ZenoRegime::kOutside: return "outside";
  }
  return "outside";
}

/// All averages and discrepancy measures for one configuration. When the
/// geometric average vanishes, delta_q is +inf and discrepancy is 1.
struct SurvivalStatistics {
  double geometric = 0.0;
  double arithmetic = 0.0;
  double ensemble = 0.0;
  double zeno_parameter = 0.0;
  double delta_q = 0.0;
  double discrepancy = 0.0;
  std::size_t m = 0;
};

inline SurvivalStatistics survival_statistics(const SurvivalTable& table, std::size_t m) {
  SurvivalStatistics s;
  s.m = m;
  s.geometric = geometric_average(table, m);
  s.arithmetic = arithmetic_average(table, m);
  s.ensemble = ensemble_average(table, m);
  s.zeno_parameter = zeno_parameter(table, m);
  if (s.zeno_parameter == kNegInf) {
    s.delta_q = std::numeric_limits<double>::infinity();
    s.discrepancy = s.arithmetic > 0.0 ? 1.0 : std::numeric_limits<double>::quiet_NaN();
  } else {
    s.delta_q = delta_q_exact(table, m);
    s.discrepancy = -std::expm1(-s.delta_q);
  }
  return s;
}

inline SurvivalStatistics survival_statistics(const IntervalDistribution& dist,
                                              const HermitianOperator& h, const StateVector& psi0,
                                              std::size_t m) {
  return survival_statistics(SurvivalTable(dist, h, psi0), m);
}

}  // namespace sqze
