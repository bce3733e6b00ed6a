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

// The four experiments behind the command-line tool. Each returns in-memory
// tables or JSON documents; file handling lives in tools/sqze.cpp.

#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "sqze/config.hpp"
#include "sqze/large_deviation.hpp"
#include "sqze/montecarlo.hpp"
#include "sqze/statistics.hpp"
#include "sqze/units.hpp"

namespace sqze {

inline constexpr int kReportSchemaVersion = 1;
inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

/// Numeric table; NaN marks an empty cell.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  std::size_t column(std::string_view name) const {
    for (std::size_t i = 0; i < columns.size(); ++i) {
      if (columns[i] == name) return i;
    }
    throw std::out_of_range("no column " + std::string(name));
  }
};

/// RFC 4180 style CSV with a header row. An optional leading comment line
/// (e.g. a timestamp) is written before the header.
inline std::string to_csv(const Table& table, const std::optional<std::string>& comment = {}) {
  std::string out;
  if (comment) out += "# " + *comment + "\n";
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    if (i) out += ',';
    out += table.columns[i];
  }
  out += '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      if (!std::isnan(row[i])) out += format_double(row[i]);
    }
    out += '\n';
  }
  return out;
}

inline json json_number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

inline json to_json(const Table& table) {
  json rows = json::array();
  for (const auto& row : table.rows) {
    json r = json::object();
    for (std::size_t i = 0; i < row.size(); ++i) r[table.columns[i]] = json_number(row[i]);
    rows.push_back(r);
  }
  return {{"schema_version", kReportSchemaVersion}, {"columns", table.columns}, {"rows", rows}};
}

// decay ---------------------------------------------------------------------

inline SweepSpec default_decay_sweep() {
  return {"mu", 0.0, units::us_to_s(25.0), units::us_to_s(0.25)};
}

/// Periodic measurements: q(mu) and q(mu)^m over a sweep of mu.
inline Table decay_table(const ExperimentConfig& cfg) {
  const SweepSpec sweep = cfg.sweep.value_or(default_decay_sweep());
  if (sweep.variable != "mu") throw ConfigError("sweep.variable", "decay sweeps 'mu'");
  const auto h = cfg.hamiltonian_operator();
  const auto psi0 = cfg.initial_state_vector();
  Table t{{"mu_us", "q", "P"}, {}};
  for (double mu : sweep.values()) {
    const double q = survival_q(h, psi0, mu);
    const double log_p = q > 0.0 ? static_cast<double>(cfg.m) * std::log(q) : kNegInf;
    t.rows.push_back({units::s_to_us(mu), q, std::exp(log_p)});
  }
  return t;
}

// sweep ---------------------------------------------------------------------

inline SweepSpec default_mu2_sweep() {
  return {"mu2", units::us_to_s(2.0), units::us_to_s(25.0), units::us_to_s(0.25)};
}

/// Geometric, arithmetic and ensemble averages of a bimodal p(mu) as the
/// second interval mu2 is swept. mu1 and the weights come from the two atoms
/// listed in the config; the second atom's duration is replaced per row.
inline Table sweep_table(const ExperimentConfig& cfg) {
  const SweepSpec sweep = cfg.sweep.value_or(default_mu2_sweep());
  if (sweep.variable != "mu2") throw ConfigError("sweep.variable", "sweep varies 'mu2'");
  if (cfg.atoms.size() != 2) {
    throw ConfigError("distribution.atoms", "sweep needs exactly two atoms (mu1, p1), (mu2, p2)");
  }
  const auto h = cfg.hamiltonian_operator();
  const auto psi0 = cfg.initial_state_vector();
  const double mu1 = cfg.atoms[0].mu;
  const double p1 = cfg.atoms[0].probability;
  Table t{{"mu2_us", "P_g", "P_a", "ensemble", "D", "zeno_parameter"}, {}};
  for (double mu2 : sweep.values()) {
    const auto stats = survival_statistics(make_bimodal(mu1, mu2, p1), h, psi0, cfg.m);
    t.rows.push_back({units::s_to_us(mu2), stats.geometric, stats.arithmetic, stats.ensemble,
                      stats.discrepancy, stats.zeno_parameter});
  }
  return t;
}

// histogram -----------------------------------------------------------------

struct HistogramOutput {
  Table histogram;  // one row per bin
  Table overlay;    // one row per k of the exact support
  json metadata;
  SurvivalHistogram bins{{0.0, 1.0}};
};

/// Empirical distribution of P (sampled or exhaustively enumerated) together
/// with the exact binomial law and its Gaussian approximation on the same
/// bins. Two distinct atoms with equal q raise DegenerateError.
inline HistogramOutput histogram_experiment(const ExperimentConfig& cfg, unsigned threads = 0) {
  const auto h = cfg.hamiltonian_operator();
  const auto psi0 = cfg.initial_state_vector();
  const auto dist = cfg.distribution();
  if (dist.size() > 2) {
    throw ConfigError("distribution.atoms", "histogram needs at most two distinct atoms");
  }
  const SurvivalTable table(dist, h, psi0);
  const auto stats = survival_statistics(table, cfg.m);

  std::optional<BimodalLaw> law;
  if (dist.size() == 2) law = BimodalLaw::from(dist, h, psi0, cfg.m);

  HistogramOutput out;
  std::vector<double> mass;  // per-bin probability mass of the empirical law
  double empirical_mean = 0.0;
  std::string fingerprint = ensemble_fingerprint(h, psi0, dist, cfg.m, cfg.n_runs, cfg.seed);
  if (cfg.histogram.mode == EnsembleMode::kSampled) {
    EnsembleOptions opts;
    opts.threads = threads;
    opts.binning = cfg.histogram.binning;
    auto ens = run_ensemble(h, psi0, dist, cfg.m, cfg.n_runs, cfg.seed, opts);
    out.bins = ens.histogram;
    for (auto c : out.bins.counts()) {
      mass.push_back(static_cast<double>(c) / static_cast<double>(out.bins.n_samples()));
    }
    empirical_mean = ens.sample_mean;
  } else {
    const auto ex = enumerate_sequences(h, psi0, dist, cfg.m);
    std::vector<double> values;
    for (const auto& o : ex.outcomes) values.push_back(o.survival);
    out.bins = SurvivalHistogram(make_bin_edges(cfg.histogram.binning, values));
    mass.assign(out.bins.bins(), 0.0);
    for (const auto& o : ex.outcomes) {
      out.bins.add(o.survival);
      mass[out.bins.bin_of(o.survival)] += o.weight;
    }
    empirical_mean = ex.mean;
  }

  // Theoretical mass per bin.
  const std::size_t nbins = out.bins.bins();
  std::vector<double> exact_mass(nbins, 0.0);
  std::vector<double> gauss_mass(nbins, law ? 0.0 : kMissing);
  out.overlay.columns = {"k", "P", "exact_prob", "gaussian_prob", "gaussian_density", "bin"};
  if (law) {
    const auto exact = exact_law(*law);
    const bool has_gauss = law->k_variance() > 0.0;
    const auto gauss = has_gauss ? discretized_gaussian(*law) : std::vector<double>{};
    if (!has_gauss) gauss_mass.assign(nbins, kMissing);
    for (std::size_t k = 0; k <= cfg.m; ++k) {
      const double p = law->survival_at(static_cast<double>(k));
      const std::size_t bin = out.bins.bin_of(p);
      exact_mass[bin] += exact[k];
      if (has_gauss) gauss_mass[bin] += gauss[k];
      out.overlay.rows.push_back({static_cast<double>(k), p, exact[k], has_gauss ? gauss[k] : kMissing,
                                  has_gauss ? gaussian_prob_k(*law, static_cast<double>(k)) : kMissing,
                                  static_cast<double>(bin)});
    }
  } else {
    // Single atom: all mass at q^m.
    const double p = stats.arithmetic;
    const std::size_t bin = out.bins.bin_of(p);
    exact_mass[bin] = 1.0;
    out.overlay.rows.push_back({static_cast<double>(cfg.m), p, 1.0, kMissing, kMissing,
                                static_cast<double>(bin)});
  }

  const auto rates = empirical_rate_function(out.bins, cfg.m);
  std::vector<double> rate(nbins, kMissing);
  for (const auto& r : rates) rate[r.bin] = r.rate;

  out.histogram.columns = {"bin_lower", "bin_upper", "count", "relative_frequency",
                           "exact_mass", "gaussian_mass", "rate"};
  for (std::size_t i = 0; i < nbins; ++i) {
    out.histogram.rows.push_back({out.bins.lower(i), out.bins.upper(i),
                                  static_cast<double>(out.bins.counts()[i]), mass[i], exact_mass[i],
                                  gauss_mass[i], rate[i]});
  }

  // In exhaustive mode the mode is the heaviest bin, not the most populated.
  std::size_t mode = out.bins.mode_bin();
  if (cfg.histogram.mode == EnsembleMode::kExhaustive) {
    mode = static_cast<std::size_t>(std::ranges::max_element(mass) - mass.begin());
  }

  json law_json = nullptr;
  if (law) {
    law_json = {{"q1", law->q1()}, {"q2", law->q2()}, {"p1", law->p1()}, {"p2", law->p2()}};
  }
  out.metadata = {
      {"schema_version", kReportSchemaVersion},
      {"command", "histogram"},
      {"mode", cfg.histogram.mode == EnsembleMode::kSampled ? "sampled" : "exhaustive"},
      {"m", cfg.m},
      {"n_runs", cfg.n_runs},
      {"seed", cfg.seed},
      {"rng_id", std::string(kRngId)},
      {"fingerprint", fingerprint},
      {"binning", cfg.histogram.binning.scale == BinScale::kLog ? "log" : "linear"},
      {"bins", nbins},
      {"markers",
       {{"geometric", json_number(stats.geometric)},
        {"ensemble", json_number(stats.ensemble)},
        {"arithmetic", json_number(stats.arithmetic)},
        {"empirical_mean", json_number(empirical_mean)}}},
      {"marker_bins",
       {{"geometric", out.bins.bin_of(stats.geometric)},
        {"ensemble", out.bins.bin_of(stats.ensemble)},
        {"arithmetic", out.bins.bin_of(stats.arithmetic)}}},
      {"mode_bin", {{"index", mode}, {"lower", out.bins.lower(mode)}, {"upper", out.bins.upper(mode)}}},
      {"law", law_json},
  };
  return out;
}

// analyze -------------------------------------------------------------------

/// Machine-readable summary of one configuration. The embedded canonical
/// config can be fed back to parse_config to reproduce the report exactly.
inline json analyze_report(const ExperimentConfig& cfg) {
  const auto h = cfg.hamiltonian_operator();
  const auto psi0 = cfg.initial_state_vector();
  const auto dist = cfg.distribution();
  const auto stats = survival_statistics(dist, h, psi0, cfg.m);
  const auto moments = hamiltonian_moments(h, psi0);
  const double dq4 = delta_q_fourth_order(moments, dist, cfg.m);

  json atoms = json::array();
  const SurvivalTable table(dist, h, psi0);
  for (const auto& r : table.rows()) {
    atoms.push_back({{"mu_s", r.mu}, {"p", r.probability}, {"q", r.q}});
  }
  return {
      {"schema_version", kReportSchemaVersion},
      {"command", "analyze"},
      {"config", to_json(cfg)},
      {"fingerprint", ensemble_fingerprint(h, psi0, dist, cfg.m, cfg.n_runs, cfg.seed)},
      {"m", cfg.m},
      {"statistics",
       {{"geometric", json_number(stats.geometric)},
        {"arithmetic", json_number(stats.arithmetic)},
        {"ensemble", json_number(stats.ensemble)},
        {"zeno_parameter", json_number(stats.zeno_parameter)},
        {"delta_q", json_number(stats.delta_q)},
        {"discrepancy", json_number(stats.discrepancy)}}},
      {"zeno",
       {{"classification", std::string(to_string(classify_zeno(stats.zeno_parameter, cfg.zeno)))},
        {"strict_threshold", cfg.zeno.strict},
        {"loose_threshold", cfg.zeno.loose}}},
      {"delta_q_exact", json_number(stats.delta_q)},
      {"delta_q_fourth_order", json_number(dq4)},
      {"hamiltonian_moments",
       {{"mean_rad_per_s", moments.mean},
        {"variance_rad2_per_s2", moments.variance},
        {"kurtosis_rad4_per_s4", moments.kurtosis}}},
      {"distribution",
       {{"atoms", atoms}, {"mean_s", dist.mean()}, {"nu2_s2", dist.nu2()}, {"nu4_s4", dist.nu4()}}},
  };
}

}  // namespace sqze
