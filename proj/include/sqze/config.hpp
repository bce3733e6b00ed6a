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

// Experiment configuration: a single JSON document with nested sections.
// Physical quantities are strings with a mandatory unit suffix ("2.5 kHz",
// "10 us") and are converted to rad/s and seconds at parse time. Unknown keys
// are rejected. See README.md for the full schema.

#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <nlohmann/json.hpp>

#include "sqze/error.hpp"
#include "sqze/intervals.hpp"
#include "sqze/large_deviation.hpp"
#include "sqze/quantum.hpp"
#include "sqze/statistics.hpp"
#include "sqze/units.hpp"

namespace sqze {

using json = nlohmann::json;

/// Shortest decimal that round-trips to the same double.
inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

enum class QuantityKind { kFrequency, kDuration };

/// Parses "<number> <unit>" into rad/s (frequency) or seconds (duration).
inline double parse_quantity(std::string_view text, QuantityKind kind, const std::string& field) {
  auto trim = [](std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
  };
  text = trim(text);
  double value = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc{} || !std::isfinite(value)) {
    throw ConfigError(field, "expected '<number> <unit>', got '" + std::string(text) + "'");
  }
  const std::string_view unit = trim(text.substr(static_cast<std::size_t>(res.ptr - text.data())));
  if (unit.empty()) throw ConfigError(field, "missing unit in '" + std::string(text) + "'");

  if (kind == QuantityKind::kFrequency) {
    if (unit == "rad/s") return value;
    if (unit == "krad/s") return value * 1e3;
    if (unit == "Hz") return units::hz_to_rad_per_s(value);
    if (unit == "kHz") return units::khz_to_rad_per_s(value);
    if (unit == "MHz") return units::mhz_to_rad_per_s(value);
    throw ConfigError(field, "unknown frequency unit '" + std::string(unit) +
                                 "' (use Hz, kHz, MHz, rad/s or krad/s)");
  }
  if (unit == "s") return value;
  if (unit == "ms") return value / 1e3;
  if (unit == "us" || unit == "\xC2\xB5s") return value / 1e6;
  if (unit == "ns") return value / 1e9;
  throw ConfigError(field, "unknown duration unit '" + std::string(unit) + "' (use s, ms, us or ns)");
}

/// Scale factor from a frequency unit tag to rad/s.
inline double frequency_unit_scale(std::string_view unit, const std::string& field) {
  return parse_quantity("1 " + std::string(unit), QuantityKind::kFrequency, field);
}

struct HamiltonianSpec {
  enum class Kind { kRabi, kMatrix };
  Kind kind = Kind::kRabi;
  double delta_h = 0.0;  // rad/s, rabi only
  ComplexMatrix matrix;  // rad/s, matrix only

  HermitianOperator build() const {
    return kind == Kind::kRabi ? rabi_hamiltonian(delta_h) : HermitianOperator(matrix);
  }
  Eigen::Index dimension() const { return kind == Kind::kRabi ? 2 : matrix.rows(); }
};

struct StateSpec {
  std::optional<Eigen::Index> basis;  // when set, amplitudes are ignored
  ComplexVector amplitudes;           // normalized on build

  StateVector build(Eigen::Index dimension) const {
    if (basis) return StateVector::basis(dimension, *basis);
    if (amplitudes.size() != dimension) {
      throw ConfigError("initial_state.amplitudes", "length must match the Hamiltonian dimension");
    }
    return StateVector::normalized(amplitudes);
  }
};

struct SweepSpec {
  std::string variable;  // "mu" or "mu2"
  double from = 0.0;     // seconds
  double to = 0.0;
  double step = 0.0;

  std::vector<double> values() const {
    std::vector<double> out;
    const double span = to - from;
    const auto n = static_cast<std::size_t>(std::floor(span / step * (1.0 + 1e-12) + 1e-9)) + 1;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(from + static_cast<double>(i) * step);
    return out;
  }
};

enum class EnsembleMode { kSampled, kExhaustive };

struct HistogramSpec {
  HistogramBinning binning{};
  EnsembleMode mode = EnsembleMode::kSampled;
};

struct OutputSpec {
  std::string dir = ".";
  std::string format = "csv";
};

struct ExperimentConfig {
  HamiltonianSpec hamiltonian;
  StateSpec initial_state;
  std::vector<IntervalAtom> atoms;  // as listed, before merging
  std::size_t m = 100;
  std::size_t n_runs = 1000;
  std::uint64_t seed = 0;
  std::optional<SweepSpec> sweep;
  HistogramSpec histogram;
  ZenoThresholds zeno;
  OutputSpec output;

  HermitianOperator hamiltonian_operator() const { return hamiltonian.build(); }
  StateVector initial_state_vector() const { return initial_state.build(hamiltonian.dimension()); }
  IntervalDistribution distribution() const { return IntervalDistribution::from_atoms(atoms); }
};

namespace detail {

inline void reject_unknown_keys(const json& obj, std::initializer_list<std::string_view> allowed,
                                const std::string& path) {
  if (!obj.is_object()) throw ConfigError(path, "expected an object");
  for (const auto& [key, _] : obj.items()) {
    bool ok = false;
    for (auto a : allowed) ok = ok || key == a;
    if (!ok) throw ConfigError(path.empty() ? key : path + "." + key, "unknown key");
  }
}

inline std::string join(const std::string& path, std::string_view key) {
  return path.empty() ? std::string(key) : path + "." + std::string(key);
}

inline const json& require(const json& obj, std::string_view key, const std::string& path) {
  const auto it = obj.find(key);
  if (it == obj.end()) throw ConfigError(join(path, key), "required key missing");
  return *it;
}

inline std::string get_string(const json& v, const std::string& field) {
  if (!v.is_string()) throw ConfigError(field, "expected a string");
  return v.get<std::string>();
}

inline double get_number(const json& v, const std::string& field) {
  if (!v.is_number()) throw ConfigError(field, "expected a number");
  return v.get<double>();
}

inline std::uint64_t get_unsigned(const json& v, const std::string& field) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0) {
    return static_cast<std::uint64_t>(v.get<std::int64_t>());
  }
  throw ConfigError(field, "expected a non-negative integer");
}

inline double get_quantity(const json& v, QuantityKind kind, const std::string& field) {
  return parse_quantity(get_string(v, field), kind, field);
}

inline ComplexMatrix parse_matrix(const json& j, double scale) {
  const json& re = require(j, "real", "hamiltonian");
  if (!re.is_array() || re.empty()) throw ConfigError("hamiltonian.real", "expected a square array");
  const auto d = static_cast<Eigen::Index>(re.size());
  const json* im = j.contains("imag") ? &j.at("imag") : nullptr;
  if (im && (!im->is_array() || static_cast<Eigen::Index>(im->size()) != d)) {
    throw ConfigError("hamiltonian.imag", "must have the same shape as hamiltonian.real");
  }
  ComplexMatrix m(d, d);
  for (Eigen::Index r = 0; r < d; ++r) {
    const std::string row_path = "hamiltonian.real[" + std::to_string(r) + "]";
    const json& row = re[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != d) {
      throw ConfigError(row_path, "expected " + std::to_string(d) + " entries");
    }
    const json* irow = im ? &(*im)[static_cast<std::size_t>(r)] : nullptr;
    if (irow && (!irow->is_array() || static_cast<Eigen::Index>(irow->size()) != d)) {
      throw ConfigError("hamiltonian.imag[" + std::to_string(r) + "]",
                        "expected " + std::to_string(d) + " entries");
    }
    for (Eigen::Index c = 0; c < d; ++c) {
      const auto cs = static_cast<std::size_t>(c);
      const double x = get_number(row[cs], row_path);
      const double y = irow ? get_number((*irow)[cs], "hamiltonian.imag") : 0.0;
      m(r, c) = Complex(x * scale, y * scale);
    }
  }
  return m;
}

}  // namespace detail

inline ExperimentConfig parse_config(const json& root) {
  // A report produced by `analyze` embeds its canonical config.
  if (root.is_object() && root.contains("schema_version") && root.contains("config")) {
    return parse_config(root.at("config"));
  }
  using detail::require;
  detail::reject_unknown_keys(root,
                              {"hamiltonian", "initial_state", "distribution", "m", "n_runs", "seed",
                               "sweep", "histogram", "zeno", "output"},
                              "");
  ExperimentConfig cfg;

  const json& h = require(root, "hamiltonian", "");
  const std::string type = detail::get_string(require(h, "type", "hamiltonian"), "hamiltonian.type");
  if (type == "rabi") {
    detail::reject_unknown_keys(h, {"type", "delta_h"}, "hamiltonian");
    cfg.hamiltonian.kind = HamiltonianSpec::Kind::kRabi;
    cfg.hamiltonian.delta_h = detail::get_quantity(require(h, "delta_h", "hamiltonian"),
                                                   QuantityKind::kFrequency, "hamiltonian.delta_h");
  } else if (type == "matrix") {
    detail::reject_unknown_keys(h, {"type", "units", "real", "imag"}, "hamiltonian");
    const double scale = frequency_unit_scale(
        detail::get_string(require(h, "units", "hamiltonian"), "hamiltonian.units"),
        "hamiltonian.units");
    cfg.hamiltonian.kind = HamiltonianSpec::Kind::kMatrix;
    cfg.hamiltonian.matrix = detail::parse_matrix(h, scale);
    try {
      (void)HermitianOperator(cfg.hamiltonian.matrix);
    } catch (const ValidationError& e) {
      throw ConfigError("hamiltonian", e.what());
    }
  } else {
    throw ConfigError("hamiltonian.type", "expected 'rabi' or 'matrix', got '" + type + "'");
  }

  const json& s = require(root, "initial_state", "");
  detail::reject_unknown_keys(s, {"basis", "amplitudes"}, "initial_state");
  if (s.contains("basis") == s.contains("amplitudes")) {
    throw ConfigError("initial_state", "specify exactly one of 'basis' or 'amplitudes'");
  }
  const Eigen::Index dim = cfg.hamiltonian.dimension();
  if (s.contains("basis")) {
    const auto b = detail::get_unsigned(s.at("basis"), "initial_state.basis");
    if (b >= static_cast<std::uint64_t>(dim)) {
      throw ConfigError("initial_state.basis", "index out of range for dimension " + std::to_string(dim));
    }
    cfg.initial_state.basis = static_cast<Eigen::Index>(b);
  } else {
    const json& amps = s.at("amplitudes");
    if (!amps.is_array()) throw ConfigError("initial_state.amplitudes", "expected an array");
    cfg.initial_state.amplitudes.resize(static_cast<Eigen::Index>(amps.size()));
    for (std::size_t i = 0; i < amps.size(); ++i) {
      const std::string path = "initial_state.amplitudes[" + std::to_string(i) + "]";
      const json& a = amps[i];
      if (a.is_number()) {
        cfg.initial_state.amplitudes(static_cast<Eigen::Index>(i)) = detail::get_number(a, path);
      } else if (a.is_array() && a.size() == 2) {
        cfg.initial_state.amplitudes(static_cast<Eigen::Index>(i)) =
            Complex(detail::get_number(a[0], path), detail::get_number(a[1], path));
      } else {
        throw ConfigError(path, "expected a number or a [re, im] pair");
      }
    }
    try {
      (void)cfg.initial_state.build(dim);
    } catch (const ValidationError& e) {
      throw ConfigError("initial_state.amplitudes", e.what());
    }
  }

  const json& d = require(root, "distribution", "");
  detail::reject_unknown_keys(d, {"atoms"}, "distribution");
  const json& atoms = require(d, "atoms", "distribution");
  if (!atoms.is_array() || atoms.empty()) {
    throw ConfigError("distribution.atoms", "expected a non-empty array");
  }
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    const std::string path = "distribution.atoms[" + std::to_string(i) + "]";
    detail::reject_unknown_keys(atoms[i], {"mu", "p"}, path);
    cfg.atoms.push_back({detail::get_quantity(require(atoms[i], "mu", path), QuantityKind::kDuration,
                                              path + ".mu"),
                         detail::get_number(require(atoms[i], "p", path), path + ".p")});
  }
  try {
    (void)cfg.distribution();
  } catch (const ValidationError& e) {
    throw ConfigError("distribution.atoms", e.what());
  }

  if (root.contains("m")) cfg.m = detail::get_unsigned(root.at("m"), "m");
  if (cfg.m == 0) throw ConfigError("m", "must be at least 1");
  if (root.contains("n_runs")) cfg.n_runs = detail::get_unsigned(root.at("n_runs"), "n_runs");
  if (cfg.n_runs == 0) throw ConfigError("n_runs", "must be at least 1");
  if (root.contains("seed")) cfg.seed = detail::get_unsigned(root.at("seed"), "seed");

  if (root.contains("sweep")) {
    const json& sw = root.at("sweep");
    detail::reject_unknown_keys(sw, {"variable", "from", "to", "step"}, "sweep");
    SweepSpec spec;
    spec.variable = detail::get_string(require(sw, "variable", "sweep"), "sweep.variable");
    if (spec.variable != "mu" && spec.variable != "mu2") {
      throw ConfigError("sweep.variable", "expected 'mu' or 'mu2'");
    }
    spec.from = detail::get_quantity(require(sw, "from", "sweep"), QuantityKind::kDuration, "sweep.from");
    spec.to = detail::get_quantity(require(sw, "to", "sweep"), QuantityKind::kDuration, "sweep.to");
    spec.step = detail::get_quantity(require(sw, "step", "sweep"), QuantityKind::kDuration, "sweep.step");
    if (spec.from < 0.0 || spec.to < spec.from) {
      throw ConfigError("sweep", "range must satisfy 0 <= from <= to");
    }
    if (!(spec.step > 0.0)) throw ConfigError("sweep.step", "must be positive");
    if ((spec.to - spec.from) / spec.step > 1e7) throw ConfigError("sweep.step", "too many sweep points");
    cfg.sweep = spec;
  }

  if (root.contains("histogram")) {
    const json& hg = root.at("histogram");
    detail::reject_unknown_keys(hg, {"binning", "bins", "mode"}, "histogram");
    if (hg.contains("binning")) {
      const auto b = detail::get_string(hg.at("binning"), "histogram.binning");
      if (b == "log") {
        cfg.histogram.binning.scale = BinScale::kLog;
      } else if (b == "linear") {
        cfg.histogram.binning.scale = BinScale::kLinear;
      } else {
        throw ConfigError("histogram.binning", "expected 'log' or 'linear'");
      }
    }
    if (hg.contains("bins")) {
      cfg.histogram.binning.bins = detail::get_unsigned(hg.at("bins"), "histogram.bins");
      if (cfg.histogram.binning.bins == 0) throw ConfigError("histogram.bins", "must be at least 1");
    }
    if (hg.contains("mode")) {
      const auto mode = detail::get_string(hg.at("mode"), "histogram.mode");
      if (mode == "sampled") {
        cfg.histogram.mode = EnsembleMode::kSampled;
      } else if (mode == "exhaustive") {
        cfg.histogram.mode = EnsembleMode::kExhaustive;
      } else {
        throw ConfigError("histogram.mode", "expected 'sampled' or 'exhaustive'");
      }
    }
  }

  if (root.contains("zeno")) {
    const json& z = root.at("zeno");
    detail::reject_unknown_keys(z, {"strict", "loose"}, "zeno");
    if (z.contains("strict")) cfg.zeno.strict = detail::get_number(z.at("strict"), "zeno.strict");
    if (z.contains("loose")) cfg.zeno.loose = detail::get_number(z.at("loose"), "zeno.loose");
    if (!(cfg.zeno.strict >= 0.0 && cfg.zeno.loose >= cfg.zeno.strict)) {
      throw ConfigError("zeno", "thresholds must satisfy 0 <= strict <= loose");
    }
  }

  if (root.contains("output")) {
    const json& o = root.at("output");
    detail::reject_unknown_keys(o, {"dir", "format"}, "output");
    if (o.contains("dir")) cfg.output.dir = detail::get_string(o.at("dir"), "output.dir");
    if (o.contains("format")) {
      cfg.output.format = detail::get_string(o.at("format"), "output.format");
      if (cfg.output.format != "csv" && cfg.output.format != "json") {
        throw ConfigError("output.format", "expected 'csv' or 'json'");
      }
    }
  }
  return cfg;
}

inline ExperimentConfig parse_config_text(std::string_view text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("malformed JSON: ") + e.what());
  }
  return parse_config(root);
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

/// Canonical form: every quantity in rad/s or s with round-trip precision, so
/// parse_config(to_json(cfg)) reproduces cfg bit for bit.
inline json to_json(const ExperimentConfig& cfg) {
  json root;
  if (cfg.hamiltonian.kind == HamiltonianSpec::Kind::kRabi) {
    root["hamiltonian"] = {{"type", "rabi"}, {"delta_h", format_double(cfg.hamiltonian.delta_h) + " rad/s"}};
  } else {
    json re = json::array();
    json im = json::array();
    const auto& m = cfg.hamiltonian.matrix;
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      json rr = json::array();
      json ir = json::array();
      for (Eigen::Index c = 0; c < m.cols(); ++c) {
        rr.push_back(m(r, c).real());
        ir.push_back(m(r, c).imag());
      }
      re.push_back(rr);
      im.push_back(ir);
    }
    root["hamiltonian"] = {{"type", "matrix"}, {"units", "rad/s"}, {"real", re}, {"imag", im}};
  }
  if (cfg.initial_state.basis) {
    root["initial_state"] = {{"basis", *cfg.initial_state.basis}};
  } else {
    json amps = json::array();
    for (Eigen::Index i = 0; i < cfg.initial_state.amplitudes.size(); ++i) {
      amps.push_back({cfg.initial_state.amplitudes(i).real(), cfg.initial_state.amplitudes(i).imag()});
    }
    root["initial_state"] = {{"amplitudes", amps}};
  }
  json atoms = json::array();
  for (const auto& a : cfg.atoms) {
    atoms.push_back({{"mu", format_double(a.mu) + " s"}, {"p", a.probability}});
  }
  root["distribution"] = {{"atoms", atoms}};
  root["m"] = cfg.m;
  root["n_runs"] = cfg.n_runs;
  root["seed"] = cfg.seed;
  if (cfg.sweep) {
    root["sweep"] = {{"variable", cfg.sweep->variable},
                     {"from", format_double(cfg.sweep->from) + " s"},
                     {"to", format_double(cfg.sweep->to) + " s"},
                     {"step", format_double(cfg.sweep->step) + " s"}};
  }
  root["histogram"] = {
      {"binning", cfg.histogram.binning.scale == BinScale::kLog ? "log" : "linear"},
      {"bins", cfg.histogram.binning.bins},
      {"mode", cfg.histogram.mode == EnsembleMode::kSampled ? "sampled" : "exhaustive"}};
  root["zeno"] = {{"strict", cfg.zeno.strict}, {"loose", cfg.zeno.loose}};
  root["output"] = {{"dir", cfg.output.dir}, {"format", cfg.output.format}};
  return root;
}

}  // namespace sqze
