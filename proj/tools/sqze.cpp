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

// sqze: command-line front end.
//
//   sqze decay     --config cfg.json [--out DIR] [--format csv|json]
//   sqze sweep     --config cfg.json ...
//   sqze histogram --config cfg.json [--seed N] [--threads N] ...
//   sqze analyze   --config cfg.json ...
//
// Exit codes: 0 success, 2 configuration error, 3 numerical degeneracy,
// 1 anything else.

#include <chrono>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "sqze/commands.hpp"

namespace {

struct Options {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  unsigned threads = 0;
  std::optional<std::string> out;
  std::optional<std::string> format;
  bool no_timestamp = false;
};

void add_common_options(CLI::App* cmd, Options& opt) {
  cmd->add_option("--config", opt.config_path, "Experiment configuration (JSON)")->required();
  cmd->add_option("--seed", opt.seed, "Override the configured seed");
  cmd->add_option("--threads", opt.threads, "Maximum worker threads (0 = all cores)");
  cmd->add_option("--out", opt.out, "Output directory, or '-' for stdout");
  cmd->add_option("--format", opt.format, "Table format")->check(CLI::IsMember({"csv", "json"}));
  cmd->add_flag("--no-header-timestamp", opt.no_timestamp, "Omit the timestamp comment in CSV files");
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

class Writer {
 public:
  Writer(std::string dir, bool timestamp) : dir_(std::move(dir)), timestamp_(timestamp) {
    if (dir_ != "-") std::filesystem::create_directories(dir_);
  }

  void csv(const std::string& name, const sqze::Table& table) {
    std::optional<std::string> comment;
    if (timestamp_) comment = "generated " + utc_timestamp();
    emit(name + ".csv", sqze::to_csv(table, comment));
  }

  void json(const std::string& name, const sqze::json& doc) { emit(name + ".json", doc.dump(2) + "\n"); }

  void table(const std::string& name, const sqze::Table& t, const std::string& format) {
    if (format == "json") {
      json(name, sqze::to_json(t));
    } else {
      csv(name, t);
    }
  }

 private:
  void emit(const std::string& file, const std::string& content) {
    if (dir_ == "-") {
      std::cout << content;
      return;
    }
    const auto path = std::filesystem::path(dir_) / file;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
    std::cerr << "wrote " << path.string() << "\n";
  }

  std::string dir_;
  bool timestamp_;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Survival statistics of randomly interrupted quantum evolution"};
  app.require_subcommand(1);
  Options opt;
  auto* decay = app.add_subcommand("decay", "q(mu) and q(mu)^m for periodic measurements");
  auto* sweep = app.add_subcommand("sweep", "P_g, P_a, <P> and D over the second interval mu2");
  auto* histogram = app.add_subcommand("histogram", "Ensemble histogram with exact and Gaussian overlays");
  auto* analyze = app.add_subcommand("analyze", "JSON report for one configuration");
  for (auto* cmd : {decay, sweep, histogram, analyze}) add_common_options(cmd, opt);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    auto cfg = sqze::load_config(opt.config_path);
    if (opt.seed) cfg.seed = *opt.seed;
    // Output overrides stay out of cfg so that reports embed the config as read.
    const std::string format = opt.format.value_or(cfg.output.format);
    Writer writer(opt.out.value_or(cfg.output.dir), !opt.no_timestamp);

    if (decay->parsed()) {
      writer.table("decay", sqze::decay_table(cfg), format);
    } else if (sweep->parsed()) {
      writer.table("sweep", sqze::sweep_table(cfg), format);
    } else if (histogram->parsed()) {
      const auto result = sqze::histogram_experiment(cfg, opt.threads);
      writer.table("histogram", result.histogram, format);
      writer.table("histogram_overlay", result.overlay, format);
      writer.json("histogram_meta", result.metadata);
    } else if (analyze->parsed()) {
      writer.json("analyze", sqze::analyze_report(cfg));
    }
  } catch (const sqze::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const sqze::DegenerateError& e) {
    std::cerr << "numerical degeneracy: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
