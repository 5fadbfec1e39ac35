// Copyright 2026 The lpmat Authors.
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

// Experiment configuration and command dispatch for the lpmat tool.

#pragma once

#include <chrono>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lpmat/error.hpp"
#include "lpmat/lsd.hpp"
#include "lpmat/process_json.hpp"
#include "lpmat/report_json.hpp"
#include "lpmat/verify.hpp"

namespace lpmat::cli {

inline constexpr const char* kVersion = "0.1.0";

enum class Command { Simulate, Solve, Compare, Calibrate, Study };

inline const char* to_string(Command c) {
  switch (c) {
    case Command::Simulate: return "simulate";
    case Command::Solve: return "solve";
    case Command::Compare: return "compare";
    case Command::Calibrate: return "calibrate";
    case Command::Study: return "study";
  }
  return "?";
}

inline Command parse_command(const std::string& s) {
  for (Command c : {Command::Simulate, Command::Solve, Command::Compare, Command::Calibrate,
                    Command::Study})
    if (s == to_string(c)) return c;
  throw ValidationError("unknown command '" + s + "'", "command");
}

enum ExitCode : int { kOk = 0, kValidationFailure = 2, kNumericalFailure = 3 };

struct ExperimentConfig {
  Command command = Command::Solve;
  ProcessSpec process;
  std::size_t p = 256;
  std::size_t n = 256;
  /// Ratio for solve and study; p / n when absent.
  std::optional<double> y;
  std::size_t replicates = 1;
  std::uint64_t seed = 0;
  EquationVariant variant = EquationVariant::calibrated();
  /// Candidates for compare; {variant} when empty.
  std::vector<EquationVariant> variants;
  SolverConfig solver;
  std::size_t grid_points = 1024;
  std::vector<std::size_t> sizes{64, 128, 256, 512};
  std::size_t jobs = 1;
  std::filesystem::path out = "lpmat-out";
  std::size_t memory_budget = kDefaultMemoryBudget;
  bool dump_eigenvalues = false;

  double ratio() const { return y ? *y : static_cast<double>(p) / static_cast<double>(n); }

  EnsembleConfig ensemble() const {
    EnsembleConfig e;
    e.process = process;
    e.p = p;
    e.n = n;
    e.replicates = replicates;
    e.base_seed = seed;
    e.variants = variants.empty() ? std::vector<EquationVariant>{variant} : variants;
    e.solver = solver;
    e.grid_points = grid_points;
    e.jobs = jobs;
    e.memory_budget = memory_budget;
    return e;
  }

  StudyConfig study() const {
    StudyConfig s;
    s.process = process;
    s.y = ratio();
    s.sizes = sizes;
    s.replicates = replicates;
    s.base_seed = seed;
    s.variant = variant;
    s.solver = solver;
    s.grid_points = grid_points;
    s.jobs = jobs;
    s.memory_budget = memory_budget;
    return s;
  }

  /// Range checks that do not need a simulation.
  void validate() const {
    if (y && !(*y > 0.0 && std::isfinite(*y))) throw ValidationError("y must be positive", "y");
    if (grid_points < 2) throw ValidationError("grid_points must be at least 2", "grid_points");
    if (jobs == 0) throw ValidationError("jobs must be at least 1", "jobs");
    if (replicates == 0) throw ValidationError("replicates must be at least 1", "replicates");
    solver.validate();
    switch (command) {
      case Command::Simulate:
      case Command::Compare:
      case Command::Calibrate:
        ensemble().validate();
        break;
      case Command::Study: {
        if (sizes.empty()) throw ValidationError("sizes must not be empty", "sizes");
        for (std::size_t i = 0; i < sizes.size(); ++i) {
          if (i > 0 && !(sizes[i] > sizes[i - 1]))
            throw ValidationError("sizes must be strictly ascending", "sizes");
          EnsembleConfig e = ensemble();
          e.n = sizes[i];
          e.p = std::max<std::size_t>(
              1, static_cast<std::size_t>(std::llround(ratio() * static_cast<double>(sizes[i]))));
          e.validate();
        }
        break;
      }
      case Command::Solve:
        validate_model(process.model);
        break;
    }
  }

 private:
  static void validate_model(const CoefficientModel& m) { lpmat::validate(m); }
};

inline const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys{
      "command",      "model",   "dist",        "horizon", "p",        "n",
      "y",            "replicates", "seed",     "variant", "variants", "solver",
      "grid_points",  "sizes",   "jobs",        "out",     "memory_budget", "dump_eigenvalues"};
  return keys;
}

/// Builds a validated config from a JSON object, filling documented defaults.
/// Unknown keys are rejected by name.
inline ExperimentConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ValidationError("config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (std::ranges::find(config_keys(), key) == config_keys().end())
      throw ValidationError("unknown config key '" + key + "'", key);
  }
  using detail::optional_or;
  ExperimentConfig c;
  c.command = parse_command(detail::required<std::string>(j, "command", "config"));
  c.process.model = j.contains("model") ? model_from_json(j.at("model")) : white_noise();
  c.process.innovations.distribution =
      parse_distribution(optional_or<std::string>(j, "dist", "gaussian"));
  if (j.contains("horizon")) c.process.horizon = detail::required<std::size_t>(j, "horizon", "config");
  c.p = optional_or<std::size_t>(j, "p", c.p);
  c.n = optional_or<std::size_t>(j, "n", c.n);
  if (j.contains("y")) c.y = detail::required<double>(j, "y", "config");
  c.replicates = optional_or<std::size_t>(j, "replicates", c.replicates);
  c.seed = optional_or<std::uint64_t>(j, "seed", c.seed);
  if (j.contains("variant")) c.variant = parse_variant(detail::required<std::string>(j, "variant", "config"));
  for (const auto& v : optional_or<std::vector<std::string>>(j, "variants", {}))
    c.variants.push_back(parse_variant(v));
  if (j.contains("solver")) c.solver = solver_from_json(j.at("solver"));
  c.grid_points = optional_or<std::size_t>(j, "grid_points", c.grid_points);
  c.sizes = optional_or<std::vector<std::size_t>>(j, "sizes", c.sizes);
  c.jobs = optional_or<std::size_t>(j, "jobs", c.jobs);
  c.out = optional_or<std::string>(j, "out", c.out.string());
  c.memory_budget = optional_or<std::size_t>(j, "memory_budget", c.memory_budget);
  c.dump_eigenvalues = optional_or<bool>(j, "dump_eigenvalues", c.dump_eigenvalues);
  c.validate();
  return c;
}

/// Full config echo; config_from_json(config_to_json(c)) reproduces c.
inline nlohmann::json config_to_json(const ExperimentConfig& c) {
  nlohmann::json j{{"command", to_string(c.command)},
                   {"model", model_to_json(c.process.model)},
                   {"dist", std::string(lpmat::to_string(c.process.innovations.distribution))},
                   {"p", c.p},
                   {"n", c.n},
                   {"replicates", c.replicates},
                   {"seed", c.seed},
                   {"variant", lpmat::to_string(c.variant)},
                   {"solver", solver_to_json(c.solver)},
                   {"grid_points", c.grid_points},
                   {"sizes", c.sizes},
                   {"jobs", c.jobs},
                   {"out", c.out.string()},
                   {"memory_budget", c.memory_budget},
                   {"dump_eigenvalues", c.dump_eigenvalues}};
  if (c.process.horizon) j["horizon"] = *c.process.horizon;
  if (c.y) j["y"] = *c.y;
  auto vs = nlohmann::json::array();
  for (const auto& v : c.variants) vs.push_back(lpmat::to_string(v));
  j["variants"] = vs;
  return j;
}

/// Overlays flag values on the file values. A flag that changes a value set
/// in the file wins and is reported on `notices`.
inline nlohmann::json merge_overrides(nlohmann::json file, const nlohmann::json& flags,
                                      std::ostream& notices) {
  if (file.is_null()) file = nlohmann::json::object();
  if (!file.is_object()) throw ValidationError("config must be a JSON object");
  for (const auto& [key, value] : flags.items()) {
    if (file.contains(key) && file.at(key) != value)
      notices << "notice: flag value " << value.dump() << " overrides config " << key << '='
              << file.at(key).dump() << '\n';
    file[key] = value;
  }
  return file;
}

inline nlohmann::json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file " + path.string(), "config");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError("config file " + path.string() + " is not valid JSON: " + e.what(),
                          "config");
  }
}

/// Config file (optional) plus flag overrides, flags winning.
inline ExperimentConfig parse_config(const std::optional<std::filesystem::path>& path,
                                     const nlohmann::json& flags, std::ostream& notices) {
  nlohmann::json file = path ? read_json_file(*path) : nlohmann::json::object();
  return config_from_json(merge_overrides(std::move(file), flags, notices));
}

namespace detail {

/// Files written by one run; removed again unless committed.
class OutputSet {
 public:
  explicit OutputSet(std::filesystem::path dir) : dir_(std::move(dir)) {}
  OutputSet(const OutputSet&) = delete;
  OutputSet& operator=(const OutputSet&) = delete;

  ~OutputSet() {
    if (committed_) return;
    std::error_code ec;
    for (const auto& f : written_) std::filesystem::remove(f, ec);
    if (created_dir_) std::filesystem::remove(dir_, ec);
  }

  void prepare() {
    std::error_code ec;
    if (!std::filesystem::exists(dir_)) {
      std::filesystem::create_directories(dir_, ec);
      if (ec) throw ValidationError("cannot create output directory " + dir_.string(), "out");
      created_dir_ = true;
    } else if (!std::filesystem::is_directory(dir_)) {
      throw ValidationError("output path " + dir_.string() + " is not a directory", "out");
    }
  }

  /// Opens `name` in the output directory and records it for cleanup.
  std::ofstream open(const std::string& name) {
    const auto path = dir_ / name;
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw ValidationError("cannot write " + path.string(), "out");
    written_.push_back(path);
    names_.push_back(name);
    return os;
  }

  void write_json(const std::string& name, const nlohmann::json& j) {
    auto os = open(name);
    os << j.dump(2) << '\n';
  }

  const std::vector<std::string>& names() const { return names_; }
  void commit() { committed_ = true; }

 private:
  std::filesystem::path dir_;
  std::vector<std::filesystem::path> written_;
  std::vector<std::string> names_;
  bool created_dir_ = false;
  bool committed_ = false;
};

inline std::string utc_timestamp() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

inline void require_some_replicate(const EnsembleReport& report) {
  if (report.failed_replicates == report.replicates.size()) {
    throw NumericalError("every replicate failed; first error: " +
                         report.replicates.front().error.value_or("unknown"));
  }
}

}  // namespace detail

/// Executes the command, writing its artifacts and manifest.json into
/// config.out. Returns an ExitCode; on failure every file written by this run
/// is removed. Progress and errors go to `log`.
inline int run(const ExperimentConfig& config, std::ostream& log) {
  const auto start = std::chrono::steady_clock::now();
  const std::string started_at = detail::utc_timestamp();
  detail::OutputSet out(config.out);
  try {
    config.validate();
    out.prepare();
    nlohmann::json summary = nlohmann::json::object();
    switch (config.command) {
      case Command::Simulate: {
        EnsembleConfig e = config.ensemble();
        e.keep_eigenvalues = true;
        const auto report = run_ensemble(e, std::span<const Candidate>{});
        detail::require_some_replicate(report);
        {
          auto os = out.open("eigenvalues.csv");
          write_eigenvalues_csv(os, report);
        }
        {
          auto os = out.open("esd.csv");
          write_esd_csv(os, *report.pooled_spectrum);
        }
        summary["failed_replicates"] = report.failed_replicates;
        break;
      }
      case Command::Solve: {
        const auto sol = solve_lsd(spectral_density(config.process), config.ratio(),
                                   config.variant, config.solver, config.grid_points);
        out.write_json("lsd.json", lsd_to_json(sol));
        auto os = out.open("density.csv");
        write_density_csv(os, sol);
        summary["atom"] = sol.atom;
        break;
      }
      case Command::Compare: {
        EnsembleConfig e = config.ensemble();
        e.keep_eigenvalues = config.dump_eigenvalues;
        const auto report = run_ensemble(e);
        detail::require_some_replicate(report);
        out.write_json("report.json", to_json(report));
        if (config.dump_eigenvalues) {
          auto os = out.open("eigenvalues.csv");
          write_eigenvalues_csv(os, report);
        }
        for (std::size_t c = 0; c < report.candidate_names.size(); ++c)
          log << report.candidate_names[c] << ": pooled ks " << format_number(report.pooled[c].ks)
              << '\n';
        summary["failed_replicates"] = report.failed_replicates;
        summary["closest"] = report.closest ? nlohmann::json(*report.closest) : nlohmann::json();
        break;
      }
      case Command::Calibrate: {
        CalibrationResult result;
        try {
          result = calibrate_equation_variant(config.ensemble());
        } catch (const CalibrationError& e) {
          write_evidence_csv(log, e.evidence());
          throw;
        }
        {
          auto os = out.open("evidence.csv");
          write_evidence_csv(os, result);
        }
        out.write_json("verdict.json", to_json(result));
        log << "selected " << lpmat::to_string(*result.selected) << '\n';
        summary["selected"] = lpmat::to_string(*result.selected);
        break;
      }
      case Command::Study: {
        const auto result = convergence_study(config.study());
        auto os = out.open("trend.csv");
        write_trend_csv(os, result);
        summary["spearman"] = number_or_null(result.spearman);
        break;
      }
    }
    const double runtime =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    auto outputs = out.names();
    out.write_json("manifest.json", {{"tool", "lpmat"},
                                     {"version", kVersion},
                                     {"compiler", __VERSION__},
                                     {"config", config_to_json(config)},
                                     {"outputs", outputs},
                                     {"summary", summary},
                                     {"started_at", started_at},
                                     {"runtime_seconds", runtime}});
    out.commit();
    return kOk;
  } catch (const ValidationError& e) {
    log << "error: " << e.what() << '\n';
    return kValidationFailure;
  } catch (const CalibrationError& e) {
    log << "error: " << e.what() << '\n';
    return kNumericalFailure;
  } catch (const NumericalError& e) {
    log << "error: " << e.what() << '\n';
    return kNumericalFailure;
  } catch (const std::filesystem::filesystem_error& e) {
    log << "error: " << e.what() << '\n';
    return kValidationFailure;
  }
}

}  // namespace lpmat::cli
