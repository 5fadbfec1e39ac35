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

// lpmat: simulate, solve, compare, calibrate and study the spectra of
// p^{-1} X X^T for a matrix filled from one linear process.

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "lpmat/cli.hpp"

namespace {

template <class T>
void put_if_set(nlohmann::json& j, const CLI::Option* opt, const char* key, const T& value) {
  if (opt->count() > 0) j[key] = value;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectra of sample covariance matrices built from a linear process"};
  app.set_version_flag("--version", std::string("lpmat ") + lpmat::cli::kVersion);

  std::string command, config_path, out, variant, model, dist;
  std::uint64_t seed = 0;
  std::size_t jobs = 1, p = 0, n = 0, replicates = 0, grid_points = 0, horizon = 0,
              memory_budget = 0;
  double y = 0.0;
  std::vector<std::size_t> sizes;
  bool dump = false;

  app.add_option("command", command, "simulate | solve | compare | calibrate | study");
  auto* o_config = app.add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
  auto* o_seed = app.add_option("--seed", seed, "base seed");
  auto* o_out = app.add_option("--out", out, "output directory");
  auto* o_jobs = app.add_option("--jobs", jobs, "concurrent replicates");
  auto* o_variant = app.add_option("--variant", variant,
                                   "{normalized|raw},{y|yinv},{direct|companion}");
  auto* o_p = app.add_option("--p", p, "rows of X");
  auto* o_n = app.add_option("--n", n, "columns of X");
  auto* o_y = app.add_option("--y", y, "ratio p/n for solve and study");
  auto* o_rep = app.add_option("--replicates", replicates, "Monte Carlo replicates");
  auto* o_model = app.add_option("--model", model, R"(model as JSON, e.g. '{"kind":"ma","theta":[0.5]}')");
  auto* o_dist = app.add_option("--dist", dist, "gaussian | rademacher | uniform");
  auto* o_horizon = app.add_option("--horizon", horizon, "MA truncation horizon J");
  auto* o_grid = app.add_option("--grid-points", grid_points, "LSD grid size");
  auto* o_sizes = app.add_option("--sizes", sizes, "values of n for study, e.g. 64,128,256")->delimiter(',');
  auto* o_budget = app.add_option("--memory-budget", memory_budget, "cap on p*n*replicates");
  auto* o_dump = app.add_flag("--dump-eigenvalues", dump, "compare: also write eigenvalues.csv");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return lpmat::cli::kValidationFailure;
  }

  nlohmann::json flags = nlohmann::json::object();
  if (!command.empty()) flags["command"] = command;
  put_if_set(flags, o_seed, "seed", seed);
  put_if_set(flags, o_out, "out", out);
  put_if_set(flags, o_jobs, "jobs", jobs);
  put_if_set(flags, o_variant, "variant", variant);
  put_if_set(flags, o_p, "p", p);
  put_if_set(flags, o_n, "n", n);
  put_if_set(flags, o_y, "y", y);
  put_if_set(flags, o_rep, "replicates", replicates);
  put_if_set(flags, o_dist, "dist", dist);
  put_if_set(flags, o_horizon, "horizon", horizon);
  put_if_set(flags, o_grid, "grid_points", grid_points);
  put_if_set(flags, o_sizes, "sizes", sizes);
  put_if_set(flags, o_budget, "memory_budget", memory_budget);
  put_if_set(flags, o_dump, "dump_eigenvalues", dump);

  lpmat::cli::ExperimentConfig config;
  try {
    if (o_model->count() > 0) flags["model"] = nlohmann::json::parse(model);
    std::optional<std::filesystem::path> path;
    if (o_config->count() > 0) path = config_path;
    config = lpmat::cli::parse_config(path, flags, std::cerr);
  } catch (const nlohmann::json::parse_error& e) {
    std::cerr << "error: --model is not valid JSON: " << e.what() << '\n';
    return lpmat::cli::kValidationFailure;
  } catch (const lpmat::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return lpmat::cli::kValidationFailure;
  }
  return lpmat::cli::run(config, std::cerr);
}
