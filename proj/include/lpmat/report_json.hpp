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

// JSON and CSV serialization of solver settings, limiting laws and
// verification reports.

#pragma once

#include <charconv>
#include <cmath>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lpmat/lsd.hpp"
#include "lpmat/process_json.hpp"
#include "lpmat/spectra.hpp"
#include "lpmat/verify.hpp"

namespace lpmat {

/// Shortest round-trip decimal form; "nan" for NaN.
inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

/// NaN maps to null.
inline nlohmann::json number_or_null(double v) {
  return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

inline nlohmann::json solver_to_json(const SolverConfig& c) {
  return {{"quadrature_points", c.quadrature_points}, {"max_iterations", c.max_iterations},
          {"damping", c.damping},                     {"residual_tol", c.residual_tol},
          {"epsilon_floor", c.epsilon_floor},         {"accelerate", c.accelerate}};
}

inline SolverConfig solver_from_json(const nlohmann::json& j) {
  detail::reject_unknown_keys(j,
                              {"quadrature_points", "max_iterations", "damping", "residual_tol",
                               "epsilon_floor", "accelerate"},
                              "solver");
  SolverConfig c;
  c.quadrature_points = detail::optional_or<std::size_t>(j, "quadrature_points", c.quadrature_points);
  c.max_iterations = detail::optional_or<std::size_t>(j, "max_iterations", c.max_iterations);
  c.damping = detail::optional_or<double>(j, "damping", c.damping);
  c.residual_tol = detail::optional_or<double>(j, "residual_tol", c.residual_tol);
  c.epsilon_floor = detail::optional_or<double>(j, "epsilon_floor", c.epsilon_floor);
  c.accelerate = detail::optional_or<bool>(j, "accelerate", c.accelerate);
  c.validate();
  return c;
}

inline nlohmann::json lsd_to_json(const LsdSolution& sol) {
  std::vector<double> re, im;
  for (const auto& s : sol.s) {
    re.push_back(s.real());
    im.push_back(s.imag());
  }
  return {{"y", sol.y},
          {"variant", to_string(sol.variant)},
          {"atom", sol.atom},
          {"support", {sol.support.lo, sol.support.hi}},
          {"origin_exponent", sol.origin_exponent},
          {"grid", sol.grid},
          {"s_re", re},
          {"s_im", im},
          {"density", sol.density},
          {"cdf", sol.cdf}};
}

/// Columns: x, rho.
inline void write_density_csv(std::ostream& os, const LsdSolution& sol) {
  os << "x,rho\n";
  for (std::size_t k = 0; k < sol.grid.size(); ++k)
    os << format_number(sol.grid[k]) << ',' << format_number(sol.density[k]) << '\n';
}

/// Columns: x, F. One row per distinct eigenvalue, F the ESD at x.
inline void write_esd_csv(std::ostream& os, const EmpiricalSpectrum& spec) {
  os << "x,F\n";
  const auto ev = spec.eigenvalues();
  const double m = static_cast<double>(ev.size());
  for (std::size_t i = 0; i < ev.size(); ++i) {
    if (i + 1 < ev.size() && ev[i + 1] == ev[i]) continue;
    os << format_number(ev[i]) << ',' << format_number(static_cast<double>(i + 1) / m) << '\n';
  }
}

/// Columns: replicate, index, lambda.
inline void write_eigenvalues_csv(std::ostream& os, const EnsembleReport& report) {
  os << "replicate,index,lambda\n";
  for (const auto& r : report.replicates)
    for (std::size_t i = 0; i < r.eigenvalues.size(); ++i)
      os << r.index << ',' << i << ',' << format_number(r.eigenvalues[i]) << '\n';
}

namespace detail {
inline nlohmann::json distances_to_json(const std::vector<std::string>& names,
                                        const std::vector<CandidateDistance>& d) {
  auto out = nlohmann::json::array();
  for (std::size_t c = 0; c < d.size(); ++c)
    out.push_back({{"candidate", names[c]},
                   {"ks", number_or_null(d[c].ks)},
                   {"wasserstein", number_or_null(d[c].wasserstein)}});
  return out;
}

inline nlohmann::json optional_string(const std::optional<std::string>& s) {
  return s ? nlohmann::json(*s) : nlohmann::json(nullptr);
}
}  // namespace detail

/// Runtime is deliberately omitted so reports are pure functions of the
/// configuration.
inline nlohmann::json to_json(const EnsembleReport& report) {
  auto candidates = nlohmann::json::array();
  for (std::size_t c = 0; c < report.candidate_names.size(); ++c)
    candidates.push_back({{"name", report.candidate_names[c]},
                          {"error", detail::optional_string(report.candidate_errors[c])}});
  auto reps = nlohmann::json::array();
  for (const auto& r : report.replicates) {
    reps.push_back({{"index", r.index},
                    {"seed", r.seed},
                    {"trace_statistic", number_or_null(r.trace_statistic)},
                    {"error", detail::optional_string(r.error)},
                    {"distances", detail::distances_to_json(report.candidate_names, r.distances)}});
  }
  return {{"p", report.p},
          {"n", report.n},
          {"y", report.y()},
          {"horizon", report.horizon},
          {"base_seed", report.base_seed},
          {"candidates", candidates},
          {"replicates", reps},
          {"failed_replicates", report.failed_replicates},
          {"trace", {{"mean", number_or_null(report.trace_mean)}, {"target", report.trace_target}}},
          {"pooled", detail::distances_to_json(report.candidate_names, report.pooled)},
          {"closest", detail::optional_string(report.closest)}};
}

inline nlohmann::json to_json(const TraceMomentReport& r) {
  return {{"statistics", r.statistics},    {"mean", r.mean},
          {"target", r.target},            {"relative_error", r.relative_error},
          {"tolerance", r.tolerance},      {"passed", r.passed}};
}

inline nlohmann::json to_json(const CalibrationResult& r) {
  auto rows = nlohmann::json::array();
  for (const auto& e : r.evidence)
    rows.push_back({{"variant", to_string(e.variant)},
                    {"pooled_ks", number_or_null(e.pooled_ks)},
                    {"pooled_wasserstein", number_or_null(e.pooled_wasserstein)},
                    {"median_replicate_ks", number_or_null(e.median_replicate_ks)},
                    {"passed", e.passed},
                    {"error", detail::optional_string(e.error)}});
  return {{"y", r.y},
          {"base_seed", r.base_seed},
          {"degenerate", r.degenerate},
          {"selected", r.selected ? nlohmann::json(to_string(*r.selected)) : nlohmann::json(nullptr)},
          {"separated", r.separated},
          {"evidence", rows}};
}

/// Columns: variant, pooled_ks, pooled_wasserstein, median_replicate_ks, passed.
inline void write_evidence_csv(std::ostream& os, const CalibrationResult& r) {
  os << "variant,pooled_ks,pooled_wasserstein,median_replicate_ks,passed\n";
  for (const auto& e : r.evidence)
    os << '"' << to_string(e.variant) << "\"," << format_number(e.pooled_ks) << ','
       << format_number(e.pooled_wasserstein) << ',' << format_number(e.median_replicate_ks)
       << ',' << (e.passed ? 1 : 0) << '\n';
}

/// Columns: n, p, ks_median, ks_iqr.
inline void write_trend_csv(std::ostream& os, const StudyResult& r) {
  os << "n,p,ks_median,ks_iqr\n";
  for (const auto& row : r.rows)
    os << row.n << ',' << row.p << ',' << format_number(row.ks_median) << ','
       << format_number(row.ks_iqr) << '\n';
}

inline nlohmann::json to_json(const StudyResult& r) {
  auto rows = nlohmann::json::array();
  for (const auto& row : r.rows)
    rows.push_back({{"n", row.n}, {"p", row.p}, {"ks", row.ks},
                    {"ks_median", row.ks_median}, {"ks_iqr", row.ks_iqr}});
  return {{"rows", rows}, {"spearman", number_or_null(r.spearman)}};
}

}  // namespace lpmat
