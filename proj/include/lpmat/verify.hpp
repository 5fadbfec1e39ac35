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

// Monte Carlo harness: ensembles of p^{-1} X X^T spectra compared with
// candidate limiting laws, trace-moment checks, calibration of the equation
// variant and finite-size convergence studies.

#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <functional>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "lpmat/distance.hpp"
#include "lpmat/error.hpp"
#include "lpmat/lsd.hpp"
#include "lpmat/marchenko_pastur.hpp"
#include "lpmat/matrix.hpp"
#include "lpmat/process.hpp"
#include "lpmat/random.hpp"
#include "lpmat/spectra.hpp"

namespace lpmat {

/// Runs fn(0) .. fn(count-1) on up to `jobs` threads. Each index is handled
/// exactly once; the first exception is rethrown after all workers finish.
inline void parallel_for(std::size_t count, std::size_t jobs,
                         const std::function<void(std::size_t)>& fn) {
  jobs = std::max<std::size_t>(1, std::min(jobs, count));
  if (jobs == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(jobs);
  std::vector<std::thread> workers;
  workers.reserve(jobs);
  for (std::size_t w = 0; w < jobs; ++w) {
    workers.emplace_back([&, w] {
      try {
        for (std::size_t i = next++; i < count; i = next++) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : workers) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

inline constexpr std::size_t kDefaultMemoryBudget = std::size_t{1} << 27;

struct EnsembleConfig {
  ProcessSpec process;
  std::size_t p = 256;
  std::size_t n = 256;
  std::size_t replicates = 1;
  std::uint64_t base_seed = 0;
  /// Candidate limiting laws, one per variant.
  std::vector<EquationVariant> variants{EquationVariant::calibrated()};
  /// Also compare with the closed-form Marchenko-Pastur law when the process
  /// is white noise.
  bool include_mp_oracle = true;
  SolverConfig solver;
  std::size_t grid_points = 1024;
  std::size_t jobs = 1;
  /// Cap on p * n * replicates.
  std::size_t memory_budget = kDefaultMemoryBudget;
  bool keep_eigenvalues = false;

  MatrixShape shape() const { return {p, n}; }

  void validate() const {
    shape().validate();
    if (replicates == 0) throw ValidationError("replicates must be at least 1", "replicates");
    if (jobs == 0) throw ValidationError("jobs must be at least 1", "jobs");
    const std::size_t cells = checked_product(checked_product(p, n, "p * n"), replicates,
                                              "p * n * replicates");
    if (cells > memory_budget) {
      throw ValidationError("p * n * replicates = " + std::to_string(cells) +
                                " exceeds the memory budget " + std::to_string(memory_budget),
                            "memory_budget");
    }
    solver.validate();
    validate_model(process.model);
  }

 private:
  static void validate_model(const CoefficientModel& m) { lpmat::validate(m); }
};

/// Spectrum of one simulated Gram matrix.
struct SimulatedSpectrum {
  EmpiricalSpectrum spectrum;
  /// p^{-2} tr X X^T.
  double trace_statistic = 0.0;
};

/// Simulates X for `seed`, forms p^{-1} X X^T and returns its eigenvalues.
/// Eigenvalues below zero (rounding on a PSD matrix) are set to zero.
inline SimulatedSpectrum simulate_spectrum(const ProcessSpec& process, const MatrixShape& shape,
                                           std::uint64_t seed) {
  ProcessSpec spec = with_resolved_horizon(process, shape.n);
  spec.innovations.seed = seed;
  const DenseMatrix x = build_X(spec, shape);
  double sum_sq = 0.0;
  for (double v : x.values()) sum_sq += v * v;
  const double p = static_cast<double>(shape.p);
  const EmpiricalSpectrum raw = sym_eigenvalues(gram(x), shape.p, shape.n);
  std::vector<double> ev(raw.eigenvalues().begin(), raw.eigenvalues().end());
  for (double& v : ev) v = std::max(0.0, v);
  return {EmpiricalSpectrum(std::move(ev), shape.p, shape.n), sum_sq / (p * p)};
}

struct Candidate {
  std::string name;
  std::optional<EquationVariant> variant;
  std::optional<CdfView> law;
  std::optional<LsdSolution> solution;
  /// Set when the law could not be computed.
  std::optional<std::string> error;
};

struct CandidateDistance {
  double ks = std::numeric_limits<double>::quiet_NaN();
  double wasserstein = std::numeric_limits<double>::quiet_NaN();
};

struct ReplicateResult {
  std::size_t index = 0;
  std::uint64_t seed = 0;
  double trace_statistic = std::numeric_limits<double>::quiet_NaN();
  std::vector<CandidateDistance> distances;  ///< parallel to candidates
  std::optional<std::string> error;
  std::vector<double> eigenvalues;  ///< filled when keep_eigenvalues
};

struct EnsembleReport {
  std::size_t p = 0;
  std::size_t n = 0;
  std::size_t horizon = 0;
  std::uint64_t base_seed = 0;
  std::vector<std::string> candidate_names;
  std::vector<std::optional<std::string>> candidate_errors;
  std::vector<ReplicateResult> replicates;
  std::vector<CandidateDistance> pooled;  ///< parallel to candidates
  std::size_t failed_replicates = 0;
  /// Mean of p^{-2} tr X X^T over successful replicates, and its target
  /// (n/p) sum_k c_k^2.
  double trace_mean = std::numeric_limits<double>::quiet_NaN();
  double trace_target = 0.0;
  /// Candidate with the smallest pooled KS distance, if any succeeded.
  std::optional<std::string> closest;
  /// Pooled ESD over the successful replicates.
  std::optional<EmpiricalSpectrum> pooled_spectrum;
  /// Wall time; not part of the serialized report.
  double runtime_seconds = 0.0;

  double y() const { return static_cast<double>(p) / static_cast<double>(n); }

  std::optional<std::size_t> candidate_index(const std::string& name) const {
    for (std::size_t i = 0; i < candidate_names.size(); ++i)
      if (candidate_names[i] == name) return i;
    return std::nullopt;
  }
};

inline constexpr const char* kMpCandidate = "marchenko_pastur";

/// One candidate per variant (solved on the default grid), plus the closed
/// form MP(y, 1/y) for white noise. Variants are solved concurrently.
inline std::vector<Candidate> build_candidates(const ProcessSpec& process, double y,
                                               std::span<const EquationVariant> variants,
                                               bool include_mp, const SolverConfig& solver,
                                               std::size_t grid_points, std::size_t jobs) {
  const SpectralDensity f = spectral_density(process);
  std::vector<Candidate> out(variants.size());
  parallel_for(variants.size(), jobs, [&](std::size_t i) {
    Candidate& c = out[i];
    c.name = to_string(variants[i]);
    c.variant = variants[i];
    try {
      c.solution = solve_lsd(f, y, variants[i], solver, grid_points);
      c.law = lsd_cdf(*c.solution);
    } catch (const NumericalError& e) {
      c.error = e.what();
    }
  });
  if (include_mp && is_white_noise(process.model)) {
    Candidate mp;
    mp.name = kMpCandidate;
    mp.law = mp_oracle(y, 1.0 / y).view();
    out.push_back(std::move(mp));
  }
  return out;
}

inline CandidateDistance distance_to(const CdfView& esd, const Candidate& c) {
  if (!c.law) return {};
  return {ks_distance(esd, *c.law), wasserstein1(esd, *c.law)};
}

/// Ensemble against candidates computed elsewhere (lets callers reuse the
/// expensive limiting-law solves across runs).
inline EnsembleReport run_ensemble(const EnsembleConfig& config,
                                   std::span<const Candidate> candidates) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  const MatrixShape shape = config.shape();

  EnsembleReport report;
  report.p = config.p;
  report.n = config.n;
  report.horizon = resolve_horizon(config.process, config.n);
  report.base_seed = config.base_seed;
  for (const auto& c : candidates) {
    report.candidate_names.push_back(c.name);
    report.candidate_errors.push_back(c.error);
  }

  report.replicates.resize(config.replicates);
  std::vector<std::optional<EmpiricalSpectrum>> spectra(config.replicates);
  parallel_for(config.replicates, config.jobs, [&](std::size_t r) {
    ReplicateResult& out = report.replicates[r];
    out.index = r;
    out.seed = replicate_seed(config.base_seed, r);
    out.distances.resize(candidates.size());
    try {
      SimulatedSpectrum sim = simulate_spectrum(config.process, shape, out.seed);
      out.trace_statistic = sim.trace_statistic;
      const CdfView esd = CdfView::of(sim.spectrum);
      for (std::size_t c = 0; c < candidates.size(); ++c)
        out.distances[c] = distance_to(esd, candidates[c]);
      if (config.keep_eigenvalues)
        out.eigenvalues.assign(sim.spectrum.eigenvalues().begin(), sim.spectrum.eigenvalues().end());
      spectra[r] = std::move(sim.spectrum);
    } catch (const NumericalError& e) {
      out.error = e.what();
    }
  });

  {
    const auto c = coefficients(config.process.model, report.horizon + 1);
    report.trace_target =
        static_cast<double>(config.n) / static_cast<double>(config.p) * autocovariance(c, 0);
  }
  std::vector<EmpiricalSpectrum> ok;
  for (auto& s : spectra) {
    if (s) ok.push_back(std::move(*s));
    else ++report.failed_replicates;
  }
  report.pooled.resize(candidates.size());
  if (!ok.empty()) {
    double sum = 0.0;
    for (const auto& r : report.replicates)
      if (!r.error) sum += r.trace_statistic;
    report.trace_mean = sum / static_cast<double>(ok.size());
    report.pooled_spectrum = pool(ok);
    const CdfView esd = CdfView::of(*report.pooled_spectrum);
    parallel_for(candidates.size(), config.jobs, [&](std::size_t c) {
      report.pooled[c] = distance_to(esd, candidates[c]);
    });
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < candidates.size(); ++c) {
      if (report.pooled[c].ks < best) {
        best = report.pooled[c].ks;
        report.closest = candidates[c].name;
      }
    }
  }
  report.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

/// Simulates the ensemble and compares every replicate, and the pooled ESD,
/// with each candidate law.
inline EnsembleReport run_ensemble(const EnsembleConfig& config) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  const auto candidates =
      build_candidates(config.process, config.shape().y(), config.variants,
                       config.include_mp_oracle, config.solver, config.grid_points, config.jobs);
  EnsembleReport report = run_ensemble(config, candidates);
  report.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

// ---------------------------------------------------------------------------
// Trace moment

struct TraceMomentReport {
  std::vector<double> statistics;  ///< p^{-2} tr X X^T per replicate
  double mean = 0.0;
  double target = 0.0;  ///< (n/p) sum_k c_k^2
  double relative_error = 0.0;
  double tolerance = 0.02;
  bool passed = false;
};

/// Mean of p^{-2} tr X X^T over the replicates against (n/p) sum_k c_k^2.
inline TraceMomentReport trace_moment_check(const EnsembleConfig& config,
                                            double tolerance = 0.02) {
  config.validate();
  const MatrixShape shape = config.shape();
  const std::size_t horizon = resolve_horizon(config.process, config.n);
  const auto c = coefficients(config.process.model, horizon + 1);

  TraceMomentReport report;
  report.tolerance = tolerance;
  report.target = static_cast<double>(config.n) / static_cast<double>(config.p) *
                  autocovariance(c, 0);
  report.statistics.resize(config.replicates);
  parallel_for(config.replicates, config.jobs, [&](std::size_t r) {
    ProcessSpec spec = config.process;
    spec.horizon = horizon;
    spec.innovations.seed = replicate_seed(config.base_seed, r);
    const auto record = simulate_record(spec, shape.p * shape.n);
    double sum_sq = 0.0;
    for (double v : record) sum_sq += v * v;
    report.statistics[r] = sum_sq / (static_cast<double>(shape.p) * static_cast<double>(shape.p));
  });
  for (double s : report.statistics) report.mean += s;
  report.mean /= static_cast<double>(report.statistics.size());
  report.relative_error = std::abs(report.mean - report.target) / report.target;
  report.passed = report.relative_error <= tolerance;
  return report;
}

// ---------------------------------------------------------------------------
// Calibration of the equation variant

inline constexpr double kCalibrationPassKs = 0.05;
inline constexpr double kCalibrationRejectKs = 0.1;

struct EvidenceRow {
  EquationVariant variant;
  double pooled_ks = std::numeric_limits<double>::quiet_NaN();
  double pooled_wasserstein = std::numeric_limits<double>::quiet_NaN();
  double median_replicate_ks = std::numeric_limits<double>::quiet_NaN();
  bool passed = false;
  std::optional<std::string> error;
};

struct CalibrationResult {
  double y = 1.0;
  std::uint64_t base_seed = 0;
  /// At y = 1 the ratio and role axes coincide and only the normalization is
  /// identifiable.
  bool degenerate = false;
  std::vector<EvidenceRow> evidence;
  std::optional<EquationVariant> selected;
  /// Every non-selected variant has pooled KS >= the reject threshold.
  bool separated = false;
};

class CalibrationError : public NumericalError {
 public:
  CalibrationError(const std::string& what, CalibrationResult evidence)
      : NumericalError(what), evidence_(std::move(evidence)) {}
  const CalibrationResult& evidence() const noexcept { return evidence_; }

 private:
  CalibrationResult evidence_;
};

namespace detail {
inline double median(std::vector<double> v) {
  std::erase_if(v, [](double x) { return std::isnan(x); });
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::ranges::sort(v);
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

/// Linear-interpolation quantile (R type 7) of a sorted copy.
inline double quantile(std::vector<double> v, double q) {
  std::erase_if(v, [](double x) { return std::isnan(x); });
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::ranges::sort(v);
  const double h = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}
}  // namespace detail

/// Evidence table from an ensemble whose candidates are the variants. Selects
/// the unique variant with pooled KS <= pass_ks; throws CalibrationError when
/// none or (away from y = 1) several pass.
inline CalibrationResult adjudicate(const EnsembleReport& report,
                                    std::span<const EquationVariant> variants,
                                    double pass_ks = kCalibrationPassKs,
                                    double reject_ks = kCalibrationRejectKs) {
  CalibrationResult result;
  result.y = report.y();
  result.base_seed = report.base_seed;
  result.degenerate = std::abs(result.y - 1.0) < 1e-12;
  std::vector<std::size_t> passing;
  for (const auto& v : variants) {
    const auto idx = report.candidate_index(to_string(v));
    if (!idx) throw ValidationError("ensemble has no candidate for variant " + to_string(v));
    EvidenceRow row;
    row.variant = v;
    row.error = report.candidate_errors[*idx];
    row.pooled_ks = report.pooled[*idx].ks;
    row.pooled_wasserstein = report.pooled[*idx].wasserstein;
    std::vector<double> per;
    for (const auto& r : report.replicates) per.push_back(r.distances[*idx].ks);
    row.median_replicate_ks = detail::median(per);
    row.passed = !row.error && row.pooled_ks <= pass_ks;
    if (row.passed) passing.push_back(result.evidence.size());
    result.evidence.push_back(row);
  }
  if (passing.empty()) throw CalibrationError("no equation variant attains the KS threshold", result);
  if (passing.size() > 1 && !result.degenerate)
    throw CalibrationError("ambiguous calibration: several equation variants pass", result);

  std::size_t chosen = passing.front();
  if (result.degenerate) {
    for (std::size_t i : passing)
      if (result.evidence[i].variant == EquationVariant::calibrated()) chosen = i;
  }
  result.selected = result.evidence[chosen].variant;
  result.separated = true;
  for (std::size_t i = 0; i < result.evidence.size(); ++i) {
    if (i == chosen) continue;
    const auto& row = result.evidence[i];
    const bool equivalent = result.degenerate && row.passed;
    if (!equivalent && !row.error && !(row.pooled_ks >= reject_ks)) result.separated = false;
  }
  return result;
}

/// Runs the ensemble against all eight variants and adjudicates.
inline CalibrationResult calibrate_equation_variant(EnsembleConfig config,
                                                    double pass_ks = kCalibrationPassKs,
                                                    double reject_ks = kCalibrationRejectKs) {
  config.variants = EquationVariant::all();
  config.include_mp_oracle = false;
  const auto report = run_ensemble(config);
  return adjudicate(report, config.variants, pass_ks, reject_ks);
}

// ---------------------------------------------------------------------------
// Convergence study

struct StudyRow {
  std::size_t n = 0;
  std::size_t p = 0;
  std::vector<double> ks;
  double ks_median = 0.0;
  double ks_iqr = 0.0;
};

struct StudyResult {
  std::vector<StudyRow> rows;
  /// Spearman rank correlation of median KS against n (negative when KS
  /// shrinks with size). NaN for fewer than two sizes.
  double spearman = std::numeric_limits<double>::quiet_NaN();

  /// Median KS strictly decreasing along the sizes.
  bool strictly_decreasing() const {
    for (std::size_t i = 1; i < rows.size(); ++i)
      if (!(rows[i].ks_median < rows[i - 1].ks_median)) return false;
    return true;
  }
};

namespace detail {
inline std::vector<double> ranks(std::span<const double> v) {
  std::vector<std::size_t> order(v.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::ranges::sort(order, [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) r[order[k]] = avg;
    i = j + 1;
  }
  return r;
}
}  // namespace detail

inline double spearman(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  const auto ra = detail::ranks(a);
  const auto rb = detail::ranks(b);
  const double mean = 0.5 * static_cast<double>(a.size() + 1);
  double num = 0.0, da = 0.0, db = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += (ra[i] - mean) * (rb[i] - mean);
    da += (ra[i] - mean) * (ra[i] - mean);
    db += (rb[i] - mean) * (rb[i] - mean);
  }
  if (da == 0.0 || db == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return num / std::sqrt(da * db);
}

struct StudyConfig {
  ProcessSpec process;
  double y = 1.0;
  std::vector<std::size_t> sizes{64, 128, 256, 512};  ///< values of n, ascending
  std::size_t replicates = 5;
  std::uint64_t base_seed = 0;
  EquationVariant variant = EquationVariant::calibrated();
  SolverConfig solver;
  std::size_t grid_points = 1024;
  std::size_t jobs = 1;
  std::size_t memory_budget = kDefaultMemoryBudget;
};

/// KS(ESD, LSD) per size with p = round(y n); the size with index i uses base
/// seed replicate_seed(base_seed, n_i).
inline StudyResult convergence_study(const StudyConfig& config) {
  if (config.sizes.empty()) throw ValidationError("sizes must not be empty", "sizes");
  if (!(config.y > 0.0)) throw ValidationError("y must be positive", "y");
  for (std::size_t i = 1; i < config.sizes.size(); ++i)
    if (!(config.sizes[i] > config.sizes[i - 1]))
      throw ValidationError("sizes must be strictly ascending", "sizes");

  StudyResult result;
  std::vector<std::pair<double, std::vector<Candidate>>> cache;
  for (std::size_t n : config.sizes) {
    EnsembleConfig ec;
    ec.process = config.process;
    ec.n = n;
    ec.p = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(config.y * static_cast<double>(n))));
    ec.replicates = config.replicates;
    ec.base_seed = replicate_seed(config.base_seed, n);
    ec.variants = {config.variant};
    ec.include_mp_oracle = false;
    ec.solver = config.solver;
    ec.grid_points = config.grid_points;
    ec.jobs = config.jobs;
    ec.memory_budget = config.memory_budget;
    ec.validate();

    const double yn = ec.shape().y();
    auto hit = std::ranges::find_if(cache, [&](const auto& e) { return e.first == yn; });
    if (hit == cache.end()) {
      cache.emplace_back(yn, build_candidates(ec.process, yn, ec.variants, false, ec.solver,
                                              ec.grid_points, ec.jobs));
      hit = cache.end() - 1;
    }
    if (hit->second.front().error) throw NumericalError(*hit->second.front().error);
    const auto report = run_ensemble(ec, hit->second);

    StudyRow row;
    row.n = ec.n;
    row.p = ec.p;
    for (const auto& r : report.replicates) row.ks.push_back(r.distances.front().ks);
    row.ks_median = detail::median(row.ks);
    row.ks_iqr = detail::quantile(row.ks, 0.75) - detail::quantile(row.ks, 0.25);
    result.rows.push_back(std::move(row));
  }
  std::vector<double> ns, med;
  for (const auto& r : result.rows) {
    ns.push_back(static_cast<double>(r.n));
    med.push_back(r.ks_median);
  }
  result.spearman = spearman(ns, med);
  return result;
}

}  // namespace lpmat
