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

// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failing criteria. The optional argument is the path of the lpmat
// executable, used by the determinism criterion.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "lpmat.hpp"

namespace {

using namespace lpmat;
namespace fs = std::filesystem;
using cd = std::complex<double>;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(4);
  os << v;
  return os.str();
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

ProcessSpec process_of(CoefficientModel model) {
  ProcessSpec spec;
  spec.model = std::move(model);
  return spec;
}

Outcome mp_anchor() {
  const auto t0 = std::chrono::steady_clock::now();
  EnsembleConfig c;
  c.p = c.n = 512;
  c.replicates = 1;
  c.base_seed = 1;
  c.variants = {};
  const auto report = run_ensemble(c);
  const double runtime = seconds_since(t0);
  const double ks = report.pooled[*report.candidate_index(kMpCandidate)].ks;
  return {ks <= 0.05 && runtime <= 60.0,
          "KS=" + fmt(ks) + " (<=0.05), runtime " + fmt(runtime) + " s (<=60)"};
}

// Root of z s^2 + z s + 1 = 0 in the upper half-plane.
cd quadratic_root(cd z) {
  const cd disc = std::sqrt(z * z - 4.0 * z);
  const cd a = (-z + disc) / (2.0 * z), b = (-z - disc) / (2.0 * z);
  return a.imag() > b.imag() ? a : b;
}

Outcome solver_closed_form() {
  const auto f = SpectralDensity::constant(1.0);
  const StieltjesSolver solver(f, 1.0, EquationVariant{}, {});
  std::mt19937_64 gen(20260101);
  std::uniform_real_distribution<double> re(-2.0, 6.0), log_im(std::log(0.01), std::log(10.0));
  double worst = 0.0;
  for (int k = 0; k < 20; ++k) {
    const cd z(re(gen), std::exp(log_im(gen)));
    worst = std::max(worst, std::abs(solver.solve(z) - quadratic_root(z)));
  }
  const std::vector<double> x{2.0};
  const double rho = lsd_density(f, 1.0, x)[0];
  const double err = std::abs(rho - 1.0 / (2.0 * std::numbers::pi));
  return {worst <= 1e-9 && err <= 1e-3,
          "max |s - s_quad| over 20 z = " + fmt(worst) + " (<=1e-9); |rho(2) - 1/(2pi)| = " +
              fmt(err) + " (<=1e-3)"};
}

Outcome dependent_end_to_end() {
  EnsembleConfig c;
  c.process = process_of(MovingAverage{{0.5}});
  c.p = c.n = 512;
  c.replicates = 5;
  c.base_seed = 3;
  const auto report = run_ensemble(c);
  const double ks = report.pooled[0].ks;
  return {ks <= 0.05, "KS(pooled ESD, LSD " + report.candidate_names[0] + ") = " + fmt(ks) +
                          " (<=0.05)"};
}

Outcome calibration_decisiveness() {
  std::string detail;
  bool pass = true;
  std::optional<EquationVariant> verdict;
  auto run = [&](const ProcessSpec& process, std::uint64_t seed, const std::string& label) {
    EnsembleConfig c;
    c.process = process;
    c.p = 256;
    c.n = 512;
    c.replicates = 10;
    c.base_seed = seed;
    try {
      const auto r = calibrate_equation_variant(c);
      double best_other = 1.0;
      for (const auto& row : r.evidence)
        if (row.variant != *r.selected) best_other = std::min(best_other, row.pooled_ks);
      const double chosen =
          std::ranges::find(r.evidence, *r.selected, &EvidenceRow::variant)->pooled_ks;
      pass = pass && r.separated && (!verdict || *verdict == *r.selected);
      if (!verdict) verdict = r.selected;
      detail += label + ": " + to_string(*r.selected) + " KS=" + fmt(chosen) +
                ", next best " + fmt(best_other) + "; ";
    } catch (const CalibrationError& e) {
      pass = false;
      detail += label + ": " + e.what() + "; ";
    }
  };
  for (std::uint64_t seed : {1u, 2u, 3u}) run(ProcessSpec{}, seed, "seed " + std::to_string(seed));
  run(process_of(MovingAverage{{0.5}}), 1, "MA(1) confirmation");
  return {pass, detail};
}

Outcome trace_identity() {
  struct Case {
    const char* name;
    CoefficientModel model;
    double target;
  };
  bool pass = true;
  std::string detail;
  for (const auto& c : {Case{"white noise", white_noise(), 1.0},
                        Case{"MA(1)", MovingAverage{{0.5}}, 1.25},
                        Case{"AR(1)", AutoRegressive1{0.5}, 4.0 / 3.0}}) {
    EnsembleConfig e;
    e.process = process_of(c.model);
    e.p = e.n = 256;
    e.replicates = 20;
    e.base_seed = 5;
    const auto r = trace_moment_check(e, 0.02);
    pass = pass && r.passed && std::abs(r.target - c.target) < 1e-12;
    detail += std::string(c.name) + " " + fmt(r.mean) + "/" + fmt(r.target) + " (rel " +
              fmt(r.relative_error) + "); ";
  }
  return {pass, detail + "tolerance 2%"};
}

Outcome circulant_szego() {
  const std::vector<double> c{1.0, 0.6, -0.3};
  const std::size_t n = 255;
  const auto circ = build_circulant(c, n + 1);
  const auto ev = sym_eigenvalues(circ * circ.transpose());
  const auto f = SpectralDensity::truncated_sum(c);
  std::vector<double> expected;
  for (std::size_t k = 0; k <= n; ++k)
    expected.push_back(f(2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n + 1)));
  std::ranges::sort(expected);
  double worst = 0.0;
  for (std::size_t k = 0; k <= n; ++k) worst = std::max(worst, std::abs(ev.eigenvalues()[k] - expected[k]));

  const std::size_t m = 256;
  const auto omega = build_Omega(c, m);
  const auto ks = ks_distance(sym_eigenvalues(omega * omega.transpose()),
                              sym_eigenvalues(build_toeplitz_gamma(c, m)));
  return {worst <= 1e-8 && ks <= 0.05, "max |eig(CC^T) - f(2pi k/256)| = " + fmt(worst) +
                                           " (<=1e-8); KS(ESD Omega Omega^T, ESD Gamma) = " +
                                           fmt(ks) + " (<=0.05)"};
}

Outcome representation_lemma() {
  std::mt19937_64 gen(777);
  std::uniform_int_distribution<std::size_t> dim(1, 8), order(0, 3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double worst = 0.0;
  int exact = 0;
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> theta(order(gen));
    for (auto& t : theta) t = u(gen);
    ProcessSpec spec = process_of(MovingAverage{theta});
    spec.innovations.seed = gen();
    const auto check = shift_representation_check(spec, {dim(gen), dim(gen)}, 1e-12);
    exact += check.exact;
    worst = std::max(worst, check.max_deviation);
  }
  return {exact == 20 && worst <= 1e-12,
          std::to_string(exact) + "/20 exact, max deviation " + fmt(worst) + " (<=1e-12)"};
}

Outcome convergence_trend() {
  bool pass = true;
  std::string detail;
  for (const auto& [name, model] :
       {std::pair<std::string, CoefficientModel>{"white noise", white_noise()},
        std::pair<std::string, CoefficientModel>{"MA(1)", MovingAverage{{0.5}}}}) {
    StudyConfig c;
    c.process = process_of(model);
    c.y = 1.0;
    c.sizes = {64, 128, 256, 512};
    c.replicates = 5;
    c.base_seed = 8;
    const auto r = convergence_study(c);
    pass = pass && r.strictly_decreasing();
    detail += name + " median KS";
    for (const auto& row : r.rows) detail += " " + fmt(row.ks_median);
    detail += " (spearman " + fmt(r.spearman) + "); ";
  }
  return {pass, detail};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

Outcome determinism(const std::string& tool) {
  const fs::path root = fs::temp_directory_path() / "lpmat_acceptance_determinism";
  fs::remove_all(root);
  fs::create_directories(root);
  std::ofstream(root / "compare.json")
      << R"({"command":"compare","model":{"kind":"ma","theta":[0.5]},"p":128,"n":128,)"
      << R"("replicates":6,"seed":42,"dump_eigenvalues":true})";
  std::ofstream(root / "calibrate.json")
      << R"({"command":"calibrate","p":64,"n":128,"replicates":4,"seed":42})";

  struct Run {
    std::string config, out, jobs;
  };
  const std::vector<Run> runs{{"compare.json", "c1", "1"}, {"compare.json", "c1b", "1"},
                              {"compare.json", "c4", "4"}, {"calibrate.json", "k1", "1"},
                              {"calibrate.json", "k3", "3"}};
  auto invoke = [&](const Run& r) {
    const std::string cmd = "\"" + tool + "\" --config \"" + (root / r.config).string() +
                            "\" --out \"" + (root / r.out).string() + "\" --jobs " + r.jobs +
                            " 2>/dev/null";
    return std::system(cmd.c_str()) == 0;
  };
  if (!std::ranges::all_of(runs, invoke)) return {false, "lpmat invocation failed (" + tool + ")"};

  bool same = true;
  std::string detail;
  auto compare = [&](const char* a, const char* b, const char* file) {
    const auto x = slurp(root / a / file);
    const bool eq = !x.empty() && x == slurp(root / b / file);
    same = same && eq;
    detail += std::string(file) + " " + a + " vs " + b + (eq ? " identical; " : " DIFFER; ");
  };
  compare("c1", "c1b", "report.json");
  compare("c1", "c4", "report.json");
  compare("c1", "c4", "eigenvalues.csv");
  compare("k1", "k3", "verdict.json");
  compare("k1", "k3", "evidence.csv");
  fs::remove_all(root);
  return {same, detail};
}

}  // namespace

int main(int argc, char** argv) {
  const std::string tool = argc > 1 ? argv[1] : "lpmat";
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"1 MP anchor (white noise, p=n=512, 1 replicate)", mp_anchor},
      {"2 solver vs closed form (f=1, y=1)", solver_closed_form},
      {"3 dependent case end-to-end (MA(1), p=n=512, 5 replicates)", dependent_end_to_end},
      {"4 calibration decisiveness (y=0.5, p=256, n=512, 10 replicates)", calibration_decisiveness},
      {"5 trace identity (p=n=256, 20 replicates)", trace_identity},
      {"6 circulant / Szego identities", circulant_szego},
      {"7 representation lemma (20 random small instances)", representation_lemma},
      {"8 convergence trend (y=1, n in 64..512, median of 5)", convergence_trend},
      {"9 determinism across --jobs", [&] { return determinism(tool); }},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    while (o.detail.ends_with("; ") || o.detail.ends_with(" ")) o.detail.pop_back();
    failures += !o.pass;
    std::cout << (o.pass ? "[PASS] " : "[FAIL] ") << name << ": " << o.detail << " ["
              << fmt(seconds_since(t0)) << " s]" << std::endl;
  }
  std::cout << (failures == 0 ? "all acceptance criteria pass" : std::to_string(failures) + " criteria fail")
            << std::endl;
  return failures;
}
