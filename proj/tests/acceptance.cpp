// Acceptance runner: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include "mosaic/experiments.hpp"
#include "oracles.hpp"

#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>

#ifndef MOSAIC_CONFIG_DIR
#define MOSAIC_CONFIG_DIR "configs"
#endif

using namespace mosaic;
using json = nlohmann::json;

namespace {

struct Outcome {
  bool passed = false;
  std::string detail;
};

lab::ExperimentConfig load(const std::string& name) {
  return lab::ExperimentConfig::from_json(io::read_json_file(std::string(MOSAIC_CONFIG_DIR) + "/" + name + ".json"));
}

Outcome experiment_outcome(const lab::ResultTable& t) {
  Outcome o{t.passed(), ""};
  for (const auto& a : t.assertions) {
    if (!o.detail.empty()) o.detail += "; ";
    o.detail += (a.passed ? "" : "FAILED ") + a.name + (a.detail.empty() ? "" : " [" + a.detail + "]");
  }
  return o;
}

std::string fmt(double v) { return lab::format_number(v); }

ProcessSpec cross3() { return ProcessSpec(3.0, cross_measure(3)); }

ProcessSpec asymmetric() {
  return ProcessSpec(1.0, make_even({{Vec::Unit(3, 0), 0.6}, {Vec::Unit(3, 1), 0.2}, {Vec::Unit(3, 2), 0.2}}));
}

// 1. Planar Minkowski problem is solved exactly.
Outcome minkowski_2d() {
  RandomStream rng(101);
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    const int pairs = 2 + static_cast<int>(rng.uniform() * 15);  // 4..32 atoms
    const auto mu = oracle::random_even_measure(2, pairs, rng);
    const auto sol = solve_minkowski_2d(mu);
    worst = std::max(worst, prokhorov(surface_area_measure(sol.body), mu, 1e-13));
  }
  return {worst <= 1e-10, "max Prokhorov residual " + fmt(worst) + " over 50 measures"};
}

// 2. 3D solver: closed-form targets and round trips.
Outcome minkowski_3d() {
  const auto L = Subspace::full(3);
  std::vector<Halfspace> cube, oct;
  for (int j = 0; j < 3; ++j)
    for (double s : {1.0, -1.0}) cube.push_back({s * Vec::Unit(3, j), 1.0});
  for (int a : {1, -1})
    for (int b : {1, -1})
      for (int c : {1, -1}) oct.push_back({Vec(Eigen::Vector3d(a, b, c)) / std::sqrt(3.0), 1.0 / std::sqrt(3.0)});
  const auto C = intersect_halfspaces(L, cube, 10), O = intersect_halfspaces(L, oct, 10);
  double worst = 0.0;
  worst = std::max(worst, deviation(solve_minkowski_iterative(surface_area_measure(C), L, 1e-8).body, C).value);
  worst = std::max(worst, deviation(solve_minkowski_iterative(surface_area_measure(O), L, 1e-8).body, O).value);
  const double closed = worst;
  RandomStream rng(202);
  for (int i = 0; i < 20; ++i) {
    const auto P = oracle::random_symmetric_body(3, 3 + i % 6, rng);
    worst = std::max(worst, deviation(solve_minkowski_iterative(surface_area_measure(P), L, 1e-8).body, P).value);
  }
  return {worst <= 1e-4, "cube/octahedron theta " + fmt(closed) + ", max over 20 round trips " + fmt(worst)};
}

// 4. Section intensity against gamma * sum m_i |u_i|L|.
Outcome section_intensity() {
  std::vector<std::pair<ProcessSpec, Subspace>> cases;
  RandomStream pick(404);
  cases.emplace_back(cross3(), Subspace::coordinate(3, {0, 1}));
  cases.emplace_back(cross3(), random_subspace(3, 2, pick));
  cases.emplace_back(asymmetric(), random_subspace(3, 2, pick));
  cases.emplace_back(asymmetric(), Subspace::coordinate(3, {1, 2}));
  const auto tetra = make_even({{Vec(Eigen::Vector3d(1, 1, 1)), 0.25}, {Vec(Eigen::Vector3d(1, -1, 1)), 0.25},
                                {Vec(Eigen::Vector3d(1, 1, -1)), 0.25}, {Vec(Eigen::Vector3d(-1, 1, 1)), 0.25}});
  cases.emplace_back(ProcessSpec(2.0, tetra), random_subspace(3, 2, pick));
  bool ok = true;
  std::string detail;
  const double r = 1.0;
  for (std::size_t c = 0; c < cases.size(); ++c) {
    const auto& [spec, L] = cases[c];
    const RandomStream base(4040 + c);
    std::vector<double> n;
    for (int i = 0; i < 10000; ++i) {
      RandomStream rng = base.substream(i);
      n.push_back(count_section_hits(spec, L, r, rng) / (2 * r));
    }
    const auto m = stats::mean_stderr(n);
    double expected = 0.0;
    for (const auto& a : spec.phi.atoms()) expected += spec.gamma * a.mass * L.project(a.dir).norm();
    const double z = (m.mean - expected) / m.stderr_;
    ok = ok && std::abs(z) <= 3.0;
    detail += (c ? "; " : "") + fmt(m.mean) + " vs " + fmt(expected) + " (z " + fmt(std::round(z * 100) / 100) + ")";
  }
  const double cross_value = section_params(cross3(), Subspace::coordinate(3, {0, 1})).gamma_section;
  ok = ok && std::abs(cross_value - 2.0 * 3.0 / 3.0) < 1e-14;
  return {ok, detail};
}

// 5. Q_{d-k} against intersection counting.
Outcome flat_distribution() {
  bool ok = true;
  std::string detail;
  struct Case {
    const char* name;
    ProcessSpec spec;
    int k;
    std::vector<double> expected;  // sorted weights
  };
  const std::vector<Case> cases{{"cross k=1", cross3(), 1, {1.0 / 3, 1.0 / 3, 1.0 / 3}},
                                {"cross k=2", cross3(), 2, {1.0 / 3, 1.0 / 3, 1.0 / 3}},
                                {"asymmetric k=1", asymmetric(), 1, {1.0 / 7, 3.0 / 7, 3.0 / 7}},
                                {"asymmetric k=2", asymmetric(), 2, {0.2, 0.2, 0.6}}};
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const auto& c = cases[i];
    const auto q = intersection_direction_distribution(c.spec, c.k);
    std::vector<double> w;
    for (const auto& e : q.entries) w.push_back(e.weight);
    std::sort(w.begin(), w.end());
    bool formula = w.size() == c.expected.size();
    for (std::size_t j = 0; formula && j < w.size(); ++j) formula = std::abs(w[j] - c.expected[j]) < 1e-12;
    RandomStream rng(505 + i);
    const auto counts = oracle::count_intersection_flats(c.spec, q, c.k, 4.0 / c.spec.gamma, 100000, rng);
    const double tv = oracle::total_variation(counts, q);
    ok = ok && formula && tv < 0.02;
    detail += (i ? "; " : "") + std::string(c.name) + ": formula " + (formula ? "ok" : "WRONG") + ", TV " + fmt(tv);
  }
  return {ok, detail};
}

// 6. Two-route consistency.
Outcome consistency() {
  const auto t = lab::run_experiment("consistency", load("consistency"));
  auto o = experiment_outcome(t);
  const double pf = t.diagnostic("process_faces"), af = t.diagnostic("arrangement_faces");
  o.passed = o.passed && pf >= 2000 && af >= 2000;
  o.detail += "; faces: process " + fmt(pf) + ", arrangement " + fmt(af);
  return o;
}

Outcome theorem1() {
  const auto c = load("theorem1");
  auto o = experiment_outcome(lab::run_experiment("theorem1", c));
  const bool setup = c.replicas >= 100000 && c.a_grid == std::vector<double>{1, 2, 4, 8} && c.epsilon == 0.3 &&
                     c.k == 2 && c.spec.dim() == 3;
  o.passed = o.passed && setup;
  if (!setup) o.detail += "; config does not match the criterion";
  return o;
}

Outcome lemma6() {
  const auto c = load("lemma6");
  auto o = experiment_outcome(lab::run_experiment("lemma6", c));
  o.passed = o.passed && c.replicas >= 100000 && c.h == 0.25;
  return o;
}

// 9. LP deviation against the grid oracle plus invariance suites.
Outcome theta_oracle() {
  RandomStream rng(909);
  double worst = 0.0, worst_inv = 0.0;
  for (int i = 0; i < 100; ++i) {
    const auto K = oracle::random_body(2, 3 + i % 7, rng);
    const auto M = oracle::random_symmetric_body(2, 1 + i % 4, rng);
    worst = std::max(worst, std::abs(deviation(K, M).value - oracle::theta_grid(K, M)));
  }
  for (int i = 0; i < 50; ++i) {
    const auto K = oracle::random_body(2, 6, rng);
    const auto M = oracle::random_symmetric_body(2, 3, rng);
    const auto N = oracle::random_symmetric_body(2, 2, rng);
    const double t = deviation(K, M).value;
    const auto rho = random_rotation(2, rng);
    worst_inv = std::max(worst_inv, std::abs(deviation(K.rotated(rho), M.rotated(rho)).value - t));
    worst_inv = std::max(worst_inv, std::abs(deviation(K.scaled(rng.uniform(0.1, 10)), M).value - t));
    worst_inv = std::max(worst_inv, std::abs(deviation(K, M.scaled(rng.uniform(0.1, 10))).value - t));
    // Triangle inequality: violation counted as error.
    worst_inv = std::max(worst_inv, deviation(K, N).value - t - deviation(M, N).value);
  }
  return {worst <= 1e-4 && worst_inv <= 1e-8,
          "max |LP - grid| " + fmt(worst) + " over 100 pairs, max invariance error " + fmt(worst_inv)};
}

// 10. Delta against brute-force minimisation over SO(d).
Outcome delta_oracle() {
  RandomStream rng(1010), search(1011);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const int d = i < 50 ? 3 : 4;
    const int k = 1 + i % (d - 1);
    const auto L = random_subspace(d, k, rng), E = random_subspace(d, k, rng);
    worst = std::max(worst, std::abs(delta(L, E) - oracle::delta_brute_force(L, E, search)));
  }
  return {worst <= 1e-6, "max |closed form - brute force| " + fmt(worst) + " over 100 pairs"};
}

Outcome reproducibility() {
  const auto dir = std::filesystem::temp_directory_path() / "mosaic_acceptance_repro";
  std::filesystem::remove_all(dir);
  bool ok = true;
  std::string detail;
  for (const char* name : {"theorem1", "limitshape", "lemma1"}) {
    const auto c = load(name);
    std::string first;
    for (int run = 0; run < 2; ++run) {
      const auto run_dir = dir / (std::string(name) + std::to_string(run));
      std::filesystem::create_directories(run_dir);
      lab::write_outputs(lab::run_experiment(name, c), run_dir.string(), "csv", false, c.k);
      std::ifstream in(run_dir / (std::string(name) + ".csv"), std::ios::binary);
      const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
      if (run == 0) first = bytes;
      else {
        const bool same = !bytes.empty() && bytes == first;
        ok = ok && same;
        detail += std::string(detail.empty() ? "" : "; ") + name + (same ? " identical" : " DIFFERS") + " (" +
                  std::to_string(bytes.size()) + " bytes)";
      }
    }
  }
  std::filesystem::remove_all(dir);
  return {ok, detail};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double budget_seconds;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "Minkowski 2D exactness", 1, minkowski_2d},
      {2, "Minkowski 3D solver", 60, minkowski_3d},
      {3, "rotation-perturbation bound", 30,
       [] { return experiment_outcome(lab::run_experiment("lemma1", load("lemma1"))); }},
      {4, "section intensity", 60, section_intensity},
      {5, "intersection direction distribution", 300, flat_distribution},
      {6, "two-route consistency", 600, consistency},
      {7, "deviation probability trend", 900, theorem1},
      {8, "small-section decay bracket", 600, lemma6},
      {9, "deviation oracle equivalence", 60, theta_oracle},
      {10, "Delta oracle equivalence", 60, delta_oracle},
      {11, "concentration demo", 900,
       [] {
         const auto c = load("limitshape");
         auto o = experiment_outcome(lab::run_experiment("limitshape", c));
         o.passed = o.passed && c.schedule.size() >= 4;
         return o;
       }},
      {12, "reproducibility", 900, reproducibility},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    lab::detail::Stopwatch clock;
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = clock.seconds();
    const bool in_time = secs <= c.budget_seconds;
    const bool pass = o.passed && in_time;
    failed += pass ? 0 : 1;
    std::printf("%s %2d %s: %s (%.2f s of %.0f s budget%s)\n", pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(),
                secs, c.budget_seconds, in_time ? "" : ", OVER BUDGET");
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
