// mosaic-lab: simulation, Blaschke bodies, shape deviation and experiments.

#include "mosaic/experiments.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>

using namespace mosaic;
using json = nlohmann::json;

namespace {

json load_or_empty(const std::string& path) { return path.empty() ? json::object() : io::read_json_file(path); }

void emit(const json& j, const std::string& out_dir, const std::string& name) {
  if (out_dir.empty()) {
    std::cout << j.dump(2) << "\n";
    return;
  }
  std::filesystem::create_directories(out_dir);
  std::ofstream(out_dir + "/" + name) << j.dump(2) << "\n";
}

// simulate: one JSON line per sampled cell or face.
int cmd_simulate(const json& cfg, std::uint64_t seed, std::size_t count, const std::string& kind,
                 const std::string& out_dir) {
  const ProcessSpec spec = io::process_from_json(cfg.at("process"));
  const int k = cfg.value("k", spec.dim() - 1);
  const RandomStream base(seed);
  std::ofstream file;
  std::ostream* out = &std::cout;
  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    file.open(out_dir + "/simulate.jsonl");
    out = &file;
  }
  FlatDistribution q;
  if (kind == "face") q = intersection_direction_distribution(spec, k);
  const Subspace L = cfg.contains("subspace") ? io::subspace_from_json(cfg.at("subspace")) : Subspace();
  for (std::size_t i = 0; i < count; ++i) {
    RandomStream rng = base.substream(i);
    Polytope P;
    if (kind == "zero") {
      P = zero_cell(spec, rng);
    } else if (kind == "section") {
      if (L.dim() == 0) throw InvalidArgument("simulate: kind=section needs \"subspace\" in the config");
      P = zero_cell_in_section(spec, L, rng);
    } else if (kind == "face") {
      P = sample_weighted_typical_face(spec, q, rng).face;
    } else {
      throw InvalidArgument("simulate: kind must be zero, section or face");
    }
    *out << io::to_json(P).dump() << "\n";
  }
  return 0;
}

int cmd_blaschke(const json& cfg, const std::string& out_dir) {
  const ProcessSpec spec = io::process_from_json(cfg.at("process"));
  const Subspace L = io::subspace_from_json(cfg.at("subspace"));
  const SectionSpec sec = section_params(spec, L);
  const MinkowskiSolution sol = solve_minkowski(sec.phi_section, L, 1e-8);
  json out = {{"body", io::to_json(sol.body)},
              {"residual", sol.residual},
              {"iterations", sol.iterations},
              {"gamma_section", sec.gamma_section},
              {"phi_section", io::to_json(sec.phi_section)}};
  emit(out, out_dir, "blaschke.json");
  return 0;
}

int cmd_deviation(const std::string& k_path, const std::string& m_path, const std::string& out_dir) {
  auto body = [](const json& j) { return io::polytope_from_json(j.contains("body") ? j.at("body") : j); };
  const Polytope K = body(io::read_json_file(k_path));
  const Polytope M = body(io::read_json_file(m_path));
  emit(io::to_json(deviation(K, M)), out_dir, "deviation.json");
  return 0;
}

int cmd_experiment(const std::string& name, const std::string& config_path, std::optional<std::uint64_t> seed,
                   const std::string& out_dir, const std::string& format, bool plots) {
  json cfg = io::read_json_file(config_path);
  if (seed) cfg["seed"] = *seed;
  const lab::ExperimentConfig c = lab::ExperimentConfig::from_json(cfg);
  const lab::ResultTable t = lab::run_experiment(name, c);
  const std::string dir = out_dir.empty() ? "." : out_dir;
  std::filesystem::create_directories(dir);
  lab::write_outputs(t, dir, format, plots, c.k);
  for (const auto& a : t.assertions) {
    std::cout << (a.passed ? "PASS " : "FAIL ") << name << ": " << a.name;
    if (!a.detail.empty()) std::cout << " (" << a.detail << ")";
    std::cout << "\n";
  }
  return t.passed() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mosaic-lab: Poisson hyperplane tessellations, Blaschke bodies and limit shapes"};
  app.require_subcommand(1);

  std::string config, out_dir, format = "csv", kind = "face", experiment;
  std::uint64_t seed_value = 1;
  std::size_t count = 10;
  bool plots = false;
  std::string k_path, m_path;

  auto* sim = app.add_subcommand("simulate", "sample zero cells, section cells or weighted typical faces");
  sim->add_option("--config", config, "JSON with \"process\" (and \"k\" / \"subspace\")")->required();
  sim->add_option("--seed", seed_value, "seed");
  sim->add_option("--count", count, "number of samples");
  sim->add_option("--kind", kind, "zero | section | face")->check(CLI::IsMember({"zero", "section", "face"}));
  sim->add_option("--out", out_dir, "output directory (default: stdout)");

  auto* bl = app.add_subcommand("blaschke", "Blaschke body B_L of a process and a subspace");
  bl->add_option("--config", config, "JSON with \"process\" and \"subspace\"")->required();
  bl->add_option("--out", out_dir, "output directory (default: stdout)");

  auto* dev = app.add_subcommand("deviation", "shape deviation theta(K, M) of two body files");
  dev->add_option("K", k_path, "body K (JSON)")->required();
  dev->add_option("M", m_path, "o-symmetric body M (JSON)")->required();
  dev->add_option("--out", out_dir, "output directory (default: stdout)");

  auto* ex = app.add_subcommand("experiment", "run a validation experiment");
  ex->add_option("name", experiment, "theorem1 | theorem2 | lemma1 | lemma6 | limitshape | consistency")
      ->required()
      ->check(CLI::IsMember({"theorem1", "theorem2", "lemma1", "lemma6", "limitshape", "consistency"}));
  ex->add_option("--config", config, "experiment config (JSON)")->required();
  auto* seed_opt = ex->add_option("--seed", seed_value, "seed (overrides the config)");
  ex->add_option("--out", out_dir, "output directory");
  ex->add_option("--format", format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
  ex->add_flag("--plots", plots, "write SVG plots");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) return cmd_simulate(load_or_empty(config), seed_value, count, kind, out_dir);
    if (bl->parsed()) return cmd_blaschke(load_or_empty(config), out_dir);
    if (dev->parsed()) return cmd_deviation(k_path, m_path, out_dir);
    if (ex->parsed()) {
      std::optional<std::uint64_t> seed;
      if (seed_opt->count() > 0) seed = seed_value;
      return cmd_experiment(experiment, config, seed, out_dir, format, plots);
    }
  } catch (const mosaic::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: bad JSON input: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
