// swarmkld: theory checks, sweeps and single-trial traces.
//
// Exit codes: 0 success, 1 a check failed, 2 bad usage / config / IO.

#include "swarmkld/bench.hpp"
#include "swarmkld/config.hpp"
#include "swarmkld/theory.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <string>

namespace fs = std::filesystem;
using namespace swarmkld;

namespace {

constexpr int kOk = 0;
constexpr int kCheckFailed = 1;
constexpr int kUsage = 2;

struct Common {
  std::optional<std::uint64_t> seed;
  std::string config;
  std::string out;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--seed", c.seed, "Master seed");
  cmd->add_option("--config", c.config, "JSON config file");
  cmd->add_option("--out", c.out, "Output directory (default: $SWARMKLD_OUT or .)");
}

fs::path out_dir(const Common& c) {
  std::string dir = c.out;
  if (dir.empty()) {
    const char* env = std::getenv("SWARMKLD_OUT");
    dir = env != nullptr && *env != '\0' ? env : ".";
  }
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir + "': " + ec.message());
  return dir;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

theory::SuiteSizes load_suite_sizes(const std::string& path, std::optional<std::uint64_t>& seed) {
  theory::SuiteSizes sizes;
  if (path.empty()) return sizes;
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
    if (!j.is_object()) throw ConfigError("config file '" + path + "': expected an object");
    const std::set<std::string> known{"seed",          "karamata_pairs",  "oracle_instances",
                                      "concavity_grid", "hen_particles",   "chick_particles",
                                      "rooster_draws"};
    for (const auto& [key, _] : j.items()) {
      if (!known.contains(key)) throw ConfigError("config file '" + path + "': unknown key '" + key + "'");
    }
    if (j.contains("seed") && !seed) seed = j.at("seed").get<std::uint64_t>();
    sizes.karamata_pairs = j.value("karamata_pairs", sizes.karamata_pairs);
    sizes.oracle_instances = j.value("oracle_instances", sizes.oracle_instances);
    sizes.concavity_grid = j.value("concavity_grid", sizes.concavity_grid);
    sizes.hen_particles = j.value("hen_particles", sizes.hen_particles);
    sizes.chick_particles = j.value("chick_particles", sizes.chick_particles);
    sizes.rooster_draws = j.value("rooster_draws", sizes.rooster_draws);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config file '" + path + "': " + e.what());
  }
  return sizes;
}

int cmd_verify(const Common& c) {
  std::optional<std::uint64_t> seed = c.seed;
  const auto sizes = load_suite_sizes(c.config, seed);
  const fs::path dir = out_dir(c);
  const auto report = theory::run_theory_suite(seed.value_or(1), sizes);
  write_text(dir / "theory_report.txt", report.to_text());
  write_text(dir / "theory_report.json", report.to_json());
  std::cout << report.to_text();
  return report.all_passed() ? kOk : kCheckFailed;
}

struct SweepOverrides {
  std::optional<std::size_t> trials;
  std::optional<std::size_t> steps;
  bool per_trial = false;
};

ExperimentConfig resolve(ExperimentConfig base, const Common& c, const SweepOverrides& o) {
  if (!c.config.empty()) base = load_config(c.config, std::move(base));
  if (c.seed) base.seed = *c.seed;
  if (o.trials) base.trials = *o.trials;
  if (o.steps) base.steps = *o.steps;
  if (o.per_trial) base.per_trial_records = true;
  base.validate();
  return base;
}

int cmd_sweep(ExperimentConfig defaults, const Common& c, const SweepOverrides& o, bool cv) {
  const ExperimentConfig config = resolve(std::move(defaults), c, o);
  if ((config.model == ModelKind::cv2d) != cv) {
    throw ConfigError(std::string("this command needs model ") + (cv ? "cv2d" : "linear1d"));
  }
  const fs::path dir = out_dir(c);
  const SweepResult result = cv ? run_sweep_cv(config) : run_sweep_1d(config);
  const std::string stem = config.name;
  write_results(result.rows, dir / (stem + ".csv"));
  write_sidecar(config, result, dir / (stem + ".json"));
  if (config.per_trial_records) write_trial_records(result.trials, dir / (stem + "_trials.csv"));

  std::size_t failed = 0;
  for (const auto& t : result.trials) failed += t.failed ? 1 : 0;
  for (const auto& r : result.rows) {
    std::cout << r.sweep_var << '=' << format_double(r.sweep_value) << ' ' << r.algorithm
              << " n=" << format_double(r.n_mean) << " rmse=" << format_double(r.rmse_mean)
              << " nees=" << format_double(r.nees_mean) << '\n';
  }
  if (failed > 0) std::cerr << failed << " trial(s) failed; see " << (dir / (stem + ".json")).string() << '\n';
  std::cout << "wrote " << (dir / (stem + ".csv")).string() << '\n';
  return kOk;
}

int cmd_demo(const Common& c, const std::string& model, const std::string& algorithm,
             const SweepOverrides& o) {
  ExperimentConfig base = model == "cv2d" ? default_sweepcv_config() : default_sweep1d_config();
  base.name = "demo";
  const ExperimentConfig config = resolve(std::move(base), c, o);
  const fs::path dir = out_dir(c);
  const fs::path path = dir / "demo_trace.csv";
  const std::uint64_t seed = trial_seed(config.seed, 0);
  bool append = false;
  int rc = kOk;
  for (Algorithm a : {Algorithm::pf, Algorithm::cpf}) {
    if (algorithm != "both" && parse_algorithm(algorithm) != a) continue;
    const RunMetrics m = run_trial(config, a, seed);
    if (m.failed) {
      std::cerr << algorithm_name(a) << " trial failed: " << m.failure << '\n';
      rc = kCheckFailed;
      continue;
    }
    write_trace(m, a, path, append);
    append = true;
    std::cout << algorithm_name(a) << ": rmse=" << format_double(m.position_rmse)
              << " n=" << format_double(m.avg_particles) << " nees=" << format_double(m.avg_nees) << '\n';
  }
  std::cout << "wrote " << path.string() << '\n';
  return rc;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Particle filter with KLD sizing and chicken-swarm rejuvenation"};
  app.require_subcommand(1);

  Common verify_opts, sweep1d_opts, sweepcv_opts, demo_opts;
  SweepOverrides sweep1d_over, sweepcv_over, demo_over;
  std::string demo_model = "linear1d";
  std::string demo_algorithm = "both";

  auto* verify = app.add_subcommand("verify", "Run the theory property suite");
  add_common(verify, verify_opts);

  auto* sweep1d = app.add_subcommand("sweep1d", "Noise sweeps on the 1D linear-Gaussian model");
  add_common(sweep1d, sweep1d_opts);
  sweep1d->add_option("--trials", sweep1d_over.trials, "Monte Carlo trials per grid point");
  sweep1d->add_option("--steps", sweep1d_over.steps, "Time steps per trial");
  sweep1d->add_flag("--per-trial", sweep1d_over.per_trial, "Also write per-trial records");

  auto* sweepcv = app.add_subcommand("sweepcv", "Bearing-noise sweep on the range/bearing CV model");
  add_common(sweepcv, sweepcv_opts);
  sweepcv->add_option("--trials", sweepcv_over.trials, "Monte Carlo trials per grid point");
  sweepcv->add_option("--steps", sweepcv_over.steps, "Time steps per trial");
  sweepcv->add_flag("--per-trial", sweepcv_over.per_trial, "Also write per-trial records");

  auto* demo = app.add_subcommand("demo", "One trial with a per-step trace");
  add_common(demo, demo_opts);
  demo->add_option("--model", demo_model, "linear1d or cv2d")->check(CLI::IsMember({"linear1d", "cv2d"}));
  demo->add_option("--algorithm", demo_algorithm, "PF, CPF or both")
      ->check(CLI::IsMember({"PF", "CPF", "pf", "cpf", "both"}));
  demo->add_option("--steps", demo_over.steps, "Time steps");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return kUsage;
  }

  try {
    if (*verify) return cmd_verify(verify_opts);
    if (*sweep1d) return cmd_sweep(default_sweep1d_config(), sweep1d_opts, sweep1d_over, false);
    if (*sweepcv) return cmd_sweep(default_sweepcv_config(), sweepcv_opts, sweepcv_over, true);
    if (*demo) return cmd_demo(demo_opts, demo_model, demo_algorithm, demo_over);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}
