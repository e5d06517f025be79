#include "swarmkld/config.hpp"

#include <fstream>
#include <set>

namespace swarmkld {
namespace {

using nlohmann::json;

void reject_unknown(const json& j, const std::string& section, std::initializer_list<const char*> known) {
  if (!j.is_object()) throw ConfigError("config section '" + section + "' must be an object");
  const std::set<std::string> allowed(known.begin(), known.end());
  for (const auto& [key, _] : j.items()) {
    if (!allowed.contains(key)) throw ConfigError("unknown config key '" + section + "." + key + "'");
  }
}

template <class T>
void read(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config key '") + key + "': " + e.what());
  }
}

void read_opt(const json& j, const char* key, std::optional<double>& out) {
  if (!j.contains(key)) return;
  if (j.at(key).is_null()) {
    out.reset();
  } else {
    double v = 0.0;
    read(j, key, v);
    out = v;
  }
}

json opt_to_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::string model_name(ModelKind k) { return k == ModelKind::linear1d ? "linear1d" : "cv2d"; }

ModelKind parse_model(const std::string& s) {
  if (s == "linear1d") return ModelKind::linear1d;
  if (s == "cv2d") return ModelKind::cv2d;
  throw ConfigError("unknown model '" + s + "' (expected linear1d or cv2d)");
}

}  // namespace

void ExperimentConfig::validate() const {
  try {
    kld.validate();
    cso.validate();
    pf.validate();
    (void)make_model(*this);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  const std::size_t binned = model == ModelKind::linear1d ? 1 : 2;
  if (kld.bin_width.size() != binned) {
    throw ConfigError("kld.bin_width needs " + std::to_string(binned) + " entries for model " + model_name(model));
  }
  if (steps < 1) throw ConfigError("steps must be >= 1");
  if (trials < 1) throw ConfigError("trials must be >= 1");
  if (n_init < 3) throw ConfigError("n_init must be >= 3");
  for (const auto& s : sweeps) {
    if (s.values.empty()) throw ConfigError("sweep '" + s.variable + "' has an empty grid");
    ExperimentConfig probe = *this;
    for (double v : s.values) set_sweep_value(probe, s.variable, v);
  }
}

ExperimentConfig default_sweep1d_config() {
  ExperimentConfig c;
  c.name = "sweep1d";
  c.model = ModelKind::linear1d;
  c.kld.bin_width = {0.25};
  c.steps = 50;
  c.trials = 20;
  c.sweeps = {{"sigma1", {0.25, 0.5, 1.0}}, {"sigma2", {0.5, 1.0, 2.0}}};
  return c;
}

ExperimentConfig default_sweepcv_config() {
  ExperimentConfig c;
  c.name = "sweepcv";
  c.model = ModelKind::cv2d;
  c.kld.bin_width = {0.35, 0.35};
  c.steps = 60;
  c.trials = 50;
  c.sweeps = {{"bearing_deg", {1, 2, 3, 4, 5, 6, 7, 8, 9, 10}}};
  return c;
}

std::unique_ptr<StateSpaceModel> make_model(const ExperimentConfig& config) {
  if (config.model == ModelKind::linear1d) return std::make_unique<LinearGauss1D>(config.linear);
  return std::make_unique<ConstantVelocity2D>(config.cv);
}

void set_sweep_value(ExperimentConfig& config, const std::string& variable, double value) {
  const bool lin = config.model == ModelKind::linear1d;
  if (lin && variable == "sigma1") {
    config.linear.sigma1 = value;
  } else if (lin && variable == "sigma2") {
    config.linear.sigma2 = value;
  } else if (!lin && variable == "bearing_deg") {
    config.cv.bearing_std_deg = value;
  } else if (!lin && variable == "sigma_r") {
    config.cv.sigma_r = value;
  } else if (!lin && variable == "sigma_a") {
    config.cv.sigma_a = value;
  } else {
    throw ConfigError("sweep variable '" + variable + "' is not valid for model " + model_name(config.model));
  }
  if (!(value > 0.0)) throw ConfigError("sweep value for '" + variable + "' must be > 0");
}

json to_json(const ExperimentConfig& c) {
  json j;
  j["name"] = c.name;
  j["model"] = model_name(c.model);
  j["linear1d"] = {{"sigma1", c.linear.sigma1},   {"sigma2", c.linear.sigma2},
                   {"x0_mean", c.linear.x0_mean}, {"x0_std", c.linear.x0_std},
                   {"init_spread", c.linear.init_spread}};
  j["cv2d"] = {{"dt", c.cv.dt},
               {"sigma_a", c.cv.sigma_a},
               {"sigma_r", c.cv.sigma_r},
               {"bearing_std_deg", c.cv.bearing_std_deg},
               {"x0", std::vector<double>(c.cv.x0.begin(), c.cv.x0.end())},
               {"init_pos_std", c.cv.init_pos_std},
               {"init_velocity_std", c.cv.init_velocity_std}};
  j["kld"] = {{"epsilon", c.kld.epsilon}, {"delta", c.kld.delta}, {"bin_width", c.kld.bin_width},
              {"n_min", c.kld.n_min},     {"n_max", c.kld.n_max}};
  j["cso"] = {{"rooster_frac", c.cso.rooster_frac},
              {"hen_frac", c.cso.hen_frac},
              {"rooster_sigma", c.cso.rooster_sigma},
              {"lambda_max", c.cso.lambda_max},
              {"fitness_eps", c.cso.fitness_eps},
              {"rounds", c.cso.rounds},
              {"hooks",
               {{"lambda", opt_to_json(c.cso.hooks.lambda)},
                {"s1", opt_to_json(c.cso.hooks.s1)},
                {"s2", opt_to_json(c.cso.hooks.s2)},
                {"r1", opt_to_json(c.cso.hooks.r1)},
                {"r2", opt_to_json(c.cso.hooks.r2)}}}};
  j["pf"] = {{"ess_threshold", c.pf.ess_threshold}, {"resample", "systematic"}};
  j["steps"] = c.steps;
  j["trials"] = c.trials;
  j["n_init"] = c.n_init;
  j["seed"] = c.seed;
  j["per_trial_records"] = c.per_trial_records;
  j["sweeps"] = json::array();
  for (const auto& s : c.sweeps) j["sweeps"].push_back({{"variable", s.variable}, {"values", s.values}});
  return j;
}

ExperimentConfig apply_json(ExperimentConfig c, const json& j) {
  reject_unknown(j, "<root>",
                 {"name", "model", "linear1d", "cv2d", "kld", "cso", "pf", "steps", "trials", "n_init", "seed",
                  "per_trial_records", "sweeps"});
  read(j, "name", c.name);
  if (j.contains("model")) {
    std::string m;
    read(j, "model", m);
    c.model = parse_model(m);
  }
  if (j.contains("linear1d")) {
    const auto& s = j.at("linear1d");
    reject_unknown(s, "linear1d", {"sigma1", "sigma2", "x0_mean", "x0_std", "init_spread"});
    read(s, "sigma1", c.linear.sigma1);
    read(s, "sigma2", c.linear.sigma2);
    read(s, "x0_mean", c.linear.x0_mean);
    read(s, "x0_std", c.linear.x0_std);
    read(s, "init_spread", c.linear.init_spread);
  }
  if (j.contains("cv2d")) {
    const auto& s = j.at("cv2d");
    reject_unknown(s, "cv2d", {"dt", "sigma_a", "sigma_r", "bearing_std_deg", "x0", "init_pos_std", "init_velocity_std"});
    read(s, "dt", c.cv.dt);
    read(s, "sigma_a", c.cv.sigma_a);
    read(s, "sigma_r", c.cv.sigma_r);
    read(s, "bearing_std_deg", c.cv.bearing_std_deg);
    read(s, "init_pos_std", c.cv.init_pos_std);
    read(s, "init_velocity_std", c.cv.init_velocity_std);
    if (s.contains("x0")) {
      std::vector<double> x0;
      read(s, "x0", x0);
      if (x0.size() != 4) throw ConfigError("cv2d.x0 must have 4 entries [px, vx, py, vy]");
      c.cv.x0 = StateVector(std::span<const double>(x0));
    }
  }
  if (j.contains("kld")) {
    const auto& s = j.at("kld");
    reject_unknown(s, "kld", {"epsilon", "delta", "bin_width", "n_min", "n_max"});
    read(s, "epsilon", c.kld.epsilon);
    read(s, "delta", c.kld.delta);
    read(s, "bin_width", c.kld.bin_width);
    read(s, "n_min", c.kld.n_min);
    read(s, "n_max", c.kld.n_max);
  }
  if (j.contains("cso")) {
    const auto& s = j.at("cso");
    reject_unknown(s, "cso", {"rooster_frac", "hen_frac", "rooster_sigma", "lambda_max", "fitness_eps", "rounds", "hooks"});
    read(s, "rooster_frac", c.cso.rooster_frac);
    read(s, "hen_frac", c.cso.hen_frac);
    read(s, "rooster_sigma", c.cso.rooster_sigma);
    read(s, "lambda_max", c.cso.lambda_max);
    read(s, "fitness_eps", c.cso.fitness_eps);
    read(s, "rounds", c.cso.rounds);
    if (s.contains("hooks")) {
      const auto& h = s.at("hooks");
      reject_unknown(h, "cso.hooks", {"lambda", "s1", "s2", "r1", "r2"});
      read_opt(h, "lambda", c.cso.hooks.lambda);
      read_opt(h, "s1", c.cso.hooks.s1);
      read_opt(h, "s2", c.cso.hooks.s2);
      read_opt(h, "r1", c.cso.hooks.r1);
      read_opt(h, "r2", c.cso.hooks.r2);
    }
  }
  if (j.contains("pf")) {
    const auto& s = j.at("pf");
    reject_unknown(s, "pf", {"ess_threshold", "resample"});
    read(s, "ess_threshold", c.pf.ess_threshold);
    if (s.contains("resample") && s.at("resample") != "systematic") {
      throw ConfigError("pf.resample: only 'systematic' is supported");
    }
  }
  read(j, "steps", c.steps);
  read(j, "trials", c.trials);
  read(j, "n_init", c.n_init);
  read(j, "seed", c.seed);
  read(j, "per_trial_records", c.per_trial_records);
  if (j.contains("sweeps")) {
    const auto& arr = j.at("sweeps");
    if (!arr.is_array()) throw ConfigError("sweeps must be an array");
    c.sweeps.clear();
    for (const auto& s : arr) {
      reject_unknown(s, "sweeps[]", {"variable", "values"});
      SweepAxis axis;
      read(s, "variable", axis.variable);
      read(s, "values", axis.values);
      c.sweeps.push_back(std::move(axis));
    }
  }
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config file '" + path.string() + "': " + e.what());
  }
  // A result sidecar holds the config under "config".
  if (j.is_object() && j.contains("config") && j.contains("run")) j = j.at("config");
  try {
    return apply_json(std::move(base), j);
  } catch (const ConfigError& e) {
    throw ConfigError("config file '" + path.string() + "': " + e.what());
  }
}

}  // namespace swarmkld
