#pragma once

#include "swarmkld/cso.hpp"
#include "swarmkld/filter.hpp"
#include "swarmkld/kld.hpp"
#include "swarmkld/models.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace swarmkld {

/// Bad config content or unreadable config file.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ModelKind { linear1d, cv2d };

struct SweepAxis {
  std::string variable;  // sigma1 | sigma2 | bearing_deg | sigma_r | sigma_a
  std::vector<double> values;
};

/// Everything that determines an experiment run. Serialized verbatim into
/// the JSON sidecar next to every result CSV, and accepted back as a config.
struct ExperimentConfig {
  std::string name = "sweep1d";
  ModelKind model = ModelKind::linear1d;
  LinearGauss1D::Params linear;
  ConstantVelocity2D::Params cv;
  KldConfig kld;
  CsoConfig cso;
  PfConfig pf;
  std::size_t steps = 50;
  std::size_t trials = 20;
  std::size_t n_init = 1000;  // size of the step-0 cloud
  std::vector<SweepAxis> sweeps;
  std::uint64_t seed = 1;
  bool per_trial_records = false;

  void validate() const;
};

ExperimentConfig default_sweep1d_config();
ExperimentConfig default_sweepcv_config();

std::unique_ptr<StateSpaceModel> make_model(const ExperimentConfig& config);

/// Sets the model parameter named by a sweep axis.
void set_sweep_value(ExperimentConfig& config, const std::string& variable, double value);

nlohmann::json to_json(const ExperimentConfig& config);

/// Overlays the keys present in `j` onto `base`. Unknown keys are rejected.
ExperimentConfig apply_json(ExperimentConfig base, const nlohmann::json& j);

/// Reads a JSON config file and overlays it onto `base`.
ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base);

}  // namespace swarmkld
