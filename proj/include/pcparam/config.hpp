#pragma once

#include "pcparam/train.hpp"

#include "json.hpp"

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>

namespace pcparam {

/// Invalid configuration; the message carries the source name and, where
/// it can be located, the line number.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Everything a `fit` run needs. Relative paths are resolved against the
/// directory of the config file they came from.
struct RunConfig {
  TrainMode mode = TrainMode::FixedBoundary;
  std::string input;
  std::string reference_mesh;  // optional
  std::string domain = "disk"; // preset name or domain JSON path
  std::string landmarks;       // optional landmark JSON path
  std::string output_dir = "out";
  std::uint64_t seed = 0;

  ObjectiveConfig objective;
  StageConfig stages;
  RmsPropConfig optimizer;
  NetworkSpec map_net = parametrization_net_spec();
  std::optional<NetworkSpec> lambda_net = inverse_lambda_net_spec();
  double fixed_lambda_inv = 0.5;
  Eigen::Index domain_pool = 0;
  Eigen::Index domain_points = 0;
  Eigen::Index eval_samples = 4000;

  /// Applies the mode contract (forced weights, no inverse-scale net in
  /// shape matching) and validates every section.
  RunConfig effective() const;
};

nlohmann::json to_json(const RunConfig& cfg);

/// Parses JSON text; unknown keys and type errors raise ConfigError naming
/// `source` and the offending line.
RunConfig parse_run_config(const std::string& text, const std::string& source = "<config>");

/// Reads a config file and resolves its relative paths.
RunConfig load_run_config(const std::filesystem::path& path);

}  // namespace pcparam
