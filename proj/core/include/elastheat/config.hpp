#ifndef ELASTHEAT_CONFIG_HPP
#define ELASTHEAT_CONFIG_HPP

#include <cstdint>
#include <optional>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "elastheat/domain.hpp"
#include "elastheat/tensor.hpp"

namespace elastheat {

/// One flat experiment description: domain, tensor, partition, resolution,
/// time policy, epsilon ladder, sources, suites. No inheritance between
/// configs; a fixed seed makes runs fully reproducible.
struct ExperimentConfig {
  PolygonalDomain domain;
  std::shared_ptr<ElasticityTensor> tensor;

  double target_h = 0.05;
  int refine_steps = 0;

  double t_end = 0.1;
  double tau_min = 1e-4;
  double grading_ratio = 1.2;
  double tau_max = 5e-3;

  std::vector<double> epsilon_ladder;
  std::vector<Vec2> sources;
  std::optional<Vec2> green_source;  // defaults to sources.front()

  std::vector<std::string> suites;  // subset of {korn, parabolic, kernel, gaussian, holder, green}
  std::uint64_t seed = 0;
  std::string out_dir = "out";

  double corkscrew_r0 = 0.25;
  double corkscrew_m = 4.0;
  int probe_count = 64;
  int korn_depth = 3;
  double korn_target_h = 0.1;  // the Korn ladder starts on its own mesh
  bool dump_trajectories = false;
  double gaussian_c_ceiling = 1e3;

  std::string digest_source;  // canonical serialized form used for hashing
};

ExperimentConfig parse_config(const nlohmann::json& j, const std::string& base_dir = "");
ExperimentConfig load_config_file(const std::string& path);

PolygonalDomain parse_domain(const nlohmann::json& j);
nlohmann::json domain_to_json(const PolygonalDomain& d);

/// FNV-1a hash of the canonical config serialization, printed as hex.
std::string config_digest(const ExperimentConfig& config);

}  // namespace elastheat

#endif
