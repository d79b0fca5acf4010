#pragma once

#include <string>
#include <vector>

#include "semnoma/experiment.hpp"

namespace semnoma {

// Everything one run needs: file references, scheme, seeds and hyperparameters.
struct RunConfig {
  std::string scenario_path;
  std::string catalog_path;
  std::string out_dir = ".";
  Scheme scheme = Scheme::ImPpo;
  std::vector<std::uint64_t> seeds{1, 2, 3};
  int episodes = 2000;
  int eval_episodes = 200;
  int jobs = 1;
  EnvConfig env;
  PpoHyper ppo;
  CatalogLayout layout;
  bool shared_catalog = false;
  std::uint64_t catalog_seed = 1;

  void validate() const;
};

/// Scenario JSON: powers in dBm, noise in dBm/Hz, channels dumped for
/// bit-exact reproducibility (regenerated from the seed when absent).
NetworkScenario load_scenario(const std::string& path);
void save_scenario(const NetworkScenario& scenario, const std::string& path);

RunConfig load_run_config(const std::string& path);
void save_run_config(const RunConfig& config, const std::string& path);

/// Built-in experiment templates: "paper-default" (K=3, Z=4, B=2 MHz),
/// "sweep-default" (K=3, Z=2, stronger coupling) and "shared-default"
/// (equal distances, one catalog for all SUs).
ExperimentSetup template_setup(const std::string& name, std::uint64_t seed);

/// Setup assembled from a RunConfig's referenced files.
ExperimentSetup setup_from_config(const RunConfig& config);

}  // namespace semnoma
