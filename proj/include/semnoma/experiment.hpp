#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "semnoma/env.hpp"
#include "semnoma/ppo.hpp"

namespace semnoma {

struct TrainEpisodeRow {
  int episode = 0;
  double reward = 0.0;
  double lpips_sum = 0.0;
  double latency_s = 0.0;
  double penalty = 0.0;
  double selection_ratio = 0.0;  // mean over SUs
  // Diagnostics of the most recent update; zero before the first one.
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double approx_kl = 0.0;
  double clip_fraction = 0.0;
};

struct TrainResult {
  std::vector<TrainEpisodeRow> rows;
  Checkpoint checkpoint;
  bool diverged = false;
};

/// Full training loop of one trainable scheme on one environment. The
/// returned checkpoint holds the final parameters (or the last finite ones if
/// an update diverged).
TrainResult train_scheme(SemanticNomaEnv& env, const PpoHyper& hyper,
                         int episodes, std::uint64_t seed);

struct SchemeMetrics {
  double mean_reward = 0.0;
  double mean_weighted_ll = 0.0;
  double mean_latency_s = 0.0;
  double mean_lpips_sum = 0.0;
  double mean_penalty = 0.0;
  std::vector<double> per_su_lpips;
  std::vector<double> per_su_selection_ratio;
  // Selection ratio averaged by decode slot rather than SU identity.
  std::vector<double> per_position_selection_ratio;
  int episodes = 0;
};

/// Runs a scheme for a number of evaluation episodes. Trainable schemes need
/// an actor (from training or a checkpoint); ALL/Random ignore it.
SchemeMetrics evaluate_scheme(SemanticNomaEnv& env, int episodes,
                              std::uint64_t seed, const Actor* actor);

/// Trains when the scheme requires it, then evaluates. Convenience wrapper
/// used by the CLI and the sweeps.
SchemeMetrics run_baseline(SemanticNomaEnv& env, int train_episodes,
                           int eval_episodes, std::uint64_t seed,
                           const PpoHyper& hyper);

enum class SweepAxis { Bandwidth, NumSus, SuPower };

std::string to_string(SweepAxis axis);
SweepAxis parse_axis(const std::string& name);

struct SweepPoint {
  SweepAxis axis = SweepAxis::Bandwidth;
  double value = 0.0;
  Scheme scheme = Scheme::ImPpo;
  std::uint64_t seed = 0;
  SchemeMetrics metrics;
  // Brute-force optimal order (lexicographic permutation index) under
  // all-selection demands; the oracle column for order-switch checks.
  int oracle_order_index = -1;
};

struct SweepSpec {
  SweepAxis axis = SweepAxis::Bandwidth;
  std::vector<double> values;       // Hz, SU count or dBm depending on axis
  std::vector<Scheme> schemes;
  std::vector<std::uint64_t> seeds;
  int train_episodes = 1500;
  int eval_episodes = 200;
  int jobs = 1;
};

struct ExperimentSetup {
  NetworkScenario scenario;
  CatalogLayout layout;
  bool shared_catalog = false;
  std::uint64_t catalog_seed = 1;
  std::optional<CatalogSet> catalogs;  // wins over synthesis when SU counts match
  EnvConfig env;
  PpoHyper ppo;
};

/// Applies one sweep-axis value to a copy of the base setup.
ExperimentSetup apply_axis(const ExperimentSetup& base, SweepAxis axis, double value);

/// Builds the environment for a setup (synthesizes catalogs per SU count).
SemanticNomaEnv make_env(const ExperimentSetup& setup, Scheme scheme,
                         std::uint64_t seed);

std::vector<SweepPoint> run_sweep(const ExperimentSetup& base, const SweepSpec& spec);

/// First episode whose trailing-window mean lands within `band` of the final
/// window mean; the plateau detector used for convergence comparisons.
int plateau_episode(const std::vector<double>& rewards, int window = 100,
                    double band = 0.05);

}  // namespace semnoma
