#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "semnoma/beamforming.hpp"
#include "semnoma/channel.hpp"
#include "semnoma/decoding.hpp"
#include "semnoma/ppo.hpp"
#include "semnoma/recovery.hpp"
#include "semnoma/semantics.hpp"

namespace semnoma {

enum class Scheme {
  ImPpo,             // pruning + PPO selection + model-based transmission
  MPpo,              // PPO selection over the full feature set + model-based
  PlainPpo,          // PPO learns selection, decoding order and beamformers
  AllSelection,      // every feature transmitted, model-based transmission
  RandomSelection,   // coin-flip selection, model-based transmission
  LocationDecoding,  // pruning + PPO selection, order fixed by distance
};

std::string to_string(Scheme scheme);
Scheme parse_scheme(const std::string& name);
bool scheme_trains(Scheme scheme);

struct EnvConfig {
  double psi = 1.0;
  double penalty_weight = 10.0;
  double latency_cap_s = 10.0;  // missing this deadline counts as a violation
  int horizon = 1;              // steps per episode; channels redraw every step
  bool include_diagonal = true;
  SurrogateParams surrogate;
  ScaOptions sca;
};

struct EpisodeRecord {
  Eigen::VectorXd state;
  Eigen::VectorXd next_state;
  std::vector<SelectionMask> selections;   // per SU, over the full candidate list
  DecodingOrder order;
  std::vector<Eigen::VectorXcd> beamformers;
  double reward = 0.0;
  double lpips_sum = 0.0;
  double latency_s = 0.0;  // +inf when some demand cannot be served
  double penalty = 0.0;
  int violations = 0;
  std::vector<double> selection_ratio;     // selected / candidates per SU
  bool done = true;
};

/// Weighted-LL composite metric; lower is better.
double metric_weighted_ll(double lpips_sum, double latency_s, double psi);

// One experiment world: fixed geometry and catalogs, fresh fading per step.
// The agent's action space covers every catalog feature of every SU; the
// scheme decides which candidates stay in the mask.
class SemanticNomaEnv {
 public:
  SemanticNomaEnv(NetworkScenario scenario, CatalogSet catalogs, Scheme scheme,
                  EnvConfig config, std::uint64_t seed);

  int num_sus() const { return scenario_.num_sus; }
  Scheme scheme() const { return scheme_; }
  const EnvConfig& config() const { return config_; }
  const NetworkScenario& scenario() const { return scenario_; }
  const CatalogSet& catalogs() const { return catalogs_; }
  const CatalogScores& scores(int k) const { return scores_[k]; }
  const std::vector<Candidate>& candidates(int k) const { return candidates_[k]; }

  int state_dim() const;
  int num_candidates() const { return total_candidates_; }
  HeadSpec head_spec() const;
  const std::vector<std::uint8_t>& action_mask() const { return mask_; }
  int in_mask_count() const;

  /// Current observation; channels already drawn.
  const Eigen::VectorXd& state() const { return state_; }

  void reset();

  /// Executes one merged action: the selection bits come from the policy, the
  /// transmission side from the scheme. Draws fresh channels afterwards.
  EpisodeRecord step(const Action& action);

  /// Convenience actions for the selection-rule baselines.
  Action all_selection_action() const;
  Action random_selection_action(Rng& rng) const;

 private:
  void refresh_channel_state();
  Eigen::VectorXd build_state() const;
  DecodingOrder transmission_order(const Action& action,
                                   const std::vector<double>& demands,
                                   const std::vector<Eigen::VectorXcd>& omega,
                                   bool* used_sca) const;
  std::vector<Eigen::VectorXcd> transmission_beamformers(const Action& action) const;

  NetworkScenario scenario_;
  CatalogSet catalogs_;
  Scheme scheme_;
  EnvConfig config_;
  Rng rng_;
  std::vector<CatalogScores> scores_;
  std::vector<std::vector<Candidate>> candidates_;
  std::vector<int> candidate_offset_;  // into the action bit vector
  int total_candidates_ = 0;
  std::vector<std::uint8_t> mask_;
  std::vector<std::vector<int>> permutations_;  // Plain-PPO categorical table

  std::vector<Eigen::VectorXcd> worst_case_omega_;
  DecodingOrder last_order_;
  Eigen::VectorXd state_;
  int step_in_episode_ = 0;
};

}  // namespace semnoma
