#include "semnoma/env.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "semnoma/errors.hpp"

namespace semnoma {

std::string to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::ImPpo: return "im-ppo";
    case Scheme::MPpo: return "m-ppo";
    case Scheme::PlainPpo: return "plain-ppo";
    case Scheme::AllSelection: return "all";
    case Scheme::RandomSelection: return "random";
    case Scheme::LocationDecoding: return "location";
  }
  return "unknown";
}

Scheme parse_scheme(const std::string& name) {
  if (name == "im-ppo") return Scheme::ImPpo;
  if (name == "m-ppo") return Scheme::MPpo;
  if (name == "plain-ppo") return Scheme::PlainPpo;
  if (name == "all") return Scheme::AllSelection;
  if (name == "random") return Scheme::RandomSelection;
  if (name == "location") return Scheme::LocationDecoding;
  throw ConfigError("unknown scheme: " + name);
}

bool scheme_trains(Scheme scheme) {
  return scheme == Scheme::ImPpo || scheme == Scheme::MPpo ||
         scheme == Scheme::PlainPpo || scheme == Scheme::LocationDecoding;
}

double metric_weighted_ll(double lpips_sum, double latency_s, double psi) {
  return lpips_sum + psi * latency_s;
}

namespace {

int factorial(int n) {
  int f = 1;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

std::vector<std::vector<int>> lexicographic_permutations(int k_count) {
  std::vector<int> perm(k_count);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<std::vector<int>> all;
  do {
    all.push_back(perm);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return all;
}

}  // namespace

SemanticNomaEnv::SemanticNomaEnv(NetworkScenario scenario, CatalogSet catalogs,
                                 Scheme scheme, EnvConfig config,
                                 std::uint64_t seed)
    : scenario_(std::move(scenario)),
      catalogs_(std::move(catalogs)),
      scheme_(scheme),
      config_(std::move(config)),
      rng_(seed) {
  scenario_.validate();
  config_.surrogate.validate();
  if (catalogs_.num_sus() != scenario_.num_sus)
    throw ConfigError("env: one catalog per SU required");
  if (scheme_ == Scheme::PlainPpo && scenario_.num_sus > 5)
    throw ConfigError("env: plain-ppo's factorial order head supports at most 5 SUs");

  for (int k = 0; k < scenario_.num_sus; ++k) {
    scores_.push_back(score_catalog(catalogs_.at(k), config_.include_diagonal));
    candidates_.push_back(all_candidates(catalogs_.at(k), scores_.back()));
  }
  candidate_offset_.resize(scenario_.num_sus);
  for (int k = 0; k < scenario_.num_sus; ++k) {
    candidate_offset_[k] = total_candidates_;
    total_candidates_ += static_cast<int>(candidates_[k].size());
  }
  const bool pruned_scheme =
      scheme_ == Scheme::ImPpo || scheme_ == Scheme::LocationDecoding;
  mask_.assign(total_candidates_, 1);
  if (pruned_scheme) {
    for (int k = 0; k < scenario_.num_sus; ++k) {
      const auto su_mask = pruned_mask(catalogs_.at(k), scores_[k]);
      for (std::size_t i = 0; i < su_mask.size(); ++i)
        mask_[candidate_offset_[k] + i] = su_mask[i];
    }
  }
  if (scheme_ == Scheme::PlainPpo)
    permutations_ = lexicographic_permutations(scenario_.num_sus);
  reset();
}

int SemanticNomaEnv::in_mask_count() const {
  return static_cast<int>(std::count(mask_.begin(), mask_.end(), 1));
}

int SemanticNomaEnv::state_dim() const {
  const int k_count = scenario_.num_sus;
  return k_count                       // own gains (log scale)
         + k_count * (k_count - 1)     // pairwise interference gains
         + k_count                     // worst-case SINR summary
         + k_count                     // decode position of the last order
         + 2 * total_candidates_;      // per-candidate importance and size
}

HeadSpec SemanticNomaEnv::head_spec() const {
  HeadSpec heads;
  heads.num_bernoulli = total_candidates_;
  if (scheme_ == Scheme::PlainPpo) {
    heads.num_categorical = factorial(scenario_.num_sus);
    heads.num_gaussian = 2 * scenario_.num_antennas * scenario_.num_sus;
  }
  return heads;
}

void SemanticNomaEnv::reset() {
  std::vector<int> identity(scenario_.num_sus);
  std::iota(identity.begin(), identity.end(), 0);
  last_order_ = DecodingOrder::from_permutation(identity);
  step_in_episode_ = 0;
  refresh_channel_state();
}

void SemanticNomaEnv::refresh_channel_state() {
  resample_channels(scenario_, rng_);
  worst_case_omega_ = worst_case_beamformers(scenario_);
  state_ = build_state();
}

Eigen::VectorXd SemanticNomaEnv::build_state() const {
  const int k_count = scenario_.num_sus;
  const ChannelGains gains = ChannelGains::build(scenario_, worst_case_omega_);
  const double noise = scenario_.noise_power_w();
  Eigen::VectorXd s(state_dim());
  int off = 0;
  // Gains enter as log10 relative to the noise floor, scaled to O(1).
  const auto log_gain = [&](double g) {
    return 0.1 * std::log10(std::max(g / noise, 1e-12));
  };
  for (int k = 0; k < k_count; ++k) s(off++) = log_gain(gains.own(k));
  for (int k = 0; k < k_count; ++k)
    for (int j = 0; j < k_count; ++j)
      if (j != k) s(off++) = log_gain(gains.cross(k, j));
  for (int k = 0; k < k_count; ++k) {
    const double interference = gains.cross.row(k).sum();
    s(off++) = 0.1 * std::log10(std::max(gains.own(k) / (interference + noise), 1e-12));
  }
  const std::vector<int> positions = last_order_.decode_positions();
  for (int k = 0; k < k_count; ++k)
    s(off++) = k_count > 1 ? static_cast<double>(positions[k]) / (k_count - 1) : 0.0;
  for (int k = 0; k < k_count; ++k) {
    for (std::size_t i = 0; i < candidates_[k].size(); ++i) {
      const int bit = candidate_offset_[k] + static_cast<int>(i);
      const double keep = mask_[bit] ? 1.0 : 0.0;
      s(off++) = keep * candidates_[k][i].importance;
      s(off++) = keep * static_cast<double>(candidates_[k][i].encoded_bits) * 1e-6;
    }
  }
  return s;
}

std::vector<Eigen::VectorXcd> SemanticNomaEnv::transmission_beamformers(
    const Action& action) const {
  if (scheme_ != Scheme::PlainPpo) return worst_case_omega_;
  // Plain-PPO parameterizes each beamformer as 2Z squashed reals, then
  // normalizes; a numerically dead vector degrades to the first unit vector.
  const int z = scenario_.num_antennas;
  const Eigen::VectorXd raw = squashed_gauss(action);
  std::vector<Eigen::VectorXcd> omega(scenario_.num_sus);
  for (int k = 0; k < scenario_.num_sus; ++k) {
    Eigen::VectorXcd w(z);
    for (int i = 0; i < z; ++i)
      w(i) = std::complex<double>(raw(2 * z * k + 2 * i), raw(2 * z * k + 2 * i + 1));
    const double n = w.norm();
    if (n < 1e-9) {
      w.setZero();
      w(0) = 1.0;
    } else {
      w /= n;
    }
    omega[k] = w;
  }
  return omega;
}

DecodingOrder SemanticNomaEnv::transmission_order(
    const Action& action, const std::vector<double>& demands,
    const std::vector<Eigen::VectorXcd>& omega, bool* used_sca) const {
  *used_sca = false;
  switch (scheme_) {
    case Scheme::PlainPpo:
      return DecodingOrder::from_permutation(permutations_[action.category]);
    case Scheme::LocationDecoding: {
      std::vector<int> by_distance(scenario_.num_sus);
      std::iota(by_distance.begin(), by_distance.end(), 0);
      std::stable_sort(by_distance.begin(), by_distance.end(), [&](int a, int b) {
        return scenario_.su_distances_m[a] < scenario_.su_distances_m[b];
      });
      return DecodingOrder::from_permutation(by_distance);
    }
    default: {
      *used_sca = true;
      return sca_decoding(scenario_, omega, demands, config_.sca).order;
    }
  }
}

EpisodeRecord SemanticNomaEnv::step(const Action& action) {
  const int k_count = scenario_.num_sus;
  if (static_cast<int>(action.bits.size()) != total_candidates_)
    throw ShapeError("env step: action bit count mismatch");

  EpisodeRecord record;
  record.state = state_;

  // Selection per SU, restricted to the scheme's candidate mask.
  record.selections.resize(k_count);
  record.selection_ratio.resize(k_count);
  std::vector<double> demands(k_count);
  for (int k = 0; k < k_count; ++k) {
    const int count = static_cast<int>(candidates_[k].size());
    SelectionMask sel;
    sel.bits.assign(count, 0);
    int chosen = 0;
    int available = 0;
    for (int i = 0; i < count; ++i) {
      const int bit = candidate_offset_[k] + i;
      if (!mask_[bit]) continue;
      ++available;
      if (action.bits[bit]) {
        sel.bits[i] = 1;
        ++chosen;
      }
    }
    record.selections[k] = std::move(sel);
    record.selection_ratio[k] =
        available > 0 ? static_cast<double>(chosen) / available : 0.0;
    demands[k] = traffic_demand(record.selections[k], candidates_[k],
                                catalogs_.at(k).header_bits);
  }

  const std::vector<Eigen::VectorXcd> omega = transmission_beamformers(action);
  bool used_sca = false;
  record.order = transmission_order(action, demands, omega, &used_sca);
  record.beamformers = omega;

  const ChannelGains gains = ChannelGains::build(scenario_, omega);
  const double noise = scenario_.noise_power_w();
  std::vector<double> rates(k_count);
  for (int k = 0; k < k_count; ++k)
    rates[k] = capacity(k, gains, record.order, scenario_.bandwidth_hz, noise);
  record.latency_s = system_latency(demands, rates);

  double lpips = 0.0;
  for (int k = 0; k < k_count; ++k)
    lpips += surrogate_lpips(record.selections[k], catalogs_.at(k), scores_[k],
                             candidates_[k], config_.surrogate);
  record.lpips_sum = lpips;

  // Violations: SUs whose demand cannot be delivered within the latency cap.
  record.violations = 0;
  for (int k = 0; k < k_count; ++k) {
    if (demands[k] <= 0.0) continue;
    if (rates[k] <= 0.0 || demands[k] / rates[k] > config_.latency_cap_s)
      ++record.violations;
  }
  record.penalty = config_.penalty_weight * record.violations;
  const double effective_latency = std::min(record.latency_s, config_.latency_cap_s);
  record.reward =
      -(record.lpips_sum + config_.psi * effective_latency) - record.penalty;

  last_order_ = record.order;
  ++step_in_episode_;
  record.done = step_in_episode_ % std::max(config_.horizon, 1) == 0;
  refresh_channel_state();
  record.next_state = state_;
  return record;
}

Action SemanticNomaEnv::all_selection_action() const {
  Action action;
  action.bits.assign(total_candidates_, 1);
  action.category = 0;
  action.gauss_raw = Eigen::VectorXd::Zero(head_spec().num_gaussian);
  return action;
}

Action SemanticNomaEnv::random_selection_action(Rng& rng) const {
  Action action;
  action.bits.assign(total_candidates_, 0);
  for (int i = 0; i < total_candidates_; ++i)
    action.bits[i] = rng.bernoulli(0.5) ? 1 : 0;
  action.category = 0;
  action.gauss_raw = Eigen::VectorXd::Zero(head_spec().num_gaussian);
  return action;
}

}  // namespace semnoma
