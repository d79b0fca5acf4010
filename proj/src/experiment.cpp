#include "semnoma/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <thread>

#include "semnoma/errors.hpp"

namespace semnoma {

TrainResult train_scheme(SemanticNomaEnv& env, const PpoHyper& hyper,
                         int episodes, std::uint64_t seed) {
  hyper.validate();
  if (!scheme_trains(env.scheme()))
    throw ConfigError("train_scheme: " + to_string(env.scheme()) + " does not train");

  Rng root(seed);
  Rng init_rng = root.split(1);
  Rng action_rng = root.split(2);
  Rng update_rng = root.split(3);

  Actor actor = make_actor(env.state_dim(), hyper.hidden_dims, env.head_spec(),
                           init_rng);
  Critic critic = make_critic(env.state_dim(), hyper.hidden_dims, init_rng);
  AdamState actor_adam = AdamState::zeros(actor.parameter_count());
  AdamState critic_adam = AdamState::zeros(critic.net.parameter_count());

  TrainResult result;
  result.rows.reserve(episodes);
  env.reset();
  RolloutBuffer buffer;
  UpdateDiagnostics last_diag;
  Checkpoint last_good{to_string(env.scheme()), env.state_dim(), env.head_spec(),
                       hyper, actor, critic};

  for (int episode = 0; episode < episodes; ++episode) {
    for (int t = 0; t < std::max(env.config().horizon, 1); ++t) {
      const Eigen::VectorXd state = env.state();
      const Action action = sample_action(actor, state, env.action_mask(), action_rng);
      const double value = critic.net.forward(state)(0);
      EpisodeRecord record = env.step(action);
      Transition tr;
      tr.state = state;
      tr.mask = env.action_mask();
      tr.action = action;
      tr.reward = record.reward;
      tr.value = value;
      tr.done = record.done;
      buffer.add(std::move(tr));
      if (t + 1 == std::max(env.config().horizon, 1)) {
        TrainEpisodeRow row;
        row.episode = episode;
        row.reward = record.reward;
        row.lpips_sum = record.lpips_sum;
        row.latency_s = record.latency_s;
        row.penalty = record.penalty;
        row.selection_ratio =
            std::accumulate(record.selection_ratio.begin(),
                            record.selection_ratio.end(), 0.0) /
            record.selection_ratio.size();
        row.policy_loss = last_diag.policy_loss;
        row.value_loss = last_diag.value_loss;
        row.approx_kl = last_diag.approx_kl;
        row.clip_fraction = last_diag.clip_fraction;
        result.rows.push_back(row);
      }
    }
    if (buffer.size() >= hyper.rollout) {
      buffer.last_value = critic.net.forward(env.state())(0);
      last_diag = ppo_update(actor, critic, actor_adam, critic_adam, buffer,
                             hyper, update_rng);
      buffer.clear();
      if (last_diag.aborted) {
        result.diverged = true;
        result.checkpoint = last_good;
        return result;
      }
      last_good.actor = actor;
      last_good.critic = critic;
    }
  }
  result.checkpoint = Checkpoint{to_string(env.scheme()), env.state_dim(),
                                 env.head_spec(), hyper, actor, critic};
  return result;
}

SchemeMetrics evaluate_scheme(SemanticNomaEnv& env, int episodes,
                              std::uint64_t seed, const Actor* actor) {
  const int k_count = env.num_sus();
  SchemeMetrics metrics;
  metrics.per_su_lpips.assign(k_count, 0.0);
  metrics.per_su_selection_ratio.assign(k_count, 0.0);
  metrics.per_position_selection_ratio.assign(k_count, 0.0);
  metrics.episodes = episodes;
  if (episodes <= 0) return metrics;
  if (scheme_trains(env.scheme()) && actor == nullptr)
    throw ConfigError("evaluate_scheme: scheme needs a trained actor");

  Rng rng(seed);
  env.reset();
  for (int episode = 0; episode < episodes; ++episode) {
    Action action;
    switch (env.scheme()) {
      case Scheme::AllSelection:
        action = env.all_selection_action();
        break;
      case Scheme::RandomSelection:
        action = env.random_selection_action(rng);
        break;
      default:
        action = sample_action(*actor, env.state(), env.action_mask(), rng);
        break;
    }
    const EpisodeRecord record = env.step(action);
    metrics.mean_reward += record.reward;
    metrics.mean_weighted_ll += metric_weighted_ll(
        record.lpips_sum, std::min(record.latency_s, env.config().latency_cap_s),
        env.config().psi);
    metrics.mean_latency_s += std::min(record.latency_s, env.config().latency_cap_s);
    metrics.mean_lpips_sum += record.lpips_sum;
    metrics.mean_penalty += record.penalty;
    const std::vector<int> positions = record.order.decode_positions();
    for (int k = 0; k < k_count; ++k) {
      metrics.per_su_lpips[k] +=
          surrogate_lpips(record.selections[k], env.catalogs().at(k),
                          env.scores(k), env.candidates(k),
                          env.config().surrogate);
      metrics.per_su_selection_ratio[k] += record.selection_ratio[k];
      metrics.per_position_selection_ratio[positions[k]] += record.selection_ratio[k];
    }
  }
  const double inv = 1.0 / episodes;
  metrics.mean_reward *= inv;
  metrics.mean_weighted_ll *= inv;
  metrics.mean_latency_s *= inv;
  metrics.mean_lpips_sum *= inv;
  metrics.mean_penalty *= inv;
  for (int k = 0; k < k_count; ++k) {
    metrics.per_su_lpips[k] *= inv;
    metrics.per_su_selection_ratio[k] *= inv;
    metrics.per_position_selection_ratio[k] *= inv;
  }
  return metrics;
}

SchemeMetrics run_baseline(SemanticNomaEnv& env, int train_episodes,
                           int eval_episodes, std::uint64_t seed,
                           const PpoHyper& hyper) {
  if (!scheme_trains(env.scheme()))
    return evaluate_scheme(env, eval_episodes, seed + 17, nullptr);
  TrainResult trained = train_scheme(env, hyper, train_episodes, seed);
  return evaluate_scheme(env, eval_episodes, seed + 17, &trained.checkpoint.actor);
}

std::string to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::Bandwidth: return "bandwidth";
    case SweepAxis::NumSus: return "num_sus";
    case SweepAxis::SuPower: return "su_power";
  }
  return "unknown";
}

SweepAxis parse_axis(const std::string& name) {
  if (name == "bandwidth") return SweepAxis::Bandwidth;
  if (name == "num_sus") return SweepAxis::NumSus;
  if (name == "su_power") return SweepAxis::SuPower;
  throw ConfigError("unknown sweep axis: " + name);
}

ExperimentSetup apply_axis(const ExperimentSetup& base, SweepAxis axis,
                           double value) {
  ExperimentSetup setup = base;
  switch (axis) {
    case SweepAxis::Bandwidth:
      if (!(value > 0.0)) throw ConfigError("sweep: bandwidth must be > 0");
      setup.scenario.bandwidth_hz = value;
      break;
    case SweepAxis::NumSus: {
      const int k_count = static_cast<int>(value);
      if (k_count < 1) throw ConfigError("sweep: num_sus must be >= 1");
      NetworkScenario& s = setup.scenario;
      std::vector<double> distances = s.su_distances_m;
      while (static_cast<int>(distances.size()) < k_count)
        distances.push_back(distances.back() * 1.1);
      distances.resize(k_count);
      std::vector<double> powers = s.tx_power_w;
      while (static_cast<int>(powers.size()) < k_count)
        powers.push_back(powers.back());
      powers.resize(k_count);
      s.num_sus = k_count;
      s.su_distances_m = distances;
      s.tx_power_w = powers;
      s.big_m = std::max(s.big_m, k_count + 1.0);
      s.channels.assign(k_count, Eigen::VectorXcd::Zero(s.num_antennas));
      {
        Rng r(s.rng_seed);
        resample_channels(s, r);
      }
      break;
    }
    case SweepAxis::SuPower:
      // value in dBm applied to the last SU.
      setup.scenario.tx_power_w.back() = dbm_to_watts(value);
      break;
  }
  return setup;
}

namespace {

CatalogSet setup_catalogs(const ExperimentSetup& setup) {
  const int k_count = setup.scenario.num_sus;
  if (setup.catalogs) {
    if (setup.catalogs->num_sus() == k_count) return *setup.catalogs;
    if (setup.catalogs->shared && setup.catalogs->num_sus() >= 1) {
      CatalogSet grown;
      grown.shared = true;
      grown.per_su.assign(k_count, setup.catalogs->per_su.front());
      return grown;
    }
  }
  return synthesize_catalog_set(setup.catalog_seed, setup.layout, k_count,
                                setup.shared_catalog);
}

}  // namespace

SemanticNomaEnv make_env(const ExperimentSetup& setup, Scheme scheme,
                         std::uint64_t seed) {
  return SemanticNomaEnv(setup.scenario, setup_catalogs(setup), scheme, setup.env,
                         seed);
}

namespace {

int oracle_order_index(const ExperimentSetup& setup) {
  if (setup.scenario.num_sus > 8) return -1;
  // All-selection demands give a selection-independent decoding oracle,
  // evaluated on the scenario's stored channel draw.
  const CatalogSet catalogs = setup_catalogs(setup);
  std::vector<double> demands(setup.scenario.num_sus, 0.0);
  for (int k = 0; k < setup.scenario.num_sus; ++k) {
    const CatalogScores scores =
        score_catalog(catalogs.at(k), setup.env.include_diagonal);
    const std::vector<Candidate> candidates = all_candidates(catalogs.at(k), scores);
    SelectionMask all;
    all.bits.assign(candidates.size(), 1);
    demands[k] = traffic_demand(all, candidates, catalogs.at(k).header_bits);
  }
  const auto omega = worst_case_beamformers(setup.scenario);
  const auto [order, latency] =
      brute_force_order(setup.scenario, omega, demands);
  (void)latency;
  const std::vector<int> perm = order.permutation();
  // Lexicographic rank of the permutation.
  std::vector<int> pool(setup.scenario.num_sus);
  std::iota(pool.begin(), pool.end(), 0);
  int rank = 0;
  for (std::size_t i = 0; i < perm.size(); ++i) {
    const auto it = std::find(pool.begin(), pool.end(), perm[i]);
    const int pos = static_cast<int>(it - pool.begin());
    int suffix = 1;
    for (int f = 1; f < static_cast<int>(pool.size()); ++f) suffix *= f;
    rank += pos * suffix;
    pool.erase(it);
  }
  return rank;
}

}  // namespace

std::vector<SweepPoint> run_sweep(const ExperimentSetup& base, const SweepSpec& spec) {
  if (spec.values.empty()) throw ConfigError("sweep: empty value list");
  if (spec.schemes.empty()) throw ConfigError("sweep: empty scheme list");
  if (spec.seeds.empty()) throw ConfigError("sweep: empty seed list");

  struct Job {
    std::size_t slot;
    double value;
    Scheme scheme;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  std::vector<SweepPoint> points(spec.values.size() * spec.schemes.size() *
                                 spec.seeds.size());
  std::size_t slot = 0;
  for (double value : spec.values)
    for (Scheme scheme : spec.schemes)
      for (std::uint64_t seed : spec.seeds) {
        jobs.push_back({slot++, value, scheme, seed});
      }

  // Oracle order per axis value, computed once up front.
  std::vector<int> oracle(spec.values.size(), -1);
  for (std::size_t v = 0; v < spec.values.size(); ++v)
    oracle[v] = oracle_order_index(apply_axis(base, spec.axis, spec.values[v]));

  const auto run_job = [&](const Job& job) {
    const ExperimentSetup setup = apply_axis(base, spec.axis, job.value);
    SemanticNomaEnv env = make_env(setup, job.scheme, job.seed);
    SweepPoint point;
    point.axis = spec.axis;
    point.value = job.value;
    point.scheme = job.scheme;
    point.seed = job.seed;
    point.metrics = run_baseline(env, spec.train_episodes, spec.eval_episodes,
                                 job.seed, setup.ppo);
    const auto value_pos =
        std::find(spec.values.begin(), spec.values.end(), job.value);
    point.oracle_order_index =
        oracle[static_cast<std::size_t>(value_pos - spec.values.begin())];
    points[job.slot] = std::move(point);
  };

  const int workers = std::max(1, spec.jobs);
  if (workers == 1) {
    for (const Job& job : jobs) run_job(job);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        while (true) {
          const std::size_t i = next.fetch_add(1);
          if (i >= jobs.size()) break;
          run_job(jobs[i]);
        }
      });
    }
    for (auto& th : pool) th.join();
  }
  return points;
}

int plateau_episode(const std::vector<double>& rewards, int window, double band) {
  const int n = static_cast<int>(rewards.size());
  if (n == 0) return 0;
  const int w = std::min(window, n);
  std::vector<double> moving(n, 0.0);
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    acc += rewards[i];
    if (i >= w) acc -= rewards[i - w];
    moving[i] = acc / std::min(i + 1, w);
  }
  const double final_mean = moving[n - 1];
  const double tol = band * std::max(std::abs(final_mean), 1e-9);
  for (int i = w - 1; i < n; ++i)
    if (std::abs(moving[i] - final_mean) <= tol) return i;
  return n - 1;
}

}  // namespace semnoma
