#include "semnoma/config.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "semnoma/errors.hpp"

namespace semnoma {

using nlohmann::json;

void RunConfig::validate() const {
  if (seeds.empty()) throw ConfigError("run config: seeds must be nonempty");
  if (episodes < 0) throw ConfigError("run config: episodes must be >= 0");
  if (eval_episodes < 0) throw ConfigError("run config: eval_episodes must be >= 0");
  if (jobs < 1) throw ConfigError("run config: jobs must be >= 1");
  ppo.validate();
  env.surrogate.validate();
}

namespace {

json scenario_to_json(const NetworkScenario& s) {
  json j;
  j["format"] = "semnoma-scenario";
  j["version"] = 1;
  j["num_sus"] = s.num_sus;
  j["num_antennas"] = s.num_antennas;
  j["bandwidth_hz"] = s.bandwidth_hz;
  j["noise_psd_dbmhz"] = watts_to_dbm(s.noise_psd_whz);
  j["tx_power_dbm"] = json::array();
  for (double p : s.tx_power_w) j["tx_power_dbm"].push_back(watts_to_dbm(p));
  j["distances_m"] = s.su_distances_m;
  j["pathloss_exponent"] = s.pathloss_exponent;
  j["big_m"] = s.big_m;
  j["psi"] = s.weight_psi;
  j["seed"] = s.rng_seed;
  json channels = json::array();
  for (const auto& h : s.channels) {
    json vec = json::array();
    for (int z = 0; z < h.size(); ++z)
      vec.push_back({h(z).real(), h(z).imag()});
    channels.push_back(vec);
  }
  j["channels"] = channels;
  return j;
}

NetworkScenario scenario_from_json(const json& j) {
  if (j.value("format", "") != "semnoma-scenario")
    throw IoError("scenario: not a scenario file");
  if (j.value("version", 0) != 1)
    throw VersionError("scenario: unsupported version");
  NetworkScenario s;
  s.num_sus = j.at("num_sus").get<int>();
  s.num_antennas = j.at("num_antennas").get<int>();
  s.bandwidth_hz = j.at("bandwidth_hz").get<double>();
  s.noise_psd_whz = dbmhz_to_whz(j.at("noise_psd_dbmhz").get<double>());
  for (const auto& p : j.at("tx_power_dbm"))
    s.tx_power_w.push_back(dbm_to_watts(p.get<double>()));
  s.su_distances_m = j.at("distances_m").get<std::vector<double>>();
  s.pathloss_exponent = j.value("pathloss_exponent", 3.5);
  s.big_m = j.value("big_m", s.num_sus + 1.0);
  s.weight_psi = j.value("psi", 1.0);
  s.rng_seed = j.value("seed", 0ULL);
  if (j.contains("channels")) {
    for (const auto& vec : j.at("channels")) {
      Eigen::VectorXcd h(vec.size());
      for (std::size_t z = 0; z < vec.size(); ++z)
        h(static_cast<int>(z)) = {vec[z][0].get<double>(), vec[z][1].get<double>()};
      s.channels.push_back(h);
    }
  } else {
    s.channels.assign(s.num_sus, Eigen::VectorXcd::Zero(s.num_antennas));
    Rng rng(s.rng_seed);
    resample_channels(s, rng);
  }
  s.validate();
  return s;
}

json load_json(const std::string& path, const char* what) {
  std::ifstream in(path);
  if (!in) throw IoError(std::string(what) + ": cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw IoError(std::string(what) + ": bad JSON in " + path + ": " + e.what());
  }
  return j;
}

}  // namespace

NetworkScenario load_scenario(const std::string& path) {
  return scenario_from_json(load_json(path, "scenario"));
}

void save_scenario(const NetworkScenario& scenario, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("scenario: cannot write " + path);
  out << scenario_to_json(scenario).dump(2) << "\n";
}

namespace {

void env_from_json(const json& j, EnvConfig& env) {
  env.psi = j.value("psi", env.psi);
  env.penalty_weight = j.value("penalty_weight", env.penalty_weight);
  env.latency_cap_s = j.value("latency_cap_s", env.latency_cap_s);
  env.horizon = j.value("horizon", env.horizon);
  env.include_diagonal = j.value("include_diagonal", env.include_diagonal);
  if (j.contains("surrogate")) {
    const json& s = j.at("surrogate");
    env.surrogate.base_score = s.value("base_score", env.surrogate.base_score);
    env.surrogate.coverage_gain = s.value("coverage_gain", env.surrogate.coverage_gain);
    env.surrogate.redundancy_penalty =
        s.value("redundancy_penalty", env.surrogate.redundancy_penalty);
    env.surrogate.floor = s.value("floor", env.surrogate.floor);
  }
  if (j.contains("sca")) {
    const json& s = j.at("sca");
    env.sca.tol_latency = s.value("tol_latency", env.sca.tol_latency);
    env.sca.max_iterations = s.value("max_iterations", env.sca.max_iterations);
    env.sca.binary_penalty = s.value("binary_penalty", env.sca.binary_penalty);
    env.sca.kkt_tolerance = s.value("kkt_tolerance", env.sca.kkt_tolerance);
  }
}

json env_to_json(const EnvConfig& env) {
  json j;
  j["psi"] = env.psi;
  j["penalty_weight"] = env.penalty_weight;
  j["latency_cap_s"] = env.latency_cap_s;
  j["horizon"] = env.horizon;
  j["include_diagonal"] = env.include_diagonal;
  j["surrogate"] = {{"base_score", env.surrogate.base_score},
                    {"coverage_gain", env.surrogate.coverage_gain},
                    {"redundancy_penalty", env.surrogate.redundancy_penalty},
                    {"floor", env.surrogate.floor}};
  j["sca"] = {{"tol_latency", env.sca.tol_latency},
              {"max_iterations", env.sca.max_iterations},
              {"binary_penalty", env.sca.binary_penalty},
              {"kkt_tolerance", env.sca.kkt_tolerance}};
  return j;
}

void ppo_from_json(const json& j, PpoHyper& ppo) {
  ppo.actor_lr = j.value("actor_lr", ppo.actor_lr);
  ppo.critic_lr = j.value("critic_lr", ppo.critic_lr);
  ppo.clip = j.value("clip", ppo.clip);
  ppo.gamma = j.value("gamma", ppo.gamma);
  ppo.gae_lambda = j.value("gae_lambda", ppo.gae_lambda);
  ppo.entropy_coef = j.value("entropy_coef", ppo.entropy_coef);
  ppo.epochs = j.value("epochs", ppo.epochs);
  ppo.minibatch = j.value("minibatch", ppo.minibatch);
  ppo.rollout = j.value("rollout", ppo.rollout);
  if (j.contains("hidden_dims"))
    ppo.hidden_dims = j.at("hidden_dims").get<std::vector<int>>();
}

json ppo_to_json(const PpoHyper& ppo) {
  json j;
  j["actor_lr"] = ppo.actor_lr;
  j["critic_lr"] = ppo.critic_lr;
  j["clip"] = ppo.clip;
  j["gamma"] = ppo.gamma;
  j["gae_lambda"] = ppo.gae_lambda;
  j["entropy_coef"] = ppo.entropy_coef;
  j["epochs"] = ppo.epochs;
  j["minibatch"] = ppo.minibatch;
  j["rollout"] = ppo.rollout;
  j["hidden_dims"] = ppo.hidden_dims;
  return j;
}

void layout_from_json(const json& j, CatalogLayout& layout) {
  layout.grid_width = j.value("grid_width", layout.grid_width);
  layout.grid_height = j.value("grid_height", layout.grid_height);
  layout.num_textual = j.value("num_textual", layout.num_textual);
  layout.num_visual = j.value("num_visual", layout.num_visual);
  layout.overlap = j.value("overlap", layout.overlap);
  layout.num_low_importance = j.value("num_low_importance", layout.num_low_importance);
  layout.num_duplicates = j.value("num_duplicates", layout.num_duplicates);
  layout.textual_bits_min = j.value("textual_bits_min", layout.textual_bits_min);
  layout.textual_bits_max = j.value("textual_bits_max", layout.textual_bits_max);
  layout.visual_bits_min = j.value("visual_bits_min", layout.visual_bits_min);
  layout.visual_bits_max = j.value("visual_bits_max", layout.visual_bits_max);
  layout.binarize_level = j.value("binarize_level", layout.binarize_level);
  layout.threshold_textual = j.value("threshold_textual", layout.threshold_textual);
  layout.threshold_visual = j.value("threshold_visual", layout.threshold_visual);
  layout.header_bits = j.value("header_bits", layout.header_bits);
}

json layout_to_json(const CatalogLayout& layout) {
  json j;
  j["grid_width"] = layout.grid_width;
  j["grid_height"] = layout.grid_height;
  j["num_textual"] = layout.num_textual;
  j["num_visual"] = layout.num_visual;
  j["overlap"] = layout.overlap;
  j["num_low_importance"] = layout.num_low_importance;
  j["num_duplicates"] = layout.num_duplicates;
  j["textual_bits_min"] = layout.textual_bits_min;
  j["textual_bits_max"] = layout.textual_bits_max;
  j["visual_bits_min"] = layout.visual_bits_min;
  j["visual_bits_max"] = layout.visual_bits_max;
  j["binarize_level"] = layout.binarize_level;
  j["threshold_textual"] = layout.threshold_textual;
  j["threshold_visual"] = layout.threshold_visual;
  j["header_bits"] = layout.header_bits;
  return j;
}

}  // namespace

RunConfig load_run_config(const std::string& path) {
  const json j = load_json(path, "run config");
  RunConfig config;
  config.scenario_path = j.value("scenario", "");
  config.catalog_path = j.value("catalog", "");
  config.out_dir = j.value("out_dir", ".");
  config.scheme = parse_scheme(j.value("scheme", "im-ppo"));
  if (j.contains("seeds"))
    config.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
  config.episodes = j.value("episodes", config.episodes);
  config.eval_episodes = j.value("eval_episodes", config.eval_episodes);
  config.jobs = j.value("jobs", config.jobs);
  config.shared_catalog = j.value("shared_catalog", config.shared_catalog);
  config.catalog_seed = j.value("catalog_seed", config.catalog_seed);
  if (j.contains("env")) env_from_json(j.at("env"), config.env);
  if (j.contains("ppo")) ppo_from_json(j.at("ppo"), config.ppo);
  if (j.contains("layout")) layout_from_json(j.at("layout"), config.layout);
  config.validate();
  return config;
}

void save_run_config(const RunConfig& config, const std::string& path) {
  json j;
  j["scenario"] = config.scenario_path;
  j["catalog"] = config.catalog_path;
  j["out_dir"] = config.out_dir;
  j["scheme"] = to_string(config.scheme);
  j["seeds"] = config.seeds;
  j["episodes"] = config.episodes;
  j["eval_episodes"] = config.eval_episodes;
  j["jobs"] = config.jobs;
  j["shared_catalog"] = config.shared_catalog;
  j["catalog_seed"] = config.catalog_seed;
  j["env"] = env_to_json(config.env);
  j["ppo"] = ppo_to_json(config.ppo);
  j["layout"] = layout_to_json(config.layout);
  std::ofstream out(path);
  if (!out) throw IoError("run config: cannot write " + path);
  out << j.dump(2) << "\n";
}

ExperimentSetup template_setup(const std::string& name, std::uint64_t seed) {
  ExperimentSetup setup;
  setup.catalog_seed = seed;
  setup.ppo.rollout = 128;
  setup.ppo.minibatch = 64;
  setup.ppo.epochs = 6;
  if (name == "paper-default") {
    setup.scenario = sample_rayleigh_scenario(seed, 3, 4, {900.0, 1100.0, 1300.0}, 3.5);
    setup.scenario.bandwidth_hz = 2e6;
    setup.scenario.tx_power_w.assign(3, dbm_to_watts(30.0));
    setup.shared_catalog = false;
  } else if (name == "sweep-default") {
    // Two antennas against three SUs: interference that beamforming cannot
    // null, so the decoding order genuinely matters.
    setup.scenario = sample_rayleigh_scenario(seed, 3, 2, {700.0, 900.0, 1200.0}, 3.5);
    setup.scenario.bandwidth_hz = 2e6;
    setup.scenario.tx_power_w.assign(3, dbm_to_watts(30.0));
    setup.shared_catalog = false;
  } else if (name == "shared-default") {
    setup.scenario = sample_rayleigh_scenario(seed, 3, 2, {1000.0, 1000.0, 1000.0}, 3.5);
    setup.scenario.bandwidth_hz = 2e6;
    setup.scenario.tx_power_w.assign(3, dbm_to_watts(30.0));
    setup.shared_catalog = true;
  } else {
    throw ConfigError("unknown template: " + name);
  }
  setup.layout.num_textual = 5;
  setup.layout.num_visual = 3;
  setup.layout.num_duplicates = 1;
  setup.layout.num_low_importance = 2;
  return setup;
}

ExperimentSetup setup_from_config(const RunConfig& config) {
  ExperimentSetup setup;
  if (config.scenario_path.empty())
    throw ConfigError("run config: scenario path missing");
  setup.scenario = load_scenario(config.scenario_path);
  if (!config.catalog_path.empty())
    setup.catalogs = load_catalog_set(config.catalog_path);
  setup.layout = config.layout;
  setup.shared_catalog = config.shared_catalog;
  setup.catalog_seed = config.catalog_seed;
  setup.env = config.env;
  setup.ppo = config.ppo;
  return setup;
}

}  // namespace semnoma
