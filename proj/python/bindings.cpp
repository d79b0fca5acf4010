// Python bindings for the core operations: channel formulas, beamforming,
// decoding-order optimization, the semantic catalog pipeline and the
// environment/training loop.

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "semnoma/config.hpp"
#include "semnoma/errors.hpp"

namespace py = pybind11;
using namespace semnoma;

namespace {

std::vector<double> rates_for_order(const NetworkScenario& scenario,
                                    const std::vector<Eigen::VectorXcd>& omega,
                                    const std::vector<int>& permutation) {
  const DecodingOrder order = DecodingOrder::from_permutation(permutation);
  const ChannelGains gains = ChannelGains::build(scenario, omega);
  std::vector<double> rates(scenario.num_sus);
  for (int k = 0; k < scenario.num_sus; ++k)
    rates[k] = capacity(k, gains, order, scenario.bandwidth_hz,
                        scenario.noise_power_w());
  return rates;
}

py::dict metrics_to_dict(const SchemeMetrics& metrics) {
  py::dict d;
  d["mean_reward"] = metrics.mean_reward;
  d["mean_weighted_ll"] = metrics.mean_weighted_ll;
  d["mean_latency_s"] = metrics.mean_latency_s;
  d["mean_lpips_sum"] = metrics.mean_lpips_sum;
  d["mean_penalty"] = metrics.mean_penalty;
  d["per_su_lpips"] = metrics.per_su_lpips;
  d["per_su_selection_ratio"] = metrics.per_su_selection_ratio;
  d["per_position_selection_ratio"] = metrics.per_position_selection_ratio;
  d["episodes"] = metrics.episodes;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Semantic NOMA image-transmission simulator (C++ core)";

  py::register_exception<ConfigError>(m, "ConfigError");
  py::register_exception<ShapeError>(m, "ShapeError");
  py::register_exception<NumericalError>(m, "NumericalError");
  py::register_exception<IoError>(m, "IoError");
  py::register_exception<VersionError>(m, "VersionError");

  m.def("dbm_to_watts", &dbm_to_watts, py::arg("dbm"));
  m.def("watts_to_dbm", &watts_to_dbm, py::arg("watts"));
  m.def("dbmhz_to_whz", &dbmhz_to_whz, py::arg("dbmhz"));
  m.def("system_latency", &system_latency, py::arg("demands_bits"),
        py::arg("rates_bps"));
  m.def("metric_weighted_ll", &metric_weighted_ll, py::arg("lpips_sum"),
        py::arg("latency_s"), py::arg("psi"));

  py::class_<NetworkScenario>(m, "NetworkScenario")
      .def_readonly("num_sus", &NetworkScenario::num_sus)
      .def_readonly("num_antennas", &NetworkScenario::num_antennas)
      .def_readwrite("bandwidth_hz", &NetworkScenario::bandwidth_hz)
      .def_readonly("noise_psd_whz", &NetworkScenario::noise_psd_whz)
      .def_readwrite("tx_power_w", &NetworkScenario::tx_power_w)
      .def_readonly("channels", &NetworkScenario::channels)
      .def_readonly("su_distances_m", &NetworkScenario::su_distances_m)
      .def_property_readonly("noise_power_w", &NetworkScenario::noise_power_w)
      .def("validate", &NetworkScenario::validate);

  m.def("sample_rayleigh_scenario", &sample_rayleigh_scenario, py::arg("seed"),
        py::arg("num_sus"), py::arg("num_antennas"), py::arg("distances_m"),
        py::arg("pathloss_exponent"));
  m.def("load_scenario", &load_scenario, py::arg("path"));
  m.def("save_scenario", &save_scenario, py::arg("scenario"), py::arg("path"));

  m.def("worst_case_beamformers", &worst_case_beamformers, py::arg("scenario"));
  m.def(
      "rayleigh_quotient",
      [](const Eigen::VectorXcd& w, int k, const NetworkScenario& scenario,
         const std::vector<bool>& interferers) {
        std::vector<std::uint8_t> row(interferers.begin(), interferers.end());
        return rayleigh_quotient(w, build_covariances(k, scenario, row));
      },
      py::arg("beamformer"), py::arg("su"), py::arg("scenario"),
      py::arg("interferers"));
  m.def("rates_for_order", &rates_for_order, py::arg("scenario"),
        py::arg("beamformers"), py::arg("permutation"),
        "Per-SU capacities under a decoding permutation (first decoded first)");

  m.def(
      "brute_force_order",
      [](const NetworkScenario& scenario,
         const std::vector<Eigen::VectorXcd>& omega,
         const std::vector<double>& demands) {
        const auto [order, latency] = brute_force_order(scenario, omega, demands);
        return py::make_tuple(order.permutation(), latency);
      },
      py::arg("scenario"), py::arg("beamformers"), py::arg("demands_bits"));
  m.def(
      "sca_decoding",
      [](const NetworkScenario& scenario,
         const std::vector<Eigen::VectorXcd>& omega,
         const std::vector<double>& demands) {
        const ScaResult result = sca_decoding(scenario, omega, demands);
        return py::make_tuple(result.order.permutation(), result.latency_s,
                              result.iterations, result.infeasible_fallback);
      },
      py::arg("scenario"), py::arg("beamformers"), py::arg("demands_bits"));

  py::class_<CatalogLayout>(m, "CatalogLayout")
      .def(py::init<>())
      .def_readwrite("grid_width", &CatalogLayout::grid_width)
      .def_readwrite("grid_height", &CatalogLayout::grid_height)
      .def_readwrite("num_textual", &CatalogLayout::num_textual)
      .def_readwrite("num_visual", &CatalogLayout::num_visual)
      .def_readwrite("overlap", &CatalogLayout::overlap)
      .def_readwrite("num_low_importance", &CatalogLayout::num_low_importance)
      .def_readwrite("num_duplicates", &CatalogLayout::num_duplicates)
      .def_readwrite("threshold_textual", &CatalogLayout::threshold_textual)
      .def_readwrite("threshold_visual", &CatalogLayout::threshold_visual);

  py::class_<CatalogSet>(m, "CatalogSet")
      .def_property_readonly("num_sus", &CatalogSet::num_sus)
      .def_readonly("shared", &CatalogSet::shared);

  m.def("synthesize_catalog_set", &synthesize_catalog_set, py::arg("seed"),
        py::arg("layout"), py::arg("num_sus"), py::arg("shared"));
  m.def("save_catalog_set", &save_catalog_set, py::arg("catalogs"), py::arg("path"));
  m.def("load_catalog_set", &load_catalog_set, py::arg("path"));
  m.def(
      "catalog_importance",
      [](const CatalogSet& set, int su) {
        const CatalogScores scores = score_catalog(set.at(su));
        py::dict d;
        d["dependency"] = scores.dependency;
        d["contribution"] = scores.contribution;
        d["textual_importance"] = scores.textual_importance;
        d["retained_textual"] = scores.retained_textual;
        d["visual_importance"] = scores.visual_importance;
        d["retained_visual"] = scores.retained_visual;
        return d;
      },
      py::arg("catalogs"), py::arg("su"));

  py::class_<SurrogateParams>(m, "SurrogateParams")
      .def(py::init<>())
      .def_readwrite("base_score", &SurrogateParams::base_score)
      .def_readwrite("coverage_gain", &SurrogateParams::coverage_gain)
      .def_readwrite("redundancy_penalty", &SurrogateParams::redundancy_penalty)
      .def_readwrite("floor", &SurrogateParams::floor);

  m.def(
      "surrogate_lpips",
      [](const CatalogSet& set, int su, const std::vector<bool>& selection,
         const SurrogateParams& params) {
        const CatalogScores scores = score_catalog(set.at(su));
        const auto candidates = all_candidates(set.at(su), scores);
        SelectionMask mask;
        mask.bits.assign(selection.begin(), selection.end());
        return surrogate_lpips(mask, set.at(su), scores, candidates, params);
      },
      py::arg("catalogs"), py::arg("su"), py::arg("selection"), py::arg("params"));

  py::enum_<Scheme>(m, "Scheme")
      .value("IM_PPO", Scheme::ImPpo)
      .value("M_PPO", Scheme::MPpo)
      .value("PLAIN_PPO", Scheme::PlainPpo)
      .value("ALL", Scheme::AllSelection)
      .value("RANDOM", Scheme::RandomSelection)
      .value("LOCATION", Scheme::LocationDecoding);

  py::class_<ExperimentSetup>(m, "ExperimentSetup")
      .def_readwrite("scenario", &ExperimentSetup::scenario)
      .def_readwrite("layout", &ExperimentSetup::layout)
      .def_readwrite("shared_catalog", &ExperimentSetup::shared_catalog)
      .def_readwrite("catalog_seed", &ExperimentSetup::catalog_seed);

  m.def("template_setup", &template_setup, py::arg("name"), py::arg("seed"),
        "Built-in experiment templates: paper-default, sweep-default, shared-default");

  py::class_<SemanticNomaEnv>(m, "Env")
      .def(py::init([](const ExperimentSetup& setup, Scheme scheme,
                       std::uint64_t seed) {
             return make_env(setup, scheme, seed);
           }),
           py::arg("setup"), py::arg("scheme"), py::arg("seed"))
      .def_property_readonly("state_dim", &SemanticNomaEnv::state_dim)
      .def_property_readonly("num_candidates", &SemanticNomaEnv::num_candidates)
      .def_property_readonly("in_mask_count", &SemanticNomaEnv::in_mask_count)
      .def_property_readonly("action_mask",
                             [](const SemanticNomaEnv& env) {
                               return std::vector<int>(env.action_mask().begin(),
                                                       env.action_mask().end());
                             })
      .def("state", [](const SemanticNomaEnv& env) { return env.state(); })
      .def("reset", &SemanticNomaEnv::reset)
      .def(
          "step",
          [](SemanticNomaEnv& env, const std::vector<bool>& bits) {
            Action action;
            action.bits.assign(bits.begin(), bits.end());
            const HeadSpec heads = env.head_spec();
            if (heads.num_categorical > 0 || heads.num_gaussian > 0)
              throw ConfigError("Env.step: plain-ppo actions need the training loop");
            const EpisodeRecord record = env.step(action);
            py::dict d;
            d["reward"] = record.reward;
            d["lpips_sum"] = record.lpips_sum;
            d["latency_s"] = record.latency_s;
            d["penalty"] = record.penalty;
            d["violations"] = record.violations;
            d["selection_ratio"] = record.selection_ratio;
            d["order"] = record.order.permutation();
            d["state"] = record.state;
            d["next_state"] = record.next_state;
            return d;
          },
          py::arg("bits"));

  m.def(
      "train",
      [](const ExperimentSetup& setup, Scheme scheme, int episodes,
         std::uint64_t seed) {
        SemanticNomaEnv env = make_env(setup, scheme, seed);
        const TrainResult result = train_scheme(env, setup.ppo, episodes, seed);
        std::vector<double> rewards;
        rewards.reserve(result.rows.size());
        for (const auto& row : result.rows) rewards.push_back(row.reward);
        py::dict d;
        d["rewards"] = rewards;
        d["diverged"] = result.diverged;
        return d;
      },
      py::arg("setup"), py::arg("scheme"), py::arg("episodes"), py::arg("seed"));

  m.def(
      "evaluate",
      [](const ExperimentSetup& setup, Scheme scheme, int train_episodes,
         int eval_episodes, std::uint64_t seed) {
        SemanticNomaEnv env = make_env(setup, scheme, seed);
        return metrics_to_dict(
            run_baseline(env, train_episodes, eval_episodes, seed, setup.ppo));
      },
      py::arg("setup"), py::arg("scheme"), py::arg("train_episodes"),
      py::arg("eval_episodes"), py::arg("seed"));

  m.def("plateau_episode", &plateau_episode, py::arg("rewards"),
        py::arg("window") = 100, py::arg("band") = 0.05);
}
