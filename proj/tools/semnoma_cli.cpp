// Command-line front end: scenario/catalog generation, training, evaluation
// and experiment sweeps, all emitting deterministic CSV/JSON artifacts.

#include <CLI11.hpp>
#include <algorithm>
#include <filesystem>
#include <iostream>
#include <numeric>
#include <sstream>

#include "semnoma/config.hpp"
#include "semnoma/csv.hpp"
#include "semnoma/errors.hpp"

namespace fs = std::filesystem;
using namespace semnoma;

namespace {

constexpr const char* kCsvDocs = R"(CSV schemas (first column carries the schema tag):
  curves:  schema,episode,reward,lpips_sum,latency_s,penalty,selection_ratio,
           policy_loss,value_loss,approx_kl,clip_fraction
  eval:    schema,scheme,seed,metric,su,value   (su empty for scalar metrics)
  sweep:   schema,axis,axis_value,scheme,seed,metric,su,value
           (scheme 'oracle' rows carry the brute-force optimal order index))";

void require_dir(const std::string& dir) {
  if (!fs::is_directory(dir))
    throw IoError("output directory does not exist: " + dir);
}

std::string out_path(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

void write_curves_csv(const std::string& path, const TrainResult& result) {
  CsvWriter csv(path, {"schema", "episode", "reward", "lpips_sum", "latency_s",
                       "penalty", "selection_ratio", "policy_loss", "value_loss",
                       "approx_kl", "clip_fraction"});
  for (const TrainEpisodeRow& row : result.rows) {
    csv.field(std::string("semnoma.curves.v1"))
        .field(row.episode)
        .field(row.reward)
        .field(row.lpips_sum)
        .field(row.latency_s)
        .field(row.penalty)
        .field(row.selection_ratio)
        .field(row.policy_loss)
        .field(row.value_loss)
        .field(row.approx_kl)
        .field(row.clip_fraction);
    csv.end_row();
  }
}

void append_metric_rows(CsvWriter& csv, const std::string& schema,
                        const std::vector<std::string>& prefix,
                        const SchemeMetrics& metrics) {
  const auto row = [&](const std::string& metric, int su, double value) {
    csv.field(schema);
    for (const auto& p : prefix) csv.field(p);
    csv.field(metric);
    csv.field(su >= 0 ? std::to_string(su) : std::string());
    csv.field(value);
    csv.end_row();
  };
  row("reward", -1, metrics.mean_reward);
  row("weighted_ll", -1, metrics.mean_weighted_ll);
  row("latency_s", -1, metrics.mean_latency_s);
  row("lpips_sum", -1, metrics.mean_lpips_sum);
  row("penalty", -1, metrics.mean_penalty);
  for (std::size_t k = 0; k < metrics.per_su_lpips.size(); ++k)
    row("lpips", static_cast<int>(k), metrics.per_su_lpips[k]);
  for (std::size_t k = 0; k < metrics.per_su_selection_ratio.size(); ++k)
    row("selection_ratio", static_cast<int>(k), metrics.per_su_selection_ratio[k]);
  for (std::size_t k = 0; k < metrics.per_position_selection_ratio.size(); ++k)
    row("selection_ratio_by_position", static_cast<int>(k),
        metrics.per_position_selection_ratio[k]);
}

void dump_sca_trace(const ExperimentSetup& setup) {
  // Structured per-iteration decoding trace on the stored channel draw with
  // all-selection demands.
  SemanticNomaEnv env = make_env(setup, Scheme::AllSelection, 0);
  std::vector<double> demands(setup.scenario.num_sus);
  for (int k = 0; k < setup.scenario.num_sus; ++k) {
    SelectionMask all;
    all.bits.assign(env.candidates(k).size(), 1);
    demands[k] = traffic_demand(all, env.candidates(k),
                                env.catalogs().at(k).header_bits);
  }
  ScaOptions opts = setup.env.sca;
  opts.collect_trace = true;
  const auto omega = worst_case_beamformers(setup.scenario);
  const ScaResult result = sca_decoding(setup.scenario, omega, demands, opts);
  std::cerr << "sca trace: iterations=" << result.iterations
            << " latency_s=" << result.latency_s << "\n";
  for (std::size_t i = 0; i < result.trace.surrogate_latency.size(); ++i)
    std::cerr << "  iter=" << i
              << " surrogate_latency=" << result.trace.surrogate_latency[i]
              << " merit=" << result.trace.merit[i]
              << " kkt_residual=" << result.trace.kkt_residual[i] << "\n";
}

int cmd_generate(const std::string& tmpl, std::uint64_t seed,
                 const std::string& out_dir) {
  require_dir(out_dir);
  const ExperimentSetup setup = template_setup(tmpl, seed);
  const std::string scenario_file = out_path(out_dir, "scenario.json");
  const std::string catalog_file = out_path(out_dir, "catalog.json");
  save_scenario(setup.scenario, scenario_file);
  const CatalogSet catalogs = synthesize_catalog_set(
      seed, setup.layout, setup.scenario.num_sus, setup.shared_catalog);
  save_catalog_set(catalogs, catalog_file);

  RunConfig config;
  config.scenario_path = scenario_file;
  config.catalog_path = catalog_file;
  config.out_dir = out_dir;
  config.layout = setup.layout;
  config.shared_catalog = setup.shared_catalog;
  config.catalog_seed = seed;
  config.env = setup.env;
  config.ppo = setup.ppo;
  save_run_config(config, out_path(out_dir, "run.json"));
  std::cout << "wrote " << scenario_file << ", " << catalog_file << ", "
            << out_path(out_dir, "run.json") << "\n";
  return 0;
}

int cmd_train(RunConfig config, bool verbose) {
  require_dir(config.out_dir);
  if (!scheme_trains(config.scheme))
    throw ConfigError("train: scheme " + to_string(config.scheme) +
                      " has no training loop; use eval");
  ExperimentSetup setup = setup_from_config(config);
  if (verbose) dump_sca_trace(setup);
  for (std::uint64_t seed : config.seeds) {
    SemanticNomaEnv env = make_env(setup, config.scheme, seed);
    const TrainResult result = train_scheme(env, config.ppo, config.episodes, seed);
    const std::string tag =
        to_string(config.scheme) + "_seed" + std::to_string(seed);
    write_curves_csv(out_path(config.out_dir, "curves_" + tag + ".csv"), result);
    save_checkpoint(result.checkpoint,
                    out_path(config.out_dir, "ckpt_" + tag + ".bin"));
    if (result.diverged)
      std::cerr << "warning: training diverged for seed " << seed
                << "; checkpoint holds the last finite parameters\n";
    std::cout << "seed " << seed << ": " << result.rows.size()
              << " episodes, artifacts curves_" << tag << ".csv, ckpt_" << tag
              << ".bin\n";
  }
  return 0;
}

int cmd_eval(RunConfig config, const std::string& checkpoint_path) {
  require_dir(config.out_dir);
  ExperimentSetup setup = setup_from_config(config);
  Checkpoint ckpt;
  const bool needs_actor = scheme_trains(config.scheme);
  if (needs_actor) {
    if (checkpoint_path.empty())
      throw ConfigError("eval: scheme " + to_string(config.scheme) +
                        " requires --checkpoint");
    ckpt = load_checkpoint(checkpoint_path);
    if (ckpt.scheme != to_string(config.scheme))
      throw ConfigError("eval: checkpoint was trained for scheme " + ckpt.scheme);
  }
  const std::string path =
      out_path(config.out_dir, "eval_" + to_string(config.scheme) + ".csv");
  CsvWriter csv(path, {"schema", "scheme", "seed", "metric", "su", "value"});
  for (std::uint64_t seed : config.seeds) {
    SemanticNomaEnv env = make_env(setup, config.scheme, seed);
    if (needs_actor && env.state_dim() != ckpt.state_dim)
      throw ConfigError("eval: checkpoint state dimension mismatch");
    const SchemeMetrics metrics = evaluate_scheme(
        env, config.eval_episodes, seed + 17, needs_actor ? &ckpt.actor : nullptr);
    append_metric_rows(csv, "semnoma.eval.v1",
                       {to_string(config.scheme), std::to_string(seed)}, metrics);
  }
  std::cout << "wrote " << path << "\n";
  return 0;
}

int cmd_sweep(RunConfig config, const std::string& axis_name,
              const std::vector<double>& values,
              const std::vector<std::string>& scheme_names) {
  require_dir(config.out_dir);
  ExperimentSetup setup = setup_from_config(config);
  SweepSpec spec;
  spec.axis = parse_axis(axis_name);
  spec.values = values;
  if (scheme_names.empty()) {
    spec.schemes = {Scheme::ImPpo, Scheme::AllSelection, Scheme::RandomSelection,
                    Scheme::LocationDecoding};
  } else {
    for (const auto& name : scheme_names) spec.schemes.push_back(parse_scheme(name));
  }
  spec.seeds = config.seeds;
  spec.train_episodes = config.episodes;
  spec.eval_episodes = config.eval_episodes;
  spec.jobs = config.jobs;

  const std::vector<SweepPoint> points = run_sweep(setup, spec);
  const std::string path = out_path(config.out_dir, "sweep_" + axis_name + ".csv");
  CsvWriter csv(path, {"schema", "axis", "axis_value", "scheme", "seed", "metric",
                       "su", "value"});
  for (const SweepPoint& point : points)
    append_metric_rows(csv, "semnoma.sweep.v1",
                       {to_string(point.axis),
                        [&] {
                          char buf[32];
                          std::snprintf(buf, sizeof(buf), "%.12g", point.value);
                          return std::string(buf);
                        }(),
                        to_string(point.scheme), std::to_string(point.seed)},
                       point.metrics);
  // One oracle row per axis value.
  for (std::size_t v = 0; v < spec.values.size(); ++v) {
    const auto it = std::find_if(points.begin(), points.end(), [&](const SweepPoint& p) {
      return p.value == spec.values[v];
    });
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.12g", spec.values[v]);
    csv.field(std::string("semnoma.sweep.v1"))
        .field(axis_name)
        .field(std::string(buf))
        .field(std::string("oracle"))
        .field(std::string("0"))
        .field(std::string("optimal_order_index"))
        .field(std::string())
        .field(static_cast<double>(it != points.end() ? it->oracle_order_index : -1));
    csv.end_row();
  }
  std::cout << "wrote " << path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{std::string("semnoma: semantic NOMA image-transmission simulator\n\n") +
               kCsvDocs};
  app.require_subcommand(1);

  std::string tmpl = "paper-default";
  std::uint64_t seed = 7;
  std::string out_dir = ".";
  auto* generate = app.add_subcommand("generate", "Write scenario, catalog and run config");
  generate->add_option("--template", tmpl,
                       "paper-default | sweep-default | shared-default");
  generate->add_option("--seed", seed, "Generation seed");
  generate->add_option("--out", out_dir, "Existing output directory");

  std::string config_path;
  std::string scheme_override;
  std::string checkpoint_path;
  int episodes_override = -1;
  long long seed_override = -1;
  std::string out_override;
  bool verbose = false;

  const auto add_common = [&](CLI::App* cmd, bool with_scheme = true) {
    cmd->add_option("--config", config_path, "Run configuration JSON")->required();
    if (with_scheme) cmd->add_option("--scheme", scheme_override, "Scheme override");
    cmd->add_option("--episodes", episodes_override, "Episode count override");
    cmd->add_option("--seed", seed_override, "Single-seed override");
    cmd->add_option("--out", out_override, "Output directory override");
    cmd->add_flag("--verbose", verbose, "Dump solver traces to stderr");
  };

  auto* train = app.add_subcommand("train", "Train a scheme, write curves and checkpoint");
  add_common(train);
  auto* eval = app.add_subcommand("eval", "Evaluate a scheme, write metrics CSV");
  add_common(eval);
  eval->add_option("--checkpoint", checkpoint_path, "Checkpoint for trainable schemes");

  std::string axis_name = "bandwidth";
  std::string values_arg;
  std::string schemes_arg;
  int jobs_override = -1;
  auto* sweep = app.add_subcommand("sweep", "Sweep an axis across schemes and seeds");
  add_common(sweep, false);
  sweep->add_option("--axis", axis_name, "bandwidth | num_sus | su_power")->required();
  sweep->add_option("--values", values_arg, "Comma-separated axis values")->required();
  sweep->add_option("--schemes", schemes_arg, "Comma-separated scheme list");
  sweep->add_option("--jobs", jobs_override, "Parallel (value,scheme,seed) jobs");

  CLI11_PARSE(app, argc, argv);

  try {
    if (generate->parsed()) return cmd_generate(tmpl, seed, out_dir);

    RunConfig config = load_run_config(config_path);
    if (!scheme_override.empty()) config.scheme = parse_scheme(scheme_override);
    if (episodes_override >= 0) config.episodes = episodes_override;
    if (seed_override >= 0) config.seeds = {static_cast<std::uint64_t>(seed_override)};
    if (!out_override.empty()) config.out_dir = out_override;
    if (jobs_override > 0) config.jobs = jobs_override;

    if (train->parsed()) return cmd_train(std::move(config), verbose);
    if (eval->parsed()) return cmd_eval(std::move(config), checkpoint_path);
    if (sweep->parsed()) {
      std::vector<double> values;
      std::stringstream ss(values_arg);
      std::string item;
      while (std::getline(ss, item, ',')) values.push_back(std::stod(item));
      std::vector<std::string> schemes;
      std::stringstream sch(schemes_arg);
      while (std::getline(sch, item, ',')) if (!item.empty()) schemes.push_back(item);
      return cmd_sweep(std::move(config), axis_name, values, schemes);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 3;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 4;
  } catch (const VersionError& e) {
    std::cerr << "version error: " << e.what() << "\n";
    return 5;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
