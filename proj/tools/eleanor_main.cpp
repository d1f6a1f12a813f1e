// Command-line driver: run / sweep / ibe / oracle-check.
//
// Exit codes: 0 success, 2 config error, 1 runtime error.

#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "eleanor/agents.hpp"
#include "eleanor/env_io.hpp"
#include "eleanor/harness.hpp"
#include "eleanor/kernels.hpp"
#include "eleanor/oracle.hpp"
#include "eleanor/rng.hpp"

namespace {

using namespace eleanor;

void apply_overrides(ExperimentConfig& cfg, long long seed_override,
                     long long episodes_override) {
  if (seed_override >= 0)
    cfg.seeds = {static_cast<std::uint64_t>(seed_override)};
  if (episodes_override > 0) {
    cfg.episodes = static_cast<int>(episodes_override);
    cfg.agent.radius.k_max =
        std::max(cfg.agent.radius.k_max, cfg.episodes);
  }
}

int cmd_run(const std::string& config_path, const std::string& out_dir,
            long long seed_override, long long episodes_override) {
  ExperimentConfig cfg = ExperimentConfig::from_file(config_path);
  apply_overrides(cfg, seed_override, episodes_override);
  const ExperimentResult res = run_experiment(cfg, out_dir);
  const ScalingFit fit = fit_scaling(res.aggregate.mean_cum,
                                     std::max(1, cfg.episodes / 2),
                                     cfg.episodes);
  std::printf("seeds=%zu episodes=%d final_mean_cum=%.6g", cfg.seeds.size(),
              cfg.episodes, res.mean_final_cumulative());
  if (fit.valid) std::printf(" slope=%.4f", fit.slope);
  std::printf("\n");
  return 0;
}

int cmd_sweep(const std::string& config_path, const std::string& out_dir,
              long long seed_override, long long episodes_override) {
  ExperimentConfig cfg = ExperimentConfig::from_file(config_path);
  apply_overrides(cfg, seed_override, episodes_override);
  const SweepResult res = run_sweep(cfg, out_dir);
  std::fputs(res.to_csv().c_str(), stdout);
  return 0;
}

int cmd_ibe(const std::string& env_spec, int budget, long long seed_override) {
  const EnvSpec spec = parse_env_spec_string(env_spec);
  const std::uint64_t seed =
      seed_override >= 0 ? static_cast<std::uint64_t>(seed_override) : 0;
  const EpisodicLinearMDP env = spec.build(seed);
  std::printf("t,ihat,inner_gap,budget\n");
  for (const auto& entry : ibe_estimate_all(env, budget, seed)) {
    std::printf("%d,%.17g,%.17g,%d\n", entry.t + 1, entry.ihat,
                entry.inner_gap, entry.budget);
  }
  return 0;
}

// Planner-vs-grid-oracle comparison on random small instances.
int cmd_oracle_check(const std::string& config_path) {
  std::ifstream in(config_path);
  if (!in) throw ConfigError("cannot open config file: " + config_path);
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  const int instances = doc.value("instances", 100);
  const int resolution = doc.value("resolution", 33);
  const double tol = doc.value("tolerance", 1e-3);
  const double pass_rate = doc.value("pass_rate", 0.95);
  const std::uint64_t seed = doc.value("seed", 1234);
  const int max_samples = doc.value("max_samples", 50);

  int passed = 0;
  std::printf("instance,H,J_planner,J_grid,gap,ok\n");
  for (int i = 0; i < instances; ++i) {
    RngStream rng(seed, 1, static_cast<std::uint64_t>(i), 0);
    const int H = 1 + rng.uniform_index(3);
    const EpisodicLinearMDP env =
        make_linear_mdp(2, 2, 2, H, seed * 1000 + static_cast<std::uint64_t>(i));
    const EnvFeatures fv = EnvFeatures::of(env);
    RadiusConfig rcfg;
    rcfg.c1 = 0.25;
    rcfg.c2 = 0.25;
    rcfg.k_max = 1000;
    GramState grams = GramState::init(fv, rcfg.lambda);
    const int n = 1 + rng.uniform_index(max_samples);
    for (int j = 0; j < n; ++j) {
      const int t = rng.uniform_index(H);
      const int s = rng.uniform_index(env.n_states);
      const int a = rng.uniform_index(env.n_actions);
      RngStream step_rng(seed, 2, static_cast<std::uint64_t>(i),
                         static_cast<std::uint64_t>(j));
      const Transition tr = sample_step(env, t, s, a, step_rng);
      Sample sample;
      const auto phi = fv.phi(t, s, a);
      sample.phi.assign(phi.begin(), phi.end());
      sample.reward = tr.reward;
      sample.s_next = tr.s_next;
      grams.per_t[static_cast<std::size_t>(t)].absorb(std::move(sample));
    }
    const int k = n + 1;
    PlannerConfig pcfg;
    const PlanResult plan = eleanor_plan(grams, rcfg, pcfg, fv, k, seed, 3);
    const double grid = grid_oracle_plan(grams, rcfg, fv, k, resolution);
    const double gap = plan.value - grid;
    const bool ok = plan.value >= grid - tol;
    passed += ok ? 1 : 0;
    std::printf("%d,%d,%.12g,%.12g,%.3g,%s\n", i, H, plan.value, grid, gap,
                ok ? "pass" : "FAIL");
  }
  const double rate = static_cast<double>(passed) / instances;
  std::printf("passed %d/%d (required %.0f%%)\n", passed, instances,
              100.0 * pass_rate);
  return rate >= pass_rate ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Optimistic least-squares value iteration testbed"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::string out_dir = "out";
  std::string env_spec;
  int budget = 512;
  long long seed_override = -1;
  long long episodes_override = -1;

  app.add_option("--seed", seed_override, "Override the config seed list");
  app.add_option("--episodes", episodes_override, "Override the episode count");

  auto* run = app.add_subcommand("run", "Run one experiment; write CSVs");
  run->add_option("--config", config_path, "Config file")->required();
  run->add_option("--out", out_dir, "Output directory");

  auto* sweep = app.add_subcommand("sweep", "Run a parameter sweep");
  sweep->add_option("--config", config_path, "Config file")->required();
  sweep->add_option("--out", out_dir, "Output directory");

  auto* ibe = app.add_subcommand(
      "ibe", "Per-timestep inherent Bellman error estimates (CSV to stdout)");
  ibe->add_option("--env", env_spec, "Env file path or generator spec")
      ->required();
  ibe->add_option("--budget", budget, "Outer-search candidate budget");

  auto* oracle_check = app.add_subcommand(
      "oracle-check", "Compare the planner against the grid oracle");
  oracle_check->add_option("--config", config_path, "Config file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (*run) return cmd_run(config_path, out_dir, seed_override, episodes_override);
    if (*sweep)
      return cmd_sweep(config_path, out_dir, seed_override, episodes_override);
    if (*ibe) return cmd_ibe(env_spec, budget, seed_override);
    if (*oracle_check) return cmd_oracle_check(config_path);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const EnvIoError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
