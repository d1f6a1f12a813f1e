#pragma once
// Experiment orchestration: config ingestion with strict schema checking,
// seeded parallel replications with exact-DP regret measurement, scaling-law
// fits, CSV emission, and parameter sweeps.

#include <optional>
#include <string>
#include <vector>

#include "eleanor/agents.hpp"
#include "eleanor/env.hpp"

namespace eleanor {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Environment specification: either a generator plus parameters or a file.
// A generator without an explicit seed is keyed by the replication seed.
struct EnvSpec {
  Json spec;  // validated generator/file object

  EpisodicLinearMDP build(std::uint64_t replication_seed) const;
};

struct AgentSpec {
  std::string name;  // eleanor | greedy_lsvi | mislinucb | uniform_random
  RadiusConfig radius;
  PlannerConfig planner;
};

struct ExperimentConfig {
  EnvSpec env;
  AgentSpec agent;
  int episodes = 1;
  std::vector<std::uint64_t> seeds;
  int threads = 0;  // 0: hardware concurrency
  Json sweep = Json();  // optional sweep block, used by run_sweep

  // Parses and validates; unknown keys anywhere are hard errors.
  static ExperimentConfig from_json(const Json& doc);
  static ExperimentConfig from_file(const std::string& path);
};

// Parses "name:key=value,key=value" shorthand (or a file path) into an
// environment spec. Accepts S/A/H aliases for n_states/n_actions/horizon.
EnvSpec parse_env_spec_string(const std::string& text);

struct RegretCurve {
  std::uint64_t seed = 0;
  std::vector<double> per_episode;
  std::vector<double> cumulative;
  std::vector<double> planned;
  double vstar = 0.0;

  std::string to_csv() const;
};

struct AggregateCurve {
  std::vector<double> mean_cum;
  std::vector<double> p10;
  std::vector<double> p90;
  int n_seeds = 0;

  std::string to_csv() const;
};

struct ExperimentResult {
  std::vector<RegretCurve> curves;  // one per seed, in config order
  AggregateCurve aggregate;

  double mean_final_cumulative() const;
  double std_final_cumulative() const;
};

// Runs all replications (in parallel when threads allow) and, when out_dir
// is nonempty, writes seed_<seed>.csv per replication plus aggregate.csv.
ExperimentResult run_experiment(const ExperimentConfig& cfg,
                                const std::string& out_dir = "");

struct ScalingFit {
  double slope = 0.0;
  double intercept = 0.0;
  bool valid = false;  // false if the window contains nonpositive regret
};

// OLS of log(cumulative regret) on log(episode) over episodes
// [window_lo, window_hi] (1-based, inclusive).
ScalingFit fit_scaling(const std::vector<double>& cumulative, int window_lo,
                       int window_hi);

struct SweepCell {
  Json params;
  double final_mean = 0.0;
  double final_std = 0.0;
  double slope = 0.0;
  bool slope_valid = false;
  std::string error;
};

struct SweepResult {
  std::vector<SweepCell> cells;
  std::string to_csv() const;
};

// Runs one experiment per sweep cell; per-cell failures populate the error
// column without aborting the other cells.
SweepResult run_sweep(const ExperimentConfig& cfg, const std::string& out_dir);

}  // namespace eleanor
