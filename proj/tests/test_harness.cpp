#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "eleanor/harness.hpp"
#include "eleanor/oracle.hpp"
#include "eleanor/rng.hpp"

using namespace eleanor;

namespace {

Json base_config() {
  return Json{
      {"env",
       Json{{"generator", "tabular_onehot"}, {"n_states", 2}, {"n_actions", 2},
            {"horizon", 2}, {"seed", 3}}},
      {"agent",
       Json{{"name", "greedy_lsvi"},
            {"radius", Json{{"lambda", 1.0}}},
            {"planner", Json{{"restarts", 2}, {"iters", 50}}}}},
      {"episodes", 5},
      {"seeds", Json::array({1, 2})},
  };
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

TEST_CASE("config: happy path and defaults") {
  const ExperimentConfig cfg = ExperimentConfig::from_json(base_config());
  CHECK(cfg.episodes == 5);
  CHECK(cfg.seeds.size() == 2);
  CHECK(cfg.agent.name == "greedy_lsvi");
  CHECK(cfg.agent.radius.delta == doctest::Approx(0.05));
  CHECK(cfg.agent.radius.k_max == 5);  // defaults to episodes
}

TEST_CASE("config: unknown keys and bad values are hard errors") {
  Json bad = base_config();
  bad["typo_key"] = 1;
  CHECK_THROWS_AS(ExperimentConfig::from_json(bad), ConfigError);

  bad = base_config();
  bad["agent"]["radius"]["lambduh"] = 2.0;
  CHECK_THROWS_AS(ExperimentConfig::from_json(bad), ConfigError);

  bad = base_config();
  bad["agent"]["name"] = "dqn";
  CHECK_THROWS_AS(ExperimentConfig::from_json(bad), ConfigError);

  bad = base_config();
  bad["env"]["generator"] = "gridworld";
  CHECK_THROWS_AS(ExperimentConfig::from_json(bad), ConfigError);

  bad = base_config();
  bad["episodes"] = 0;
  CHECK_THROWS_AS(ExperimentConfig::from_json(bad), ConfigError);

  bad = base_config();
  bad["seeds"] = Json::array();
  CHECK_THROWS_AS(ExperimentConfig::from_json(bad), ConfigError);

  bad = base_config();
  bad.erase("env");
  CHECK_THROWS_AS(ExperimentConfig::from_json(bad), ConfigError);
}

TEST_CASE("reward_noise flag turns on uniform reward noise") {
  Json doc = base_config();
  doc["env"]["reward_noise"] = 0.2;
  const ExperimentConfig cfg = ExperimentConfig::from_json(doc);
  const EpisodicLinearMDP env = cfg.env.build(1);
  CHECK(env.noise_kind == RewardNoise::Uniform);
  CHECK(env.noise_param == doctest::Approx(0.2));
  RngStream rng(1, 0, 0, 0);
  double lo = 1e9, hi = -1e9;
  for (int i = 0; i < 3000; ++i) {
    const double r = sample_step(env, 0, 0, 0, rng).reward;
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  const double mean = env.reward(0, 0, 0);
  CHECK(hi - mean <= 0.2 + 1e-12);
  CHECK(mean - lo <= 0.2 + 1e-12);
  CHECK(hi - lo > 0.25);  // noise actually spreads

  doc["env"]["reward_noise"] = -1.0;
  CHECK_THROWS_AS(ExperimentConfig::from_json(doc), ConfigError);
}

TEST_CASE("env spec strings parse with aliases and shorthands") {
  const EnvSpec tab = parse_env_spec_string("tabular_onehot:S=3,A=2,H=3,seed=1");
  CHECK(tab.spec.at("n_states") == 3);
  CHECK(tab.spec.at("horizon") == 3);
  const EpisodicLinearMDP env = tab.build(0);
  CHECK(env.n_states == 3);

  const EnvSpec mis =
      parse_env_spec_string("misspecified:d=3,S=6,A=2,H=3,seed=7,eps=0.1");
  CHECK(mis.spec.at("generator") == "misspecified");
  CHECK(mis.spec.at("base").at("generator") == "linear_mdp");
  const EpisodicLinearMDP menv = mis.build(0);
  CHECK(menv.meta.at("generator") == "misspecified");

  CHECK_THROWS_AS(parse_env_spec_string("nope:x=1"), ConfigError);
}

TEST_CASE("run_experiment: single-episode one-armed bandit") {
  Json doc = base_config();
  doc["env"] = Json{{"generator", "tabular_onehot"}, {"n_states", 1},
                    {"n_actions", 1}, {"horizon", 1}, {"seed", 4}};
  doc["episodes"] = 1;
  doc["seeds"] = Json::array({11});
  const ExperimentConfig cfg = ExperimentConfig::from_json(doc);
  const ExperimentResult res = run_experiment(cfg);
  REQUIRE(res.curves.size() == 1);
  REQUIRE(res.curves[0].per_episode.size() == 1);
  CHECK(res.curves[0].cumulative[0] ==
        doctest::Approx(res.curves[0].per_episode[0]));
  // one arm: the policy is optimal, regret is zero
  CHECK(res.curves[0].per_episode[0] == doctest::Approx(0.0));
}

TEST_CASE("run_experiment: regret curves are sane and reproducible") {
  const ExperimentConfig cfg = ExperimentConfig::from_json(base_config());
  const std::string dir1 = "harness_out_a";
  const std::string dir2 = "harness_out_b";
  std::filesystem::remove_all(dir1);
  std::filesystem::remove_all(dir2);
  const ExperimentResult r1 = run_experiment(cfg, dir1);
  const ExperimentResult r2 = run_experiment(cfg, dir2);

  for (const auto& curve : r1.curves) {
    double prev = 0.0;
    for (std::size_t k = 0; k < curve.per_episode.size(); ++k) {
      CHECK(curve.per_episode[k] >= -1e-9);
      CHECK(curve.cumulative[k] >= prev - 1e-15);
      prev = curve.cumulative[k];
    }
  }
  // identical bytes across reruns
  for (const std::uint64_t seed : cfg.seeds) {
    const std::string name = "/seed_" + std::to_string(seed) + ".csv";
    CHECK(slurp(dir1 + name) == slurp(dir2 + name));
    CHECK(!slurp(dir1 + name).empty());
  }
  CHECK(slurp(dir1 + "/aggregate.csv") == slurp(dir2 + "/aggregate.csv"));

  // serial run matches the threaded one byte for byte
  Json serial_doc = base_config();
  serial_doc["threads"] = 1;
  const ExperimentConfig serial_cfg = ExperimentConfig::from_json(serial_doc);
  const std::string dir3 = "harness_out_c";
  std::filesystem::remove_all(dir3);
  run_experiment(serial_cfg, dir3);
  for (const std::uint64_t seed : cfg.seeds) {
    const std::string name = "/seed_" + std::to_string(seed) + ".csv";
    CHECK(slurp(dir1 + name) == slurp(dir3 + name));
  }
  std::filesystem::remove_all(dir1);
  std::filesystem::remove_all(dir2);
  std::filesystem::remove_all(dir3);
}

TEST_CASE("run_experiment: uniform baseline has constant exact regret") {
  Json doc = base_config();
  doc["agent"]["name"] = "uniform_random";
  doc["episodes"] = 4;
  const ExperimentConfig cfg = ExperimentConfig::from_json(doc);
  const ExperimentResult res = run_experiment(cfg);
  for (const auto& curve : res.curves) {
    const EpisodicLinearMDP env = cfg.env.build(curve.seed);
    const double expect =
        exact_dp(env).optimal_value(env) - evaluate_uniform_policy(env);
    for (const double r : curve.per_episode)
      CHECK(r == doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("fit_scaling: exact power laws and noisy regression") {
  const int K = 2000;
  std::vector<double> sqrt_curve, linear_curve, noisy_curve;
  for (int k = 1; k <= K; ++k) {
    sqrt_curve.push_back(std::sqrt(static_cast<double>(k)));
    linear_curve.push_back(static_cast<double>(k));
  }
  RngStream rng(8, 0, 0, 0);
  for (int k = 1; k <= K; ++k) {
    const double noise = 1.0 + rng.symmetric(0.01);
    noisy_curve.push_back(3.0 * std::pow(static_cast<double>(k), 0.7) * noise);
  }
  const ScalingFit s1 = fit_scaling(sqrt_curve, K / 2, K);
  REQUIRE(s1.valid);
  CHECK(s1.slope == doctest::Approx(0.5).epsilon(1e-9));
  const ScalingFit s2 = fit_scaling(linear_curve, K / 2, K);
  REQUIRE(s2.valid);
  CHECK(s2.slope == doctest::Approx(1.0).epsilon(1e-9));
  const ScalingFit s3 = fit_scaling(noisy_curve, K / 2, K);
  REQUIRE(s3.valid);
  CHECK(s3.slope >= 0.68);
  CHECK(s3.slope <= 0.72);

  std::vector<double> flat(100, 0.0);
  const ScalingFit bad = fit_scaling(flat, 50, 100);
  CHECK_FALSE(bad.valid);
}

TEST_CASE("sweep: degenerate grid matches run_experiment, errors isolate") {
  Json doc = base_config();
  doc["sweep"] = Json{
      {"mode", "cross"},
      {"axes", Json::array({Json{{"path", "env.seed"},
                                 {"values", Json::array({3})}}})}};
  const ExperimentConfig cfg = ExperimentConfig::from_json(doc);
  const SweepResult sweep = run_sweep(cfg, "");
  REQUIRE(sweep.cells.size() == 1);
  CHECK(sweep.cells[0].error.empty());

  const ExperimentResult direct =
      run_experiment(ExperimentConfig::from_json(base_config()));
  CHECK(sweep.cells[0].final_mean ==
        doctest::Approx(direct.mean_final_cumulative()).epsilon(1e-12));

  // a broken cell reports its error and leaves the others alone
  Json doc2 = base_config();
  doc2["sweep"] = Json{
      {"mode", "cross"},
      {"axes",
       Json::array({Json{{"path", "env.n_states"},
                         {"values", Json::array({2, -5})}}})}};
  const SweepResult mixed = run_sweep(ExperimentConfig::from_json(doc2), "");
  REQUIRE(mixed.cells.size() == 2);
  CHECK(mixed.cells[0].error.empty());
  CHECK(!mixed.cells[1].error.empty());
}

TEST_CASE("sweep: zip mode pairs axes") {
  Json doc = base_config();
  doc["episodes"] = 3;
  doc["sweep"] = Json{
      {"mode", "zip"},
      {"axes",
       Json::array({Json{{"path", "env.seed"}, {"values", Json::array({1, 2})}},
                    Json{{"path", "agent.radius.ibe_term"},
                         {"values", Json::array({0.0, 0.1})}}})}};
  const SweepResult res = run_sweep(ExperimentConfig::from_json(doc), "");
  REQUIRE(res.cells.size() == 2);
  CHECK(res.cells[0].error.empty());
  CHECK(res.cells[1].error.empty());
  CHECK(res.cells[1].params.at("agent.radius.ibe_term") == 0.1);
}
