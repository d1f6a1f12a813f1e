#pragma once
// Learning agents: optimistic least-squares value iteration with a global
// optimistic program over per-timestep ellipsoid perturbations, the
// misspecification-aware LinUCB specialization at H=1, and baselines. Also
// the heuristic planner and its brute-force grid oracle.

#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <vector>

#include "eleanor/env.hpp"
#include "eleanor/numerics.hpp"

namespace eleanor {

struct LifecycleError : std::logic_error {
  using std::logic_error::logic_error;
};

// The geometry an agent is allowed to see: features, ball radii, sizes. No
// transition or reward tables.
struct EnvFeatures {
  int horizon = 0;
  int n_states = 0;
  int n_actions = 0;
  int start_state = 0;
  const FeatureMap* features = nullptr;
  const ParamBall* balls = nullptr;

  static EnvFeatures of(const EpisodicLinearMDP& env) {
    return {env.horizon, env.n_states, env.n_actions, env.start_state,
            &env.features, &env.balls};
  }
  std::span<const double> phi(int t, int s, int a) const {
    return features->at(t, s, a, n_actions);
  }
  int dim(int t) const { return features->dims[static_cast<std::size_t>(t)]; }
  double ball(int t) const {
    return balls->radius[static_cast<std::size_t>(t)];
  }
};

struct Sample {
  Vec phi;
  double reward = 0.0;
  int s_next = 0;
};

// Regularized Gram matrix and the raw dataset for one timestep. The dataset
// is kept raw because regression targets are recomputed against the next
// timestep's parameter every episode; only Sigma and its factor are cached.
struct TimestepGram {
  SpdMatrix sigma;
  std::vector<Sample> data;

  static TimestepGram init(int dim, double lambda) {
    return {SpdMatrix::scaled_identity(static_cast<std::size_t>(dim), lambda),
            {}};
  }
  void absorb(Sample sample) {
    sigma = sigma.rank1_updated(sample.phi);
    data.push_back(std::move(sample));
  }
};

struct GramState {
  double lambda = 1.0;
  std::vector<TimestepGram> per_t;

  static GramState init(const EnvFeatures& fv, double lambda) {
    GramState g;
    g.lambda = lambda;
    g.per_t.reserve(static_cast<std::size_t>(fv.horizon));
    for (int t = 0; t < fv.horizon; ++t)
      g.per_t.push_back(TimestepGram::init(fv.dim(t), lambda));
    return g;
  }
};

struct RadiusConfig {
  double lambda = 1.0;
  double delta = 0.05;
  double sigma_noise = 0.0;
  double ibe_term = 0.0;
  double c1 = 1.0;
  double c2 = 1.0;
  double c3 = 1.0;
  // Episode budget entering the union bound delta' = delta / (2 H k_max).
  int k_max = 1000;
};

// Confidence radius sqrt(alpha_t) for episode k (1-based):
//   c1 * sigma_v * sqrt(d_t * log((lambda + k) / (lambda * delta')))
//   + c2 * sqrt(lambda) * D_t
//   + c3 * ibe_term * sqrt(d_t * k)
// with sigma_v = (H - t - 1) + sigma_noise and delta' = delta / (2 H k_max).
double radius(const RadiusConfig& cfg, int horizon, int t, int d_t, double D_t,
              int k);

// Regularized least squares against Bellman targets built from theta_next:
// y_i = r_i + clip(max_a <phi_{t+1}(s'_i, a), theta_next>, 0, H-t-1); at the
// terminal timestep y_i = r_i and theta_next is ignored.
Vec lsq_center(const TimestepGram& gram, const EnvFeatures& fv, int t,
               std::span<const double> theta_next);

struct EllipsoidParam {
  Vec theta_hat;
  double radius = 0.0;
  Vec u;          // ||u||_2 <= 1
  Vec theta_bar;  // theta_hat + radius * Sigma^{-1/2} u (factor solve)
};

struct PlannerConfig {
  int restarts = 8;  // random restarts, plus one zero start
  int iters = 300;
  double fd_step = 1e-3;
  double step0 = 0.1;
};

struct PlanResult {
  std::vector<EllipsoidParam> per_t;
  double value = 0.0;  // achieved J

  std::vector<std::vector<int>> greedy_policy(const EnvFeatures& fv) const;
};

// Global optimistic program: pick one unit-ball perturbation per timestep,
// coupled through the backward least-squares recursion, to maximize the
// predicted start-state value. The first-timestep perturbation is maximized
// in closed form (Cauchy-Schwarz); the remaining ones by multi-start
// projected finite-difference ascent. At H=1 the solution is exact.
PlanResult eleanor_plan(const GramState& grams, const RadiusConfig& cfg,
                        const PlannerConfig& pcfg, const EnvFeatures& fv,
                        int k, std::uint64_t seed, std::uint64_t replication);

// Exhaustive-grid verification of the planner: polar grids (d=2) or linspace
// grids (d=1) over every searched unit ball, nested across odd resolutions.
// Requires sum_t d_t <= 6 and searched dims in {1,2}.
double grid_oracle_plan(const GramState& grams, const RadiusConfig& cfg,
                        const EnvFeatures& fv, int k, int resolution);

class Agent {
 public:
  virtual ~Agent() = default;
  virtual void begin_episode(int k) = 0;
  virtual int act(int t, int s) = 0;
  virtual void observe(const Transition& tr) = 0;
  // Greedy policy tables for exact evaluation; empty if the agent is not
  // policy-based (uniform baseline).
  virtual std::vector<std::vector<int>> policy_tables() const = 0;
  virtual double planned_value() const = 0;
  virtual bool is_uniform() const { return false; }
};

class EleanorAgent : public Agent {
 public:
  EleanorAgent(const EnvFeatures& fv, RadiusConfig cfg, PlannerConfig pcfg,
               std::uint64_t seed, std::uint64_t replication = 0);

  void begin_episode(int k) override;
  int act(int t, int s) override;
  void observe(const Transition& tr) override;
  std::vector<std::vector<int>> policy_tables() const override;
  double planned_value() const override { return plan_.value; }

  const GramState& grams() const { return grams_; }
  const PlanResult& plan() const { return plan_; }

 private:
  EnvFeatures fv_;
  RadiusConfig cfg_;
  PlannerConfig pcfg_;
  std::uint64_t seed_;
  std::uint64_t replication_;
  GramState grams_;
  PlanResult plan_;
  int episode_ = 0;
  int next_t_ = 0;       // timestep expected by act()
  bool awaiting_observe_ = false;
  bool in_episode_ = false;
};

// LinUCB over per-action feature vectors with the misspecification-inflated
// radius; with c3 = 0 it is plain LinUCB. Also usable as an episodic agent
// on H=1 environments.
class MisLinUcbAgent : public Agent {
 public:
  MisLinUcbAgent(const EnvFeatures& fv, RadiusConfig cfg);

  // Contextual interface.
  int choose(const std::vector<std::span<const double>>& arms, int k) const;
  void update(std::span<const double> phi, double reward);
  double ucb_value(std::span<const double> phi, int k) const;

  // Episodic interface (H must be 1).
  void begin_episode(int k) override;
  int act(int t, int s) override;
  void observe(const Transition& tr) override;
  std::vector<std::vector<int>> policy_tables() const override;
  double planned_value() const override { return planned_; }

  Vec theta_hat() const;

 private:
  EnvFeatures fv_;
  RadiusConfig cfg_;
  int dim_;
  double D_;
  SpdMatrix sigma_;
  Vec xy_;
  int episode_ = 0;
  double planned_ = 0.0;
  bool awaiting_observe_ = false;
};

// Shares the optimistic code path with all radius constants forced to zero.
class GreedyLsviAgent : public EleanorAgent {
 public:
  GreedyLsviAgent(const EnvFeatures& fv, RadiusConfig cfg, PlannerConfig pcfg,
                  std::uint64_t seed, std::uint64_t replication = 0)
      : EleanorAgent(fv, zeroed(cfg), pcfg, seed, replication) {}

 private:
  static RadiusConfig zeroed(RadiusConfig cfg) {
    cfg.c1 = cfg.c2 = cfg.c3 = 0.0;
    return cfg;
  }
};

class UniformRandomAgent : public Agent {
 public:
  UniformRandomAgent(const EnvFeatures& fv, std::uint64_t seed,
                     std::uint64_t replication = 0)
      : fv_(fv), seed_(seed), replication_(replication) {}

  void begin_episode(int k) override { episode_ = k; }
  int act(int t, int s) override;
  void observe(const Transition&) override {}
  std::vector<std::vector<int>> policy_tables() const override { return {}; }
  double planned_value() const override { return 0.0; }
  bool is_uniform() const override { return true; }

 private:
  EnvFeatures fv_;
  std::uint64_t seed_;
  std::uint64_t replication_;
  int episode_ = 0;
};

}  // namespace eleanor
