#pragma once
// Finite episodic MDPs with per-timestep linear feature maps, plus the
// generators for each experimental regime. Environments are immutable after
// construction; all sampling goes through an explicit RngStream.
//
// Indexing is 0-based internally: t in [0, horizon).

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "eleanor/numerics.hpp"
#include "eleanor/rng.hpp"

namespace eleanor {

using Json = nlohmann::ordered_json;

struct IndexError : std::out_of_range {
  using std::out_of_range::out_of_range;
};
struct EnvError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// phi[t][s][a]: vector of dimension dims[t], flat per timestep.
struct FeatureMap {
  std::vector<int> dims;
  std::vector<std::vector<double>> phi;  // phi[t] has size S*A*dims[t]

  std::span<const double> at(int t, int s, int a, int n_actions) const {
    const int d = dims[static_cast<std::size_t>(t)];
    const auto& block = phi[static_cast<std::size_t>(t)];
    return {block.data() + static_cast<std::size_t>((s * n_actions + a) * d),
            static_cast<std::size_t>(d)};
  }
};

// Per-timestep parameter ball radii D_t.
struct ParamBall {
  std::vector<double> radius;
};

enum class RewardNoise { None, Uniform, Bernoulli };

const char* reward_noise_name(RewardNoise k);
RewardNoise reward_noise_from_name(const std::string& name);

struct Transition {
  int t = 0;
  int s = 0;
  int a = 0;
  double reward = 0.0;
  int s_next = 0;
};

struct EpisodicLinearMDP {
  int horizon = 0;
  int n_states = 0;
  int n_actions = 0;
  int start_state = 0;
  // p[t] flat S*A*S, row (s,a) is a distribution over next states.
  std::vector<std::vector<double>> p;
  // r[t] flat S*A, entries in [0,1].
  std::vector<std::vector<double>> r;
  FeatureMap features;
  ParamBall balls;
  RewardNoise noise_kind = RewardNoise::None;
  double noise_param = 0.0;
  Json meta = Json::object();

  std::span<const double> phi(int t, int s, int a) const {
    return features.at(t, s, a, n_actions);
  }
  std::span<const double> p_row(int t, int s, int a) const {
    return {p[static_cast<std::size_t>(t)].data() +
                static_cast<std::size_t>((s * n_actions + a) * n_states),
            static_cast<std::size_t>(n_states)};
  }
  double reward(int t, int s, int a) const {
    return r[static_cast<std::size_t>(t)]
            [static_cast<std::size_t>(s * n_actions + a)];
  }
  int feature_dim(int t) const {
    return features.dims[static_cast<std::size_t>(t)];
  }
  double ball_radius(int t) const {
    return balls.radius[static_cast<std::size_t>(t)];
  }
};

// Throws EnvError if any structural invariant fails (probability rows,
// reward range, feature norms, dimensions).
void validate_env(const EpisodicLinearMDP& env);

// One environment step. Draws s_next from p[t][s][a] and applies the
// configured reward noise. Throws IndexError on out-of-range indices.
Transition sample_step(const EpisodicLinearMDP& env, int t, int s, int a,
                       RngStream& rng);

// Tabular MDP with one-hot (s,a) indicator features; d_t = S*A and
// D_t = sqrt(S*A)*(H-t). rewards[t][s][a], transitions[t][s][a][s_next].
EpisodicLinearMDP make_tabular_onehot(
    int n_states, int n_actions, int horizon,
    const std::vector<std::vector<std::vector<double>>>& rewards,
    const std::vector<std::vector<std::vector<std::vector<double>>>>&
        transitions);

// Random tabular instance (uniform rewards, random transition rows).
EpisodicLinearMDP make_random_tabular(int n_states, int n_actions, int horizon,
                                      std::uint64_t seed);

// MDP whose transitions and rewards factor exactly through d-dimensional
// simplex features: p[t][s][a] = sum_j phi_j mu_t[j], r = <phi, eta_t>.
// The first d (s,a) pairs get vertex features e_j, so d = S*A reproduces the
// one-hot construction. Records mu and eta in meta.
EpisodicLinearMDP make_linear_mdp(int d, int n_states, int n_actions,
                                  int horizon, std::uint64_t seed);

// Independent uniform reward perturbations in [-eps, eps], clamped so the
// table stays in [0,1]. Records the perturbation table in meta.
EpisodicLinearMDP make_misspecified(const EpisodicLinearMDP& env, double eps,
                                    std::uint64_t seed);

// One-state, one-step bandit with 2^d sign-pattern actions. Features are
// sign vectors scaled by sign_weight/sqrt(d) plus a constant coordinate (so
// the [0,1] reward shift stays inside the linear class). Mean rewards are
// 0.5 + (gap/2)*s_1(a), plus +eps on the last action; rewards are Bernoulli.
EpisodicLinearMDP make_hard_bandit(int d, double eps, double gap,
                                   double sign_weight = 0.5);

}  // namespace eleanor
