#include "eleanor/env.hpp"

#include <algorithm>
#include <cmath>

namespace eleanor {

const char* reward_noise_name(RewardNoise k) {
  switch (k) {
    case RewardNoise::None:
      return "none";
    case RewardNoise::Uniform:
      return "uniform";
    case RewardNoise::Bernoulli:
      return "bernoulli";
  }
  return "?";
}

RewardNoise reward_noise_from_name(const std::string& name) {
  if (name == "none") return RewardNoise::None;
  if (name == "uniform") return RewardNoise::Uniform;
  if (name == "bernoulli") return RewardNoise::Bernoulli;
  throw EnvError("unknown reward noise kind: " + name);
}

void validate_env(const EpisodicLinearMDP& env) {
  const int H = env.horizon, S = env.n_states, A = env.n_actions;
  if (H < 1 || S < 1 || A < 1) throw EnvError("env: empty horizon/states/actions");
  if (env.start_state < 0 || env.start_state >= S)
    throw EnvError("env: start_state out of range");
  if (static_cast<int>(env.p.size()) != H ||
      static_cast<int>(env.r.size()) != H ||
      static_cast<int>(env.features.dims.size()) != H ||
      static_cast<int>(env.features.phi.size()) != H ||
      static_cast<int>(env.balls.radius.size()) != H)
    throw EnvError("env: per-timestep table count does not match horizon");
  for (int t = 0; t < H; ++t) {
    const std::size_t tt = static_cast<std::size_t>(t);
    const int d = env.features.dims[tt];
    if (d < 1) throw EnvError("env: feature dim must be positive");
    if (env.features.phi[tt].size() != static_cast<std::size_t>(S * A * d))
      throw EnvError("env: feature table size mismatch at t=" + std::to_string(t));
    if (env.p[tt].size() != static_cast<std::size_t>(S * A * S))
      throw EnvError("env: transition table size mismatch at t=" + std::to_string(t));
    if (env.r[tt].size() != static_cast<std::size_t>(S * A))
      throw EnvError("env: reward table size mismatch at t=" + std::to_string(t));
    if (!(env.balls.radius[tt] > 0.0))
      throw EnvError("env: ball radius must be positive at t=" + std::to_string(t));
    for (int s = 0; s < S; ++s) {
      for (int a = 0; a < A; ++a) {
        double row_sum = 0.0;
        for (const double pv : env.p_row(t, s, a)) {
          if (pv < -1e-15)
            throw EnvError("env: negative transition probability at t=" +
                           std::to_string(t));
          row_sum += pv;
        }
        if (std::fabs(row_sum - 1.0) > 1e-12)
          throw EnvError("env: transition row does not sum to 1 at (t,s,a)=(" +
                         std::to_string(t) + "," + std::to_string(s) + "," +
                         std::to_string(a) + "), sum=" + std::to_string(row_sum));
        const double rv = env.reward(t, s, a);
        if (!(rv >= 0.0 && rv <= 1.0))
          throw EnvError("env: reward outside [0,1] at (t,s,a)=(" +
                         std::to_string(t) + "," + std::to_string(s) + "," +
                         std::to_string(a) + ")");
        double nsq = 0.0;
        for (const double f : env.phi(t, s, a)) {
          if (!std::isfinite(f)) throw EnvError("env: non-finite feature entry");
          nsq += f * f;
        }
        if (nsq > 1.0 + 1e-9)
          throw EnvError("env: feature norm exceeds 1 at (t,s,a)=(" +
                         std::to_string(t) + "," + std::to_string(s) + "," +
                         std::to_string(a) + ")");
      }
    }
  }
}

Transition sample_step(const EpisodicLinearMDP& env, int t, int s, int a,
                       RngStream& rng) {
  if (t < 0 || t >= env.horizon) throw IndexError("sample_step: t out of range");
  if (s < 0 || s >= env.n_states) throw IndexError("sample_step: s out of range");
  if (a < 0 || a >= env.n_actions) throw IndexError("sample_step: a out of range");
  Transition tr;
  tr.t = t;
  tr.s = s;
  tr.a = a;
  tr.s_next = rng.categorical(env.p_row(t, s, a));
  const double mean = env.reward(t, s, a);
  switch (env.noise_kind) {
    case RewardNoise::None:
      tr.reward = mean;
      break;
    case RewardNoise::Uniform:
      tr.reward = mean + rng.symmetric(env.noise_param);
      break;
    case RewardNoise::Bernoulli:
      tr.reward = rng.bernoulli(mean) ? 1.0 : 0.0;
      break;
  }
  return tr;
}

EpisodicLinearMDP make_tabular_onehot(
    int n_states, int n_actions, int horizon,
    const std::vector<std::vector<std::vector<double>>>& rewards,
    const std::vector<std::vector<std::vector<std::vector<double>>>>&
        transitions) {
  const int S = n_states, A = n_actions, H = horizon, d = S * A;
  EpisodicLinearMDP env;
  env.horizon = H;
  env.n_states = S;
  env.n_actions = A;
  env.start_state = 0;
  env.p.assign(H, std::vector<double>(static_cast<std::size_t>(S * A * S), 0.0));
  env.r.assign(H, std::vector<double>(static_cast<std::size_t>(S * A), 0.0));
  env.features.dims.assign(H, d);
  env.features.phi.assign(
      H, std::vector<double>(static_cast<std::size_t>(S * A * d), 0.0));
  env.balls.radius.resize(H);
  for (int t = 0; t < H; ++t) {
    env.balls.radius[static_cast<std::size_t>(t)] =
        std::sqrt(static_cast<double>(d)) * static_cast<double>(H - t);
    for (int s = 0; s < S; ++s) {
      for (int a = 0; a < A; ++a) {
        const int sa = s * A + a;
        env.r[t][static_cast<std::size_t>(sa)] = rewards.at(t).at(s).at(a);
        env.features.phi[t][static_cast<std::size_t>(sa * d + sa)] = 1.0;
        const auto& row = transitions.at(t).at(s).at(a);
        if (static_cast<int>(row.size()) != S)
          throw EnvError("make_tabular_onehot: transition row has wrong length");
        for (int sn = 0; sn < S; ++sn)
          env.p[t][static_cast<std::size_t>(sa * S + sn)] = row[sn];
      }
    }
  }
  env.meta = Json{{"generator", "tabular_onehot"},
                  {"n_states", S},
                  {"n_actions", A},
                  {"horizon", H}};
  validate_env(env);
  return env;
}

namespace {

std::vector<double> random_simplex(RngStream& rng, int n) {
  // Exponential spacings normalized to sum 1 (uniform on the simplex).
  std::vector<double> x(static_cast<std::size_t>(n));
  double total = 0.0;
  for (auto& v : x) {
    double u = rng.uniform();
    while (u <= 0.0) u = rng.uniform();
    v = -std::log(u);
    total += v;
  }
  for (auto& v : x) v /= total;
  return x;
}

}  // namespace

EpisodicLinearMDP make_random_tabular(int n_states, int n_actions, int horizon,
                                      std::uint64_t seed) {
  const int S = n_states, A = n_actions, H = horizon;
  std::vector<std::vector<std::vector<double>>> rewards(
      H, std::vector<std::vector<double>>(S, std::vector<double>(A)));
  std::vector<std::vector<std::vector<std::vector<double>>>> transitions(
      H, std::vector<std::vector<std::vector<double>>>(
             S, std::vector<std::vector<double>>(A)));
  for (int t = 0; t < H; ++t) {
    RngStream rng(seed, 0, 0, static_cast<std::uint64_t>(t));
    for (int s = 0; s < S; ++s) {
      for (int a = 0; a < A; ++a) {
        rewards[t][s][a] = rng.uniform();
        transitions[t][s][a] = random_simplex(rng, S);
      }
    }
  }
  EpisodicLinearMDP env = make_tabular_onehot(S, A, H, rewards, transitions);
  env.meta["seed"] = seed;
  return env;
}

EpisodicLinearMDP make_linear_mdp(int d, int n_states, int n_actions,
                                  int horizon, std::uint64_t seed) {
  const int S = n_states, A = n_actions, H = horizon;
  if (d < 1 || d > S * A)
    throw EnvError("make_linear_mdp: need 1 <= d <= S*A");
  EpisodicLinearMDP env;
  env.horizon = H;
  env.n_states = S;
  env.n_actions = A;
  env.start_state = 0;
  env.p.assign(H, std::vector<double>(static_cast<std::size_t>(S * A * S), 0.0));
  env.r.assign(H, std::vector<double>(static_cast<std::size_t>(S * A), 0.0));
  env.features.dims.assign(H, d);
  env.features.phi.assign(
      H, std::vector<double>(static_cast<std::size_t>(S * A * d), 0.0));
  env.balls.radius.resize(H);
  Json mu_meta = Json::array();
  Json eta_meta = Json::array();
  for (int t = 0; t < H; ++t) {
    RngStream rng(seed, 0, 1, static_cast<std::uint64_t>(t));
    env.balls.radius[static_cast<std::size_t>(t)] =
        std::sqrt(static_cast<double>(d)) * static_cast<double>(H - t);
    // d base next-state distributions and a reward head in [0,1]^d.
    std::vector<std::vector<double>> mu(static_cast<std::size_t>(d));
    std::vector<double> eta(static_cast<std::size_t>(d));
    for (int j = 0; j < d; ++j) mu[static_cast<std::size_t>(j)] = random_simplex(rng, S);
    for (int j = 0; j < d; ++j) eta[static_cast<std::size_t>(j)] = rng.uniform();
    for (int s = 0; s < S; ++s) {
      for (int a = 0; a < A; ++a) {
        const int sa = s * A + a;
        std::vector<double> phi;
        if (sa < d) {
          // Anchor pairs carry vertex features; with d = S*A this reduces to
          // the one-hot construction.
          phi.assign(static_cast<std::size_t>(d), 0.0);
          phi[static_cast<std::size_t>(sa)] = 1.0;
        } else {
          phi = random_simplex(rng, d);
        }
        double* phi_out =
            env.features.phi[t].data() + static_cast<std::size_t>(sa * d);
        std::copy(phi.begin(), phi.end(), phi_out);
        double rv = 0.0;
        for (int j = 0; j < d; ++j) {
          const double w = phi[static_cast<std::size_t>(j)];
          rv += w * eta[static_cast<std::size_t>(j)];
          for (int sn = 0; sn < S; ++sn) {
            env.p[t][static_cast<std::size_t>(sa * S + sn)] +=
                w * mu[static_cast<std::size_t>(j)][static_cast<std::size_t>(sn)];
          }
        }
        env.r[t][static_cast<std::size_t>(sa)] = rv;
      }
    }
    mu_meta.push_back(mu);
    eta_meta.push_back(eta);
  }
  env.meta = Json{{"generator", "linear_mdp"}, {"d", d},    {"n_states", S},
                  {"n_actions", A},            {"horizon", H}, {"seed", seed},
                  {"mu", mu_meta},             {"eta", eta_meta}};
  validate_env(env);
  return env;
}

EpisodicLinearMDP make_misspecified(const EpisodicLinearMDP& env, double eps,
                                    std::uint64_t seed) {
  if (eps < 0.0) throw EnvError("make_misspecified: eps must be >= 0");
  EpisodicLinearMDP out = env;
  Json pert_meta = Json::array();
  for (int t = 0; t < env.horizon; ++t) {
    RngStream rng(seed, 0, 2, static_cast<std::uint64_t>(t));
    Json row = Json::array();
    for (std::size_t sa = 0; sa < out.r[static_cast<std::size_t>(t)].size(); ++sa) {
      const double delta = rng.symmetric(eps);
      double& rv = out.r[static_cast<std::size_t>(t)][sa];
      rv = std::clamp(rv + delta, 0.0, 1.0);
      row.push_back(delta);
    }
    pert_meta.push_back(row);
  }
  out.meta = Json{{"generator", "misspecified"},
                  {"eps", eps},
                  {"seed", seed},
                  {"base", env.meta},
                  {"perturbations", pert_meta}};
  validate_env(out);
  return out;
}

EpisodicLinearMDP make_hard_bandit(int d, double eps, double gap,
                                   double sign_weight) {
  if (d < 2) throw EnvError("make_hard_bandit: need d >= 2");
  if (d > 12) throw EnvError("make_hard_bandit: d too large for enumeration (d > 12)");
  if (eps < 0.0 || !(gap > 0.0)) throw EnvError("make_hard_bandit: need eps >= 0, gap > 0");
  if (0.5 * gap + eps > 0.5)
    throw EnvError("make_hard_bandit: gap/2 + eps must be <= 0.5 to keep means in [0,1]");
  if (!(sign_weight > 0.0 && sign_weight < 1.0))
    throw EnvError("make_hard_bandit: sign_weight must be in (0,1)");
  const int A = 1 << d;
  const int dim = d + 1;  // sign block plus constant coordinate
  const double w = sign_weight;
  const double bias = std::sqrt(1.0 - w * w);
  const int bump = A - 1;  // all-minus action
  EpisodicLinearMDP env;
  env.horizon = 1;
  env.n_states = 1;
  env.n_actions = A;
  env.start_state = 0;
  env.p.assign(1, std::vector<double>(static_cast<std::size_t>(A), 1.0));
  env.r.assign(1, std::vector<double>(static_cast<std::size_t>(A), 0.0));
  env.features.dims.assign(1, dim);
  env.features.phi.assign(1, std::vector<double>(static_cast<std::size_t>(A * dim), 0.0));
  env.balls.radius.assign(1, std::sqrt(static_cast<double>(dim)));
  const double scale = w / std::sqrt(static_cast<double>(d));
  for (int a = 0; a < A; ++a) {
    double* phi = env.features.phi[0].data() + static_cast<std::size_t>(a * dim);
    for (int j = 0; j < d; ++j) phi[j] = ((a >> j) & 1) ? -scale : scale;
    phi[d] = bias;
    const double s1 = ((a >> 0) & 1) ? -1.0 : 1.0;
    double mean = 0.5 + 0.5 * gap * s1;
    if (a == bump) mean += eps;
    env.r[0][static_cast<std::size_t>(a)] = mean;
  }
  env.noise_kind = RewardNoise::Bernoulli;
  // Realizable parameter for the unbumped means, recorded for introspection.
  std::vector<double> theta(static_cast<std::size_t>(dim), 0.0);
  theta[0] = 0.5 * gap / scale;
  theta[static_cast<std::size_t>(d)] = 0.5 / bias;
  env.meta = Json{{"generator", "hard_bandit"},
                  {"d", d},
                  {"eps", eps},
                  {"gap", gap},
                  {"sign_weight", w},
                  {"bump_action", bump},
                  {"theta", theta},
                  {"note", "demonstrative stand-in hard instance"}};
  validate_env(env);
  return env;
}

}  // namespace eleanor
