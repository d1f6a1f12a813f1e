#include "eleanor/agents.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "eleanor/kernels.hpp"

namespace eleanor {

double radius(const RadiusConfig& cfg, int horizon, int t, int d_t, double D_t,
              int k) {
  const double sigma_v =
      static_cast<double>(horizon - t - 1) + cfg.sigma_noise;
  const double delta_prime =
      cfg.delta / (2.0 * static_cast<double>(horizon) *
                   static_cast<double>(cfg.k_max));
  const double log_term = std::log((cfg.lambda + static_cast<double>(k)) /
                                   (cfg.lambda * delta_prime));
  const double est = cfg.c1 * sigma_v *
                     std::sqrt(static_cast<double>(d_t) * log_term);
  const double reg = cfg.c2 * std::sqrt(cfg.lambda) * D_t;
  const double mis = cfg.c3 * cfg.ibe_term *
                     std::sqrt(static_cast<double>(d_t) * static_cast<double>(k));
  return est + reg + mis;
}

namespace {

double clip(double v, double lo, double hi) {
  return std::min(std::max(v, lo), hi);
}

int argmax_action(const EnvFeatures& fv, int t, int s,
                  std::span<const double> theta) {
  int best_a = 0;
  double best = 0.0;
  for (int a = 0; a < fv.n_actions; ++a) {
    const auto phi = fv.phi(t, s, a);
    const double v = kernels::dot(phi.data(), theta.data(), phi.size());
    if (a == 0 || v > best) {
      best = v;
      best_a = a;
    }
  }
  return best_a;
}

// Per-episode planning workspace. The regression target of every sample at
// timestep t depends on theta_bar_{t+1} only through the next-state values,
// so the dataset collapses into one bucket vector per next state:
//   theta_hat_t = w0_t + W_t * V_{t+1},
// where w0_t = Sigma^{-1} sum_i phi_i r_i and column s' of W_t is
// Sigma^{-1} sum_{i: s'_i = s'} phi_i.
struct PlanContext {
  const EnvFeatures& fv;
  int horizon;
  std::vector<const SpdMatrix*> sigma;
  std::vector<double> radii;
  std::vector<Vec> w0;       // per t, dim d_t
  std::vector<Vec> wcols;    // per t, flat S columns of length d_t
  Vec bonus_start;           // per action at (t=0, s1)
  std::vector<int> search_dims;  // d_t for t = 1..H-1
  std::vector<std::size_t> z_offset;  // offset of u_t inside z, per t
  int search_total = 0;

  // scratch
  std::vector<Vec> theta_bar;
  Vec values;

  PlanContext(const GramState& grams, const RadiusConfig& cfg,
              const EnvFeatures& fv_in, int k)
      : fv(fv_in), horizon(fv_in.horizon) {
    sigma.resize(static_cast<std::size_t>(horizon));
    radii.resize(static_cast<std::size_t>(horizon));
    w0.resize(static_cast<std::size_t>(horizon));
    wcols.resize(static_cast<std::size_t>(horizon));
    theta_bar.assign(static_cast<std::size_t>(horizon), {});
    values.assign(static_cast<std::size_t>(fv.n_states), 0.0);
    for (int t = 0; t < horizon; ++t) {
      const auto& gram = grams.per_t[static_cast<std::size_t>(t)];
      const int d = fv.dim(t);
      sigma[static_cast<std::size_t>(t)] = &gram.sigma;
      radii[static_cast<std::size_t>(t)] =
          radius(cfg, horizon, t, d, fv.ball(t), k);
      Vec phir(static_cast<std::size_t>(d), 0.0);
      Vec buckets(static_cast<std::size_t>(d * fv.n_states), 0.0);
      for (const auto& sample : gram.data) {
        kernels::axpy(sample.reward, sample.phi.data(), phir.data(),
                      phir.size());
        kernels::axpy(1.0, sample.phi.data(),
                      buckets.data() + static_cast<std::size_t>(sample.s_next * d),
                      static_cast<std::size_t>(d));
      }
      w0[static_cast<std::size_t>(t)] = gram.sigma.solve(phir);
      Vec cols(static_cast<std::size_t>(d * fv.n_states));
      for (int sn = 0; sn < fv.n_states; ++sn) {
        const Vec col = gram.sigma.solve(
            {buckets.data() + static_cast<std::size_t>(sn * d),
             static_cast<std::size_t>(d)});
        std::copy(col.begin(), col.end(),
                  cols.begin() + static_cast<std::size_t>(sn * d));
      }
      wcols[static_cast<std::size_t>(t)] = std::move(cols);
      theta_bar[static_cast<std::size_t>(t)].assign(static_cast<std::size_t>(d),
                                                    0.0);
    }
    bonus_start.resize(static_cast<std::size_t>(fv.n_actions));
    for (int a = 0; a < fv.n_actions; ++a) {
      bonus_start[static_cast<std::size_t>(a)] =
          sigma[0]->inv_maha_norm(fv.phi(0, fv.start_state, a));
    }
    z_offset.assign(static_cast<std::size_t>(horizon), 0);
    for (int t = 1; t < horizon; ++t) {
      z_offset[static_cast<std::size_t>(t)] =
          static_cast<std::size_t>(search_total);
      search_dims.push_back(fv.dim(t));
      search_total += fv.dim(t);
    }
  }

  // theta_bar_t = theta_hat_t + radius_t * L^{-T} u_t
  void apply_perturbation(int t, std::span<const double> u, Vec& theta) const {
    if (radii[static_cast<std::size_t>(t)] == 0.0) return;
    const Vec dir = sigma[static_cast<std::size_t>(t)]->solve_upper(u);
    kernels::axpy(radii[static_cast<std::size_t>(t)], dir.data(), theta.data(),
                  theta.size());
  }

  void next_state_values(int t_next, const Vec& theta, Vec& out) const {
    const double hi = static_cast<double>(horizon - t_next);
    for (int sn = 0; sn < fv.n_states; ++sn) {
      double best = 0.0;
      for (int a = 0; a < fv.n_actions; ++a) {
        const auto phi = fv.phi(t_next, sn, a);
        const double v = kernels::dot(phi.data(), theta.data(), phi.size());
        if (a == 0 || v > best) best = v;
      }
      out[static_cast<std::size_t>(sn)] = clip(best, 0.0, hi);
    }
  }

  void theta_hat(int t, const Vec& values_next, Vec& out) const {
    const int d = fv.dim(t);
    out = w0[static_cast<std::size_t>(t)];
    const auto& cols = wcols[static_cast<std::size_t>(t)];
    for (int sn = 0; sn < fv.n_states; ++sn) {
      kernels::axpy(values_next[static_cast<std::size_t>(sn)],
                    cols.data() + static_cast<std::size_t>(sn * d), out.data(),
                    static_cast<std::size_t>(d));
    }
  }

  // J(u_1..u_{H-1}) with the first-timestep perturbation maximized in closed
  // form: J = max_a <phi, theta_hat_0> + radius_0 * ||phi||_{Sigma_0^{-1}}.
  double eval(std::span<const double> z) {
    for (int t = horizon - 1; t >= 1; --t) {
      Vec& theta = theta_bar[static_cast<std::size_t>(t)];
      if (t == horizon - 1) {
        theta = w0[static_cast<std::size_t>(t)];
      } else {
        next_state_values(t + 1, theta_bar[static_cast<std::size_t>(t + 1)],
                          values);
        theta_hat(t, values, theta);
      }
      apply_perturbation(
          t, z.subspan(z_offset[static_cast<std::size_t>(t)],
                       static_cast<std::size_t>(fv.dim(t))),
          theta);
    }
    Vec& theta0 = theta_bar[0];
    if (horizon == 1) {
      theta0 = w0[0];
    } else {
      next_state_values(1, theta_bar[1], values);
      theta_hat(0, values, theta0);
    }
    double best = 0.0;
    for (int a = 0; a < fv.n_actions; ++a) {
      const auto phi = fv.phi(0, fv.start_state, a);
      const double v =
          kernels::dot(phi.data(), theta0.data(), phi.size()) +
          radii[0] * bonus_start[static_cast<std::size_t>(a)];
      if (a == 0 || v > best) best = v;
    }
    return best;
  }

  // Reconstructs the full per-timestep ellipsoid parameters for the chosen z.
  PlanResult materialize(std::span<const double> z) {
    PlanResult out;
    out.value = eval(z);  // fills theta_bar for t >= 1 and theta_hat chain
    out.per_t.resize(static_cast<std::size_t>(horizon));
    std::size_t off = 0;
    for (int t = 1; t < horizon; ++t) {
      auto& ep = out.per_t[static_cast<std::size_t>(t)];
      const int d = fv.dim(t);
      ep.radius = radii[static_cast<std::size_t>(t)];
      ep.u.assign(z.begin() + static_cast<std::ptrdiff_t>(off),
                  z.begin() + static_cast<std::ptrdiff_t>(off) + d);
      ep.theta_bar = theta_bar[static_cast<std::size_t>(t)];
      ep.theta_hat = ep.theta_bar;
      if (ep.radius != 0.0) {
        const Vec dir = sigma[static_cast<std::size_t>(t)]->solve_upper(ep.u);
        for (int j = 0; j < d; ++j)
          ep.theta_hat[static_cast<std::size_t>(j)] -=
              ep.radius * dir[static_cast<std::size_t>(j)];
      }
      off += static_cast<std::size_t>(d);
    }
    // Closed-form first timestep: u_0 aligned with the whitened feature of
    // the UCB-maximizing action.
    auto& ep0 = out.per_t[0];
    const int d0 = fv.dim(0);
    ep0.radius = radii[0];
    if (horizon == 1) {
      ep0.theta_hat = w0[0];
    } else {
      next_state_values(1, theta_bar[1], values);
      theta_hat(0, values, ep0.theta_hat);
    }
    int best_a = 0;
    double best = 0.0;
    for (int a = 0; a < fv.n_actions; ++a) {
      const auto phi = fv.phi(0, fv.start_state, a);
      const double v =
          kernels::dot(phi.data(), ep0.theta_hat.data(), phi.size()) +
          ep0.radius * bonus_start[static_cast<std::size_t>(a)];
      if (a == 0 || v > best) {
        best = v;
        best_a = a;
      }
    }
    ep0.u.assign(static_cast<std::size_t>(d0), 0.0);
    ep0.theta_bar = ep0.theta_hat;
    const auto phi_star = fv.phi(0, fv.start_state, best_a);
    const double bonus = bonus_start[static_cast<std::size_t>(best_a)];
    if (ep0.radius > 0.0 && bonus > 0.0) {
      // u = L^{-1} phi / ||L^{-1} phi||; theta_bar picks up radius * L^{-T} u.
      Vec u = sigma[0]->solve_lower(phi_star);
      const double n = std::sqrt(kernels::sumsq(u.data(), u.size()));
      for (auto& v : u) v /= n;
      ep0.u = std::move(u);
      const Vec dir = sigma[0]->solve_upper(ep0.u);
      kernels::axpy(ep0.radius, dir.data(), ep0.theta_bar.data(),
                    ep0.theta_bar.size());
    }
    return out;
  }
};

void project_blocks(Vec& z, const std::vector<int>& dims) {
  std::size_t off = 0;
  for (const int d : dims) {
    double nsq = 0.0;
    for (int j = 0; j < d; ++j) {
      const double v = z[off + static_cast<std::size_t>(j)];
      nsq += v * v;
    }
    if (nsq > 1.0) {
      const double s = 1.0 / std::sqrt(nsq);
      for (int j = 0; j < d; ++j) z[off + static_cast<std::size_t>(j)] *= s;
    }
    off += static_cast<std::size_t>(d);
  }
}

// Unit-ball grids, nested across odd resolutions: linspace for d=1, origin
// plus radius x angle shells for d=2.
std::vector<Vec> ball_grid(int d, int resolution) {
  std::vector<Vec> pts;
  if (d == 1) {
    for (int i = 0; i < resolution; ++i) {
      pts.push_back({-1.0 + 2.0 * static_cast<double>(i) / (resolution - 1)});
    }
  } else if (d == 2) {
    pts.push_back({0.0, 0.0});
    const int n_r = resolution - 1;
    const int n_ang = resolution - 1;
    constexpr double two_pi = 6.283185307179586476925286766559;
    for (int i = 1; i <= n_r; ++i) {
      const double r = static_cast<double>(i) / n_r;
      for (int j = 0; j < n_ang; ++j) {
        const double ang = two_pi * static_cast<double>(j) / n_ang;
        pts.push_back({r * std::cos(ang), r * std::sin(ang)});
      }
    }
  } else {
    throw DimensionError("ball_grid: only d in {1,2} is gridded");
  }
  return pts;
}

// Best point of a coarse product grid over the searched balls, or nullopt
// when the blocks are too large to enumerate. The FD ascent has exactly zero
// gradient on clip plateaus, so a coarse sweep gives it a start on the right
// piece.
std::optional<Vec> coarse_grid_seed(PlanContext& ctx, int resolution) {
  std::vector<std::vector<Vec>> grids;
  double combos = 1.0;
  for (const int d : ctx.search_dims) {
    if (d > 2) return std::nullopt;
    grids.push_back(ball_grid(d, resolution));
    combos *= static_cast<double>(grids.back().size());
    if (combos > 8192.0) return std::nullopt;
  }
  Vec z(static_cast<std::size_t>(ctx.search_total), 0.0);
  Vec best_z = z;
  double best = -std::numeric_limits<double>::infinity();
  std::vector<std::size_t> idx(grids.size(), 0);
  for (;;) {
    std::size_t off = 0;
    for (std::size_t g = 0; g < grids.size(); ++g) {
      const Vec& pt = grids[g][idx[g]];
      std::copy(pt.begin(), pt.end(), z.begin() + static_cast<std::ptrdiff_t>(off));
      off += pt.size();
    }
    const double val = ctx.eval(z);
    if (val > best) {
      best = val;
      best_z = z;
    }
    std::size_t g = 0;
    for (; g < grids.size(); ++g) {
      if (++idx[g] < grids[g].size()) break;
      idx[g] = 0;
    }
    if (g == grids.size()) break;
  }
  return best_z;
}

}  // namespace

Vec lsq_center(const TimestepGram& gram, const EnvFeatures& fv, int t,
               std::span<const double> theta_next) {
  const int d = fv.dim(t);
  const bool terminal = (t == fv.horizon - 1);
  if (!terminal && static_cast<int>(theta_next.size()) != fv.dim(t + 1))
    throw DimensionError("lsq_center: theta_next dimension mismatch");
  Vec rhs(static_cast<std::size_t>(d), 0.0);
  const double hi = static_cast<double>(fv.horizon - t - 1);
  for (const auto& sample : gram.data) {
    double y = sample.reward;
    if (!terminal) {
      double best = 0.0;
      for (int a = 0; a < fv.n_actions; ++a) {
        const auto phi = fv.phi(t + 1, sample.s_next, a);
        const double v =
            kernels::dot(phi.data(), theta_next.data(), phi.size());
        if (a == 0 || v > best) best = v;
      }
      y += clip(best, 0.0, hi);
    }
    kernels::axpy(y, sample.phi.data(), rhs.data(), rhs.size());
  }
  return gram.sigma.solve(rhs);
}

PlanResult eleanor_plan(const GramState& grams, const RadiusConfig& cfg,
                        const PlannerConfig& pcfg, const EnvFeatures& fv,
                        int k, std::uint64_t seed, std::uint64_t replication) {
  PlanContext ctx(grams, cfg, fv, k);
  const int Z = ctx.search_total;
  Vec zero(static_cast<std::size_t>(Z), 0.0);
  if (Z == 0) return ctx.materialize(zero);

  bool any_radius = false;
  for (int t = 1; t < fv.horizon; ++t)
    any_radius = any_radius || ctx.radii[static_cast<std::size_t>(t)] != 0.0;
  if (!any_radius) return ctx.materialize(zero);

  Vec best_z = zero;
  double best_val = ctx.eval(zero);

  std::vector<Vec> starts;
  starts.push_back(zero);
  if (const auto seeded = coarse_grid_seed(ctx, 9)) starts.push_back(*seeded);
  for (int restart = 1; restart <= pcfg.restarts; ++restart) {
    RngStream rng(seed, replication, static_cast<std::uint64_t>(k),
                  0x9000ULL + static_cast<std::uint64_t>(restart));
    Vec z(static_cast<std::size_t>(Z), 0.0);
    std::size_t off = 0;
    for (const int d : ctx.search_dims) {
      const Vec u = rng.ball_point(d, 1.0);
      std::copy(u.begin(), u.end(), z.begin() + static_cast<std::ptrdiff_t>(off));
      off += static_cast<std::size_t>(d);
    }
    starts.push_back(std::move(z));
  }

  Vec grad(static_cast<std::size_t>(Z));
  for (const auto& start : starts) {
    Vec z = start;
    double val = ctx.eval(z);
    double step = pcfg.step0;
    for (int it = 0; it < pcfg.iters && step > 1e-6; ++it) {
      for (int j = 0; j < Z; ++j) {
        const double saved = z[static_cast<std::size_t>(j)];
        z[static_cast<std::size_t>(j)] = saved + pcfg.fd_step;
        const double up = ctx.eval(z);
        z[static_cast<std::size_t>(j)] = saved - pcfg.fd_step;
        const double dn = ctx.eval(z);
        z[static_cast<std::size_t>(j)] = saved;
        grad[static_cast<std::size_t>(j)] = up - dn;
      }
      const double gn = std::sqrt(kernels::sumsq(grad.data(), grad.size()));
      if (gn <= 1e-14) break;
      Vec trial = z;
      kernels::axpy(step / gn, grad.data(), trial.data(), trial.size());
      project_blocks(trial, ctx.search_dims);
      const double trial_val = ctx.eval(trial);
      if (trial_val > val) {
        z = std::move(trial);
        val = trial_val;
      } else {
        step *= 0.5;
      }
    }
    if (val > best_val) {
      best_val = val;
      best_z = z;
    }
  }
  return ctx.materialize(best_z);
}

double grid_oracle_plan(const GramState& grams, const RadiusConfig& cfg,
                        const EnvFeatures& fv, int k, int resolution) {
  int total = 0;
  for (int t = 0; t < fv.horizon; ++t) total += fv.dim(t);
  if (total > 6)
    throw DimensionError("grid_oracle_plan: dimension budget exceeded");
  PlanContext ctx(grams, cfg, fv, k);
  if (ctx.search_total == 0) {
    Vec empty;
    return ctx.eval(empty);
  }

  std::vector<std::vector<Vec>> grids;
  for (const int d : ctx.search_dims) grids.push_back(ball_grid(d, resolution));

  Vec z(static_cast<std::size_t>(ctx.search_total), 0.0);
  std::vector<std::size_t> idx(grids.size(), 0);
  double best = -std::numeric_limits<double>::infinity();
  for (;;) {
    std::size_t off = 0;
    for (std::size_t g = 0; g < grids.size(); ++g) {
      const Vec& pt = grids[g][idx[g]];
      std::copy(pt.begin(), pt.end(), z.begin() + static_cast<std::ptrdiff_t>(off));
      off += pt.size();
    }
    best = std::max(best, ctx.eval(z));
    std::size_t g = 0;
    for (; g < grids.size(); ++g) {
      if (++idx[g] < grids[g].size()) break;
      idx[g] = 0;
    }
    if (g == grids.size()) break;
  }
  return best;
}

std::vector<std::vector<int>> PlanResult::greedy_policy(
    const EnvFeatures& fv) const {
  std::vector<std::vector<int>> out(
      static_cast<std::size_t>(fv.horizon),
      std::vector<int>(static_cast<std::size_t>(fv.n_states), 0));
  for (int t = 0; t < fv.horizon; ++t) {
    for (int s = 0; s < fv.n_states; ++s) {
      out[static_cast<std::size_t>(t)][static_cast<std::size_t>(s)] =
          argmax_action(fv, t, s, per_t[static_cast<std::size_t>(t)].theta_bar);
    }
  }
  return out;
}

EleanorAgent::EleanorAgent(const EnvFeatures& fv, RadiusConfig cfg,
                           PlannerConfig pcfg, std::uint64_t seed,
                           std::uint64_t replication)
    : fv_(fv),
      cfg_(cfg),
      pcfg_(pcfg),
      seed_(seed),
      replication_(replication),
      grams_(GramState::init(fv, cfg.lambda)) {}

void EleanorAgent::begin_episode(int k) {
  if (in_episode_ && next_t_ != fv_.horizon)
    throw LifecycleError("begin_episode: previous episode is not finished");
  episode_ = k;
  plan_ = eleanor_plan(grams_, cfg_, pcfg_, fv_, k, seed_, replication_);
  next_t_ = 0;
  awaiting_observe_ = false;
  in_episode_ = true;
}

int EleanorAgent::act(int t, int s) {
  if (!in_episode_) throw LifecycleError("act: begin_episode was not called");
  if (awaiting_observe_) throw LifecycleError("act: observe is pending");
  if (t != next_t_) throw LifecycleError("act: timestep out of order");
  awaiting_observe_ = true;
  return argmax_action(fv_, t, s,
                       plan_.per_t[static_cast<std::size_t>(t)].theta_bar);
}

void EleanorAgent::observe(const Transition& tr) {
  if (!in_episode_ || !awaiting_observe_ || tr.t != next_t_)
    throw LifecycleError("observe: transition out of order");
  Sample sample;
  const auto phi = fv_.phi(tr.t, tr.s, tr.a);
  sample.phi.assign(phi.begin(), phi.end());
  sample.reward = tr.reward;
  sample.s_next = tr.s_next;
  grams_.per_t[static_cast<std::size_t>(tr.t)].absorb(std::move(sample));
  awaiting_observe_ = false;
  ++next_t_;
}

std::vector<std::vector<int>> EleanorAgent::policy_tables() const {
  return plan_.greedy_policy(fv_);
}

MisLinUcbAgent::MisLinUcbAgent(const EnvFeatures& fv, RadiusConfig cfg)
    : fv_(fv),
      cfg_(cfg),
      dim_(fv.dim(0)),
      D_(fv.ball(0)),
      sigma_(SpdMatrix::scaled_identity(static_cast<std::size_t>(fv.dim(0)),
                                        cfg.lambda)),
      xy_(static_cast<std::size_t>(fv.dim(0)), 0.0) {
  if (fv.horizon != 1)
    throw LifecycleError("mislinucb: requires a horizon-1 environment");
}

Vec MisLinUcbAgent::theta_hat() const { return sigma_.solve(xy_); }

double MisLinUcbAgent::ucb_value(std::span<const double> phi, int k) const {
  const Vec th = theta_hat();
  const double r = radius(cfg_, 1, 0, dim_, D_, k);
  return kernels::dot(phi.data(), th.data(), phi.size()) +
         r * sigma_.inv_maha_norm(phi);
}

int MisLinUcbAgent::choose(const std::vector<std::span<const double>>& arms,
                           int k) const {
  const Vec th = theta_hat();
  const double r = radius(cfg_, 1, 0, dim_, D_, k);
  int best_a = 0;
  double best = 0.0;
  for (std::size_t a = 0; a < arms.size(); ++a) {
    const double v = kernels::dot(arms[a].data(), th.data(), arms[a].size()) +
                     r * sigma_.inv_maha_norm(arms[a]);
    if (a == 0 || v > best) {
      best = v;
      best_a = static_cast<int>(a);
    }
  }
  return best_a;
}

void MisLinUcbAgent::update(std::span<const double> phi, double reward) {
  sigma_ = sigma_.rank1_updated(phi);
  kernels::axpy(reward, phi.data(), xy_.data(), xy_.size());
}

void MisLinUcbAgent::begin_episode(int k) {
  episode_ = k;
  awaiting_observe_ = false;
  const Vec th = theta_hat();
  const double r = radius(cfg_, 1, 0, dim_, D_, k);
  double best = 0.0;
  for (int a = 0; a < fv_.n_actions; ++a) {
    const auto phi = fv_.phi(0, fv_.start_state, a);
    const double v = kernels::dot(phi.data(), th.data(), phi.size()) +
                     r * sigma_.inv_maha_norm(phi);
    if (a == 0 || v > best) best = v;
  }
  planned_ = best;
}

int MisLinUcbAgent::act(int t, int s) {
  if (t != 0) throw LifecycleError("mislinucb: act expects t = 0");
  if (awaiting_observe_) throw LifecycleError("mislinucb: observe is pending");
  awaiting_observe_ = true;
  std::vector<std::span<const double>> arms;
  arms.reserve(static_cast<std::size_t>(fv_.n_actions));
  for (int a = 0; a < fv_.n_actions; ++a) arms.push_back(fv_.phi(0, s, a));
  return choose(arms, episode_);
}

void MisLinUcbAgent::observe(const Transition& tr) {
  if (!awaiting_observe_) throw LifecycleError("mislinucb: act must come first");
  update(fv_.phi(tr.t, tr.s, tr.a), tr.reward);
  awaiting_observe_ = false;
}

std::vector<std::vector<int>> MisLinUcbAgent::policy_tables() const {
  std::vector<std::vector<int>> out(
      1, std::vector<int>(static_cast<std::size_t>(fv_.n_states), 0));
  for (int s = 0; s < fv_.n_states; ++s) {
    std::vector<std::span<const double>> arms;
    for (int a = 0; a < fv_.n_actions; ++a) arms.push_back(fv_.phi(0, s, a));
    out[0][static_cast<std::size_t>(s)] = choose(arms, episode_);
  }
  return out;
}

int UniformRandomAgent::act(int t, int s) {
  (void)s;
  RngStream rng(seed_, replication_, static_cast<std::uint64_t>(episode_),
                0x8000ULL + static_cast<std::uint64_t>(t));
  return rng.uniform_index(fv_.n_actions);
}

}  // namespace eleanor
