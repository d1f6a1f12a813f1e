#include "eleanor/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>
#include <thread>

#include "eleanor/env_io.hpp"
#include "eleanor/oracle.hpp"

namespace eleanor {

namespace {

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void require_keys(const Json& obj, const std::vector<std::string>& allowed,
                  const std::string& path) {
  for (const auto& [key, value] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ConfigError("unknown key '" + path + key + "'");
    }
  }
}

template <typename T>
T get_or(const Json& obj, const std::string& key, T fallback) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const std::exception& e) {
    throw ConfigError("bad value for '" + key + "': " + e.what());
  }
}

template <typename T>
T get_required(const Json& obj, const std::string& key,
               const std::string& path) {
  if (!obj.contains(key))
    throw ConfigError("missing required key '" + path + key + "'");
  try {
    return obj.at(key).get<T>();
  } catch (const std::exception& e) {
    throw ConfigError("bad value for '" + path + key + "': " + e.what());
  }
}

void validate_env_spec(const Json& spec, const std::string& path) {
  if (!spec.is_object()) throw ConfigError(path + ": must be an object");
  if (spec.contains("file")) {
    require_keys(spec, {"file"}, path + ".");
    return;
  }
  const std::string gen = get_required<std::string>(spec, "generator", path + ".");
  if (spec.contains("reward_noise") &&
      !(spec.at("reward_noise").is_number() &&
        spec.at("reward_noise").get<double>() >= 0.0))
    throw ConfigError(path + ".reward_noise: must be a nonnegative number");
  if (gen == "tabular_onehot") {
    require_keys(spec, {"generator", "n_states", "n_actions", "horizon", "seed",
                        "reward_noise"},
                 path + ".");
    get_required<int>(spec, "n_states", path + ".");
    get_required<int>(spec, "n_actions", path + ".");
    get_required<int>(spec, "horizon", path + ".");
  } else if (gen == "linear_mdp") {
    require_keys(spec, {"generator", "d", "n_states", "n_actions", "horizon",
                        "seed", "reward_noise"},
                 path + ".");
    get_required<int>(spec, "d", path + ".");
    get_required<int>(spec, "n_states", path + ".");
    get_required<int>(spec, "n_actions", path + ".");
    get_required<int>(spec, "horizon", path + ".");
  } else if (gen == "misspecified") {
    require_keys(spec, {"generator", "eps", "seed", "base", "reward_noise"},
                 path + ".");
    get_required<double>(spec, "eps", path + ".");
    if (!spec.contains("base"))
      throw ConfigError(path + ": misspecified env needs a 'base' spec");
    validate_env_spec(spec.at("base"), path + ".base");
  } else if (gen == "hard_bandit") {
    require_keys(spec, {"generator", "d", "eps", "gap", "sign_weight"},
                 path + ".");
    get_required<int>(spec, "d", path + ".");
    get_required<double>(spec, "eps", path + ".");
    get_required<double>(spec, "gap", path + ".");
  } else {
    throw ConfigError(path + ": unknown generator '" + gen + "'");
  }
}

}  // namespace

EpisodicLinearMDP EnvSpec::build(std::uint64_t replication_seed) const {
  if (spec.contains("file")) return load_env(spec.at("file").get<std::string>());
  const std::string gen = spec.at("generator").get<std::string>();
  const std::uint64_t seed =
      spec.contains("seed") ? spec.at("seed").get<std::uint64_t>()
                            : replication_seed;
  // Optional bounded reward noise, uniform on [-sigma, sigma].
  auto with_noise = [&](EpisodicLinearMDP env) {
    const double sigma = get_or<double>(spec, "reward_noise", 0.0);
    if (sigma > 0.0) {
      env.noise_kind = RewardNoise::Uniform;
      env.noise_param = sigma;
    }
    return env;
  };
  if (gen == "tabular_onehot") {
    return with_noise(make_random_tabular(spec.at("n_states").get<int>(),
                                          spec.at("n_actions").get<int>(),
                                          spec.at("horizon").get<int>(), seed));
  }
  if (gen == "linear_mdp") {
    return with_noise(make_linear_mdp(spec.at("d").get<int>(),
                                      spec.at("n_states").get<int>(),
                                      spec.at("n_actions").get<int>(),
                                      spec.at("horizon").get<int>(), seed));
  }
  if (gen == "misspecified") {
    EnvSpec base{spec.at("base")};
    return with_noise(make_misspecified(base.build(replication_seed),
                                        spec.at("eps").get<double>(), seed));
  }
  if (gen == "hard_bandit") {
    return make_hard_bandit(spec.at("d").get<int>(),
                            spec.at("eps").get<double>(),
                            spec.at("gap").get<double>(),
                            get_or<double>(spec, "sign_weight", 0.5));
  }
  throw ConfigError("unknown generator '" + gen + "'");
}

EnvSpec parse_env_spec_string(const std::string& text) {
  if (text.find(':') == std::string::npos || std::filesystem::exists(text)) {
    EnvSpec out;
    out.spec = Json{{"file", text}};
    return out;
  }
  const auto colon = text.find(':');
  Json spec;
  spec["generator"] = text.substr(0, colon);
  std::stringstream rest(text.substr(colon + 1));
  std::string item;
  while (std::getline(rest, item, ',')) {
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos)
      throw ConfigError("bad env spec item '" + item + "' (expected key=value)");
    std::string key = item.substr(0, eq);
    const std::string value = item.substr(eq + 1);
    if (key == "S") key = "n_states";
    if (key == "A") key = "n_actions";
    if (key == "H") key = "horizon";
    try {
      if (value.find_first_not_of("0123456789") == std::string::npos) {
        spec[key] = std::stoll(value);
      } else {
        spec[key] = std::stod(value);
      }
    } catch (const std::exception&) {
      throw ConfigError("bad env spec value '" + item + "'");
    }
  }
  // Shorthand: misspecified over a linear-mdp base shares the flat key list.
  if (spec.at("generator") == "misspecified" && !spec.contains("base")) {
    Json base;
    base["generator"] = "linear_mdp";
    for (const char* key : {"d", "n_states", "n_actions", "horizon", "seed"}) {
      if (spec.contains(key)) {
        base[key] = spec.at(key);
        if (std::string(key) != "seed") spec.erase(key);
      }
    }
    spec["base"] = base;
  }
  EnvSpec out;
  out.spec = spec;
  validate_env_spec(out.spec, "env");
  return out;
}

ExperimentConfig ExperimentConfig::from_json(const Json& doc) {
  if (!doc.is_object()) throw ConfigError("config root must be an object");
  require_keys(doc,
               {"env", "agent", "episodes", "seeds", "k_max", "threads",
                "sweep"},
               "");
  ExperimentConfig cfg;
  if (!doc.contains("env")) throw ConfigError("missing required key 'env'");
  validate_env_spec(doc.at("env"), "env");
  cfg.env.spec = doc.at("env");

  const Json agent = doc.contains("agent") ? doc.at("agent") : Json::object();
  require_keys(agent, {"name", "radius", "planner"}, "agent.");
  cfg.agent.name = get_required<std::string>(agent, "name", "agent.");
  static const std::vector<std::string> kAgents = {
      "eleanor", "greedy_lsvi", "mislinucb", "uniform_random"};
  if (std::find(kAgents.begin(), kAgents.end(), cfg.agent.name) == kAgents.end())
    throw ConfigError("unknown agent '" + cfg.agent.name + "'");
  const Json rad = agent.contains("radius") ? agent.at("radius") : Json::object();
  require_keys(rad,
               {"lambda", "delta", "sigma_noise", "ibe_term", "c1", "c2", "c3"},
               "agent.radius.");
  cfg.agent.radius.lambda = get_or<double>(rad, "lambda", 1.0);
  cfg.agent.radius.delta = get_or<double>(rad, "delta", 0.05);
  cfg.agent.radius.sigma_noise = get_or<double>(rad, "sigma_noise", 0.0);
  cfg.agent.radius.ibe_term = get_or<double>(rad, "ibe_term", 0.0);
  cfg.agent.radius.c1 = get_or<double>(rad, "c1", 1.0);
  cfg.agent.radius.c2 = get_or<double>(rad, "c2", 1.0);
  cfg.agent.radius.c3 = get_or<double>(rad, "c3", 1.0);
  if (!(cfg.agent.radius.lambda > 0.0))
    throw ConfigError("agent.radius.lambda must be > 0");
  if (!(cfg.agent.radius.delta > 0.0 && cfg.agent.radius.delta < 1.0))
    throw ConfigError("agent.radius.delta must be in (0,1)");
  if (cfg.agent.radius.sigma_noise < 0.0 || cfg.agent.radius.ibe_term < 0.0 ||
      cfg.agent.radius.c1 < 0.0 || cfg.agent.radius.c2 < 0.0 ||
      cfg.agent.radius.c3 < 0.0)
    throw ConfigError("agent.radius terms must be nonnegative");
  const Json pl = agent.contains("planner") ? agent.at("planner") : Json::object();
  require_keys(pl, {"restarts", "iters", "fd_step", "step"}, "agent.planner.");
  cfg.agent.planner.restarts = get_or<int>(pl, "restarts", 8);
  cfg.agent.planner.iters = get_or<int>(pl, "iters", 300);
  cfg.agent.planner.fd_step = get_or<double>(pl, "fd_step", 1e-3);
  cfg.agent.planner.step0 = get_or<double>(pl, "step", 0.1);

  cfg.episodes = get_required<int>(doc, "episodes", "");
  if (cfg.episodes < 1) throw ConfigError("episodes must be >= 1");
  cfg.seeds = get_required<std::vector<std::uint64_t>>(doc, "seeds", "");
  if (cfg.seeds.empty()) throw ConfigError("seeds must be nonempty");
  cfg.agent.radius.k_max = get_or<int>(doc, "k_max", cfg.episodes);
  if (cfg.agent.radius.k_max < 1) throw ConfigError("k_max must be >= 1");
  cfg.threads = get_or<int>(doc, "threads", 0);
  if (doc.contains("sweep")) cfg.sweep = doc.at("sweep");
  return cfg;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError("config parse error in " + path + ": " + e.what());
  }
  return from_json(doc);
}

std::string RegretCurve::to_csv() const {
  std::string out =
      "episode,per_episode_regret,cumulative_regret,planned_value,vstar\n";
  for (std::size_t i = 0; i < per_episode.size(); ++i) {
    out += std::to_string(i + 1);
    out += ',';
    out += fmt17(per_episode[i]);
    out += ',';
    out += fmt17(cumulative[i]);
    out += ',';
    out += fmt17(planned[i]);
    out += ',';
    out += fmt17(vstar);
    out += '\n';
  }
  return out;
}

std::string AggregateCurve::to_csv() const {
  std::string out = "episode,mean_cum,regret_p10,regret_p90,n_seeds\n";
  for (std::size_t i = 0; i < mean_cum.size(); ++i) {
    out += std::to_string(i + 1);
    out += ',';
    out += fmt17(mean_cum[i]);
    out += ',';
    out += fmt17(p10[i]);
    out += ',';
    out += fmt17(p90[i]);
    out += ',';
    out += std::to_string(n_seeds);
    out += '\n';
  }
  return out;
}

namespace {

// Linear-interpolation percentile over a sorted copy.
double percentile(std::vector<double> values, double p) {
  std::sort(values.begin(), values.end());
  if (values.size() == 1) return values[0];
  const double rank = p * static_cast<double>(values.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(rank);
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = rank - static_cast<double>(lo);
  return values[lo] * (1.0 - frac) + values[hi] * frac;
}

std::unique_ptr<Agent> make_agent(const AgentSpec& spec, const EnvFeatures& fv,
                                  std::uint64_t seed) {
  if (spec.name == "eleanor")
    return std::make_unique<EleanorAgent>(fv, spec.radius, spec.planner, seed);
  if (spec.name == "greedy_lsvi")
    return std::make_unique<GreedyLsviAgent>(fv, spec.radius, spec.planner,
                                             seed);
  if (spec.name == "mislinucb")
    return std::make_unique<MisLinUcbAgent>(fv, spec.radius);
  if (spec.name == "uniform_random")
    return std::make_unique<UniformRandomAgent>(fv, seed);
  throw ConfigError("unknown agent '" + spec.name + "'");
}

RegretCurve run_replication(const ExperimentConfig& cfg, std::uint64_t seed) {
  const EpisodicLinearMDP env = cfg.env.build(seed);
  const EnvFeatures fv = EnvFeatures::of(env);
  const ValueTables vt = exact_dp(env);
  const double vstar = vt.optimal_value(env);
  auto agent = make_agent(cfg.agent, fv, seed);
  const bool uniform = agent->is_uniform();
  const double uniform_value = uniform ? evaluate_uniform_policy(env) : 0.0;

  RegretCurve curve;
  curve.seed = seed;
  curve.vstar = vstar;
  curve.per_episode.reserve(static_cast<std::size_t>(cfg.episodes));
  curve.cumulative.reserve(static_cast<std::size_t>(cfg.episodes));
  curve.planned.reserve(static_cast<std::size_t>(cfg.episodes));
  double cum = 0.0;
  for (int k = 1; k <= cfg.episodes; ++k) {
    agent->begin_episode(k);
    double value;
    double planned;
    if (uniform) {
      value = uniform_value;
      planned = uniform_value;
    } else {
      value = evaluate_policy(env, agent->policy_tables());
      planned = agent->planned_value();
    }
    const double regret = vstar - value;
    cum += regret;
    curve.per_episode.push_back(regret);
    curve.cumulative.push_back(cum);
    curve.planned.push_back(planned);

    int s = env.start_state;
    for (int t = 0; t < env.horizon; ++t) {
      const int a = agent->act(t, s);
      RngStream rng(seed, 0, static_cast<std::uint64_t>(k),
                    static_cast<std::uint64_t>(t));
      const Transition tr = sample_step(env, t, s, a, rng);
      agent->observe(tr);
      s = tr.s_next;
    }
  }
  return curve;
}

}  // namespace

double ExperimentResult::mean_final_cumulative() const {
  double acc = 0.0;
  for (const auto& c : curves) acc += c.cumulative.back();
  return acc / static_cast<double>(curves.size());
}

double ExperimentResult::std_final_cumulative() const {
  const double mean = mean_final_cumulative();
  double acc = 0.0;
  for (const auto& c : curves) {
    const double d = c.cumulative.back() - mean;
    acc += d * d;
  }
  if (curves.size() < 2) return 0.0;
  return std::sqrt(acc / static_cast<double>(curves.size() - 1));
}

ExperimentResult run_experiment(const ExperimentConfig& cfg,
                                const std::string& out_dir) {
  ExperimentResult result;
  result.curves.resize(cfg.seeds.size());

  const int hw = static_cast<int>(std::thread::hardware_concurrency());
  const int threads =
      std::max(1, std::min<int>(cfg.threads > 0 ? cfg.threads : hw,
                                static_cast<int>(cfg.seeds.size())));
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(threads));
  for (int w = 0; w < threads; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (;;) {
          const std::size_t i = next.fetch_add(1);
          if (i >= cfg.seeds.size()) return;
          result.curves[i] = run_replication(cfg, cfg.seeds[i]);
        }
      } catch (...) {
        errors[static_cast<std::size_t>(w)] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (const auto& err : errors) {
    if (err) std::rethrow_exception(err);
  }

  auto& agg = result.aggregate;
  agg.n_seeds = static_cast<int>(cfg.seeds.size());
  agg.mean_cum.resize(static_cast<std::size_t>(cfg.episodes));
  agg.p10.resize(static_cast<std::size_t>(cfg.episodes));
  agg.p90.resize(static_cast<std::size_t>(cfg.episodes));
  std::vector<double> column(cfg.seeds.size());
  for (int k = 0; k < cfg.episodes; ++k) {
    double mean = 0.0;
    for (std::size_t i = 0; i < cfg.seeds.size(); ++i) {
      column[i] = result.curves[i].cumulative[static_cast<std::size_t>(k)];
      mean += column[i];
    }
    agg.mean_cum[static_cast<std::size_t>(k)] =
        mean / static_cast<double>(cfg.seeds.size());
    agg.p10[static_cast<std::size_t>(k)] = percentile(column, 0.10);
    agg.p90[static_cast<std::size_t>(k)] = percentile(column, 0.90);
  }

  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    for (const auto& curve : result.curves) {
      std::ofstream out(out_dir + "/seed_" + std::to_string(curve.seed) +
                            ".csv",
                        std::ios::binary);
      out << curve.to_csv();
    }
    std::ofstream out(out_dir + "/aggregate.csv", std::ios::binary);
    out << agg.to_csv();
  }
  return result;
}

ScalingFit fit_scaling(const std::vector<double>& cumulative, int window_lo,
                       int window_hi) {
  ScalingFit fit;
  if (window_lo < 1 || window_hi > static_cast<int>(cumulative.size()) ||
      window_lo > window_hi) {
    return fit;
  }
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int n = 0;
  for (int k = window_lo; k <= window_hi; ++k) {
    const double r = cumulative[static_cast<std::size_t>(k - 1)];
    if (!(r > 0.0)) return fit;  // flagged, not a crash
    const double x = std::log(static_cast<double>(k));
    const double y = std::log(r);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  const double denom = n * sxx - sx * sx;
  if (denom <= 0.0) return fit;
  fit.slope = (n * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / n;
  fit.valid = true;
  return fit;
}

namespace {

Json* resolve_path(Json& root, const std::string& dotted) {
  Json* node = &root;
  std::stringstream ss(dotted);
  std::string part;
  std::vector<std::string> parts;
  while (std::getline(ss, part, '.')) parts.push_back(part);
  if (parts.empty()) return nullptr;
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
    if (!node->contains(parts[i])) (*node)[parts[i]] = Json::object();
    node = &(*node)[parts[i]];
  }
  return &(*node)[parts.back()];
}

}  // namespace

SweepResult run_sweep(const ExperimentConfig& cfg, const std::string& out_dir) {
  if (cfg.sweep.is_null())
    throw ConfigError("sweep config requires a 'sweep' block");
  require_keys(cfg.sweep, {"mode", "axes"}, "sweep.");
  const std::string mode = get_or<std::string>(cfg.sweep, "mode", "cross");
  if (mode != "cross" && mode != "zip")
    throw ConfigError("sweep.mode must be 'cross' or 'zip'");
  if (!cfg.sweep.contains("axes") || !cfg.sweep.at("axes").is_array() ||
      cfg.sweep.at("axes").empty())
    throw ConfigError("sweep.axes must be a nonempty array");
  struct Axis {
    std::string path;
    Json values;
  };
  std::vector<Axis> axes;
  for (const auto& ax : cfg.sweep.at("axes")) {
    require_keys(ax, {"path", "values"}, "sweep.axes[].");
    Axis axis{get_required<std::string>(ax, "path", "sweep.axes[]."),
              ax.at("values")};
    if (!axis.values.is_array() || axis.values.empty())
      throw ConfigError("sweep axis '" + axis.path + "' needs values");
    axes.push_back(std::move(axis));
  }

  // Enumerate cells.
  std::vector<std::vector<std::size_t>> cells;
  if (mode == "zip") {
    const std::size_t len = axes[0].values.size();
    for (const auto& ax : axes) {
      if (ax.values.size() != len)
        throw ConfigError("zip sweep axes must have equal lengths");
    }
    for (std::size_t i = 0; i < len; ++i)
      cells.emplace_back(axes.size(), i);
  } else {
    std::vector<std::size_t> idx(axes.size(), 0);
    for (;;) {
      cells.push_back(idx);
      std::size_t a = 0;
      for (; a < axes.size(); ++a) {
        if (++idx[a] < axes[a].values.size()) break;
        idx[a] = 0;
      }
      if (a == axes.size()) break;
    }
  }

  // Rebuild the base config document so cells can patch it by path.
  Json base;
  base["env"] = cfg.env.spec;
  base["agent"] =
      Json{{"name", cfg.agent.name},
           {"radius",
            Json{{"lambda", cfg.agent.radius.lambda},
                 {"delta", cfg.agent.radius.delta},
                 {"sigma_noise", cfg.agent.radius.sigma_noise},
                 {"ibe_term", cfg.agent.radius.ibe_term},
                 {"c1", cfg.agent.radius.c1},
                 {"c2", cfg.agent.radius.c2},
                 {"c3", cfg.agent.radius.c3}}},
           {"planner", Json{{"restarts", cfg.agent.planner.restarts},
                            {"iters", cfg.agent.planner.iters},
                            {"fd_step", cfg.agent.planner.fd_step},
                            {"step", cfg.agent.planner.step0}}}};
  base["episodes"] = cfg.episodes;
  base["seeds"] = cfg.seeds;
  base["k_max"] = cfg.agent.radius.k_max;
  base["threads"] = cfg.threads;

  SweepResult result;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    SweepCell cell;
    Json doc = base;
    for (std::size_t a = 0; a < axes.size(); ++a) {
      Json* slot = resolve_path(doc, axes[a].path);
      if (!slot) {
        cell.error = "bad sweep path '" + axes[a].path + "'";
        break;
      }
      *slot = axes[a].values[cells[c][a]];
      cell.params[axes[a].path] = axes[a].values[cells[c][a]];
    }
    if (cell.error.empty()) {
      try {
        const ExperimentConfig cell_cfg = ExperimentConfig::from_json(doc);
        const std::string cell_dir =
            out_dir.empty() ? "" : out_dir + "/cell_" + std::to_string(c);
        const ExperimentResult res = run_experiment(cell_cfg, cell_dir);
        cell.final_mean = res.mean_final_cumulative();
        cell.final_std = res.std_final_cumulative();
        const int K = cell_cfg.episodes;
        const ScalingFit fit = fit_scaling(res.aggregate.mean_cum,
                                           std::max(1, K / 2), K);
        cell.slope = fit.slope;
        cell.slope_valid = fit.valid;
      } catch (const std::exception& e) {
        cell.error = e.what();
      }
    }
    result.cells.push_back(std::move(cell));
  }
  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    std::ofstream out(out_dir + "/sweep.csv", std::ios::binary);
    out << result.to_csv();
  }
  return result;
}

std::string SweepResult::to_csv() const {
  std::string out = "cell,params,final_mean,final_std,slope,error\n";
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const auto& cell = cells[c];
    std::string params;
    for (const auto& [key, value] : cell.params.items()) {
      if (!params.empty()) params += ';';
      params += key + "=" + value.dump();
    }
    out += std::to_string(c);
    out += ",\"" + params + "\",";
    out += fmt17(cell.final_mean);
    out += ',';
    out += fmt17(cell.final_std);
    out += ',';
    out += cell.slope_valid ? fmt17(cell.slope) : std::string("nan");
    out += ",\"" + cell.error + "\"\n";
  }
  return out;
}

}  // namespace eleanor
