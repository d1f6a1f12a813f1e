#include "eleanor/env_io.hpp"

#include <fstream>
#include <sstream>

namespace eleanor {

namespace {

Json features_to_json(const EpisodicLinearMDP& env) {
  Json out = Json::array();
  for (int t = 0; t < env.horizon; ++t) {
    const int d = env.feature_dim(t);
    Json per_t = Json::array();
    for (int s = 0; s < env.n_states; ++s) {
      Json per_s = Json::array();
      for (int a = 0; a < env.n_actions; ++a) {
        const auto phi = env.phi(t, s, a);
        per_s.push_back(std::vector<double>(phi.begin(), phi.end()));
      }
      per_t.push_back(std::move(per_s));
    }
    (void)d;
    out.push_back(std::move(per_t));
  }
  return out;
}

Json transitions_to_json(const EpisodicLinearMDP& env) {
  Json out = Json::array();
  for (int t = 0; t < env.horizon; ++t) {
    Json per_t = Json::array();
    for (int s = 0; s < env.n_states; ++s) {
      Json per_s = Json::array();
      for (int a = 0; a < env.n_actions; ++a) {
        const auto row = env.p_row(t, s, a);
        per_s.push_back(std::vector<double>(row.begin(), row.end()));
      }
      per_t.push_back(std::move(per_s));
    }
    out.push_back(std::move(per_t));
  }
  return out;
}

Json rewards_to_json(const EpisodicLinearMDP& env) {
  Json out = Json::array();
  for (int t = 0; t < env.horizon; ++t) {
    Json per_t = Json::array();
    for (int s = 0; s < env.n_states; ++s) {
      Json per_s = Json::array();
      for (int a = 0; a < env.n_actions; ++a) per_s.push_back(env.reward(t, s, a));
      per_t.push_back(std::move(per_s));
    }
    out.push_back(std::move(per_t));
  }
  return out;
}

}  // namespace

std::string env_to_string(const EpisodicLinearMDP& env) {
  Json doc;
  doc["horizon"] = env.horizon;
  doc["n_states"] = env.n_states;
  doc["n_actions"] = env.n_actions;
  doc["start_state"] = env.start_state;
  doc["feature_dims"] = env.features.dims;
  doc["features"] = features_to_json(env);
  doc["transitions"] = transitions_to_json(env);
  doc["rewards"] = rewards_to_json(env);
  doc["ball_radii"] = env.balls.radius;
  Json meta = env.meta;
  meta.erase("reward_noise");
  meta["reward_noise"] =
      Json{{"kind", reward_noise_name(env.noise_kind)}, {"param", env.noise_param}};
  doc["meta"] = std::move(meta);
  return doc.dump(2) + "\n";
}

EpisodicLinearMDP env_from_string(const std::string& text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const std::exception& e) {
    throw EnvIoError(std::string("env parse error: ") + e.what());
  }
  try {
    EpisodicLinearMDP env;
    env.horizon = doc.at("horizon").get<int>();
    env.n_states = doc.at("n_states").get<int>();
    env.n_actions = doc.at("n_actions").get<int>();
    env.start_state = doc.at("start_state").get<int>();
    env.features.dims = doc.at("feature_dims").get<std::vector<int>>();
    const int H = env.horizon, S = env.n_states, A = env.n_actions;
    if (static_cast<int>(env.features.dims.size()) != H)
      throw EnvIoError("feature_dims length does not match horizon");
    const Json& feats = doc.at("features");
    const Json& trans = doc.at("transitions");
    const Json& rew = doc.at("rewards");
    env.features.phi.resize(static_cast<std::size_t>(H));
    env.p.resize(static_cast<std::size_t>(H));
    env.r.resize(static_cast<std::size_t>(H));
    for (int t = 0; t < H; ++t) {
      const int d = env.features.dims[static_cast<std::size_t>(t)];
      auto& phi = env.features.phi[static_cast<std::size_t>(t)];
      auto& p = env.p[static_cast<std::size_t>(t)];
      auto& r = env.r[static_cast<std::size_t>(t)];
      phi.reserve(static_cast<std::size_t>(S * A * d));
      p.reserve(static_cast<std::size_t>(S * A * S));
      r.reserve(static_cast<std::size_t>(S * A));
      for (int s = 0; s < S; ++s) {
        for (int a = 0; a < A; ++a) {
          const auto fv = feats.at(t).at(s).at(a).get<std::vector<double>>();
          if (static_cast<int>(fv.size()) != d)
            throw EnvIoError("feature vector length mismatch at t=" +
                             std::to_string(t));
          phi.insert(phi.end(), fv.begin(), fv.end());
          const auto pv = trans.at(t).at(s).at(a).get<std::vector<double>>();
          if (static_cast<int>(pv.size()) != S)
            throw EnvIoError("transition row length mismatch at t=" +
                             std::to_string(t));
          p.insert(p.end(), pv.begin(), pv.end());
          r.push_back(rew.at(t).at(s).at(a).get<double>());
        }
      }
    }
    env.balls.radius = doc.at("ball_radii").get<std::vector<double>>();
    Json meta = doc.at("meta");
    if (meta.contains("reward_noise")) {
      const Json& noise = meta.at("reward_noise");
      env.noise_kind =
          reward_noise_from_name(noise.at("kind").get<std::string>());
      env.noise_param = noise.at("param").get<double>();
      meta.erase("reward_noise");
    }
    env.meta = std::move(meta);
    validate_env(env);
    return env;
  } catch (const EnvIoError&) {
    throw;
  } catch (const std::exception& e) {
    throw EnvIoError(std::string("env field error: ") + e.what());
  }
}

void save_env(const EpisodicLinearMDP& env, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw EnvIoError("cannot open for writing: " + path);
  out << env_to_string(env);
}

EpisodicLinearMDP load_env(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw EnvIoError("cannot open for reading: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return env_from_string(buf.str());
}

}  // namespace eleanor
