#pragma once
// Canonical environment file format: one JSON document with fixed key order
// (horizon, n_states, n_actions, start_state, feature_dims, features,
// transitions, rewards, ball_radii, meta). Numbers round-trip exactly, so
// save(load(x)) reproduces x byte for byte.

#include <string>

#include "eleanor/env.hpp"

namespace eleanor {

struct EnvIoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string env_to_string(const EpisodicLinearMDP& env);
EpisodicLinearMDP env_from_string(const std::string& text);

void save_env(const EpisodicLinearMDP& env, const std::string& path);
EpisodicLinearMDP load_env(const std::string& path);

}  // namespace eleanor
