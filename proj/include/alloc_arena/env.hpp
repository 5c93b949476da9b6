// Copyright 2026 The Alloc Arena Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Non-stationary environment: complements q_i(t) = 1 - p_i(t) start from a
// Beta draw, drift with clipped Gaussian noise, and jump at scheduled shifts.

#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "alloc_arena/coverage.hpp"
#include "alloc_arena/error.hpp"
#include "alloc_arena/rng.hpp"

namespace alloc_arena {

struct RegimeShift {
  int type_index = 0;
  int at_step = 0;
  double new_q = 0.0;

  friend bool operator==(const RegimeShift&, const RegimeShift&) = default;
};

struct EnvConfig {
  int n_types = 10;
  int n_units = 300;
  int horizon = 100;
  double drift_sigma = 0.01;
  double beta_a = 6.0;
  double beta_b = 1.0;
  std::vector<RegimeShift> shifts;
  std::uint64_t seed = 0;
};

inline void validate(const EnvConfig& cfg) {
  if (cfg.n_types < 1) throw ConfigError("n_types must be >= 1");
  if (cfg.n_units < cfg.n_types) throw ConfigError("n_units must be >= n_types");
  if (cfg.horizon < 1) throw ConfigError("horizon must be >= 1");
  if (!(cfg.drift_sigma >= 0.0)) throw ConfigError("drift_sigma must be >= 0");
  if (!(cfg.beta_a > 0.0) || !(cfg.beta_b > 0.0))
    throw ConfigError("beta_a and beta_b must be > 0");
  for (const RegimeShift& s : cfg.shifts) {
    if (s.type_index < 0 || s.type_index >= cfg.n_types)
      throw ConfigError("shift type_index " + std::to_string(s.type_index) + " out of range");
    if (s.at_step < 0 || s.at_step >= cfg.horizon)
      throw ConfigError("shift at_step " + std::to_string(s.at_step) + " out of range");
    if (!(s.new_q >= 0.0 && s.new_q <= 1.0))
      throw ConfigError("shift new_q must lie in [0, 1]");
  }
}

struct EnvState {
  int t = 0;
  std::vector<double> q;

  std::vector<double> p() const {
    std::vector<double> out(q.size());
    std::transform(q.begin(), q.end(), out.begin(), [](double v) { return 1.0 - v; });
    return out;
  }
};

struct SignalOutcome {
  std::vector<int> x;
};

// Regime changes reported for the default scenario: type 0 drops to 0.7 at
// t=30, types 1 and 2 rise to 0.95 at t=40 and t=50.
inline std::vector<RegimeShift> default_shift_schedule() {
  return {{0, 30, 0.7}, {1, 40, 0.95}, {2, 50, 0.95}};
}

template <class Engine>
double sample_beta(double a, double b, Engine& eng) {
  std::gamma_distribution<double> ga(a, 1.0);
  std::gamma_distribution<double> gb(b, 1.0);
  const double x = ga(eng);
  const double y = gb(eng);
  return x / (x + y);
}

template <class Engine>
EnvState init_env(const EnvConfig& cfg, Engine& eng) {
  validate(cfg);
  EnvState state;
  state.q.resize(static_cast<std::size_t>(cfg.n_types));
  for (double& v : state.q) v = sample_beta(cfg.beta_a, cfg.beta_b, eng);
  return state;
}

// Applies given noise, clips, then overwrites shifted types. Split out of
// advance_env so the clip and shift rules can be exercised with chosen noise.
inline EnvState apply_drift(const EnvState& state, std::span<const double> noise,
                            const EnvConfig& cfg) {
  if (state.t >= cfg.horizon)
    throw SequenceError("cannot advance past horizon " + std::to_string(cfg.horizon));
  if (noise.size() != state.q.size()) throw InputError("noise length differs from type count");
  EnvState next{state.t + 1, state.q};
  for (std::size_t i = 0; i < next.q.size(); ++i)
    next.q[i] = std::clamp(next.q[i] + noise[i], 0.0, 1.0);
  for (const RegimeShift& s : cfg.shifts)
    if (s.at_step == next.t) next.q[static_cast<std::size_t>(s.type_index)] = s.new_q;
  return next;
}

template <class Engine>
EnvState advance_env(const EnvState& state, const EnvConfig& cfg, Engine& eng) {
  if (state.t >= cfg.horizon)
    throw SequenceError("cannot advance past horizon " + std::to_string(cfg.horizon));
  std::vector<double> noise(state.q.size(), 0.0);
  if (cfg.drift_sigma > 0.0) {
    std::normal_distribution<double> eps(0.0, cfg.drift_sigma);
    for (double& e : noise) e = eps(eng);
  }
  return apply_drift(state, noise, cfg);
}

// One Binomial(n_i, 1 - q_i) draw per type from the given engine.
template <class Engine>
SignalOutcome sample_signals(const EnvState& state, const Allocation& alloc, int budget,
                             Engine& eng) {
  require_feasible(alloc, budget);
  if (alloc.size() != state.q.size()) throw AllocationError("allocation length differs from C");
  SignalOutcome out;
  out.x.resize(alloc.size());
  for (std::size_t i = 0; i < alloc.size(); ++i) {
    std::binomial_distribution<int> bin(alloc.n[i], std::clamp(1.0 - state.q[i], 0.0, 1.0));
    out.x[i] = bin(eng);
  }
  return out;
}

// Draws keyed by (seed, t, i, n_i): two strategies that give type i the same
// number of units at step t observe the same count.
inline SignalOutcome sample_signals_keyed(const EnvState& state, const Allocation& alloc,
                                          int budget, std::uint64_t signal_seed) {
  require_feasible(alloc, budget);
  if (alloc.size() != state.q.size()) throw AllocationError("allocation length differs from C");
  SignalOutcome out;
  out.x.resize(alloc.size());
  for (std::size_t i = 0; i < alloc.size(); ++i) {
    SplitMix64 eng(derive_seed(signal_seed, {static_cast<std::uint64_t>(state.t),
                                             static_cast<std::uint64_t>(i),
                                             static_cast<std::uint64_t>(alloc.n[i])}));
    std::binomial_distribution<int> bin(alloc.n[i], std::clamp(1.0 - state.q[i], 0.0, 1.0));
    out.x[i] = bin(eng);
  }
  return out;
}

// Full q trajectory for steps 0..horizon-1, generated from one engine seeded
// with `seed`. Shared read-only by all strategies in a replication.
inline std::vector<EnvState> generate_trajectory(const EnvConfig& cfg, std::uint64_t seed) {
  SplitMix64 eng(seed);
  std::vector<EnvState> traj;
  traj.reserve(static_cast<std::size_t>(cfg.horizon));
  traj.push_back(init_env(cfg, eng));
  // shifts scheduled at step 0 apply to the initial draw
  for (const RegimeShift& s : cfg.shifts)
    if (s.at_step == 0) traj.back().q[static_cast<std::size_t>(s.type_index)] = s.new_q;
  while (static_cast<int>(traj.size()) < cfg.horizon)
    traj.push_back(advance_env(traj.back(), cfg, eng));
  return traj;
}

}  // namespace alloc_arena
