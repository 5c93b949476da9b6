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

// Tabular Q-learning over quantized (allocation, belief) states.
//
// Actions move delta units from one type to another (or do nothing). The
// reward mixes simulated counts drawn from the current belief with observed
// counts. Exploration is epsilon-greedy, decaying per step and boosted when
// observed rates diverge from the belief. Each live step is followed by a
// batch of simulated transitions under the belief (offline rehearsal).

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "alloc_arena/coverage.hpp"
#include "alloc_arena/error.hpp"
#include "alloc_arena/estimation.hpp"
#include "alloc_arena/rng.hpp"

namespace alloc_arena {

struct AgentConfig {
  double alpha0 = 0.2;
  double alpha_decay = 0.999;
  double alpha_min = 0.01;
  double gamma = 0.9;
  double eps0 = 0.3;
  double eps_decay = 0.995;
  double eps_min = 0.02;
  double eps_boost = 0.5;
  double gap_threshold = 0.2;
  int gap_count = 2;
  double w1 = 0.5;
  double w2 = 0.5;
  int tau = 1;
  std::vector<int> delta_menu{1};
  int offline_episodes = 1000;
  int belief_bins = 5;
  int alloc_quantum = 10;
  int reward_smooth_window = 1;
  double q_clip = 5.0;
};

inline void validate(const AgentConfig& cfg) {
  auto unit = [](double v) { return v > 0.0 && v <= 1.0; };
  if (!unit(cfg.alpha0) || !unit(cfg.alpha_decay) || !unit(cfg.alpha_min))
    throw ConfigError("alpha0, alpha_decay and alpha_min must lie in (0, 1]");
  if (!(cfg.gamma >= 0.0 && cfg.gamma < 1.0)) throw ConfigError("gamma must lie in [0, 1)");
  for (double e : {cfg.eps0, cfg.eps_decay, cfg.eps_min, cfg.eps_boost})
    if (!(e >= 0.0 && e <= 1.0)) throw ConfigError("exploration rates must lie in [0, 1]");
  if (!(cfg.w1 >= 0.0) || !(cfg.w2 >= 0.0)) throw ConfigError("reward weights must be >= 0");
  if (cfg.tau < 1 || cfg.tau > 3) throw ConfigError("tau must be 1, 2 or 3");
  if (cfg.delta_menu.empty()) throw ConfigError("delta_menu must be non-empty");
  for (int d : cfg.delta_menu)
    if (d < 1) throw ConfigError("delta_menu entries must be positive");
  if (cfg.offline_episodes < 0) throw ConfigError("offline_episodes must be >= 0");
  if (cfg.belief_bins < 2) throw ConfigError("belief_bins must be >= 2");
  if (cfg.alloc_quantum < 1) throw ConfigError("alloc_quantum must be >= 1");
  if (cfg.reward_smooth_window < 1) throw ConfigError("reward_smooth_window must be >= 1");
  if (!(cfg.q_clip > 0.0)) throw ConfigError("q_clip must be > 0");
}

// Quantized allocation levels followed by belief bins, one cell per type each.
struct StateKey {
  std::vector<std::uint16_t> cells;

  friend bool operator==(const StateKey&, const StateKey&) = default;

  // Decimal cells joined by '.', allocation and belief halves split by '|'.
  std::string encode() const {
    std::string out;
    const std::size_t half = cells.size() / 2;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i > 0) out += (i == half) ? '|' : '.';
      out += std::to_string(cells[i]);
    }
    return out;
  }
};

struct StateKeyHash {
  std::size_t operator()(const StateKey& k) const noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (std::uint16_t c : k.cells) h = mix64(h ^ c);
    return static_cast<std::size_t>(h);
  }
};

inline StateKey make_state_key(const Allocation& alloc, const BeliefState& belief, int budget,
                               const AgentConfig& cfg) {
  if (alloc.size() != belief.types()) throw InputError("allocation/belief dimension mismatch");
  StateKey key;
  key.cells.reserve(2 * alloc.size());
  const int level_cap = budget / cfg.alloc_quantum;
  for (int n : alloc.n)
    key.cells.push_back(static_cast<std::uint16_t>(std::min(n / cfg.alloc_quantum, level_cap)));
  for (double p : belief.p_hat) {
    const int bin = static_cast<int>(std::floor(p * cfg.belief_bins));
    key.cells.push_back(static_cast<std::uint16_t>(std::clamp(bin, 0, cfg.belief_bins - 1)));
  }
  return key;
}

// Move `delta` units from `src` to `dst`; delta == 0 is the no-op.
struct Action {
  int src = -1;
  int dst = -1;
  int delta = 0;

  static constexpr Action noop() noexcept { return {}; }
  constexpr bool is_noop() const noexcept { return delta == 0; }
  friend bool operator==(const Action&, const Action&) = default;
};

// Dense index of an action within the full catalog for C types and the delta
// menu: the no-op is 0, then (src, dst, delta) in lexicographic order.
class ActionCatalog {
 public:
  ActionCatalog(int types, std::vector<int> delta_menu)
      : types_(types), menu_(std::move(delta_menu)) {}

  std::size_t size() const noexcept {
    return 1 + static_cast<std::size_t>(types_) * (types_ - 1) * menu_.size();
  }

  std::size_t index(const Action& a) const {
    if (a.is_noop()) return 0;
    const auto d = std::find(menu_.begin(), menu_.end(), a.delta);
    if (d == menu_.end()) throw ActionError("delta not in menu");
    const int dst_slot = a.dst < a.src ? a.dst : a.dst - 1;
    return 1 + (static_cast<std::size_t>(a.src) * (types_ - 1) + dst_slot) * menu_.size() +
           static_cast<std::size_t>(d - menu_.begin());
  }

 private:
  int types_;
  std::vector<int> menu_;
};

// No-op first, then every feasible (src, dst, delta) in (src, dst, delta)
// order, deltas in menu order.
inline std::vector<Action> enumerate_feasible_actions(const Allocation& alloc, int budget,
                                                      const AgentConfig& cfg) {
  const int c = static_cast<int>(alloc.size());
  std::vector<Action> out;
  out.reserve(1 + static_cast<std::size_t>(c) * (c - 1) * cfg.delta_menu.size());
  out.push_back(Action::noop());
  for (int i = 0; i < c; ++i)
    for (int j = 0; j < c; ++j) {
      if (i == j) continue;
      for (int d : cfg.delta_menu)
        if (alloc.n[i] - d >= 1 && alloc.n[j] + d <= budget - (c - 1)) out.push_back({i, j, d});
    }
  return out;
}

inline Allocation apply_action(Allocation alloc, const Action& a, int budget) {
  if (a.is_noop()) return alloc;
  const int c = static_cast<int>(alloc.size());
  if (a.src < 0 || a.src >= c || a.dst < 0 || a.dst >= c || a.src == a.dst || a.delta < 0)
    throw ActionError("malformed action");
  if (alloc.n[a.src] - a.delta < 1 || alloc.n[a.dst] + a.delta > budget - (c - 1))
    throw ActionError("action would leave a type with fewer than one unit");
  alloc.n[a.src] -= a.delta;
  alloc.n[a.dst] += a.delta;
  return alloc;
}

// sum_i [w1 * 1{x_i >= tau} + w2 * 1{X_i >= tau}]; the observed term is
// dropped when no observation exists (offline transitions).
inline double hybrid_reward(std::span<const int> sim_counts,
                            std::optional<std::span<const int>> obs_counts,
                            const AgentConfig& cfg) {
  if (obs_counts && obs_counts->size() != sim_counts.size())
    throw InputError("simulated and observed counts differ in length");
  double r = 0.0;
  for (std::size_t i = 0; i < sim_counts.size(); ++i) {
    if (sim_counts[i] >= cfg.tau) r += cfg.w1;
    if (obs_counts && (*obs_counts)[i] >= cfg.tau) r += cfg.w2;
  }
  return r;
}

// Sparse action-value table; unseen pairs read as 0.
class QTable {
 public:
  explicit QTable(std::size_t catalog_size = 1) : catalog_size_(catalog_size) {}

  double get(const StateKey& s, std::size_t action) const {
    const auto it = rows_.find(s);
    if (it == rows_.end()) return 0.0;
    return it->second.values[action];
  }

  void set(const StateKey& s, std::size_t action, double value) {
    Row& row = rows_.try_emplace(s, catalog_size_).first->second;
    if (!row.seen[action]) {
      row.seen[action] = true;
      ++entries_;
    }
    row.values[action] = value;
  }

  // Row of values for s, or nullptr when s is unseen.
  const std::vector<double>* row(const StateKey& s) const {
    const auto it = rows_.find(s);
    return it == rows_.end() ? nullptr : &it->second.values;
  }

  std::size_t entry_count() const noexcept { return entries_; }
  std::size_t state_count() const noexcept { return rows_.size(); }
  std::size_t catalog_size() const noexcept { return catalog_size_; }

  template <class Fn>
  void for_each(Fn&& fn) const {
    for (const auto& [key, row] : rows_)
      for (std::size_t a = 0; a < row.values.size(); ++a)
        if (row.seen[a]) fn(key, a, row.values[a]);
  }

 private:
  struct Row {
    explicit Row(std::size_t n) : values(n, 0.0), seen(n, false) {}
    std::vector<double> values;
    std::vector<bool> seen;
  };

  std::size_t catalog_size_;
  std::size_t entries_ = 0;
  std::unordered_map<StateKey, Row, StateKeyHash> rows_;
};

inline double max_value(const QTable& q, const StateKey& s, std::span<const Action> feasible,
                        const ActionCatalog& catalog) {
  const std::vector<double>* row = q.row(s);
  if (row == nullptr || feasible.empty()) return 0.0;
  double best = -std::numeric_limits<double>::infinity();
  for (const Action& a : feasible) best = std::max(best, (*row)[catalog.index(a)]);
  return best;
}

// One Bellman backup with the TD increment clipped to +-q_clip.
inline void q_update(QTable& q, const StateKey& s, const Action& a, double reward,
                     const StateKey& s_next, std::span<const Action> feasible_next,
                     const ActionCatalog& catalog, const AgentConfig& cfg, double alpha) {
  if (alpha == 0.0) return;
  const std::size_t idx = catalog.index(a);
  const double current = q.get(s, idx);
  const double target = reward + cfg.gamma * max_value(q, s_next, feasible_next, catalog);
  const double step = std::clamp(alpha * (target - current), -cfg.q_clip, cfg.q_clip);
  q.set(s, idx, current + step);
}

// Epsilon-greedy; greedy ties resolve to the earliest action in `feasible`.
template <class Engine>
Action select_action(const QTable& q, const StateKey& s, std::span<const Action> feasible,
                     const ActionCatalog& catalog, double eps, Engine& eng) {
  if (feasible.empty()) throw ActionError("no feasible actions");
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  if (eps > 0.0 && coin(eng) < eps) {
    std::uniform_int_distribution<std::size_t> pick(0, feasible.size() - 1);
    return feasible[pick(eng)];
  }
  const std::vector<double>* row = q.row(s);
  if (row == nullptr) return feasible.front();
  std::size_t best = 0;
  double best_val = (*row)[catalog.index(feasible[0])];
  for (std::size_t k = 1; k < feasible.size(); ++k) {
    const double v = (*row)[catalog.index(feasible[k])];
    if (v > best_val) {
      best_val = v;
      best = k;
    }
  }
  return feasible[best];
}

// Boost on drift (at least gap_count types past gap_threshold), otherwise
// decay toward eps_min.
inline double adaptive_exploration_step(double eps, std::span<const double> gaps,
                                        const AgentConfig& cfg) {
  const auto triggered = std::count_if(gaps.begin(), gaps.end(),
                                       [&](double g) { return g > cfg.gap_threshold; });
  if (triggered >= cfg.gap_count) return std::max(eps, cfg.eps_boost);
  return std::max(cfg.eps_min, eps * cfg.eps_decay);
}

inline double learning_rate(const AgentConfig& cfg, long step) {
  return std::max(cfg.alpha_min, cfg.alpha0 * std::pow(cfg.alpha_decay, static_cast<double>(step)));
}

// Rolling mean of the last `window` rewards.
class RewardSmoother {
 public:
  explicit RewardSmoother(int window = 1) : window_(window) {}

  double push(double r) {
    recent_.push_back(r);
    sum_ += r;
    if (static_cast<int>(recent_.size()) > window_) {
      sum_ -= recent_.front();
      recent_.pop_front();
    }
    return sum_ / static_cast<double>(recent_.size());
  }

 private:
  int window_;
  double sum_ = 0.0;
  std::deque<double> recent_;
};

template <class Engine>
std::vector<int> simulate_counts(const Allocation& alloc, std::span<const double> p,
                                 Engine& eng) {
  std::vector<int> x(alloc.size());
  for (std::size_t i = 0; i < alloc.size(); ++i) {
    std::binomial_distribution<int> bin(alloc.n[i], std::clamp(p[i], 0.0, 1.0));
    x[i] = bin(eng);
  }
  return x;
}

// Learner state for one replication: table, exploration rate, step counter
// and the exploration/simulation engine.
class QAgent {
 public:
  QAgent(int types, int budget, AgentConfig cfg, std::uint64_t seed)
      : types_(types), budget_(budget), cfg_(std::move(cfg)),
        catalog_(types, cfg_.delta_menu), table_(catalog_.size()),
        eps_(cfg_.eps0), smoother_(cfg_.reward_smooth_window), eng_(seed) {
    validate(cfg_);
    if (types < 1 || budget < types) throw ConfigError("agent needs 1 <= C <= N");
  }

  const AgentConfig& config() const noexcept { return cfg_; }
  const QTable& table() const noexcept { return table_; }
  QTable& table() noexcept { return table_; }
  const ActionCatalog& catalog() const noexcept { return catalog_; }
  double epsilon() const noexcept { return eps_; }
  void set_epsilon(double eps) noexcept { eps_ = eps; }
  double alpha() const { return learning_rate(cfg_, steps_); }
  long steps() const noexcept { return steps_; }
  int budget() const noexcept { return budget_; }

  StateKey key(const Allocation& alloc, const BeliefState& belief) const {
    return make_state_key(alloc, belief, budget_, cfg_);
  }

  std::vector<Action> feasible(const Allocation& alloc) const {
    return enumerate_feasible_actions(alloc, budget_, cfg_);
  }

  Action act(const Allocation& alloc, const BeliefState& belief) {
    const std::vector<Action> options = feasible(alloc);
    return select_action(table_, key(alloc, belief), options, catalog_, eps_, eng_);
  }

  // Live transition: `prior` is the belief the action was chosen under,
  // `posterior` the belief after observing `outcome`.
  void learn_live(const StateKey& s, const Action& a, const Allocation& deployed,
                  const BeliefState& prior, const BeliefState& posterior,
                  const SignalOutcome& outcome) {
    const std::vector<int> sim = simulate_counts(deployed, prior.p_hat, eng_);
    const double raw =
        hybrid_reward(sim, std::optional<std::span<const int>>(outcome.x), cfg_);
    const double r = smoother_.push(raw);
    const std::vector<Action> next = feasible(deployed);
    q_update(table_, s, a, r, key(deployed, posterior), next, catalog_, cfg_, alpha());
    eps_ = adaptive_exploration_step(
        eps_, expected_vs_observed_gap(prior, deployed, outcome), cfg_);
    ++steps_;
  }

  // Chained simulated transitions from `start` under the belief. The live
  // allocation is untouched.
  void offline_rehearsal(const Allocation& start, const BeliefState& belief) {
    Allocation sim_alloc = start;
    const double rate = alpha();
    std::vector<Action> options = feasible(sim_alloc);
    StateKey s = key(sim_alloc, belief);
    for (int e = 0; e < cfg_.offline_episodes; ++e) {
      const Action a = select_action(table_, s, options, catalog_, eps_, eng_);
      sim_alloc = apply_action(std::move(sim_alloc), a, budget_);
      const std::vector<int> sim = simulate_counts(sim_alloc, belief.p_hat, eng_);
      const double r = hybrid_reward(sim, std::nullopt, cfg_);
      std::vector<Action> next_options = feasible(sim_alloc);
      StateKey s_next = key(sim_alloc, belief);
      q_update(table_, s, a, r, s_next, next_options, catalog_, cfg_, rate);
      s = std::move(s_next);
      options = std::move(next_options);
    }
  }

 private:
  int types_;
  int budget_;
  AgentConfig cfg_;
  ActionCatalog catalog_;
  QTable table_;
  double eps_;
  long steps_ = 0;
  RewardSmoother smoother_;
  SplitMix64 eng_;
};

}  // namespace alloc_arena
