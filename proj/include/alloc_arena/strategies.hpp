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

// The four allocation policies behind one decide/observe interface.
//
//   static              uniform during burn-in, one Lagrangian solve at t = L,
//                       held for the rest of the horizon
//   rolling_lagrangian  uniform during burn-in, re-solved every step after
//   rl                  uniform during burn-in, then Q-learning reallocations
//   oracle              exact optimum for the true probabilities every step
//
// Only the oracle may be handed the true probabilities.

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "alloc_arena/coverage.hpp"
#include "alloc_arena/error.hpp"
#include "alloc_arena/estimation.hpp"
#include "alloc_arena/lagrangian.hpp"
#include "alloc_arena/rl_agent.hpp"

namespace alloc_arena {

enum class PolicyKind { kStatic, kRollingLagrangian, kRl, kOracle };

inline std::string_view to_string(PolicyKind k) {
  switch (k) {
    case PolicyKind::kStatic: return "static";
    case PolicyKind::kRollingLagrangian: return "rolling_lagrangian";
    case PolicyKind::kRl: return "rl";
    case PolicyKind::kOracle: return "oracle";
  }
  return "unknown";
}

inline PolicyKind parse_policy_kind(std::string_view s) {
  if (s == "static") return PolicyKind::kStatic;
  if (s == "rolling_lagrangian") return PolicyKind::kRollingLagrangian;
  if (s == "rl") return PolicyKind::kRl;
  if (s == "oracle") return PolicyKind::kOracle;
  throw ConfigError("unknown strategy '" + std::string(s) + "'");
}

enum class OracleMethod { kGreedy, kLagrangian };

struct PolicySettings {
  int types = 10;
  int budget = 300;
  int burn_in = 10;
  int window = 10;
  double eps_clip = 1e-6;
  int tau = 1;
  LagrangianConfig lagrangian;
  AgentConfig agent;
  OracleMethod oracle_method = OracleMethod::kGreedy;
  std::uint64_t seed = 0;  // exploration stream for rl
};

namespace detail {

inline std::vector<double> complements(std::span<const double> p) {
  std::vector<double> q(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) q[i] = 1.0 - p[i];
  return q;
}

struct StaticState {
  std::optional<Allocation> fixed;
};

struct RollingState {};

struct RlState {
  QAgent agent;
  Allocation live;
  struct Pending {
    StateKey key;
    Action action;
  };
  std::optional<Pending> pending;
};

struct OracleState {};

}  // namespace detail

class Policy {
 public:
  Policy(PolicyKind kind, PolicySettings settings)
      : kind_(kind), settings_(std::move(settings)),
        belief_(settings_.types, settings_.window, settings_.eps_clip),
        uniform_(uniform_allocation(settings_.types, settings_.budget)) {
    if (settings_.burn_in < 0) throw ConfigError("burn_in must be >= 0");
    validate(settings_.lagrangian);
    Tau{settings_.tau};
    switch (kind_) {
      case PolicyKind::kStatic: state_ = detail::StaticState{}; break;
      case PolicyKind::kRollingLagrangian: state_ = detail::RollingState{}; break;
      case PolicyKind::kOracle: state_ = detail::OracleState{}; break;
      case PolicyKind::kRl: {
        AgentConfig agent_cfg = settings_.agent;
        agent_cfg.tau = settings_.tau;
        state_ = detail::RlState{
            QAgent(settings_.types, settings_.budget, agent_cfg, settings_.seed), uniform_,
            std::nullopt};
        break;
      }
    }
  }

  PolicyKind kind() const noexcept { return kind_; }
  std::string_view name() const noexcept { return to_string(kind_); }
  const BeliefState& belief() const noexcept { return belief_; }
  const PolicySettings& settings() const noexcept { return settings_; }

  const QAgent* agent() const noexcept {
    const auto* rl = std::get_if<detail::RlState>(&state_);
    return rl ? &rl->agent : nullptr;
  }

  // true_p must be present exactly when this is the oracle.
  Allocation decide(int t, std::optional<std::span<const double>> true_p = std::nullopt) {
    if (kind_ == PolicyKind::kOracle) {
      if (!true_p) throw ContractError("oracle requires the true probabilities");
      if (true_p->size() != static_cast<std::size_t>(settings_.types))
        throw InputError("true probability vector has wrong length");
    } else if (true_p) {
      throw ContractError("policy '" + std::string(name()) +
                          "' must not receive the true probabilities");
    }
    last_t_ = t;
    return std::visit([&](auto& st) { return decide_impl(st, t, true_p); }, state_);
  }

  void observe(const Allocation& alloc, const SignalOutcome& outcome) {
    const BeliefState prior = belief_;
    belief_ = update_belief(std::move(belief_), alloc, outcome);
    if (auto* rl = std::get_if<detail::RlState>(&state_)) {
      if (rl->pending) {
        rl->agent.learn_live(rl->pending->key, rl->pending->action, alloc, prior, belief_,
                             outcome);
        rl->pending.reset();
      }
      if (last_t_ + 1 >= settings_.burn_in) rl->agent.offline_rehearsal(rl->live, belief_);
    }
  }

 private:
  bool in_burn_in(int t) const noexcept { return t < settings_.burn_in || belief_.empty(); }

  std::vector<double> estimated_q() const { return detail::complements(belief_.p_hat); }

  Allocation decide_impl(detail::StaticState& st, int t, std::optional<std::span<const double>>) {
    if (st.fixed) return *st.fixed;
    if (in_burn_in(t)) return uniform_;
    st.fixed = solve_allocation(estimated_q(), settings_.budget, Tau{settings_.tau},
                                settings_.lagrangian);
    return *st.fixed;
  }

  Allocation decide_impl(detail::RollingState&, int t, std::optional<std::span<const double>>) {
    if (in_burn_in(t)) return uniform_;
    return solve_allocation(estimated_q(), settings_.budget, Tau{settings_.tau},
                            settings_.lagrangian);
  }

  Allocation decide_impl(detail::RlState& st, int t, std::optional<std::span<const double>>) {
    if (in_burn_in(t)) {
      st.live = uniform_;
      return st.live;
    }
    const StateKey key = st.agent.key(st.live, belief_);
    const Action a = st.agent.act(st.live, belief_);
    st.live = apply_action(std::move(st.live), a, settings_.budget);
    st.pending = detail::RlState::Pending{key, a};
    return st.live;
  }

  Allocation decide_impl(detail::OracleState&, int,
                         std::optional<std::span<const double>> true_p) {
    if (settings_.oracle_method == OracleMethod::kGreedy) {
      if (settings_.tau == 1) return greedy_optimal_allocation(*true_p, settings_.budget);
      return exact_allocation(detail::complements(*true_p), settings_.budget, Tau{settings_.tau});
    }
    std::vector<double> q = detail::complements(*true_p);
    for (double& v : q) v = std::clamp(v, settings_.eps_clip, 1.0 - settings_.eps_clip);
    return solve_allocation(q, settings_.budget, Tau{settings_.tau}, settings_.lagrangian);
  }

  PolicyKind kind_;
  PolicySettings settings_;
  BeliefState belief_;
  Allocation uniform_;
  int last_t_ = -1;
  std::variant<detail::StaticState, detail::RollingState, detail::RlState, detail::OracleState>
      state_;
};

}  // namespace alloc_arena
