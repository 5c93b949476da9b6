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

// Experiment configuration and its flat text form: one `key = value` per
// line, `#` starts a comment, list values are comma-separated. Unknown keys
// are rejected.

#pragma once

#include <cerrno>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "alloc_arena/env.hpp"
#include "alloc_arena/error.hpp"
#include "alloc_arena/lagrangian.hpp"
#include "alloc_arena/rl_agent.hpp"
#include "alloc_arena/stats.hpp"
#include "alloc_arena/strategies.hpp"

namespace alloc_arena {

struct ExperimentConfig {
  EnvConfig env{.shifts = default_shift_schedule(), .seed = 20251017};
  std::vector<PolicyKind> strategies{PolicyKind::kStatic, PolicyKind::kRollingLagrangian,
                                     PolicyKind::kRl, PolicyKind::kOracle};
  int burn_in = 10;
  int window = 10;
  double eps_clip = 1e-6;
  int n_sims = 50;
  int tau = 1;
  std::string output_dir = "out";
  bool emit_plots = true;
  bool emit_qtable = false;
  bool verbose = false;
  int workers = 0;  // 0 = hardware concurrency
  OracleMethod oracle_method = OracleMethod::kGreedy;
  ZeroMethod zero_method = ZeroMethod::kWilcox;
  PolicyKind compare_a = PolicyKind::kRollingLagrangian;
  PolicyKind compare_b = PolicyKind::kRl;
  LagrangianConfig lagrangian;
  AgentConfig agent;
};

inline void validate(const ExperimentConfig& cfg) {
  validate(cfg.env);
  validate(cfg.lagrangian);
  validate(cfg.agent);
  if (cfg.strategies.empty()) throw ConfigError("at least one strategy is required");
  for (std::size_t i = 0; i < cfg.strategies.size(); ++i)
    for (std::size_t j = i + 1; j < cfg.strategies.size(); ++j)
      if (cfg.strategies[i] == cfg.strategies[j])
        throw ConfigError("strategy '" + std::string(to_string(cfg.strategies[i])) +
                          "' listed twice");
  if (cfg.n_sims < 1) throw ConfigError("n_sims must be >= 1");
  if (cfg.burn_in < 0 || cfg.burn_in >= cfg.env.horizon)
    throw ConfigError("burn_in must satisfy 0 <= burn_in < horizon");
  if (cfg.window < 1) throw ConfigError("window must be >= 1");
  if (!(cfg.eps_clip > 0.0 && cfg.eps_clip < 0.5)) throw ConfigError("eps_clip must lie in (0, 0.5)");
  if (cfg.tau < 1 || cfg.tau > 3) throw ConfigError("tau must be 1, 2 or 3");
  if (cfg.workers < 0) throw ConfigError("workers must be >= 0");
}

inline PolicySettings policy_settings(const ExperimentConfig& cfg, std::uint64_t seed) {
  PolicySettings s;
  s.types = cfg.env.n_types;
  s.budget = cfg.env.n_units;
  s.burn_in = cfg.burn_in;
  s.window = cfg.window;
  s.eps_clip = cfg.eps_clip;
  s.tau = cfg.tau;
  s.lagrangian = cfg.lagrangian;
  s.agent = cfg.agent;
  s.agent.tau = cfg.tau;
  s.oracle_method = cfg.oracle_method;
  s.seed = seed;
  return s;
}

namespace config_detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const auto comma = s.find(',', start);
    const auto end = comma == std::string_view::npos ? s.size() : comma;
    std::string item = trim(s.substr(start, end - start));
    if (!item.empty()) out.push_back(std::move(item));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

template <class T>
T parse_integer(const std::string& key, const std::string& v) {
  T out{};
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size())
    throw ConfigError("key '" + key + "': expected an integer, got '" + v + "'");
  return out;
}

inline double parse_double(const std::string& key, const std::string& v) {
  // strtod rather than from_chars: libstdc++ 11 lacks floating from_chars
  char* end = nullptr;
  errno = 0;
  const double out = std::strtod(v.c_str(), &end);
  if (v.empty() || end != v.c_str() + v.size() || errno == ERANGE)
    throw ConfigError("key '" + key + "': expected a number, got '" + v + "'");
  return out;
}

inline bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("key '" + key + "': expected true/false, got '" + v + "'");
}

inline std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string join_ints(const std::vector<int>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + std::to_string(v[i]);
  return out;
}

using Setter = std::function<void(ExperimentConfig&, const std::string&)>;
using Getter = std::function<std::string(const ExperimentConfig&)>;

struct Field {
  Setter set;
  Getter get;
};

template <class T>
Field int_field(T ExperimentConfig::*outer, int T::*member) {
  return {[=](ExperimentConfig& c, const std::string& v) {
            c.*outer.*member = parse_integer<int>("", v);
          },
          [=](const ExperimentConfig& c) { return std::to_string(c.*outer.*member); }};
}

template <class T>
Field double_field(T ExperimentConfig::*outer, double T::*member) {
  return {[=](ExperimentConfig& c, const std::string& v) {
            c.*outer.*member = parse_double("", v);
          },
          [=](const ExperimentConfig& c) { return fmt_double(c.*outer.*member); }};
}

inline std::string shifts_to_string(const std::vector<RegimeShift>& shifts) {
  if (shifts.empty()) return "none";
  std::string out;
  for (std::size_t i = 0; i < shifts.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(shifts[i].type_index) + ":" + std::to_string(shifts[i].at_step) +
           ":" + fmt_double(shifts[i].new_q);
  }
  return out;
}

inline std::vector<RegimeShift> parse_shifts(const std::string& v) {
  if (v == "none" || v.empty()) return {};
  if (v == "default") return default_shift_schedule();
  std::vector<RegimeShift> out;
  for (const std::string& item : split_list(v)) {
    const auto a = item.find(':');
    const auto b = item.find(':', a == std::string::npos ? a : a + 1);
    if (a == std::string::npos || b == std::string::npos)
      throw ConfigError("key 'shifts': expected type:step:q entries, got '" + item + "'");
    out.push_back({parse_integer<int>("shifts", trim(item.substr(0, a))),
                   parse_integer<int>("shifts", trim(item.substr(a + 1, b - a - 1))),
                   parse_double("shifts", trim(item.substr(b + 1)))});
  }
  return out;
}

inline const std::map<std::string, Field>& fields() {
  using C = ExperimentConfig;
  static const std::map<std::string, Field> table = [] {
    std::map<std::string, Field> f;
    f["n_types"] = int_field(&C::env, &EnvConfig::n_types);
    f["n_units"] = int_field(&C::env, &EnvConfig::n_units);
    f["horizon"] = int_field(&C::env, &EnvConfig::horizon);
    f["drift_sigma"] = double_field(&C::env, &EnvConfig::drift_sigma);
    f["beta_a"] = double_field(&C::env, &EnvConfig::beta_a);
    f["beta_b"] = double_field(&C::env, &EnvConfig::beta_b);
    f["shifts"] = {[](C& c, const std::string& v) { c.env.shifts = parse_shifts(v); },
                   [](const C& c) { return shifts_to_string(c.env.shifts); }};
    f["seed"] = {[](C& c, const std::string& v) {
                   c.env.seed = parse_integer<std::uint64_t>("seed", v);
                 },
                 [](const C& c) { return std::to_string(c.env.seed); }};
    f["strategies"] = {[](C& c, const std::string& v) {
                         c.strategies.clear();
                         for (const auto& s : split_list(v))
                           c.strategies.push_back(parse_policy_kind(s));
                       },
                       [](const C& c) {
                         std::string out;
                         for (std::size_t i = 0; i < c.strategies.size(); ++i)
                           out += (i ? "," : "") + std::string(to_string(c.strategies[i]));
                         return out;
                       }};
    auto plain_int = [](int C::*m) {
      return Field{[=](C& c, const std::string& v) { c.*m = parse_integer<int>("", v); },
                   [=](const C& c) { return std::to_string(c.*m); }};
    };
    auto plain_bool = [](bool C::*m) {
      return Field{[=](C& c, const std::string& v) { c.*m = parse_bool("", v); },
                   [=](const C& c) { return std::string(c.*m ? "true" : "false"); }};
    };
    f["burn_in"] = plain_int(&C::burn_in);
    f["window"] = plain_int(&C::window);
    f["n_sims"] = plain_int(&C::n_sims);
    f["tau"] = plain_int(&C::tau);
    f["workers"] = plain_int(&C::workers);
    f["eps_clip"] = {[](C& c, const std::string& v) { c.eps_clip = parse_double("", v); },
                     [](const C& c) { return fmt_double(c.eps_clip); }};
    f["output_dir"] = {[](C& c, const std::string& v) { c.output_dir = v; },
                       [](const C& c) { return c.output_dir; }};
    f["emit_plots"] = plain_bool(&C::emit_plots);
    f["emit_qtable"] = plain_bool(&C::emit_qtable);
    f["verbose"] = plain_bool(&C::verbose);
    f["oracle_method"] = {[](C& c, const std::string& v) {
                            if (v == "greedy") c.oracle_method = OracleMethod::kGreedy;
                            else if (v == "lagrangian") c.oracle_method = OracleMethod::kLagrangian;
                            else throw ConfigError("oracle_method must be greedy or lagrangian");
                          },
                          [](const C& c) {
                            return std::string(c.oracle_method == OracleMethod::kGreedy
                                                   ? "greedy"
                                                   : "lagrangian");
                          }};
    f["zero_method"] = {[](C& c, const std::string& v) {
                          if (v == "wilcox") c.zero_method = ZeroMethod::kWilcox;
                          else if (v == "pratt") c.zero_method = ZeroMethod::kPratt;
                          else throw ConfigError("zero_method must be wilcox or pratt");
                        },
                        [](const C& c) {
                          return std::string(c.zero_method == ZeroMethod::kWilcox ? "wilcox"
                                                                                  : "pratt");
                        }};
    f["compare_a"] = {[](C& c, const std::string& v) { c.compare_a = parse_policy_kind(v); },
                      [](const C& c) { return std::string(to_string(c.compare_a)); }};
    f["compare_b"] = {[](C& c, const std::string& v) { c.compare_b = parse_policy_kind(v); },
                      [](const C& c) { return std::string(to_string(c.compare_b)); }};

    f["lagrangian.lambda_min"] = double_field(&C::lagrangian, &LagrangianConfig::lambda_min);
    f["lagrangian.lambda_max"] = double_field(&C::lagrangian, &LagrangianConfig::lambda_max);
    f["lagrangian.grid_points"] = int_field(&C::lagrangian, &LagrangianConfig::grid_points);
    f["lagrangian.bisect_tol"] = double_field(&C::lagrangian, &LagrangianConfig::bisect_tol);
    f["lagrangian.max_iters"] = int_field(&C::lagrangian, &LagrangianConfig::max_iters);
    f["lagrangian.scan_intervals"] = int_field(&C::lagrangian, &LagrangianConfig::scan_intervals);
    f["lagrangian.budget_tol"] = {
        [](C& c, const std::string& v) {
          if (v == "auto") c.lagrangian.budget_tol.reset();
          else c.lagrangian.budget_tol = parse_double("", v);
        },
        [](const C& c) {
          // resolved value so the metadata is self-contained
          return fmt_double(c.lagrangian.budget_tol.value_or(0.5 * c.env.n_types));
        }};

    f["agent.alpha0"] = double_field(&C::agent, &AgentConfig::alpha0);
    f["agent.alpha_decay"] = double_field(&C::agent, &AgentConfig::alpha_decay);
    f["agent.alpha_min"] = double_field(&C::agent, &AgentConfig::alpha_min);
    f["agent.gamma"] = double_field(&C::agent, &AgentConfig::gamma);
    f["agent.eps0"] = double_field(&C::agent, &AgentConfig::eps0);
    f["agent.eps_decay"] = double_field(&C::agent, &AgentConfig::eps_decay);
    f["agent.eps_min"] = double_field(&C::agent, &AgentConfig::eps_min);
    f["agent.eps_boost"] = double_field(&C::agent, &AgentConfig::eps_boost);
    f["agent.gap_threshold"] = double_field(&C::agent, &AgentConfig::gap_threshold);
    f["agent.gap_count"] = int_field(&C::agent, &AgentConfig::gap_count);
    f["agent.w1"] = double_field(&C::agent, &AgentConfig::w1);
    f["agent.w2"] = double_field(&C::agent, &AgentConfig::w2);
    f["agent.offline_episodes"] = int_field(&C::agent, &AgentConfig::offline_episodes);
    f["agent.belief_bins"] = int_field(&C::agent, &AgentConfig::belief_bins);
    f["agent.alloc_quantum"] = int_field(&C::agent, &AgentConfig::alloc_quantum);
    f["agent.reward_smooth_window"] = int_field(&C::agent, &AgentConfig::reward_smooth_window);
    f["agent.q_clip"] = double_field(&C::agent, &AgentConfig::q_clip);
    f["agent.delta_menu"] = {[](C& c, const std::string& v) {
                               c.agent.delta_menu.clear();
                               for (const auto& s : split_list(v))
                                 c.agent.delta_menu.push_back(parse_integer<int>("", s));
                             },
                             [](const C& c) { return join_ints(c.agent.delta_menu); }};
    return f;
  }();
  return table;
}

}  // namespace config_detail

// Applies one key; throws ConfigError naming the key on unknown keys or
// malformed values.
inline void set_config_value(ExperimentConfig& cfg, const std::string& key,
                             const std::string& value) {
  const auto& f = config_detail::fields();
  const auto it = f.find(key);
  if (it == f.end()) throw ConfigError("unknown config key '" + key + "'");
  try {
    it->second.set(cfg, value);
  } catch (const ConfigError& e) {
    std::string msg = e.what();
    if (msg.rfind("key ''", 0) == 0) msg.replace(0, 6, "key '" + key + "'");
    throw ConfigError(msg);
  }
}

inline ExperimentConfig parse_config_text(std::string_view text,
                                          ExperimentConfig cfg = ExperimentConfig{}) {
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string body = config_detail::trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
    const std::string key = config_detail::trim(std::string_view(body).substr(0, eq));
    const std::string value = config_detail::trim(std::string_view(body).substr(eq + 1));
    try {
      set_config_value(cfg, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  validate(cfg);
  return cfg;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

// Every key with its resolved value, parseable by parse_config_text.
inline std::string to_config_text(const ExperimentConfig& cfg) {
  std::string out;
  for (const auto& [key, field] : config_detail::fields())
    out += key + " = " + field.get(cfg) + "\n";
  return out;
}

}  // namespace alloc_arena
