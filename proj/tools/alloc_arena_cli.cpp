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

// Command-line front end: run experiments, solve one allocation, or compare
// two strategies in an existing metrics file.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "alloc_arena/alloc_arena.hpp"

namespace aa = alloc_arena;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitRuntime = 2;

std::vector<double> read_probabilities(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw aa::ConfigError("cannot open probability file '" + path + "'");
  std::vector<double> p;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string body = aa::config_detail::trim(line);
    if (body.empty() || body[0] == '#') continue;
    double v = 0.0;
    try {
      v = aa::config_detail::parse_double("probability", body);
    } catch (const aa::ConfigError&) {
      throw aa::InputError(path + ":" + std::to_string(line_no) + ": not a number: '" + body + "'");
    }
    if (!(v >= 0.0 && v <= 1.0))
      throw aa::InputError(path + ":" + std::to_string(line_no) + ": probability outside [0, 1]");
    p.push_back(v);
  }
  if (p.empty()) throw aa::InputError(path + ": no probabilities found");
  return p;
}

std::uint64_t parse_seed(const std::string& origin, const std::string& text) {
  return aa::config_detail::parse_integer<std::uint64_t>(origin, aa::config_detail::trim(text));
}

int cmd_run(const std::string& config_path, const std::optional<std::string>& seed,
            const std::optional<std::string>& out_dir) {
  aa::ExperimentConfig cfg = aa::load_config(config_path);
  if (const char* env = std::getenv("ALLOC_ARENA_SEED"); env != nullptr && *env != '\0')
    cfg.env.seed = parse_seed("ALLOC_ARENA_SEED", env);
  if (seed) cfg.env.seed = parse_seed("--seed", *seed);
  if (out_dir) cfg.output_dir = *out_dir;
  aa::validate(cfg);

  const aa::ExperimentResult result = aa::run_experiment(cfg);
  const std::vector<std::string> files = aa::write_outputs(result);
  std::cout << aa::summary_text(result);
  std::cout << "wrote";
  for (const std::string& f : files) std::cout << ' ' << f;
  std::cout << " to " << cfg.output_dir << "\n";
  return kExitOk;
}

int cmd_allocate(const std::string& probs_path, int budget, int tau, const std::string& method) {
  const std::vector<double> p = read_probabilities(probs_path);
  aa::Allocation alloc;
  if (method == "greedy") {
    if (tau == 1) {
      alloc = aa::greedy_optimal_allocation(p, budget);
    } else {
      std::vector<double> q(p.size());
      for (std::size_t i = 0; i < p.size(); ++i) q[i] = 1.0 - p[i];
      alloc = aa::exact_allocation(q, budget, aa::Tau{tau});
    }
  } else {
    const double clip = aa::ExperimentConfig{}.eps_clip;
    std::vector<double> q(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) q[i] = std::clamp(1.0 - p[i], clip, 1.0 - clip);
    alloc = aa::solve_allocation(q, budget, aa::Tau{tau});
  }
  for (std::size_t i = 0; i < alloc.size(); ++i) std::cout << (i ? " " : "") << alloc.n[i];
  std::cout << "\n";
  return kExitOk;
}

int cmd_compare(const std::string& csv_path, const std::string& a, const std::string& b,
                int burn_in, const std::string& zeros) {
  aa::parse_policy_kind(a);
  aa::parse_policy_kind(b);
  const std::vector<aa::StepRecord> records = aa::read_csv(csv_path);
  const auto [x, y] = aa::paired_coverage(records, a, b, burn_in);
  if (x.empty())
    throw aa::InputError("no paired records for '" + a + "' and '" + b + "' in " + csv_path);
  const aa::WilcoxonResult r = aa::wilcoxon_signed_rank(
      x, y, zeros == "pratt" ? aa::ZeroMethod::kPratt : aa::ZeroMethod::kWilcox);
  double mean_a = 0.0;
  double mean_b = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mean_a += x[i];
    mean_b += y[i];
  }
  mean_a /= static_cast<double>(x.size());
  mean_b /= static_cast<double>(x.size());
  std::printf("pairs %zu (t >= %d)\n", x.size(), burn_in);
  std::printf("mean coverage %s %.4f  %s %.4f\n", a.c_str(), mean_a, b.c_str(), mean_b);
  std::printf("W=%.1f n=%d z=%.4f p=%.6g\n", r.w, r.n_effective, r.z, r.p_value);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Signal-driven test allocation experiments"};
  app.set_version_flag("--version", std::string("alloc_arena ") + aa::kVersion);
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::string> seed;
  std::optional<std::string> out_dir;
  CLI::App* run = app.add_subcommand("run", "Run a replicated experiment from a config file");
  run->add_option("--config", config_path, "Flat key = value config file")->required();
  run->add_option("--seed", seed, "Root seed (overrides ALLOC_ARENA_SEED and the config)");
  run->add_option("--out", out_dir, "Output directory");

  std::string probs_path;
  int budget = 0;
  int tau = 1;
  std::string method = "lagrangian";
  CLI::App* allocate = app.add_subcommand("allocate", "Solve one allocation");
  allocate->add_option("--probs", probs_path, "File with one detection probability per line")
      ->required();
  allocate->add_option("--budget", budget, "Units to allocate")->required();
  allocate->add_option("--tau", tau, "Detection threshold")->check(CLI::Range(1, 3));
  allocate->add_option("--method", method, "Solver")
      ->check(CLI::IsMember({"lagrangian", "greedy"}));

  std::string csv_path;
  std::string a;
  std::string b;
  int burn_in = 10;
  std::string zeros = "wilcox";
  CLI::App* compare = app.add_subcommand("compare", "Wilcoxon test on a metrics.csv");
  compare->add_option("--csv", csv_path, "metrics.csv from a run")->required();
  compare->add_option("--a", a, "First strategy")->required();
  compare->add_option("--b", b, "Second strategy")->required();
  compare->add_option("--burn-in", burn_in, "Only pair steps t >= this")
      ->check(CLI::NonNegativeNumber);
  compare->add_option("--zeros", zeros, "Zero-difference handling")
      ->check(CLI::IsMember({"wilcox", "pratt"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*run) return cmd_run(config_path, seed, out_dir);
    if (*allocate) return cmd_allocate(probs_path, budget, tau, method);
    if (*compare) return cmd_compare(csv_path, a, b, burn_in, zeros);
  } catch (const aa::ConfigError& e) {
    std::cerr << "alloc_arena: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "alloc_arena: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}
