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

// Lagrangian relaxation of min sum_i g(n_i, q_i) s.t. sum_i n_i = N.
//
// For each multiplier on a log-spaced grid the per-type stationarity
// condition dg/dn = lambda is solved (closed form for tau = 1, bisection
// otherwise). Among multipliers whose continuous allocations meet the budget
// within budget_tol, the lowest objective wins; it is then rounded to a
// feasible integer allocation.

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "alloc_arena/coverage.hpp"
#include "alloc_arena/error.hpp"

namespace alloc_arena {

struct LagrangianConfig {
  double lambda_min = -0.5;
  double lambda_max = -1e-6;
  int grid_points = 2000;
  double bisect_tol = 1e-8;
  int max_iters = 200;
  std::optional<double> budget_tol;  // defaults to 0.5 * C
  int scan_intervals = 16;
};

inline void validate(const LagrangianConfig& cfg) {
  if (!(cfg.lambda_min < cfg.lambda_max && cfg.lambda_max < 0.0))
    throw ConfigError("lambda grid needs lambda_min < lambda_max < 0");
  if (cfg.grid_points < 2) throw ConfigError("grid_points must be >= 2");
  if (!(cfg.bisect_tol > 0.0)) throw ConfigError("bisect_tol must be > 0");
  if (cfg.max_iters < 1) throw ConfigError("max_iters must be >= 1");
  if (cfg.budget_tol && !(*cfg.budget_tol > 0.0)) throw ConfigError("budget_tol must be > 0");
  if (cfg.scan_intervals < 1) throw ConfigError("scan_intervals must be >= 1");
}

// Ascending multipliers, log-spaced in magnitude.
inline std::vector<double> lambda_grid(const LagrangianConfig& cfg) {
  validate(cfg);
  const double lo = std::log(-cfg.lambda_min);
  const double hi = std::log(-cfg.lambda_max);
  std::vector<double> grid(static_cast<std::size_t>(cfg.grid_points));
  for (int k = 0; k < cfg.grid_points; ++k) {
    const double frac = static_cast<double>(k) / (cfg.grid_points - 1);
    grid[static_cast<std::size_t>(k)] = -std::exp(lo + frac * (hi - lo));
  }
  grid.front() = cfg.lambda_min;
  grid.back() = cfg.lambda_max;
  return grid;
}

// Root of q^n ln q = lambda.
inline double closed_form_n(double q, double lambda) {
  if (!(q > 0.0 && q < 1.0))
    throw SingularInputError("closed_form_n needs 0 < q < 1, got q=" + std::to_string(q));
  const double lq = std::log(q);
  const double ratio = lambda / lq;
  if (!(ratio > 0.0))
    throw DomainError("closed_form_n needs lambda / ln(q) > 0, got lambda=" +
                      std::to_string(lambda));
  return std::log(ratio) / lq;
}

struct Bracket {
  double lo = 1.0;
  double hi = 1.0;
};

// Midpoint bisection on f(n) = dg/dn - lambda over [lo, hi]. Stops once
// |f(mid)| < bisect_tol and the bracket is narrower than bisect_tol.
inline double bisect_n(double q, double lambda, Tau tau, const LagrangianConfig& cfg,
                       Bracket bracket) {
  double lo = bracket.lo;
  double hi = bracket.hi;
  double f_lo = f_derivative(lo, q, lambda, tau);
  const double f_hi = f_derivative(hi, q, lambda, tau);
  if (f_lo == 0.0) return lo;
  if (f_hi == 0.0) return hi;
  if ((f_lo < 0.0) == (f_hi < 0.0))
    throw BracketError("f has the same sign at n=" + std::to_string(lo) + " and n=" +
                       std::to_string(hi));
  for (int it = 0; it < cfg.max_iters; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double f_mid = f_derivative(mid, q, lambda, tau);
    if (std::abs(f_mid) < cfg.bisect_tol && (hi - lo) < cfg.bisect_tol) return mid;
    if (f_mid == 0.0) return mid;
    if ((f_lo < 0.0) != (f_mid < 0.0)) {
      hi = mid;
    } else {
      lo = mid;
      f_lo = f_mid;
    }
  }
  throw ConvergenceError("bisection did not converge in " + std::to_string(cfg.max_iters) +
                         " iterations (q=" + std::to_string(q) +
                         ", lambda=" + std::to_string(lambda) + ")");
}

// Scans [lo, hi] in equal subintervals for a sign change of f. A rising
// crossing (a local minimum of g - lambda n) is preferred over a falling one.
inline std::optional<Bracket> find_bracket(double q, double lambda, Tau tau, double lo,
                                           double hi, int intervals) {
  std::optional<Bracket> falling;
  double a = lo;
  double fa = f_derivative(a, q, lambda, tau);
  for (int k = 1; k <= intervals; ++k) {
    const double b = lo + (hi - lo) * k / intervals;
    const double fb = f_derivative(b, q, lambda, tau);
    if (fa <= 0.0 && fb >= 0.0 && (fa != 0.0 || fb != 0.0)) return Bracket{a, b};
    if (!falling && fa > 0.0 && fb < 0.0) falling = Bracket{a, b};
    a = b;
    fa = fb;
  }
  return falling;
}

// Minimizer of g(n, q) - lambda * n over [1, n_max]: the stationary point
// when one exists, otherwise whichever endpoint is lower.
inline double stationary_n(double q, double lambda, Tau tau, const LagrangianConfig& cfg,
                           double n_max) {
  if (tau.value() == 1) return std::clamp(closed_form_n(q, lambda), 1.0, n_max);
  auto lagr = [&](double n) { return g_tail(n, q, tau) - lambda * n; };
  double best = 1.0;
  double best_val = lagr(1.0);
  if (lagr(n_max) < best_val) {
    best = n_max;
    best_val = lagr(n_max);
  }
  if (n_max > 1.0) {
    if (auto br = find_bracket(q, lambda, tau, 1.0, n_max, cfg.scan_intervals)) {
      const double root = bisect_n(q, lambda, tau, cfg, *br);
      if (lagr(root) < best_val) best = root;
    }
  }
  return best;
}

struct LagrangianSolution {
  Allocation allocation;
  double lambda = 0.0;
  std::vector<double> continuous_n;
  double objective = 0.0;  // sum of g over the continuous n
  bool fallback = false;   // no multiplier met the budget tolerance
};

// Floors, keeps every type at >= 1 unit, settles the remainder greedily, then
// applies improving single-unit transfers.
inline Allocation round_allocation(std::span<const double> q, std::span<const double> n_cont,
                                   int budget, Tau tau) {
  std::vector<int> n(n_cont.size());
  for (std::size_t i = 0; i < n.size(); ++i)
    n[i] = std::max(1, static_cast<int>(std::floor(n_cont[i])));
  return improve_by_transfers(q, greedy_rebalance(q, Allocation(std::move(n)), budget, tau), tau);
}

inline LagrangianSolution solve_lagrangian(std::span<const double> q, int budget, Tau tau,
                                           const LagrangianConfig& cfg = {}) {
  validate(cfg);
  if (q.empty()) throw InputError("empty complement-probability vector");
  if (budget < static_cast<int>(q.size()))
    throw AllocationError("budget " + std::to_string(budget) + " is below the type count");
  for (double v : q)
    if (!(v > 0.0 && v < 1.0))
      throw SingularInputError("solve_lagrangian needs every q_i in (0, 1)");

  const double tol = cfg.budget_tol.value_or(0.5 * static_cast<double>(q.size()));
  const double n_max = static_cast<double>(budget);

  LagrangianSolution best;
  bool have_feasible = false;
  double best_obj = std::numeric_limits<double>::infinity();
  double closest_gap = std::numeric_limits<double>::infinity();
  LagrangianSolution closest;

  std::vector<double> n(q.size());
  for (double lambda : lambda_grid(cfg)) {
    double sum = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) {
      n[i] = stationary_n(q[i], lambda, tau, cfg, n_max);
      sum += n[i];
    }
    const double gap = std::abs(sum - n_max);
    if (gap < tol) {
      double obj = 0.0;
      for (std::size_t i = 0; i < q.size(); ++i) obj += g_tail(n[i], q[i], tau);
      if (obj < best_obj) {
        best_obj = obj;
        best.lambda = lambda;
        best.continuous_n = n;
        best.objective = obj;
        have_feasible = true;
      }
    } else if (!have_feasible && gap < closest_gap) {
      closest_gap = gap;
      closest.lambda = lambda;
      closest.continuous_n = n;
    }
  }
  if (!have_feasible) {
    best = std::move(closest);
    best.fallback = true;
    best.objective = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i)
      best.objective += g_tail(best.continuous_n[i], q[i], tau);
  }
  best.allocation = round_allocation(q, best.continuous_n, budget, tau);
  return best;
}

inline Allocation solve_allocation(std::span<const double> q, int budget, Tau tau,
                                   const LagrangianConfig& cfg = {}) {
  return solve_lagrangian(q, budget, tau, cfg).allocation;
}

}  // namespace alloc_arena
