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

// Coverage objective, binomial tail g(n, q, tau), its derivative in n, and
// the exact greedy integer allocator.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "alloc_arena/error.hpp"

namespace alloc_arena {

// Units per configuration type. Feasible iff every entry is >= 1 and the
// entries sum to the budget.
struct Allocation {
  std::vector<int> n;

  Allocation() = default;
  explicit Allocation(std::vector<int> units) : n(std::move(units)) {}

  std::size_t size() const noexcept { return n.size(); }
  int total() const noexcept { return std::accumulate(n.begin(), n.end(), 0); }
  int operator[](std::size_t i) const { return n[i]; }

  friend bool operator==(const Allocation&, const Allocation&) = default;
};

inline bool is_feasible(const Allocation& alloc, int budget) noexcept {
  if (alloc.n.empty()) return false;
  for (int v : alloc.n)
    if (v < 1) return false;
  return alloc.total() == budget;
}

inline void require_feasible(const Allocation& alloc, int budget) {
  if (!is_feasible(alloc, budget))
    throw AllocationError("allocation must have every n_i >= 1 and sum to " +
                          std::to_string(budget));
}

// N div C each, remainder to the lowest indices.
inline Allocation uniform_allocation(int types, int budget) {
  if (types < 1 || budget < types)
    throw AllocationError("uniform allocation needs 1 <= C <= N");
  std::vector<int> n(static_cast<std::size_t>(types), budget / types);
  for (int i = 0; i < budget % types; ++i) ++n[static_cast<std::size_t>(i)];
  return Allocation(std::move(n));
}

// Detection threshold; the tail formulas exist for 1, 2 and 3 only.
class Tau {
 public:
  explicit Tau(int value = 1) : value_(value) {
    if (value < 1 || value > 3)
      throw UnsupportedThresholdError("tau must be 1, 2 or 3, got " + std::to_string(value));
  }
  int value() const noexcept { return value_; }
  friend bool operator==(Tau, Tau) = default;

 private:
  int value_;
};

// Sum over types of 1 - (1 - p_i)^{n_i}.
inline double expected_coverage(std::span<const double> p, const Allocation& alloc) {
  if (p.size() != alloc.size())
    throw InputError("probability vector and allocation differ in length");
  double total = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i)
    total += 1.0 - std::pow(1.0 - p[i], alloc.n[i]);
  return total;
}

// P(fewer than tau signals) for n units whose per-unit miss probability is q,
// i.e. the Binomial(n, 1 - q) CDF at tau - 1. Binomial coefficients are taken
// in their polynomial form so the function is defined for real n.
inline double g_tail(double n, double q, Tau tau) {
  const double r = 1.0 - q;
  double g = std::pow(q, n);
  if (tau.value() >= 2) g += n * std::pow(q, n - 1.0) * r;
  if (tau.value() >= 3) {
    const double coeff = n * (n - 1.0) / 2.0;
    // coeff is 0 at n = 1 where q^{n-2} may be infinite
    if (coeff != 0.0) g += coeff * std::pow(q, n - 2.0) * r * r;
  }
  return g;
}

// d g_tail / d n minus lambda. Requires 0 < q < 1.
inline double f_derivative(double n, double q, double lambda, Tau tau) {
  if (!(q > 0.0 && q < 1.0))
    throw SingularInputError("f_derivative needs 0 < q < 1, got q=" + std::to_string(q));
  const double lq = std::log(q);
  const double odds = (1.0 - q) / q;
  double poly = 1.0;   // g / q^n
  double dpoly = 0.0;  // d(g / q^n) / dn
  if (tau.value() >= 2) {
    poly += n * odds;
    dpoly += odds;
  }
  if (tau.value() >= 3) {
    poly += n * (n - 1.0) / 2.0 * odds * odds;
    dpoly += odds * odds / 2.0 * (2.0 * n - 1.0);
  }
  return std::pow(q, n) * (lq * poly + dpoly) - lambda;
}

// Gain in -g_tail from giving one more unit to a type currently at n units.
inline double marginal_gain(int n, double q, Tau tau) {
  return g_tail(n, q, tau) - g_tail(n + 1, q, tau);
}

// Moves `alloc` to the budget one unit at a time: adds to the largest
// marginal gain, or removes from the smallest marginal loss among types with
// more than one unit. Ties go to the lowest index.
inline Allocation greedy_rebalance(std::span<const double> q, Allocation alloc, int budget,
                                   Tau tau = Tau{1}) {
  if (q.size() != alloc.size()) throw InputError("q and allocation differ in length");
  if (static_cast<int>(alloc.size()) > budget)
    throw AllocationError("budget " + std::to_string(budget) + " is below the type count");
  for (int& v : alloc.n) v = std::max(v, 1);
  int total = alloc.total();
  while (total < budget) {
    std::size_t best = 0;
    double best_gain = -1.0;
    for (std::size_t i = 0; i < q.size(); ++i) {
      const double gain = marginal_gain(alloc.n[i], q[i], tau);
      if (gain > best_gain) {
        best_gain = gain;
        best = i;
      }
    }
    ++alloc.n[best];
    ++total;
  }
  while (total > budget) {
    std::size_t best = q.size();
    double best_loss = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) {
      if (alloc.n[i] <= 1) continue;
      const double loss = marginal_gain(alloc.n[i] - 1, q[i], tau);
      if (best == q.size() || loss < best_loss) {
        best_loss = loss;
        best = i;
      }
    }
    --alloc.n[best];
    --total;
  }
  return alloc;
}

// Single-unit transfers that strictly lower the summed tail, best first,
// until none helps. Reaches the optimum when g is convex in n (tau = 1).
inline Allocation improve_by_transfers(std::span<const double> q, Allocation alloc,
                                       Tau tau = Tau{1}) {
  if (q.size() != alloc.size()) throw InputError("q and allocation differ in length");
  const int cap = 4 * alloc.total() * static_cast<int>(alloc.size()) + 16;
  for (int iter = 0; iter < cap; ++iter) {
    std::size_t src = q.size();
    std::size_t dst = q.size();
    double best_loss = 0.0;
    double best_gain = -1.0;
    for (std::size_t i = 0; i < q.size(); ++i) {
      if (alloc.n[i] > 1) {
        const double loss = marginal_gain(alloc.n[i] - 1, q[i], tau);
        if (src == q.size() || loss < best_loss) {
          best_loss = loss;
          src = i;
        }
      }
    }
    if (src == q.size()) break;
    for (std::size_t j = 0; j < q.size(); ++j) {
      if (j == src) continue;
      const double gain = marginal_gain(alloc.n[j], q[j], tau);
      if (gain > best_gain) {
        best_gain = gain;
        dst = j;
      }
    }
    if (dst == q.size() || !(best_gain - best_loss > 1e-15)) break;
    --alloc.n[src];
    ++alloc.n[dst];
  }
  return alloc;
}

// Exact minimizer of the summed tail for any tau by dynamic programming over
// (types, units). O(C * N^2).
inline Allocation exact_allocation(std::span<const double> q, int budget, Tau tau) {
  const std::size_t c = q.size();
  if (c == 0) throw InputError("empty complement-probability vector");
  if (budget < static_cast<int>(c))
    throw AllocationError("budget " + std::to_string(budget) + " is below the type count " +
                          std::to_string(c));
  const auto units = static_cast<std::size_t>(budget);
  const double inf = std::numeric_limits<double>::infinity();
  // cost[b]: best sum over the types seen so far using exactly b units
  std::vector<double> cost(units + 1, inf);
  std::vector<std::vector<int>> choice(c, std::vector<int>(units + 1, 0));
  cost[0] = 0.0;
  std::vector<double> tail(units + 1);
  for (std::size_t i = 0; i < c; ++i) {
    for (std::size_t k = 1; k <= units; ++k) tail[k] = g_tail(static_cast<double>(k), q[i], tau);
    std::vector<double> next(units + 1, inf);
    const std::size_t rest = c - i - 1;
    for (std::size_t b = i + 1; b + rest <= units; ++b) {
      for (std::size_t k = 1; k + i <= b; ++k) {
        const double prev = cost[b - k];
        if (prev == inf) continue;
        const double v = prev + tail[k];
        if (v < next[b]) {
          next[b] = v;
          choice[i][b] = static_cast<int>(k);
        }
      }
    }
    cost = std::move(next);
  }
  std::vector<int> n(c);
  std::size_t b = units;
  for (std::size_t i = c; i-- > 0;) {
    n[i] = choice[i][b];
    b -= static_cast<std::size_t>(n[i]);
  }
  return Allocation(std::move(n));
}

// Exact maximizer of expected_coverage: every term is concave in n_i, so
// unit-by-unit greedy on the separable objective is optimal.
inline Allocation greedy_optimal_allocation(std::span<const double> p, int budget) {
  if (p.empty()) throw InputError("empty probability vector");
  if (budget < static_cast<int>(p.size()))
    throw AllocationError("budget " + std::to_string(budget) + " is below the type count " +
                          std::to_string(p.size()));
  std::vector<double> q(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) q[i] = 1.0 - p[i];
  return greedy_rebalance(q, Allocation(std::vector<int>(p.size(), 1)), budget, Tau{1});
}

}  // namespace alloc_arena
