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

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <vector>

#include "alloc_arena/coverage.hpp"
#include "alloc_arena/env.hpp"
#include "alloc_arena/error.hpp"

namespace alloc_arena {

// Number of types with at least tau signals.
inline int coverage(const SignalOutcome& outcome, Tau tau = Tau{1}) {
  return static_cast<int>(std::count_if(outcome.x.begin(), outcome.x.end(),
                                        [&](int x) { return x >= tau.value(); }));
}

inline double estimation_mse(std::span<const double> p_hat, std::span<const double> p_true) {
  if (p_hat.size() != p_true.size()) throw InputError("estimate and truth differ in length");
  if (p_hat.empty()) throw InputError("empty probability vectors");
  double acc = 0.0;
  for (std::size_t i = 0; i < p_hat.size(); ++i) {
    const double d = p_hat[i] - p_true[i];
    acc += d * d;
  }
  return acc / static_cast<double>(p_hat.size());
}

// Ascending ranks of v (1-based), ties sharing their average rank.
inline std::vector<double> average_ranks(std::span<const double> v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
    i = j + 1;
  }
  return ranks;
}

// Classical treatment drops zero differences before ranking; Pratt ranks them
// and then drops them.
enum class ZeroMethod { kWilcox, kPratt };

struct WilcoxonResult {
  double w = 0.0;        // sum of signed ranks
  int n_effective = 0;   // non-zero differences
  double z = 0.0;
  double p_value = 1.0;  // two-sided
};

// Signed-rank test of median(x - y) = 0 with the normal approximation,
// tie-corrected variance and a 0.5 continuity correction on the
// positive-rank sum.
inline WilcoxonResult wilcoxon_signed_rank(std::span<const double> x, std::span<const double> y,
                                           ZeroMethod zeros = ZeroMethod::kWilcox) {
  if (x.size() != y.size()) throw InputError("paired series differ in length");
  std::vector<double> d(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) d[i] = x[i] - y[i];

  std::vector<double> abs_d;
  if (zeros == ZeroMethod::kWilcox) {
    for (double v : d)
      if (v != 0.0) abs_d.push_back(std::abs(v));
  } else {
    for (double v : d) abs_d.push_back(std::abs(v));
  }
  const std::size_t n_zero =
      static_cast<std::size_t>(std::count(d.begin(), d.end(), 0.0));
  if (n_zero == d.size()) throw DegenerateSampleError("all paired differences are zero");

  const std::vector<double> ranks = average_ranks(abs_d);
  WilcoxonResult res;
  double w_plus = 0.0;
  {
    std::size_t k = 0;
    for (double v : d) {
      if (zeros == ZeroMethod::kWilcox && v == 0.0) continue;
      const double r = ranks[k++];
      if (v > 0.0) {
        res.w += r;
        w_plus += r;
      } else if (v < 0.0) {
        res.w -= r;
      }
    }
  }
  res.n_effective = static_cast<int>(d.size() - n_zero);

  const double n = static_cast<double>(abs_d.size());
  double mean = n * (n + 1.0) / 4.0;
  double var = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0;
  if (zeros == ZeroMethod::kPratt) {
    const double z0 = static_cast<double>(n_zero);
    mean -= z0 * (z0 + 1.0) / 4.0;
    var -= z0 * (z0 + 1.0) * (2.0 * z0 + 1.0) / 24.0;
  }
  // tie correction over groups of equal non-zero magnitudes
  {
    std::vector<double> nz;
    for (double v : d)
      if (v != 0.0) nz.push_back(std::abs(v));
    std::sort(nz.begin(), nz.end());
    for (std::size_t i = 0; i < nz.size();) {
      std::size_t j = i;
      while (j < nz.size() && nz[j] == nz[i]) ++j;
      const double t = static_cast<double>(j - i);
      var -= (t * t * t - t) / 48.0;
      i = j;
    }
  }

  const double dev = w_plus - mean;
  if (var <= 0.0) {
    res.z = 0.0;
    res.p_value = 1.0;
    return res;
  }
  const double corrected = std::abs(dev) <= 0.5 ? 0.0 : dev - std::copysign(0.5, dev);
  res.z = corrected / std::sqrt(var);
  res.p_value = std::clamp(std::erfc(std::abs(res.z) / std::sqrt(2.0)), 0.0, 1.0);
  return res;
}

}  // namespace alloc_arena
