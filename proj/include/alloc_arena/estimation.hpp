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
#include <deque>
#include <utility>
#include <vector>

#include "alloc_arena/coverage.hpp"
#include "alloc_arena/env.hpp"
#include "alloc_arena/error.hpp"

namespace alloc_arena {

// Rolling estimate of per-type detection probabilities.
//
// The estimate is a weighted mean of per-step empirical rates X_i / n_i over
// the last `window` steps, the k-th most recent step weighted by 1/k and the
// weights normalized over the entries present. Results are clipped to
// [eps_clip, 1 - eps_clip].
struct BeliefState {
  int window = 10;
  double eps_clip = 1e-6;
  std::deque<std::pair<Allocation, SignalOutcome>> history;  // front = most recent
  std::vector<double> p_hat;

  BeliefState() = default;
  BeliefState(int types, int window_length, double clip = 1e-6)
      : window(window_length), eps_clip(clip),
        p_hat(static_cast<std::size_t>(types), clip) {
    if (types < 1) throw InputError("belief needs at least one type");
    if (window_length < 1) throw InputError("belief window must be >= 1");
    if (!(clip > 0.0 && clip < 0.5)) throw InputError("eps_clip must lie in (0, 0.5)");
  }

  std::size_t types() const noexcept { return p_hat.size(); }
  bool empty() const noexcept { return history.empty(); }
};

inline BeliefState update_belief(BeliefState belief, const Allocation& alloc,
                                 const SignalOutcome& outcome) {
  const std::size_t c = belief.types();
  if (alloc.size() != c || outcome.x.size() != c)
    throw InputError("allocation/outcome dimension differs from belief");
  for (std::size_t i = 0; i < c; ++i)
    if (alloc.n[i] < 1) throw InputError("allocation entries must be >= 1");

  belief.history.emplace_front(alloc, outcome);
  while (static_cast<int>(belief.history.size()) > belief.window) belief.history.pop_back();

  double weight_sum = 0.0;
  std::vector<double> acc(c, 0.0);
  for (std::size_t k = 0; k < belief.history.size(); ++k) {
    const double w = 1.0 / static_cast<double>(k + 1);
    const auto& [a, o] = belief.history[k];
    for (std::size_t i = 0; i < c; ++i)
      acc[i] += w * static_cast<double>(o.x[i]) / static_cast<double>(a.n[i]);
    weight_sum += w;
  }
  for (std::size_t i = 0; i < c; ++i)
    belief.p_hat[i] =
        std::clamp(acc[i] / weight_sum, belief.eps_clip, 1.0 - belief.eps_clip);
  return belief;
}

// |X_i / n_i - p_hat_i| per type; the drift trigger for adaptive exploration.
inline std::vector<double> expected_vs_observed_gap(const BeliefState& belief,
                                                    const Allocation& alloc,
                                                    const SignalOutcome& outcome) {
  const std::size_t c = belief.types();
  if (alloc.size() != c || outcome.x.size() != c)
    throw InputError("allocation/outcome dimension differs from belief");
  std::vector<double> gap(c);
  for (std::size_t i = 0; i < c; ++i) {
    if (alloc.n[i] < 1) throw InputError("allocation entries must be >= 1");
    gap[i] = std::abs(static_cast<double>(outcome.x[i]) / alloc.n[i] - belief.p_hat[i]);
  }
  return gap;
}

}  // namespace alloc_arena
