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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "alloc_arena/stats.hpp"
#include "oracles.hpp"

namespace alloc_arena {
namespace {

namespace ref = alloc_arena::testing;

TEST(Coverage, Examples) {
  EXPECT_EQ(coverage(SignalOutcome{std::vector<int>(10, 0)}), 0);
  EXPECT_EQ(coverage(SignalOutcome{{1, 0, 2, 0, 0, 0, 0, 0, 0, 5}}, Tau{1}), 3);
  EXPECT_EQ(coverage(SignalOutcome{{1, 2, 3}}, Tau{2}), 2);
}

TEST(Coverage, MonotoneInThreshold) {
  std::mt19937_64 eng(2);
  for (int rep = 0; rep < 200; ++rep) {
    SignalOutcome o;
    for (int i = 0; i < 10; ++i) o.x.push_back(static_cast<int>(eng() % 5));
    EXPECT_LE(coverage(o, Tau{2}), coverage(o, Tau{1}));
    EXPECT_LE(coverage(o, Tau{3}), coverage(o, Tau{2}));
  }
}

TEST(Mse, Examples) {
  const std::vector<double> p{0.1, 0.7};
  EXPECT_EQ(estimation_mse(p, p), 0.0);
  const std::vector<double> a{0.5};
  const std::vector<double> b{0.3};
  EXPECT_NEAR(estimation_mse(a, b), 0.04, 1e-15);
  const std::vector<double> h{0.1, 0.9};
  const std::vector<double> t{0.2, 0.8};
  EXPECT_NEAR(estimation_mse(h, t), 0.01, 1e-15);
  EXPECT_THROW(estimation_mse(a, h), InputError);
}

TEST(Mse, PermutationInvariant) {
  std::mt19937_64 eng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> h(8), t(8);
  for (std::size_t i = 0; i < 8; ++i) {
    h[i] = u(eng);
    t[i] = u(eng);
  }
  const double base = estimation_mse(h, t);
  std::vector<std::size_t> idx(8);
  for (std::size_t i = 0; i < 8; ++i) idx[i] = i;
  for (int rep = 0; rep < 20; ++rep) {
    std::shuffle(idx.begin(), idx.end(), eng);
    std::vector<double> hp, tp;
    for (std::size_t i : idx) {
      hp.push_back(h[i]);
      tp.push_back(t[i]);
    }
    EXPECT_NEAR(estimation_mse(hp, tp), base, 1e-15);
  }
}

TEST(Ranks, AverageTies) {
  const std::vector<double> v{3.0, 1.0, 3.0, 2.0};
  EXPECT_EQ(average_ranks(v), (std::vector<double>{3.5, 1.0, 3.5, 2.0}));
}

TEST(Wilcoxon, HandExample) {
  const std::vector<double> x{1.0, 0.0, 3.0};
  const std::vector<double> y{0.0, 2.0, 0.0};
  const WilcoxonResult r = wilcoxon_signed_rank(x, y);
  EXPECT_DOUBLE_EQ(r.w, 2.0);
  EXPECT_EQ(r.n_effective, 3);
  EXPECT_GE(r.p_value, 0.0);
  EXPECT_LE(r.p_value, 1.0);
}

TEST(Wilcoxon, AllZeroIsDegenerate) {
  const std::vector<double> x{1.0, 2.0, 3.0, 4.0, 5.0};
  EXPECT_THROW(wilcoxon_signed_rank(x, x), DegenerateSampleError);
  EXPECT_THROW(wilcoxon_signed_rank(x, x, ZeroMethod::kPratt), DegenerateSampleError);
}

TEST(Wilcoxon, LengthMismatch) {
  const std::vector<double> x{1.0, 2.0};
  const std::vector<double> y{1.0};
  EXPECT_THROW(wilcoxon_signed_rank(x, y), InputError);
}

TEST(Wilcoxon, ZerosDiscardedByDefault) {
  const std::vector<double> x{1, 5, 3, 8, 2, 4};
  const std::vector<double> y{1, 2, 3, 1, 4, 4};
  const WilcoxonResult r = wilcoxon_signed_rank(x, y);
  EXPECT_EQ(r.n_effective, 3);
  // d = (3, 7, -2) -> ranks (2, 3, 1)
  EXPECT_DOUBLE_EQ(r.w, 2 + 3 - 1);
}

TEST(Wilcoxon, PrattRanksZeros) {
  const std::vector<double> x{1, 5, 3, 8, 2, 4};
  const std::vector<double> y{1, 2, 3, 1, 4, 4};
  const WilcoxonResult r = wilcoxon_signed_rank(x, y, ZeroMethod::kPratt);
  // zeros take ranks 1..3, d = (3, 7, -2) -> ranks (5, 6, 4)
  EXPECT_DOUBLE_EQ(r.w, 5 + 6 - 4);
  EXPECT_EQ(r.n_effective, 3);
}

TEST(Wilcoxon, Antisymmetric) {
  std::mt19937_64 eng(6);
  std::normal_distribution<double> nd(0.0, 1.0);
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<double> x(15), y(15);
    for (std::size_t i = 0; i < 15; ++i) {
      x[i] = std::round(nd(eng) * 3);
      y[i] = std::round(nd(eng) * 3);
    }
    if (x == y) continue;
    const WilcoxonResult a = wilcoxon_signed_rank(x, y);
    const WilcoxonResult b = wilcoxon_signed_rank(y, x);
    EXPECT_DOUBLE_EQ(a.w, -b.w);
    EXPECT_NEAR(a.p_value, b.p_value, 1e-12);
  }
}

TEST(Wilcoxon, ShiftIncreasesStatistic) {
  const std::vector<double> x{0.3, -1.2, 2.5, 0.9, -0.4, 1.7, -2.2, 0.05};
  const std::vector<double> y(x.size(), 0.0);
  const double base = wilcoxon_signed_rank(x, y).w;
  std::vector<double> shifted = x;
  for (double& v : shifted) v += 0.1;  // -0.4 -> -0.3 keeps magnitudes distinct
  EXPECT_GT(wilcoxon_signed_rank(shifted, y).w, base);
}

TEST(Wilcoxon, BoundedStatistic) {
  std::mt19937_64 eng(8);
  std::uniform_int_distribution<int> u(-3, 3);
  for (int rep = 0; rep < 100; ++rep) {
    std::vector<double> x(12), y(12, 0.0);
    for (double& v : x) v = u(eng);
    if (std::all_of(x.begin(), x.end(), [](double v) { return v == 0.0; })) continue;
    const WilcoxonResult r = wilcoxon_signed_rank(x, y);
    EXPECT_LE(std::abs(r.w), r.n_effective * (r.n_effective + 1) / 2.0);
    EXPECT_GE(r.p_value, 0.0);
    EXPECT_LE(r.p_value, 1.0);
  }
}

TEST(Wilcoxon, MatchesExactSignFlip) {
  std::mt19937_64 eng(10);
  std::normal_distribution<double> nd(0.0, 1.0);
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<double> x(10), y(10);
    for (std::size_t i = 0; i < 10; ++i) {
      x[i] = nd(eng) + 0.3;
      y[i] = nd(eng);
    }
    const WilcoxonResult r = wilcoxon_signed_rank(x, y);
    std::vector<double> absd(10);
    for (std::size_t i = 0; i < 10; ++i) absd[i] = std::abs(x[i] - y[i]);
    const double exact = ref::exact_signflip_p(average_ranks(absd), r.w);
    EXPECT_NEAR(r.p_value, exact, 0.02) << "rep " << rep;
  }
}

TEST(Wilcoxon, LargeSampleDetectsShift) {
  std::mt19937_64 eng(12);
  std::normal_distribution<double> nd(0.0, 1.0);
  std::vector<double> x(500), y(500);
  for (std::size_t i = 0; i < 500; ++i) {
    x[i] = nd(eng) + 0.3;
    y[i] = nd(eng);
  }
  const WilcoxonResult r = wilcoxon_signed_rank(x, y);
  EXPECT_GT(r.w, 0.0);
  EXPECT_LT(r.p_value, 1e-3);
}

}  // namespace
}  // namespace alloc_arena
