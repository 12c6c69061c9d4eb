/*
 *  Copyright 2026 The npcl Authors
 *
 *  Licensed under the Apache License, Version 2.0 (the "License");
 *  you may not use this file except in compliance with the License.
 *  You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 *  Unless required by applicable law or agreed to in writing, software
 *  distributed under the License is distributed on an "AS IS" BASIS,
 *  WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 *  See the License for the specific language governing permissions and
 *  limitations under the License.
 */

#include "npcl/selector.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

#include <gtest/gtest.h>

#include "npcl/error.hpp"
#include "oracles.hpp"

namespace npcl {
namespace {

using V = std::vector<double>;
using Mask = std::vector<std::uint8_t>;

TEST(PartialOptimize, SelectsThreeSmallest) {
    const auto r = partial_optimize(V{0.1, 0.2, 0.5, 2.0}, 3.0);
    EXPECT_EQ(r.mask, (Mask{1, 1, 1, 0}));
    EXPECT_EQ(r.selected_count, 3u);
    EXPECT_DOUBLE_EQ(r.objective, 0.8);
    EXPECT_DOUBLE_EQ(r.selected_loss, 0.1 + 0.2 + 0.5);
    EXPECT_EQ(r.threshold, 3.0);
    ASSERT_EQ(r.prefix_sums.size(), 4u);
    EXPECT_DOUBLE_EQ(r.prefix_sums[3], 2.8);
}

TEST(PartialOptimize, ZeroLossesAllSelected) {
    const auto r = partial_optimize(V{0.0, 0.0, 0.0}, 3.0);
    EXPECT_EQ(r.mask, (Mask{1, 1, 1}));
    EXPECT_EQ(r.objective, 0.0);
}

TEST(PartialOptimize, ZeroThresholdSelectsNothing) {
    const auto r = partial_optimize(V{0.5, 0.5}, 0.0);
    EXPECT_EQ(r.selected_count, 0u);
    EXPECT_EQ(r.objective, 0.0);
    EXPECT_EQ(r.mask, (Mask{0, 0}));
}

TEST(PartialOptimize, MaskMapsBackToOriginalOrder) {
    const auto r = partial_optimize(V{2.0, 0.1, 0.5, 0.2}, 3.0);
    EXPECT_EQ(r.mask, (Mask{0, 1, 1, 1}));
}

TEST(PartialOptimize, TiesBrokenByOriginalIndex) {
    const auto r = partial_optimize(V{0.5, 0.5, 0.5, 0.5}, 2.0);
    // L_1 = 0.5 <= 2, L_2 = 1.0 <= 1, L_3 = 1.5 > 0
    EXPECT_EQ(r.mask, (Mask{1, 1, 0, 0}));
    const auto again = partial_optimize(V{0.5, 0.5, 0.5, 0.5}, 2.0);
    EXPECT_EQ(again.mask, r.mask);
}

TEST(PartialOptimize, NextIndexHint) {
    const auto r = partial_optimize(V{0.1, 0.2, 0.5, 2.0}, 2.0);
    EXPECT_EQ(r.selected_count, 2u);
    ASSERT_TRUE(r.next_index.has_value());
    EXPECT_EQ(*r.next_index, 2u);
    const auto all = partial_optimize(V{0.0, 0.0}, 2.0);
    EXPECT_FALSE(all.next_index.has_value());
}

TEST(PartialOptimize, RejectsBadInput) {
    EXPECT_THROW(partial_optimize(V{}, 0.0), InvalidInput);
    EXPECT_THROW(partial_optimize(V{-0.1, 1.0}, 1.0), InvalidInput);
    EXPECT_THROW(partial_optimize(V{std::nan(""), 1.0}, 1.0), InvalidInput);
    EXPECT_THROW(partial_optimize(V{1.0, 1.0}, -0.5), InvalidInput);
    EXPECT_THROW(partial_optimize(V{1.0, 1.0}, 4.5), InvalidInput);
    EXPECT_NO_THROW(partial_optimize(V{1.0, 1.0}, 4.0));
}

TEST(Threshold, Substitution) {
    EXPECT_EQ(compute_threshold(ThresholdMode::full_q(), 4, 1), 5.0);
    EXPECT_EQ(compute_threshold(ThresholdMode::full_e(), 4, 1), 4.0);
    EXPECT_NEAR(compute_threshold(ThresholdMode::npcl_fixed(0.2), 128, 0), 102.4, 1e-12);
    EXPECT_NEAR(compute_threshold(ThresholdMode::npcl_adaptive(0.2), 128, 30), 105.92, 1e-12);
}

TEST(Threshold, EpsilonRange) {
    EXPECT_THROW(ThresholdMode::npcl_fixed(1.0), InvalidInput);
    EXPECT_THROW(ThresholdMode::npcl_adaptive(-0.1), InvalidInput);
    EXPECT_NO_THROW(ThresholdMode::npcl_fixed(0.0));
    EXPECT_THROW(compute_threshold(ThresholdMode::full_q(), 4, 5), InvalidInput);
}

TEST(Threshold, StaysWithinTwoN) {
    npcl_test::Gen g(8);
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t n = 1 + g.index(200);
        const std::size_t mis = g.index(n + 1);
        const double eps = g.uniform(0.0, 0.99);
        for (const auto& mode : {ThresholdMode::full_q(), ThresholdMode::full_e(),
                                 ThresholdMode::npcl_fixed(eps), ThresholdMode::npcl_adaptive(eps)}) {
            const double c = compute_threshold(mode, n, mis);
            EXPECT_GE(c, 0.0);
            EXPECT_LE(c, 2.0 * static_cast<double>(n));
        }
    }
}

TEST(BruteForce, Examples) {
    EXPECT_DOUBLE_EQ(brute_force_optimize(V{0.1, 0.2, 0.5, 2.0}, 3.0).objective, 0.8);
    const auto two = brute_force_optimize(V{0.1, 0.2, 0.5, 2.0}, 2.0);
    EXPECT_NEAR(two.objective, 0.3, 1e-15);
    EXPECT_EQ(two.selected_count, 2u);
    const auto zero = brute_force_optimize(V{3.0, 1.0, 0.0}, 0.0);
    EXPECT_EQ(zero.objective, 0.0);
    EXPECT_EQ(zero.selected_count, 0u);
}

TEST(BruteForce, CapacityLimit) {
    EXPECT_THROW(brute_force_optimize(V(kBruteForceLimit + 1, 0.5), 1.0), CapacityError);
}

TEST(BruteForce, AgreesWithIndependentEnumeration) {
    npcl_test::Gen g(19);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t n = 1 + g.index(10);
        const auto losses = g.vec(n, 0.0, 4.0);
        const double c = g.uniform(0.0, 2.0 * static_cast<double>(n));
        EXPECT_EQ(brute_force_optimize(losses, c).objective, npcl_test::brute_curriculum(losses, c));
    }
}

TEST(Properties, OptimalityIdentitiesPrefixAndMonotonicity) {
    npcl_test::Gen g(23);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 1 + g.index(12);
        const auto losses = g.vec(n, 0.0, 4.0);
        const double c = g.uniform(0.0, 2.0 * static_cast<double>(n));
        const auto r = partial_optimize(losses, c);

        EXPECT_EQ(r.objective, npcl_test::brute_curriculum(losses, c)) << "trial " << trial;
        EXPECT_EQ(r.selected_count,
                  static_cast<std::size_t>(std::count(r.mask.begin(), r.mask.end(), std::uint8_t{1})));

        // In sorted order the mask is a prefix.
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return losses[a] < losses[b]; });
        for (std::size_t i = 0; i < n; ++i) EXPECT_EQ(r.mask[order[i]], i < r.selected_count ? 1 : 0);

        const auto t = static_cast<double>(r.selected_count);
        const double lt = r.selected_count == 0 ? 0.0 : r.prefix_sums[r.selected_count - 1];
        EXPECT_LE(lt, c + 1.0 - t);
        if (r.selected_count < n) {
            const double next = r.prefix_sums[r.selected_count];
            EXPECT_GT(next, c - t);
            EXPECT_GT(next, std::max(lt, c - t));
        }

        const double higher = std::min(2.0 * static_cast<double>(n), c + g.uniform(0.0, 3.0));
        EXPECT_GE(partial_optimize(losses, higher).selected_count, r.selected_count);
    }
}

}  // namespace
}  // namespace npcl
