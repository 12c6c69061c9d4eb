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
#include <cmath>
#include <numeric>
#include <string>

#include "npcl/error.hpp"

namespace npcl {

namespace {

void check_epsilon(double epsilon) {
    if (!(epsilon >= 0.0 && epsilon < 1.0))
        throw InvalidInput("threshold: noise prior epsilon must lie in [0, 1)");
}

void check_problem(std::span<const double> losses, double threshold) {
    if (losses.empty()) throw InvalidInput("selection: empty loss vector");
    for (double l : losses)
        if (!std::isfinite(l) || l < 0.0)
            throw InvalidInput("selection: losses must be finite and non-negative");
    const double limit = 2.0 * static_cast<double>(losses.size());
    if (!(threshold >= 0.0 && threshold <= limit))
        throw InvalidInput("selection: threshold C=" + std::to_string(threshold) +
                           " outside [0, 2n]");
}

}  // namespace

ThresholdMode ThresholdMode::npcl_fixed(double epsilon) {
    check_epsilon(epsilon);
    return ThresholdMode(Kind::NpclFixed, epsilon);
}

ThresholdMode ThresholdMode::npcl_adaptive(double epsilon) {
    check_epsilon(epsilon);
    return ThresholdMode(Kind::NpclAdaptive, epsilon);
}

double compute_threshold(const ThresholdMode& mode, std::size_t n, std::size_t misclassified) {
    if (misclassified > n) throw InvalidInput("threshold: misclassified count exceeds n");
    check_epsilon(mode.epsilon());
    const auto nd = static_cast<double>(n);
    const auto md = static_cast<double>(misclassified);
    const double keep = 1.0 - mode.epsilon();
    switch (mode.kind()) {
        case ThresholdMode::Kind::FullQ: return nd + md;
        case ThresholdMode::Kind::FullE: return nd;
        case ThresholdMode::Kind::NpclFixed: return keep * nd;
        case ThresholdMode::Kind::NpclAdaptive: return keep * keep * nd + keep * md;
    }
    return nd;
}

SelectionResult partial_optimize(std::span<const double> losses, double threshold) {
    check_problem(losses, threshold);
    const std::size_t n = losses.size();

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return losses[a] < losses[b]; });

    SelectionResult result;
    result.mask.assign(n, 0);
    result.threshold = threshold;
    result.prefix_sums.resize(n);

    double running = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        running += losses[order[i]];
        result.prefix_sums[i] = running;
        // 1-based rank r = i + 1: select iff L_r <= C + 1 - r
        const double budget = threshold - static_cast<double>(i);
        if (running <= budget) {
            result.mask[order[i]] = 1;
            ++result.selected_count;
        }
    }

    // The accepted ranks form a prefix of the sorted order.
    const std::size_t t = result.selected_count;
    result.selected_loss = t == 0 ? 0.0 : result.prefix_sums[t - 1];
    result.objective = std::max(result.selected_loss, threshold - static_cast<double>(t));
    if (t < n) result.next_index = order[t];
    return result;
}

SelectionResult brute_force_optimize(std::span<const double> losses, double threshold) {
    const std::size_t n = losses.size();
    if (n > kBruteForceLimit)
        throw CapacityError("brute force: n=" + std::to_string(n) + " exceeds limit of " +
                            std::to_string(kBruteForceLimit));
    for (double l : losses)
        if (!std::isfinite(l) || l < 0.0)
            throw InvalidInput("brute force: losses must be finite and non-negative");

    SelectionResult best;
    best.threshold = threshold;
    best.mask.assign(n, 0);
    best.objective = std::max(0.0, threshold);  // empty mask

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return losses[a] < losses[b]; });

    // Bit k of a candidate refers to the k-th smallest loss.
    const std::uint32_t total = std::uint32_t{1} << n;
    for (std::uint32_t bits = 1; bits < total; ++bits) {
        double sum = 0.0;
        std::size_t count = 0;
        for (std::size_t k = 0; k < n; ++k) {
            if (bits & (std::uint32_t{1} << k)) {
                sum += losses[order[k]];
                ++count;
            }
        }
        const double value = std::max(sum, threshold - static_cast<double>(count));
        if (value < best.objective) {
            best.objective = value;
            best.selected_loss = sum;
            best.selected_count = count;
            for (std::size_t k = 0; k < n; ++k) best.mask[order[k]] = (bits >> k) & 1U;
        }
    }
    return best;
}

}  // namespace npcl
