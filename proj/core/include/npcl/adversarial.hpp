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

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace npcl {

/// Divergence ball for the worst-case reweighting:
///   { r >= 0 : mean(r) = 1, mean((r - 1)^2) <= delta }   (chi-square, f(t) = (t - 1)^2)
struct AdvRiskSpec {
    double delta = 0.0;
};

/// Mean of the 0-1 losses.
double empirical_risk(std::span<const std::uint8_t> losses01);

/// Worst-case reweighted 0-1 risk over the chi-square ball.
///
/// With p the fraction of ones, the optimum puts weight 1 + x on every one and
/// 1 - p x / (1 - p) on every zero; the divergence is p x^2 / (1 - p), so
///   R_adv = min(1, p + sqrt(delta p (1 - p))).
double empirical_adversarial_risk(std::span<const std::uint8_t> losses01, const AdvRiskSpec& spec);

/// Same supremum for arbitrary real losses, solved numerically over the full weight
/// vector from the KKT conditions r_i = max(0, 1 + (l_i - mu) / (2 lambda)): mu by
/// bisection on the mean constraint, lambda by bisection on the divergence constraint.
double solve_adversarial_risk(std::span<const double> losses, const AdvRiskSpec& spec);

/// Divergence mean((r - 1)^2) and objective mean(r * l) of a weight vector; test support.
double chi_square_divergence(std::span<const double> weights);

struct MonotonicityViolation {
    std::size_t first = 0;
    std::size_t second = 0;
    std::string reason;
};

struct MonotonicityReport {
    std::size_t pairs_checked = 0;
    std::vector<MonotonicityViolation> violations;

    bool ok() const noexcept { return violations.empty(); }
};

/// Checks, over every ordered pair (a, b):
///   R_adv(a) < 1:  R(a) < R(b)  <=>  R_adv(a) < R_adv(b)
///   R_adv(a) = 1:  R(a) <= R(b)  =>  R_adv(b) = 1
/// The converse of the second line does not hold: two saturated vectors can have
/// either risk order.
/// Requires at least two vectors of equal length.
MonotonicityReport check_monotonicity(std::span<const std::vector<std::uint8_t>> loss_vectors,
                                      const AdvRiskSpec& spec);

}  // namespace npcl
