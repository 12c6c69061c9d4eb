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
#include <span>
#include <vector>

namespace npcl {

/// Per-sample upper bound of the 0-1 loss used as the base loss l(u).
class BaseLoss {
public:
    enum class Kind { HardHinge, SoftHinge, Weighted };

    static BaseLoss hard_hinge() { return BaseLoss(Kind::HardHinge, 0.0); }
    static BaseLoss soft_hinge() { return BaseLoss(Kind::SoftHinge, 1.0); }
    /// beta * soft + (1 - beta) * hard. Throws InvalidInput unless beta is in [0, 1].
    static BaseLoss weighted(double beta);

    Kind kind() const noexcept { return kind_; }
    double beta() const noexcept { return beta_; }

    friend bool operator==(const BaseLoss&, const BaseLoss&) = default;

private:
    BaseLoss(Kind kind, double beta) : kind_(kind), beta_(beta) {}

    Kind kind_;
    double beta_;
};

/// Index of max_{i != label} logits[i]; ties go to the smallest index.
std::size_t runner_up_index(std::span<const double> logits, std::size_t label);

/// u = t_y - max_{i != y} t_i. Binary problems are the K = 2 case.
double multiclass_margin(std::span<const double> logits, std::size_t label);

/// 1(u < 0); a zero margin counts as correct.
inline int zero_one(double margin) { return margin < 0.0 ? 1 : 0; }

/// max(1 - u, 0).
inline double hinge_of_margin(double margin) { return margin < 1.0 ? 1.0 - margin : 0.0; }

/// Max-shifted log(sum(exp(t))).
double log_sum_exp(std::span<const double> logits);

double hard_hinge(std::span<const double> logits, std::size_t label);

/// Hard hinge for u >= 0, max(1 - t_y + LogSumExp(t), 0) for u < 0.
double soft_hinge(std::span<const double> logits, std::size_t label);

double weighted_loss(std::span<const double> logits, std::size_t label, double beta);

double base_loss(std::span<const double> logits, std::size_t label, const BaseLoss& kind);

/// Subgradient of base_loss with respect to the logits, written into `grad` (size K).
/// The flat region u >= 1 of the hinge gives exactly zero.
void loss_gradient(std::span<const double> logits, std::size_t label, const BaseLoss& kind,
                   std::span<double> grad);

std::vector<double> loss_gradient(std::span<const double> logits, std::size_t label,
                                  const BaseLoss& kind);

}  // namespace npcl
