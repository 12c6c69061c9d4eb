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

#include "npcl/loss.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "npcl/error.hpp"

namespace npcl {

namespace {

void check_logits(std::span<const double> logits, std::size_t label) {
    if (logits.size() < 2) throw InvalidInput("logits: need at least 2 classes");
    if (label >= logits.size())
        throw InvalidInput("logits: label " + std::to_string(label) + " out of range for " +
                           std::to_string(logits.size()) + " classes");
    for (double t : logits)
        if (!std::isfinite(t)) throw InvalidInput("logits: non-finite score");
}

// Soft hinge on the misclassified branch: 1 - t_y + LSE(t) > 1, so the clamp never binds.
double soft_branch(std::span<const double> logits, std::size_t label) {
    return 1.0 - logits[label] + log_sum_exp(logits);
}

}  // namespace

BaseLoss BaseLoss::weighted(double beta) {
    if (!(beta >= 0.0 && beta <= 1.0)) throw InvalidInput("weighted loss: beta must lie in [0, 1]");
    return BaseLoss(Kind::Weighted, beta);
}

std::size_t runner_up_index(std::span<const double> logits, std::size_t label) {
    std::size_t best = label == 0 ? 1 : 0;
    for (std::size_t i = best + 1; i < logits.size(); ++i) {
        if (i == label) continue;
        if (logits[i] > logits[best]) best = i;
    }
    return best;
}

double multiclass_margin(std::span<const double> logits, std::size_t label) {
    check_logits(logits, label);
    return logits[label] - logits[runner_up_index(logits, label)];
}

double log_sum_exp(std::span<const double> logits) {
    const double top = *std::max_element(logits.begin(), logits.end());
    double acc = 0.0;
    for (double t : logits) acc += std::exp(t - top);
    return top + std::log(acc);
}

double hard_hinge(std::span<const double> logits, std::size_t label) {
    return hinge_of_margin(multiclass_margin(logits, label));
}

double soft_hinge(std::span<const double> logits, std::size_t label) {
    const double u = multiclass_margin(logits, label);
    if (u >= 0.0) return hinge_of_margin(u);
    return std::max(soft_branch(logits, label), 0.0);
}

double weighted_loss(std::span<const double> logits, std::size_t label, double beta) {
    const auto kind = BaseLoss::weighted(beta);
    return base_loss(logits, label, kind);
}

double base_loss(std::span<const double> logits, std::size_t label, const BaseLoss& kind) {
    switch (kind.kind()) {
        case BaseLoss::Kind::HardHinge:
            return hard_hinge(logits, label);
        case BaseLoss::Kind::SoftHinge:
            return soft_hinge(logits, label);
        case BaseLoss::Kind::Weighted: {
            const double u = multiclass_margin(logits, label);
            const double hard = hinge_of_margin(u);
            const double soft = u >= 0.0 ? hard : std::max(soft_branch(logits, label), 0.0);
            return kind.beta() * soft + (1.0 - kind.beta()) * hard;
        }
    }
    return 0.0;
}

void loss_gradient(std::span<const double> logits, std::size_t label, const BaseLoss& kind,
                   std::span<double> grad) {
    check_logits(logits, label);
    if (grad.size() != logits.size()) throw InvalidInput("loss_gradient: output size mismatch");
    std::fill(grad.begin(), grad.end(), 0.0);

    const std::size_t rival = runner_up_index(logits, label);
    const double u = logits[label] - logits[rival];

    double hard_weight = 0.0;
    double soft_weight = 0.0;
    switch (kind.kind()) {
        case BaseLoss::Kind::HardHinge: hard_weight = 1.0; break;
        case BaseLoss::Kind::SoftHinge: soft_weight = 1.0; break;
        case BaseLoss::Kind::Weighted:
            soft_weight = kind.beta();
            hard_weight = 1.0 - kind.beta();
            break;
    }
    // On the correct side the soft hinge coincides with the hard one.
    if (u >= 0.0) {
        hard_weight += soft_weight;
        soft_weight = 0.0;
    }

    if (hard_weight != 0.0 && u < 1.0) {
        grad[label] -= hard_weight;
        grad[rival] += hard_weight;
    }
    if (soft_weight != 0.0) {
        // d/dt [LSE(t) - t_y] = softmax(t) - e_y
        const double lse = log_sum_exp(logits);
        for (std::size_t i = 0; i < logits.size(); ++i)
            grad[i] += soft_weight * std::exp(logits[i] - lse);
        grad[label] -= soft_weight;
    }
}

std::vector<double> loss_gradient(std::span<const double> logits, std::size_t label,
                                  const BaseLoss& kind) {
    std::vector<double> grad(logits.size());
    loss_gradient(logits, label, kind, grad);
    return grad;
}

}  // namespace npcl
