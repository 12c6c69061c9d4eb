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

#include "npcl/loss.hpp"
#include "npcl/rng.hpp"
#include "npcl/selector.hpp"

namespace npcl {

/// Margins u_i together with their base losses l(u_i).
struct MarginBatch {
    std::vector<double> margins;
    std::vector<double> base_losses;
    std::size_t misclassified = 0;  ///< sum_i 1(u_i < 0)

    /// Hinge base loss computed from the margins.
    static MarginBatch from_hinge_margins(std::vector<double> margins);
    /// Arbitrary base losses; throws InvalidInput if a loss is below the 0-1 loss of its margin.
    static MarginBatch from_losses(std::vector<double> margins, std::vector<double> base_losses);
    /// Row-major logits (n x K) with labels.
    static MarginBatch from_logits(std::span<const double> logits, std::size_t num_classes,
                                   std::span<const std::size_t> labels, const BaseLoss& kind);

    std::size_t size() const noexcept { return margins.size(); }
};

/// 0-1 objective J(u).
double zero_one_objective(const MarginBatch& batch);
/// Conventional surrogate: sum of base losses.
double surrogate_objective(const MarginBatch& batch);

struct CurriculumValue {
    double value = 0.0;          ///< max(L_{T*}, C - T*)
    double training_loss = 0.0;  ///< L_{T*}, the part that carries gradient
    SelectionResult selection;
};

CurriculumValue curriculum_objective(const MarginBatch& batch, const ThresholdMode& mode);

/// Disjoint index groups covering 0..n-1. The last group may be shorter than the rest.
struct BatchPartition {
    std::vector<std::vector<std::size_t>> groups;

    static BatchPartition contiguous(std::size_t n, std::size_t group_size);
    static BatchPartition shuffled(std::size_t n, std::size_t group_size, Rng& rng);
};

struct BatchedValue {
    double value = 0.0;
    double training_loss = 0.0;
    std::vector<SelectionResult> selections;  ///< per group, masks in group-local order
};

/// Sum of per-group curriculum values; each group derives its own threshold from its own
/// size and misclassified count.
BatchedValue batched_objective(const MarginBatch& batch, const BatchPartition& partition,
                               const ThresholdMode& mode);

}  // namespace npcl
