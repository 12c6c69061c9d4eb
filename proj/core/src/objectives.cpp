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

#include "npcl/objectives.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "npcl/error.hpp"

namespace npcl {

namespace {

std::size_t count_misclassified(std::span<const double> margins) {
    return static_cast<std::size_t>(
        std::count_if(margins.begin(), margins.end(), [](double u) { return zero_one(u) == 1; }));
}

}  // namespace

MarginBatch MarginBatch::from_hinge_margins(std::vector<double> margins) {
    std::vector<double> losses(margins.size());
    std::transform(margins.begin(), margins.end(), losses.begin(), hinge_of_margin);
    return from_losses(std::move(margins), std::move(losses));
}

MarginBatch MarginBatch::from_losses(std::vector<double> margins, std::vector<double> base_losses) {
    if (margins.size() != base_losses.size())
        throw InvalidInput("margin batch: margins and losses differ in length");
    for (std::size_t i = 0; i < margins.size(); ++i)
        if (!(base_losses[i] >= static_cast<double>(zero_one(margins[i]))))
            throw InvalidInput("margin batch: base loss below the 0-1 loss at index " +
                               std::to_string(i));
    MarginBatch batch;
    batch.misclassified = count_misclassified(margins);
    batch.margins = std::move(margins);
    batch.base_losses = std::move(base_losses);
    return batch;
}

MarginBatch MarginBatch::from_logits(std::span<const double> logits, std::size_t num_classes,
                                     std::span<const std::size_t> labels, const BaseLoss& kind) {
    if (num_classes == 0 || logits.size() != labels.size() * num_classes)
        throw InvalidInput("margin batch: logits shape does not match labels");
    std::vector<double> margins(labels.size());
    std::vector<double> losses(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const auto row = logits.subspan(i * num_classes, num_classes);
        margins[i] = multiclass_margin(row, labels[i]);
        losses[i] = base_loss(row, labels[i], kind);
    }
    return from_losses(std::move(margins), std::move(losses));
}

double zero_one_objective(const MarginBatch& batch) {
    return static_cast<double>(batch.misclassified);
}

double surrogate_objective(const MarginBatch& batch) {
    return std::accumulate(batch.base_losses.begin(), batch.base_losses.end(), 0.0);
}

CurriculumValue curriculum_objective(const MarginBatch& batch, const ThresholdMode& mode) {
    const double threshold = compute_threshold(mode, batch.size(), batch.misclassified);
    CurriculumValue out;
    out.selection = partial_optimize(batch.base_losses, threshold);
    out.value = out.selection.objective;
    out.training_loss = out.selection.selected_loss;
    return out;
}

BatchPartition BatchPartition::contiguous(std::size_t n, std::size_t group_size) {
    if (group_size == 0) throw InvalidInput("partition: group size must be positive");
    BatchPartition p;
    for (std::size_t start = 0; start < n; start += group_size) {
        auto& g = p.groups.emplace_back(std::min(group_size, n - start));
        std::iota(g.begin(), g.end(), start);
    }
    return p;
}

BatchPartition BatchPartition::shuffled(std::size_t n, std::size_t group_size, Rng& rng) {
    BatchPartition p = contiguous(n, group_size);
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    rng.shuffle(std::span<std::size_t>(perm));
    for (auto& g : p.groups)
        for (auto& idx : g) idx = perm[idx];
    return p;
}

BatchedValue batched_objective(const MarginBatch& batch, const BatchPartition& partition,
                               const ThresholdMode& mode) {
    std::vector<std::uint8_t> seen(batch.size(), 0);
    BatchedValue out;
    out.selections.reserve(partition.groups.size());
    std::vector<double> margins;
    std::vector<double> losses;
    for (const auto& group : partition.groups) {
        if (group.empty()) throw InvalidInput("partition: empty group");
        margins.clear();
        losses.clear();
        for (std::size_t idx : group) {
            if (idx >= batch.size() || seen[idx])
                throw InvalidInput("partition: groups must be disjoint indices into the batch");
            seen[idx] = 1;
            margins.push_back(batch.margins[idx]);
            losses.push_back(batch.base_losses[idx]);
        }
        const auto local = MarginBatch::from_losses(margins, losses);
        auto value = curriculum_objective(local, mode);
        out.value += value.value;
        out.training_loss += value.training_loss;
        out.selections.push_back(std::move(value.selection));
    }
    if (std::find(seen.begin(), seen.end(), 0) != seen.end())
        throw InvalidInput("partition: groups do not cover every sample");
    return out;
}

}  // namespace npcl
