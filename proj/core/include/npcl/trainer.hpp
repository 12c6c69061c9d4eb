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
#include <functional>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "npcl/dataset.hpp"
#include "npcl/loss.hpp"
#include "npcl/mlp.hpp"
#include "npcl/selector.hpp"

namespace npcl {

struct TrainConfig {
    std::size_t epochs = 200;
    std::size_t batch_size = 128;
    std::size_t burn_in_epochs = 5;
    ThresholdMode threshold = ThresholdMode::npcl_adaptive(0.0);
    BaseLoss base_loss = BaseLoss::hard_hinge();
    /// When false every sample of every batch is used (plain surrogate training).
    bool selection = true;
    AdamConfig optimizer;
    std::vector<std::size_t> hidden = {64, 64};
    double leaky_slope = 0.01;
    std::uint64_t seed = 0;
    bool shuffle = true;

    void validate() const;
};

struct EpochMetrics {
    std::size_t epoch = 0;               ///< 1-based
    double train_loss = 0.0;             ///< mean base loss over the epoch's samples, before each update
    double test_accuracy = 0.0;
    std::optional<double> label_precision;  ///< absent when nothing was selected
    double selected_fraction = 0.0;
    std::size_t empty_batches = 0;
};

/// Per-batch values handed to an optional observer.
struct BatchRecord {
    std::size_t epoch = 0;
    std::size_t batch = 0;
    bool burn_in = false;
    std::size_t size = 0;
    std::size_t selected = 0;
    double threshold = 0.0;
    double curriculum_value = 0.0;  ///< max(L_T*, C - T*); equals the surrogate during burn-in
    double surrogate_value = 0.0;   ///< sum of base losses over the batch
    double zero_one_value = 0.0;    ///< misclassified count
};

struct TrainResult {
    std::vector<EpochMetrics> metrics;
    MlpParams params;
};

using BatchObserver = std::function<void(const BatchRecord&)>;

/// Mini-batch training with per-batch curriculum selection after the burn-in epochs.
TrainResult train(const TrainConfig& config, const Dataset& train_set, const Dataset& test_set,
                  const BatchObserver& observer = {});

/// (#selected and clean) / #selected. Throws UndefinedMetric on an empty selection.
double label_precision(std::span<const std::uint8_t> mask, std::span<const std::uint8_t> flipped);

/// Fraction of rows whose argmax logit (smallest index on ties) equals the label.
double evaluate(const MlpParams& params, const Dataset& test_set);

inline constexpr const char* kMetricsHeader =
    "epoch,train_loss,test_acc,label_precision,selected_frac,empty_batches";

/// Header plus one row per epoch; an absent label precision is an empty field.
void write_metrics_csv(std::ostream& out, std::span<const EpochMetrics> metrics);

}  // namespace npcl
