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

#include "npcl/trainer.hpp"

#include <algorithm>
#include <numeric>

#include <fmt/format.h>

#include "npcl/error.hpp"
#include "npcl/rng.hpp"

namespace npcl {

namespace {

constexpr std::uint64_t kInitStream = 1;
constexpr std::uint64_t kShuffleStream = 2;

}  // namespace

void TrainConfig::validate() const {
    if (epochs < 1) throw InvalidInput("train: epochs must be at least 1");
    if (batch_size < 1) throw InvalidInput("train: batch size must be at least 1");
    if (burn_in_epochs >= epochs) throw InvalidInput("train: burn-in must be shorter than training");
    for (std::size_t h : hidden)
        if (h == 0) throw InvalidInput("train: zero hidden width");
    if (!(optimizer.learning_rate > 0.0)) throw InvalidInput("train: learning rate must be positive");
    // Re-validate the prior; ThresholdMode is copyable from any source.
    (void)compute_threshold(threshold, 1, 0);
}

double label_precision(std::span<const std::uint8_t> mask, std::span<const std::uint8_t> flipped) {
    if (mask.size() != flipped.size())
        throw InvalidInput("label precision: mask and flip flags differ in length");
    std::size_t selected = 0;
    std::size_t clean = 0;
    for (std::size_t i = 0; i < mask.size(); ++i) {
        if (!mask[i]) continue;
        ++selected;
        if (!flipped[i]) ++clean;
    }
    if (selected == 0) throw UndefinedMetric("label precision: no sample selected");
    return static_cast<double>(clean) / static_cast<double>(selected);
}

double evaluate(const MlpParams& params, const Dataset& test_set) {
    if (test_set.size() == 0) throw InvalidInput("evaluate: empty test set");
    const SampleBatch batch{test_set.features, test_set.dim, test_set.labels};
    const auto logits = forward_batch(params, batch);
    const std::size_t k = params.num_classes();
    std::size_t correct = 0;
    for (std::size_t i = 0; i < test_set.size(); ++i) {
        const auto first = logits.begin() + static_cast<std::ptrdiff_t>(i * k);
        const auto pred = static_cast<std::size_t>(std::max_element(first, first + static_cast<std::ptrdiff_t>(k)) - first);
        if (pred == test_set.labels[i]) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(test_set.size());
}

TrainResult train(const TrainConfig& config, const Dataset& train_set, const Dataset& test_set,
                  const BatchObserver& observer) {
    config.validate();
    train_set.validate();
    test_set.validate();
    if (train_set.size() == 0 || test_set.size() == 0) throw InvalidInput("train: empty dataset");
    if (train_set.dim != test_set.dim) throw InvalidInput("train: train/test feature dimensions differ");
    if (train_set.num_classes != test_set.num_classes)
        throw InvalidInput("train: train/test class counts differ");

    std::vector<std::size_t> dims{train_set.dim};
    dims.insert(dims.end(), config.hidden.begin(), config.hidden.end());
    dims.push_back(train_set.num_classes);

    TrainResult result;
    result.params = MlpParams::glorot(dims, mix_seed(config.seed, kInitStream), config.leaky_slope);
    auto& params = result.params;
    AdamState adam(params.values.size(), config.optimizer);
    Rng shuffle_rng(mix_seed(config.seed, kShuffleStream));

    const std::size_t n = train_set.size();
    const std::size_t k = train_set.num_classes;
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});

    std::vector<double> features;
    std::vector<std::size_t> labels;
    std::vector<double> losses;
    std::vector<std::uint8_t> mask;

    for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
        if (config.shuffle) shuffle_rng.shuffle(std::span<std::size_t>(order));
        const bool burn_in = epoch <= config.burn_in_epochs;
        const BaseLoss kind = burn_in ? BaseLoss::soft_hinge() : config.base_loss;

        EpochMetrics row;
        row.epoch = epoch;
        double loss_sum = 0.0;
        std::size_t selected_total = 0;
        std::size_t clean_selected = 0;

        std::size_t batch_index = 0;
        for (std::size_t start = 0; start < n; start += config.batch_size, ++batch_index) {
            const std::size_t m = std::min(config.batch_size, n - start);
            features.clear();
            labels.clear();
            for (std::size_t j = 0; j < m; ++j) {
                const auto x = train_set.row(order[start + j]);
                features.insert(features.end(), x.begin(), x.end());
                labels.push_back(train_set.labels[order[start + j]]);
            }
            const SampleBatch batch{features, train_set.dim, labels};
            const auto logits = forward_batch(params, batch);

            losses.resize(m);
            std::size_t misclassified = 0;
            for (std::size_t j = 0; j < m; ++j) {
                const auto t = std::span<const double>(logits).subspan(j * k, k);
                misclassified += static_cast<std::size_t>(zero_one(multiclass_margin(t, labels[j])));
                losses[j] = base_loss(t, labels[j], kind);
            }
            const double surrogate = std::accumulate(losses.begin(), losses.end(), 0.0);
            loss_sum += surrogate;

            BatchRecord record;
            record.epoch = epoch;
            record.batch = batch_index;
            record.burn_in = burn_in;
            record.size = m;
            record.surrogate_value = surrogate;
            record.zero_one_value = static_cast<double>(misclassified);

            if (burn_in || !config.selection) {
                mask.assign(m, 1);
                record.selected = m;
                record.curriculum_value = surrogate;
            } else {
                record.threshold = compute_threshold(config.threshold, m, misclassified);
                auto selection = partial_optimize(losses, record.threshold);
                mask = std::move(selection.mask);
                record.selected = selection.selected_count;
                record.curriculum_value = selection.objective;
            }

            selected_total += record.selected;
            for (std::size_t j = 0; j < m; ++j)
                if (mask[j] && !train_set.is_noisy(order[start + j])) ++clean_selected;

            if (observer) observer(record);

            if (record.selected == 0) {
                ++row.empty_batches;
                continue;
            }
            const Gradient grad = backward(params, batch, kind, mask);
            adam_step(params, grad.values, adam);
        }

        row.train_loss = loss_sum / static_cast<double>(n);
        row.test_accuracy = evaluate(params, test_set);
        row.selected_fraction = static_cast<double>(selected_total) / static_cast<double>(n);
        if (selected_total > 0)
            row.label_precision = static_cast<double>(clean_selected) / static_cast<double>(selected_total);
        result.metrics.push_back(row);
    }
    return result;
}

void write_metrics_csv(std::ostream& out, std::span<const EpochMetrics> metrics) {
    out << kMetricsHeader << '\n';
    for (const auto& m : metrics) {
        out << fmt::format("{},{:.10g},{:.10g},{},{:.10g},{}\n", m.epoch, m.train_loss,
                           m.test_accuracy,
                           m.label_precision ? fmt::format("{:.10g}", *m.label_precision) : "",
                           m.selected_fraction, m.empty_batches);
    }
}

}  // namespace npcl
