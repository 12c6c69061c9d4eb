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

#include <cmath>
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "npcl/corruption.hpp"
#include "npcl/error.hpp"
#include "oracles.hpp"

namespace npcl {
namespace {

using Mask = std::vector<std::uint8_t>;

TrainConfig small_config() {
    TrainConfig cfg;
    cfg.epochs = 6;
    cfg.batch_size = 32;
    cfg.burn_in_epochs = 2;
    cfg.hidden = {16};
    cfg.seed = 3;
    return cfg;
}

Dataset noisy_blobs(std::size_t n, double rate, std::uint64_t seed) {
    const auto clean = synth_blobs(n, 4, 3.0, 1.0, seed);
    CorruptionSpec spec;
    spec.rate = rate;
    spec.seed = seed + 1;
    spec.num_classes = 4;
    return corrupt_dataset(clean, spec);
}

TEST(Config, Invariants) {
    auto cfg = small_config();
    EXPECT_NO_THROW(cfg.validate());
    cfg.epochs = 0;
    EXPECT_THROW(cfg.validate(), InvalidInput);
    cfg = small_config();
    cfg.batch_size = 0;
    EXPECT_THROW(cfg.validate(), InvalidInput);
    cfg = small_config();
    cfg.burn_in_epochs = cfg.epochs;
    EXPECT_THROW(cfg.validate(), InvalidInput);
    cfg = small_config();
    cfg.hidden = {4, 0};
    EXPECT_THROW(cfg.validate(), InvalidInput);
    cfg = small_config();
    cfg.optimizer.learning_rate = 0.0;
    EXPECT_THROW(cfg.validate(), InvalidInput);
    const auto ds = synth_blobs(50, 4, 3.0, 1.0, 0);
    cfg = small_config();
    cfg.burn_in_epochs = 9;
    EXPECT_THROW(train(cfg, ds, ds), InvalidInput);
}

TEST(LabelPrecision, Examples) {
    Mask mask(12, 0), flips(12, 0);
    for (int i = 0; i < 10; ++i) mask[i] = 1;
    flips[1] = flips[4] = flips[11] = 1;
    EXPECT_DOUBLE_EQ(label_precision(mask, flips), 0.8);
    EXPECT_EQ(label_precision(Mask{1, 1, 0}, Mask{0, 0, 1}), 1.0);
    EXPECT_THROW(label_precision(Mask{0, 0}, Mask{0, 1}), UndefinedMetric);
    EXPECT_THROW(label_precision(Mask{1}, Mask{0, 1}), InvalidInput);
}

TEST(Evaluate, PerfectPredictor) {
    Dataset ds;
    ds.dim = 3;
    ds.num_classes = 3;
    ds.features = {1, 0, 0, 0, 1, 0, 0, 0, 1, 0, 2, 0};
    ds.labels = {0, 1, 2, 1};
    auto p = MlpParams::zeros({3, 3});
    for (std::size_t i = 0; i < 3; ++i) p.values[p.weight_offset(0) + i * 3 + i] = 1.0;
    EXPECT_EQ(evaluate(p, ds), 1.0);
}

TEST(Evaluate, RandomGuessOnBalancedBinary) {
    npcl_test::Gen g(5);
    Dataset ds;
    ds.dim = 2;
    ds.num_classes = 2;
    ds.features = g.vec(20000, -1.0, 1.0);
    ds.labels.resize(10000);
    for (std::size_t i = 0; i < 10000; ++i) ds.labels[i] = i % 2;
    const auto p = MlpParams::glorot({2, 8, 2}, 77);
    EXPECT_NEAR(evaluate(p, ds), 0.5, 0.015);
}

TEST(Evaluate, TiedLogitsPredictClassZero) {
    const auto ds = synth_blobs(400, 4, 3.0, 1.0, 1);
    const auto p = MlpParams::zeros({2, 5, 4});
    EXPECT_DOUBLE_EQ(evaluate(p, ds), 0.25);
}

TEST(Train, MetricsShapeAndBurnIn) {
    const auto data = noisy_blobs(300, 0.3, 4);
    const auto [tr, te] = split(data, 0.2, 1);
    auto cfg = small_config();
    cfg.threshold = ThresholdMode::npcl_adaptive(0.3);
    std::vector<BatchRecord> records;
    const auto result = train(cfg, tr, te, [&](const BatchRecord& r) { records.push_back(r); });
    ASSERT_EQ(result.metrics.size(), cfg.epochs);
    for (std::size_t e = 0; e < cfg.epochs; ++e) {
        const auto& m = result.metrics[e];
        EXPECT_EQ(m.epoch, e + 1);
        EXPECT_GE(m.test_accuracy, 0.0);
        EXPECT_LE(m.test_accuracy, 1.0);
        EXPECT_GE(m.selected_fraction, 0.0);
        EXPECT_LE(m.selected_fraction, 1.0);
        if (e < cfg.burn_in_epochs) EXPECT_EQ(m.selected_fraction, 1.0);
        ASSERT_TRUE(m.label_precision.has_value());
        EXPECT_GE(*m.label_precision, 0.0);
        EXPECT_LE(*m.label_precision, 1.0);
    }
    const std::size_t batches = (tr.size() + 31) / 32;
    ASSERT_EQ(records.size(), batches * cfg.epochs);
    for (const auto& r : records) {
        if (r.burn_in) EXPECT_EQ(r.selected, r.size);
        EXPECT_LE(r.curriculum_value, r.surrogate_value + 1e-12);
    }
    EXPECT_EQ(result.params.dims, (std::vector<std::size_t>{2, 16, 4}));
}

TEST(Train, DeterministicForSameSeed) {
    const auto data = noisy_blobs(200, 0.2, 8);
    const auto [tr, te] = split(data, 0.25, 2);
    const auto cfg = small_config();
    const auto a = train(cfg, tr, te);
    const auto b = train(cfg, tr, te);
    EXPECT_EQ(a.params.values, b.params.values);
    std::ostringstream sa, sb;
    write_metrics_csv(sa, a.metrics);
    write_metrics_csv(sb, b.metrics);
    EXPECT_EQ(sa.str(), sb.str());
    auto other = cfg;
    other.seed = 4;
    EXPECT_NE(train(other, tr, te).params.values, a.params.values);
}

TEST(Train, FixedPriorPruningCapPerBatch) {
    const auto data = noisy_blobs(512, 0.25, 11);
    const auto [tr, te] = split(data, 0.25, 3);
    auto cfg = small_config();
    cfg.threshold = ThresholdMode::npcl_fixed(0.25);
    const double eps = 0.25;
    std::size_t checked = 0;
    train(cfg, tr, te, [&](const BatchRecord& r) {
        if (r.burn_in || r.size != cfg.batch_size) return;
        const auto m = static_cast<double>(r.size);
        // Rank r needs L_r <= C + 1 - r with L_r >= 0, so at most floor(C) + 1 survive.
        EXPECT_LE(static_cast<double>(r.selected), m - std::ceil(eps * m) + 1.0);
        EXPECT_EQ(r.threshold, (1.0 - eps) * m);
        ++checked;
    });
    EXPECT_GT(checked, 0u);
}

TEST(Train, CleanDataCurriculumBelowSurrogate) {
    const auto clean = synth_blobs(256, 4, 3.0, 1.0, 13);
    const auto [tr, te] = split(clean, 0.25, 5);
    auto cfg = small_config();
    cfg.threshold = ThresholdMode::npcl_adaptive(0.0);
    std::size_t checked = 0;
    train(cfg, tr, te, [&](const BatchRecord& r) {
        EXPECT_LE(r.zero_one_value, r.curriculum_value);
        EXPECT_LE(r.curriculum_value, r.surrogate_value);
        ++checked;
    });
    EXPECT_GT(checked, 0u);
}

TEST(Train, ZeroLossBatchesSelectEverything) {
    const auto ds = synth_blobs(64, 2, 10.0, 0.1, 21);
    auto cfg = small_config();
    cfg.epochs = 40;
    cfg.burn_in_epochs = 0;
    cfg.batch_size = 64;
    cfg.optimizer.learning_rate = 0.05;
    cfg.threshold = ThresholdMode::npcl_adaptive(0.0);
    std::size_t zero_loss_batches = 0;
    const auto result = train(cfg, ds, ds, [&](const BatchRecord& r) {
        if (r.surrogate_value == 0.0) {
            EXPECT_EQ(r.selected, r.size);
            ++zero_loss_batches;
        }
    });
    EXPECT_GT(zero_loss_batches, 0u);
    EXPECT_EQ(result.metrics.back().selected_fraction, 1.0);
    EXPECT_EQ(result.metrics.back().test_accuracy, 1.0);
}

TEST(Train, NoSelectionBaselineUsesEverySample) {
    const auto data = noisy_blobs(200, 0.4, 2);
    const auto [tr, te] = split(data, 0.25, 7);
    auto cfg = small_config();
    cfg.selection = false;
    const auto result = train(cfg, tr, te);
    for (const auto& m : result.metrics) EXPECT_EQ(m.selected_fraction, 1.0);
}

TEST(Train, DatasetMismatch) {
    const auto a = synth_blobs(40, 4, 3.0, 1.0, 1);
    const auto b = synth_blobs(40, 3, 3.0, 1.0, 1);
    EXPECT_THROW(train(small_config(), a, b), InvalidInput);
}

TEST(MetricsCsv, HeaderAndAbsentPrecision) {
    std::vector<EpochMetrics> rows(2);
    rows[0] = {1, 0.5, 0.75, 0.9, 1.0, 0};
    rows[1] = {2, 0.25, 0.8, std::nullopt, 0.0, 3};
    std::ostringstream out;
    write_metrics_csv(out, rows);
    EXPECT_EQ(out.str(),
              "epoch,train_loss,test_acc,label_precision,selected_frac,empty_batches\n"
              "1,0.5,0.75,0.9,1,0\n"
              "2,0.25,0.8,,0,3\n");
}

}  // namespace
}  // namespace npcl
