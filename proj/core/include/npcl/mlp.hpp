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
#include <filesystem>
#include <span>
#include <vector>

#include "npcl/loss.hpp"

namespace npcl {

/// Fully connected network: affine + leaky ReLU on every hidden layer, affine output.
///
/// All parameters live in one flat vector. Layer l occupies a weight block of
/// dims[l] x dims[l+1] (row-major, input index major) followed by dims[l+1] biases.
struct MlpParams {
    std::vector<std::size_t> dims;  ///< input, hidden..., classes
    double leaky_slope = 0.01;
    std::vector<double> values;

    /// All-zero parameters.
    static MlpParams zeros(std::vector<std::size_t> dims, double leaky_slope = 0.01);
    /// Weights uniform in +-sqrt(6 / (d_in + d_out)), zero biases.
    static MlpParams glorot(std::vector<std::size_t> dims, std::uint64_t seed,
                            double leaky_slope = 0.01);

    std::size_t num_layers() const noexcept { return dims.empty() ? 0 : dims.size() - 1; }
    std::size_t input_dim() const noexcept { return dims.front(); }
    std::size_t num_classes() const noexcept { return dims.back(); }
    std::size_t weight_offset(std::size_t layer) const;
    std::size_t bias_offset(std::size_t layer) const;

    double& weight(std::size_t layer, std::size_t in, std::size_t out) {
        return values[weight_offset(layer) + in * dims[layer + 1] + out];
    }
    double weight(std::size_t layer, std::size_t in, std::size_t out) const {
        return values[weight_offset(layer) + in * dims[layer + 1] + out];
    }
    double& bias(std::size_t layer, std::size_t out) { return values[bias_offset(layer) + out]; }
    double bias(std::size_t layer, std::size_t out) const { return values[bias_offset(layer) + out]; }

    void validate() const;
};

std::size_t parameter_count(std::span<const std::size_t> dims);

/// Row-major features with one label per row.
struct SampleBatch {
    std::span<const double> features;
    std::size_t dim = 0;
    std::span<const std::size_t> labels;

    std::size_t size() const noexcept { return labels.size(); }
    std::span<const double> row(std::size_t i) const { return features.subspan(i * dim, dim); }
};

std::vector<double> forward(const MlpParams& params, std::span<const double> features);

/// Logits for every row, row-major n x K.
std::vector<double> forward_batch(const MlpParams& params, const SampleBatch& batch);

struct Gradient {
    std::vector<double> values;  ///< same layout as MlpParams::values
    std::size_t selected = 0;
    double mean_loss = 0.0;      ///< mean base loss over the selected rows
};

/// Gradient of the mean base loss over rows whose mask entry is non-zero.
/// An empty selection returns a zero gradient with selected == 0.
Gradient backward(const MlpParams& params, const SampleBatch& batch, const BaseLoss& kind,
                  std::span<const std::uint8_t> mask);

/// Mean base loss over the masked rows (0 when none are selected).
double masked_mean_loss(const MlpParams& params, const SampleBatch& batch, const BaseLoss& kind,
                        std::span<const std::uint8_t> mask);

struct AdamConfig {
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

struct AdamState {
    AdamConfig config;
    std::vector<double> first_moment;
    std::vector<double> second_moment;
    std::uint64_t step = 0;

    AdamState(std::size_t parameter_count, AdamConfig config = {});
};

/// Bias-corrected Adam update in place.
void adam_step(MlpParams& params, std::span<const double> gradient, AdamState& state);

struct GradCheckOptions {
    double step = 1e-5;
    /// Components are compared as |a - n| / max(|a|, |n|, floor).
    double floor = 1e-4;
};

/// Worst relative error between backward() and central differences of the mean
/// loss over all rows, across every parameter.
double grad_check(const MlpParams& params, const SampleBatch& batch, const BaseLoss& kind,
                  const GradCheckOptions& options = {});

/// Smallest distance of the batch from a non-differentiable point: hidden
/// pre-activations at 0, margins at 0 or 1, or a tie for the runner-up logit.
double kink_distance(const MlpParams& params, const SampleBatch& batch);

/// Little-endian checkpoint:
///   u32 magic "NPCM" (0x4d43504e), u32 layer count L, (L + 1) x u32 dims,
///   f64 leaky slope, f64 x parameter_count(dims) values.
std::vector<std::uint8_t> encode_params(const MlpParams& params);
MlpParams decode_params(std::span<const std::uint8_t> bytes);
void save_params(const MlpParams& params, const std::filesystem::path& path);
MlpParams load_params(const std::filesystem::path& path);

inline constexpr std::uint32_t kCheckpointMagic = 0x4d43504e;

}  // namespace npcl
