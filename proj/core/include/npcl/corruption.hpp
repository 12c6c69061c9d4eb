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
#include <string>
#include <string_view>
#include <vector>

#include "npcl/dataset.hpp"

namespace npcl {

enum class NoiseKind { Symmetric, Pair };

std::string_view to_string(NoiseKind kind);
/// Accepts "symmetric" and "pair"; throws InvalidInput otherwise.
NoiseKind parse_noise_kind(std::string_view name);

struct CorruptionSpec {
    NoiseKind kind = NoiseKind::Symmetric;
    double rate = 0.0;  ///< per-sample flip probability, in [0, 1]
    std::uint64_t seed = 0;
    std::size_t num_classes = 2;

    void validate() const;
};

struct CorruptedLabels {
    std::vector<std::size_t> labels;
    std::vector<std::uint8_t> flipped;
};

/// Each label is independently flipped with probability `rate` to a class drawn
/// uniformly from the K - 1 wrong ones.
///
/// Stream layout per sample, in order: one uniform() coin; if it lands below the
/// rate, one below(K - 1) draw r, mapped to r if r < y and r + 1 otherwise.
CorruptedLabels flip_symmetric(std::span<const std::size_t> labels, const CorruptionSpec& spec);

/// Each label is independently flipped with probability `rate` to (y + 1) mod K.
/// One uniform() coin per sample.
CorruptedLabels flip_pair(std::span<const std::size_t> labels, const CorruptionSpec& spec);

CorruptedLabels corrupt_labels(std::span<const std::size_t> labels, const CorruptionSpec& spec);

/// Copy of `clean` whose labels are corrupted and whose clean_labels hold the originals.
Dataset corrupt_dataset(const Dataset& clean, const CorruptionSpec& spec);

/// JSON sidecar: {"kind", "rate", "seed", "num_classes", "flipped_count", "flipped": [0/1...]}.
std::string corruption_sidecar_json(const CorruptionSpec& spec, std::span<const std::uint8_t> flipped);

}  // namespace npcl
