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
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace npcl {

/// n samples of dimension d, row-major, with class labels in [0, K).
///
/// `clean_labels` is present when the labels have been corrupted; a sample
/// is noisy iff labels[i] != clean_labels[i].
struct Dataset {
    std::size_t dim = 0;
    std::size_t num_classes = 0;
    std::vector<double> features;
    std::vector<std::size_t> labels;
    std::optional<std::vector<std::size_t>> clean_labels;

    std::size_t size() const noexcept { return labels.size(); }
    std::span<const double> row(std::size_t i) const {
        return std::span<const double>(features).subspan(i * dim, dim);
    }
    bool is_noisy(std::size_t i) const {
        return clean_labels && (*clean_labels)[i] != labels[i];
    }

    /// Throws InvalidInput if the fields disagree in size or a label is out of range.
    void validate() const;

    /// New dataset holding the given rows, in the given order.
    Dataset subset(std::span<const std::size_t> rows) const;
};

/// Reads an IDX3 image file (magic 2051) and an IDX1 label file (magic 2049).
/// Pixels are scaled by 1/255; K is taken as max(label) + 1, at least 2.
Dataset load_idx(const std::filesystem::path& images, const std::filesystem::path& labels);

/// Same, over in-memory file contents.
Dataset parse_idx(std::span<const std::uint8_t> images, std::span<const std::uint8_t> labels);

/// K isotropic 2-D Gaussian clusters centred at angle 2*pi*k/K on a circle of radius
/// `separation`. Sample i belongs to class i mod K before a seeded shuffle.
Dataset synth_blobs(std::size_t n, std::size_t num_classes, double separation, double noise_std,
                    std::uint64_t seed);

/// Stratified seeded split. The test part has round(n * test_fraction) rows, apportioned
/// across classes by largest remainder.
std::pair<Dataset, Dataset> split(const Dataset& dataset, double test_fraction, std::uint64_t seed);

/// Little-endian binary layout:
///   u32 magic "NPCD" (0x4443504e), u32 version (1),
///   u64 n, u64 d, u64 K, u64 flags (bit 0: clean labels follow),
///   n*d f64 features, n u32 labels, [n u32 clean labels].
void save_dataset(const Dataset& dataset, const std::filesystem::path& path);
Dataset load_dataset(const std::filesystem::path& path);

std::vector<std::uint8_t> encode_dataset(const Dataset& dataset);
Dataset decode_dataset(std::span<const std::uint8_t> bytes);

inline constexpr std::uint32_t kIdxImageMagic = 2051;
inline constexpr std::uint32_t kIdxLabelMagic = 2049;
inline constexpr std::uint32_t kDatasetMagic = 0x4443504e;

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

}  // namespace npcl
