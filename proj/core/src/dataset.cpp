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

#include "npcl/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <numbers>
#include <numeric>
#include <string>

#include "binary_io.hpp"
#include "npcl/error.hpp"
#include "npcl/rng.hpp"

namespace npcl {

void Dataset::validate() const {
    if (dim == 0) throw InvalidInput("dataset: feature dimension must be positive");
    if (num_classes < 2) throw InvalidInput("dataset: need at least 2 classes");
    if (features.size() != labels.size() * dim)
        throw InvalidInput("dataset: feature matrix does not match n x d");
    if (clean_labels && clean_labels->size() != labels.size())
        throw InvalidInput("dataset: clean labels differ in length from labels");
    for (std::size_t y : labels)
        if (y >= num_classes) throw InvalidInput("dataset: label out of range");
    if (clean_labels)
        for (std::size_t y : *clean_labels)
            if (y >= num_classes) throw InvalidInput("dataset: clean label out of range");
}

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
    Dataset out;
    out.dim = dim;
    out.num_classes = num_classes;
    out.features.reserve(rows.size() * dim);
    out.labels.reserve(rows.size());
    if (clean_labels) out.clean_labels.emplace().reserve(rows.size());
    for (std::size_t r : rows) {
        const auto x = row(r);
        out.features.insert(out.features.end(), x.begin(), x.end());
        out.labels.push_back(labels[r]);
        if (clean_labels) out.clean_labels->push_back((*clean_labels)[r]);
    }
    return out;
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in), {});
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot create " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("write failed: " + path.string());
}

Dataset parse_idx(std::span<const std::uint8_t> images, std::span<const std::uint8_t> labels) {
    detail::ByteReader img(images, "idx images");
    if (const auto magic = img.u32_be(); magic != kIdxImageMagic)
        throw ParseError(ParseError::Kind::BadMagic, 0,
                         "idx images: bad magic " + std::to_string(magic) + " at offset 0 (expected " +
                             std::to_string(kIdxImageMagic) + ")");
    const std::size_t n = img.u32_be();
    const std::size_t rows = img.u32_be();
    const std::size_t cols = img.u32_be();
    if (rows == 0 || cols == 0)
        throw ParseError(ParseError::Kind::BadHeader, 8, "idx images: zero image dimension");

    detail::ByteReader lab(labels, "idx labels");
    if (const auto magic = lab.u32_be(); magic != kIdxLabelMagic)
        throw ParseError(ParseError::Kind::BadMagic, 0,
                         "idx labels: bad magic " + std::to_string(magic) + " at offset 0 (expected " +
                             std::to_string(kIdxLabelMagic) + ")");
    const std::size_t n_labels = lab.u32_be();
    if (n_labels != n)
        throw ParseError(ParseError::Kind::CountMismatch, 4,
                         "idx: image count " + std::to_string(n) + " != label count " +
                             std::to_string(n_labels));

    if (rows > images.size() || cols > images.size() || rows * cols > images.size() || n > images.size())
        throw ParseError(ParseError::Kind::Truncated, images.size(),
                         "idx images: header declares more pixels than the file holds");

    Dataset ds;
    ds.dim = rows * cols;
    img.require(n * ds.dim);
    lab.require(n);
    ds.features.resize(n * ds.dim);
    for (auto& px : ds.features) px = static_cast<double>(img.u8()) / 255.0;
    ds.labels.resize(n);
    std::size_t top = 0;
    for (auto& y : ds.labels) {
        y = lab.u8();
        top = std::max(top, y);
    }
    ds.num_classes = std::max<std::size_t>(top + 1, 2);
    return ds;
}

Dataset load_idx(const std::filesystem::path& images, const std::filesystem::path& labels) {
    const auto img = read_file(images);
    const auto lab = read_file(labels);
    return parse_idx(img, lab);
}

Dataset synth_blobs(std::size_t n, std::size_t num_classes, double separation, double noise_std,
                    std::uint64_t seed) {
    if (num_classes < 2) throw InvalidInput("blobs: need at least 2 classes");
    if (n < num_classes) throw InvalidInput("blobs: need at least one sample per class");
    if (!(separation > 0.0)) throw InvalidInput("blobs: separation must be positive");
    if (!(noise_std >= 0.0)) throw InvalidInput("blobs: noise_std must be non-negative");

    Rng rng(seed);
    std::vector<std::size_t> classes(n);
    for (std::size_t i = 0; i < n; ++i) classes[i] = i % num_classes;
    rng.shuffle(std::span<std::size_t>(classes));

    Dataset ds;
    ds.dim = 2;
    ds.num_classes = num_classes;
    ds.labels = classes;
    ds.features.resize(2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        const double angle =
            2.0 * std::numbers::pi * static_cast<double>(classes[i]) / static_cast<double>(num_classes);
        ds.features[2 * i] = separation * std::cos(angle) + noise_std * rng.normal();
        ds.features[2 * i + 1] = separation * std::sin(angle) + noise_std * rng.normal();
    }
    return ds;
}

std::pair<Dataset, Dataset> split(const Dataset& dataset, double test_fraction, std::uint64_t seed) {
    if (!(test_fraction > 0.0 && test_fraction < 1.0))
        throw InvalidInput("split: test fraction must lie in (0, 1)");
    dataset.validate();
    const std::size_t n = dataset.size();
    std::vector<std::vector<std::size_t>> by_class(dataset.num_classes);
    for (std::size_t i = 0; i < n; ++i) by_class[dataset.labels[i]].push_back(i);

    // Largest-remainder apportionment of the test quota.
    const auto total = static_cast<std::size_t>(std::llround(static_cast<double>(n) * test_fraction));
    std::vector<std::size_t> quota(by_class.size());
    std::vector<std::pair<double, std::size_t>> remainders;
    std::size_t assigned = 0;
    for (std::size_t k = 0; k < by_class.size(); ++k) {
        const double exact = static_cast<double>(by_class[k].size()) * test_fraction;
        quota[k] = static_cast<std::size_t>(std::floor(exact));
        assigned += quota[k];
        remainders.emplace_back(exact - std::floor(exact), k);
    }
    std::stable_sort(remainders.begin(), remainders.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    for (std::size_t r = 0; assigned < total && r < remainders.size(); ++r) {
        const std::size_t k = remainders[r].second;
        if (quota[k] < by_class[k].size()) {
            ++quota[k];
            ++assigned;
        }
    }

    Rng rng(seed);
    std::vector<std::size_t> train_rows;
    std::vector<std::size_t> test_rows;
    for (std::size_t k = 0; k < by_class.size(); ++k) {
        auto& rows = by_class[k];
        rng.shuffle(std::span<std::size_t>(rows));
        test_rows.insert(test_rows.end(), rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(quota[k]));
        train_rows.insert(train_rows.end(), rows.begin() + static_cast<std::ptrdiff_t>(quota[k]), rows.end());
    }
    std::sort(train_rows.begin(), train_rows.end());
    std::sort(test_rows.begin(), test_rows.end());
    return {dataset.subset(train_rows), dataset.subset(test_rows)};
}

std::vector<std::uint8_t> encode_dataset(const Dataset& dataset) {
    dataset.validate();
    detail::ByteWriter w;
    w.u32_le(kDatasetMagic);
    w.u32_le(1);
    w.u64_le(dataset.size());
    w.u64_le(dataset.dim);
    w.u64_le(dataset.num_classes);
    w.u64_le(dataset.clean_labels ? 1 : 0);
    for (double x : dataset.features) w.f64_le(x);
    for (std::size_t y : dataset.labels) w.u32_le(static_cast<std::uint32_t>(y));
    if (dataset.clean_labels)
        for (std::size_t y : *dataset.clean_labels) w.u32_le(static_cast<std::uint32_t>(y));
    return std::move(w.bytes());
}

Dataset decode_dataset(std::span<const std::uint8_t> bytes) {
    detail::ByteReader r(bytes, "dataset");
    if (const auto magic = r.u32_le(); magic != kDatasetMagic)
        throw ParseError(ParseError::Kind::BadMagic, 0, "dataset: bad magic at offset 0");
    if (const auto version = r.u32_le(); version != 1)
        throw ParseError(ParseError::Kind::BadHeader, 4,
                         "dataset: unsupported version " + std::to_string(version));
    const std::uint64_t n = r.u64_le();
    const std::uint64_t d = r.u64_le();
    const std::uint64_t k = r.u64_le();
    const std::uint64_t flags = r.u64_le();
    if (d == 0 || k < 2 || (flags & ~std::uint64_t{1}) != 0)
        throw ParseError(ParseError::Kind::BadHeader, 8, "dataset: invalid header fields");
    const bool has_clean = (flags & 1) != 0;
    if (n > bytes.size() || d > bytes.size())
        throw ParseError(ParseError::Kind::Truncated, bytes.size(), "dataset: header sizes exceed the file");
    r.require(n * d * 8 + n * 4 * (has_clean ? 2 : 1));

    Dataset ds;
    ds.dim = d;
    ds.num_classes = k;
    ds.features.resize(n * d);
    for (auto& x : ds.features) x = r.f64_le();
    ds.labels.resize(n);
    for (auto& y : ds.labels) y = r.u32_le();
    if (has_clean) {
        ds.clean_labels.emplace(n);
        for (auto& y : *ds.clean_labels) y = r.u32_le();
    }
    if (r.remaining() != 0)
        throw ParseError(ParseError::Kind::CountMismatch, r.offset(), "dataset: trailing bytes");
    try {
        ds.validate();
    } catch (const InvalidInput& e) {
        throw ParseError(ParseError::Kind::BadHeader, 0, std::string("dataset: ") + e.what());
    }
    return ds;
}

void save_dataset(const Dataset& dataset, const std::filesystem::path& path) {
    write_file(path, encode_dataset(dataset));
}

Dataset load_dataset(const std::filesystem::path& path) {
    return decode_dataset(read_file(path));
}

}  // namespace npcl
