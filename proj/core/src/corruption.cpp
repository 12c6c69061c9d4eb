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

#include "npcl/corruption.hpp"

#include <algorithm>
#include <nlohmann/json.hpp>

#include "npcl/error.hpp"
#include "npcl/rng.hpp"

namespace npcl {

std::string_view to_string(NoiseKind kind) {
    return kind == NoiseKind::Symmetric ? "symmetric" : "pair";
}

NoiseKind parse_noise_kind(std::string_view name) {
    if (name == "symmetric") return NoiseKind::Symmetric;
    if (name == "pair") return NoiseKind::Pair;
    throw InvalidInput("unknown noise kind '" + std::string(name) + "' (expected symmetric or pair)");
}

void CorruptionSpec::validate() const {
    if (!(rate >= 0.0 && rate <= 1.0)) throw InvalidInput("corruption: rate must lie in [0, 1]");
    if (num_classes < 2) throw InvalidInput("corruption: need at least 2 classes");
}

namespace {

template <typename Remap>
CorruptedLabels flip(std::span<const std::size_t> labels, const CorruptionSpec& spec, Remap remap) {
    spec.validate();
    for (std::size_t y : labels)
        if (y >= spec.num_classes)
            throw InvalidInput("corruption: label " + std::to_string(y) + " out of range for " +
                               std::to_string(spec.num_classes) + " classes");
    Rng rng(spec.seed);
    CorruptedLabels out{std::vector<std::size_t>(labels.begin(), labels.end()),
                        std::vector<std::uint8_t>(labels.size(), 0)};
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (rng.uniform() < spec.rate) {
            out.labels[i] = remap(labels[i], rng);
            out.flipped[i] = 1;
        }
    }
    return out;
}

}  // namespace

CorruptedLabels flip_symmetric(std::span<const std::size_t> labels, const CorruptionSpec& spec) {
    const std::uint64_t wrong = spec.num_classes - 1;
    return flip(labels, spec, [wrong](std::size_t y, Rng& rng) {
        const auto r = static_cast<std::size_t>(rng.below(wrong));
        return r < y ? r : r + 1;
    });
}

CorruptedLabels flip_pair(std::span<const std::size_t> labels, const CorruptionSpec& spec) {
    const std::size_t k = spec.num_classes;
    return flip(labels, spec, [k](std::size_t y, Rng&) { return (y + 1) % k; });
}

CorruptedLabels corrupt_labels(std::span<const std::size_t> labels, const CorruptionSpec& spec) {
    return spec.kind == NoiseKind::Symmetric ? flip_symmetric(labels, spec) : flip_pair(labels, spec);
}

Dataset corrupt_dataset(const Dataset& clean, const CorruptionSpec& spec) {
    if (clean.num_classes != spec.num_classes)
        throw InvalidInput("corruption: spec class count differs from dataset");
    Dataset out = clean;
    const auto& truth = clean.clean_labels ? *clean.clean_labels : clean.labels;
    auto corrupted = corrupt_labels(clean.labels, spec);
    out.clean_labels = truth;
    out.labels = std::move(corrupted.labels);
    return out;
}

std::string corruption_sidecar_json(const CorruptionSpec& spec, std::span<const std::uint8_t> flipped) {
    nlohmann::ordered_json j;
    j["kind"] = std::string(to_string(spec.kind));
    j["rate"] = spec.rate;
    j["seed"] = spec.seed;
    j["num_classes"] = spec.num_classes;
    j["flipped_count"] = std::count(flipped.begin(), flipped.end(), std::uint8_t{1});
    j["flipped"] = std::vector<int>(flipped.begin(), flipped.end());
    return j.dump(2) + "\n";
}

}  // namespace npcl
