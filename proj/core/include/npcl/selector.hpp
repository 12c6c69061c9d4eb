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
#include <optional>
#include <span>
#include <vector>

namespace npcl {

/// Outcome of the selection problem  min_v max(sum_i v_i l_i, C - sum_i v_i).
struct SelectionResult {
    std::vector<std::uint8_t> mask;      ///< v, in the caller's sample order
    std::size_t selected_count = 0;      ///< T*
    double selected_loss = 0.0;          ///< L_{T*}, sum of selected losses
    double objective = 0.0;              ///< max(L_{T*}, C - T*)
    double threshold = 0.0;              ///< C
    std::vector<double> prefix_sums;     ///< L_1..L_n over the sorted order (empty for brute force)
    std::optional<std::size_t> next_index;  ///< original index of the (T*+1)-th smallest loss
};

/// How the selection threshold C is derived from a batch.
class ThresholdMode {
public:
    enum class Kind { FullQ, FullE, NpclFixed, NpclAdaptive };

    /// C = n + #misclassified
    static ThresholdMode full_q() { return ThresholdMode(Kind::FullQ, 0.0); }
    /// C = n
    static ThresholdMode full_e() { return ThresholdMode(Kind::FullE, 0.0); }
    /// C = (1 - eps) n. Throws InvalidInput unless eps is in [0, 1).
    static ThresholdMode npcl_fixed(double epsilon);
    /// C = (1 - eps)^2 n + (1 - eps) #misclassified
    static ThresholdMode npcl_adaptive(double epsilon);

    Kind kind() const noexcept { return kind_; }
    double epsilon() const noexcept { return epsilon_; }

    friend bool operator==(const ThresholdMode&, const ThresholdMode&) = default;

private:
    ThresholdMode(Kind kind, double epsilon) : kind_(kind), epsilon_(epsilon) {}

    Kind kind_;
    double epsilon_;
};

double compute_threshold(const ThresholdMode& mode, std::size_t n, std::size_t misclassified);

/// Sort-and-scan solver: O(n log n). Requires finite losses >= 0, n >= 1 and 0 <= C <= 2n.
SelectionResult partial_optimize(std::span<const double> losses, double threshold);

/// Exhaustive search over all 2^n masks; n <= 20.
///
/// Each candidate's loss sum is accumulated over its selected losses in
/// ascending order, so that equal subsets evaluate to the same double as the
/// sorted prefix sums of partial_optimize.
SelectionResult brute_force_optimize(std::span<const double> losses, double threshold);

inline constexpr std::size_t kBruteForceLimit = 20;

}  // namespace npcl
