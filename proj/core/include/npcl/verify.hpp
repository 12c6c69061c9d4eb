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
#include <string>
#include <string_view>
#include <vector>

namespace npcl {

struct CheckResult {
    std::string name;
    bool passed = false;
    std::size_t cases = 0;
    std::size_t failures = 0;
    std::string detail;
};

/// Property suites over randomly generated instances:
///   selector     exact optimality against enumeration, optimum identities, monotone T* in C
///   bounds       0-1 / curriculum / batched / surrogate ordering, NPCL reductions, pruning count
///   gradients    loss-kernel and network gradients against central differences
///   adversarial  closed form against the numeric solver, risk monotonicity
///   all          every suite above
/// Throws InvalidInput for an unknown suite name.
std::vector<CheckResult> run_verification(std::string_view suite, std::uint64_t seed);

std::vector<std::string> verification_suites();

}  // namespace npcl
