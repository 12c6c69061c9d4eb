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

#include "npcl/verify.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>

#include "npcl/adversarial.hpp"
#include "npcl/error.hpp"
#include "npcl/loss.hpp"
#include "npcl/mlp.hpp"
#include "npcl/objectives.hpp"
#include "npcl/rng.hpp"
#include "npcl/selector.hpp"

namespace npcl {

namespace {

constexpr std::size_t kSelectorCases = 1000;
constexpr std::size_t kBoundCases = 1000;
constexpr std::size_t kReductionCases = 100;
constexpr std::size_t kGradientCases = 100;
constexpr std::size_t kAdversarialCases = 500;
constexpr std::size_t kMonotonePairs = 200;

class Tally {
public:
    explicit Tally(std::string name) { result_.name = std::move(name); }

    void record(bool ok, const std::string& what) {
        ++result_.cases;
        if (ok) return;
        if (result_.failures++ == 0) result_.detail = what;
    }

    CheckResult finish() {
        result_.passed = result_.failures == 0 && result_.cases > 0;
        if (result_.passed) result_.detail = fmt::format("{} cases", result_.cases);
        return std::move(result_);
    }

private:
    CheckResult result_;
};

// Margins on a 1/256 grid keep every sum below exact in double precision.
std::vector<double> dyadic_margins(Rng& rng, std::size_t n) {
    std::vector<double> u(n);
    for (auto& x : u) x = (static_cast<double>(rng.below(1537)) - 768.0) / 256.0;
    return u;
}

std::vector<CheckResult> selector_suite(std::uint64_t seed) {
    Rng rng(seed);
    Tally optimal("selector optimality (vs enumeration)");
    Tally identities("selector optimum identities");
    Tally monotone("selector monotone in threshold");
    for (std::size_t c = 0; c < kSelectorCases; ++c) {
        const std::size_t n = 1 + static_cast<std::size_t>(rng.below(12));
        std::vector<double> losses(n);
        for (auto& l : losses) l = rng.uniform(0.0, 4.0);
        const double threshold = rng.uniform(0.0, 2.0 * static_cast<double>(n));

        const auto fast = partial_optimize(losses, threshold);
        const auto exact = brute_force_optimize(losses, threshold);
        optimal.record(fast.objective == exact.objective,
                       fmt::format("case {}: fast {} vs exhaustive {}", c, fast.objective, exact.objective));

        const std::size_t t = fast.selected_count;
        const double lt = fast.selected_loss;
        const double c_val = fast.threshold;
        bool ok = lt <= c_val + 1.0 - static_cast<double>(t);
        if (t < n) {
            const double next = fast.prefix_sums[t];
            ok = ok && next > c_val - static_cast<double>(t) &&
                 next > std::max(lt, c_val - static_cast<double>(t));
        }
        identities.record(ok, fmt::format("case {}: identities violated at T*={}", c, t));

        const double raised = std::min(2.0 * static_cast<double>(n), threshold + rng.uniform(0.0, 2.0));
        monotone.record(partial_optimize(losses, raised).selected_count >= t,
                        fmt::format("case {}: raising C reduced T*", c));
    }
    return {optimal.finish(), identities.finish(), monotone.finish()};
}

std::vector<CheckResult> bounds_suite(std::uint64_t seed) {
    Rng rng(seed);
    Tally chain_q("J <= Q <= Q_batch <= J_surrogate");
    Tally chain_e("J <= 2E <= 2E_batch <= 2J_surrogate, E <= Q");
    const std::size_t sizes[] = {4, 8, 16};
    for (std::size_t c = 0; c < kBoundCases; ++c) {
        const auto batch = MarginBatch::from_hinge_margins(dyadic_margins(rng, 64));
        const auto partition = BatchPartition::shuffled(64, sizes[rng.below(3)], rng);
        const double j = zero_one_objective(batch);
        const double surrogate = surrogate_objective(batch);
        const double q = curriculum_objective(batch, ThresholdMode::full_q()).value;
        const double qb = batched_objective(batch, partition, ThresholdMode::full_q()).value;
        const double e = curriculum_objective(batch, ThresholdMode::full_e()).value;
        const double eb = batched_objective(batch, partition, ThresholdMode::full_e()).value;
        chain_q.record(j <= q && q <= qb && qb <= surrogate,
                       fmt::format("case {}: J={} Q={} Qb={} Js={}", c, j, q, qb, surrogate));
        chain_e.record(j <= 2 * e && e <= eb && eb <= surrogate && e <= q,
                       fmt::format("case {}: J={} E={} Eb={} Js={} Q={}", c, j, e, eb, surrogate, q));
    }

    Tally reduce("NPCL with zero prior reduces to E and Q");
    for (std::size_t c = 0; c < kReductionCases; ++c) {
        const auto batch = MarginBatch::from_hinge_margins(dyadic_margins(rng, 1 + rng.below(128)));
        const bool ok =
            curriculum_objective(batch, ThresholdMode::npcl_fixed(0.0)).value ==
                curriculum_objective(batch, ThresholdMode::full_e()).value &&
            curriculum_objective(batch, ThresholdMode::npcl_adaptive(0.0)).value ==
                curriculum_objective(batch, ThresholdMode::full_q()).value;
        reduce.record(ok, fmt::format("case {}: reduction mismatch", c));
    }

    // The eps*n largest losses fall outside the selection (one fewer when L_{(1-eps)n+1} = 0).
    Tally prune("NPCL tail pruning count");
    const double eps_grid[] = {0.125, 0.25, 0.375, 0.5};
    for (std::size_t c = 0; c < kReductionCases; ++c) {
        const std::size_t n = 8 * (1 + rng.below(16));
        const double eps = eps_grid[rng.below(4)];
        const auto pruned = static_cast<std::size_t>(eps * static_cast<double>(n));
        const std::size_t kept = n - pruned;
        std::vector<double> losses(n);
        for (auto& l : losses) l = rng.uniform(0.0, 3.0);
        if (rng.bernoulli(0.3))
            for (std::size_t i = 0; i <= kept && i < n; ++i) losses[i] = 0.0;
        const auto sel = partial_optimize(losses, compute_threshold(ThresholdMode::npcl_fixed(eps), n, 0));
        std::vector<double> sorted = losses;
        std::sort(sorted.begin(), sorted.end());
        double l_next = 0.0;
        for (std::size_t i = 0; i <= kept && i < n; ++i) l_next += sorted[i];
        std::size_t tail_unselected = 0;
        std::vector<std::size_t> order(n);
        for (std::size_t i = 0; i < n; ++i) order[i] = i;
        std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return losses[a] < losses[b]; });
        for (std::size_t r = kept; r < n; ++r) tail_unselected += sel.mask[order[r]] ? 0 : 1;
        const std::size_t expected = l_next != 0.0 ? pruned : pruned - 1;
        prune.record(tail_unselected == expected,
                     fmt::format("case {}: {} of the {} largest left out, expected {}", c,
                                 tail_unselected, pruned, expected));
    }
    return {chain_q.finish(), chain_e.finish(), reduce.finish(), prune.finish()};
}

std::vector<CheckResult> gradients_suite(std::uint64_t seed) {
    Rng rng(seed);
    Tally kernel("loss-kernel gradients vs central differences");
    const BaseLoss kinds[] = {BaseLoss::hard_hinge(), BaseLoss::soft_hinge(), BaseLoss::weighted(0.5)};
    const double h = 1e-5;
    std::size_t done = 0;
    while (done < 1000) {
        const std::size_t k = 2 + rng.below(5);
        std::vector<double> t(k);
        for (auto& x : t) x = rng.uniform(-3.0, 3.0);
        const std::size_t y = rng.below(k);
        const double u = multiclass_margin(t, y);
        const std::size_t rival = runner_up_index(t, y);
        bool tie = false;
        for (std::size_t i = 0; i < k; ++i)
            if (i != y && i != rival && t[rival] - t[i] < 1e-3) tie = true;
        if (std::abs(u) < 1e-3 || std::abs(u - 1.0) < 1e-3 || tie) continue;
        ++done;
        const auto& kind = kinds[done % 3];
        const auto g = loss_gradient(t, y, kind);
        double worst = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            auto up = t;
            auto down = t;
            up[i] += h;
            down[i] -= h;
            const double num = (base_loss(up, y, kind) - base_loss(down, y, kind)) / (2 * h);
            worst = std::max(worst, std::abs(num - g[i]) / std::max({std::abs(num), std::abs(g[i]), 1e-4}));
        }
        kernel.record(worst < 1e-5, fmt::format("relative error {:.3g}", worst));
    }

    Tally network("network gradients vs central differences");
    std::size_t nets = 0;
    while (nets < kGradientCases) {
        std::vector<std::size_t> dims{2 + rng.below(4)};
        const std::size_t hidden_layers = 1 + rng.below(2);
        for (std::size_t l = 0; l < hidden_layers; ++l) dims.push_back(3 + rng.below(6));
        dims.push_back(2 + rng.below(4));
        const auto params = MlpParams::glorot(dims, rng.next_u64());
        const std::size_t rows = 1 + rng.below(4);
        std::vector<double> x(rows * dims.front());
        for (auto& v : x) v = rng.uniform(-2.0, 2.0);
        std::vector<std::size_t> y(rows);
        for (auto& v : y) v = rng.below(dims.back());
        const SampleBatch batch{x, dims.front(), y};
        if (kink_distance(params, batch) < 1e-3) continue;
        const auto& kind = kinds[nets % 3];
        ++nets;
        const double err = grad_check(params, batch, kind);
        network.record(err < 1e-5, fmt::format("relative error {:.3g}", err));
    }
    return {kernel.finish(), network.finish()};
}

std::vector<CheckResult> adversarial_suite(std::uint64_t seed) {
    Rng rng(seed);
    Tally agree("closed form vs numeric solver (1e-6)");
    for (std::size_t c = 0; c < kAdversarialCases; ++c) {
        const std::size_t n = 2 + rng.below(99);
        std::vector<std::uint8_t> l(n);
        for (auto& v : l) v = rng.bernoulli(rng.uniform()) ? 1 : 0;
        const AdvRiskSpec spec{rng.uniform(0.0, 2.0)};
        const double closed = empirical_adversarial_risk(l, spec);
        const std::vector<double> real(l.begin(), l.end());
        const double numeric = solve_adversarial_risk(real, spec);
        agree.record(std::abs(closed - numeric) <= 1e-6,
                     fmt::format("case {}: closed {} vs solver {}", c, closed, numeric));
    }

    Tally monotone("risk / adversarial risk monotonicity");
    for (double delta : {0.01, 0.1, 1.0}) {
        for (std::size_t c = 0; c < kMonotonePairs; ++c) {
            const std::size_t n = 10 + rng.below(91);
            std::vector<std::vector<std::uint8_t>> pair(2, std::vector<std::uint8_t>(n));
            for (auto& v : pair) {
                const double rate = rng.uniform();
                for (auto& e : v) e = rng.bernoulli(rate) ? 1 : 0;
            }
            const auto report = check_monotonicity(pair, AdvRiskSpec{delta});
            monotone.record(report.ok(), report.ok() ? "" : report.violations.front().reason);
        }
    }
    return {agree.finish(), monotone.finish()};
}

}  // namespace

std::vector<std::string> verification_suites() {
    return {"selector", "bounds", "gradients", "adversarial", "all"};
}

std::vector<CheckResult> run_verification(std::string_view suite, std::uint64_t seed) {
    std::vector<CheckResult> out;
    auto append = [&out](std::vector<CheckResult> part) {
        for (auto& r : part) out.push_back(std::move(r));
    };
    const bool all = suite == "all";
    bool known = all;
    if (all || suite == "selector") { append(selector_suite(mix_seed(seed, 11))); known = true; }
    if (all || suite == "bounds") { append(bounds_suite(mix_seed(seed, 12))); known = true; }
    if (all || suite == "gradients") { append(gradients_suite(mix_seed(seed, 13))); known = true; }
    if (all || suite == "adversarial") { append(adversarial_suite(mix_seed(seed, 14))); known = true; }
    if (!known) throw InvalidInput("verify: unknown suite '" + std::string(suite) + "'");
    return out;
}

}  // namespace npcl
