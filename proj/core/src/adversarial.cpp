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

#include "npcl/adversarial.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "npcl/error.hpp"

namespace npcl {

namespace {

void check_spec(const AdvRiskSpec& spec) {
    if (!(spec.delta >= 0.0) || !std::isfinite(spec.delta))
        throw InvalidInput("adversarial risk: delta must be finite and non-negative");
}

std::size_t count_ones(std::span<const std::uint8_t> losses01) {
    std::size_t ones = 0;
    for (auto l : losses01) {
        if (l > 1) throw InvalidInput("adversarial risk: losses must be 0 or 1");
        ones += l;
    }
    return ones;
}

// Mean-one weights for a fixed lambda. `sorted` holds the losses in descending order.
// The active set is the top j losses: r = 1 + (l - mu) / (2 lambda) there, 0 elsewhere.
double solve_mu(std::span<const double> sorted, double lambda) {
    const std::size_t n = sorted.size();
    const auto nd = static_cast<double>(n);
    double prefix = std::accumulate(sorted.begin(), sorted.end(), 0.0);
    for (std::size_t j = n; j >= 1; --j) {
        const auto jd = static_cast<double>(j);
        const double mu = (prefix + 2.0 * lambda * (jd - nd)) / jd;
        const bool active_ok = 1.0 + (sorted[j - 1] - mu) / (2.0 * lambda) >= 0.0;
        if (active_ok) return mu;
        prefix -= sorted[j - 1];
    }
    return sorted.front();
}

struct Weighted {
    double divergence;
    double objective;
};

Weighted evaluate_lambda(std::span<const double> sorted, double lambda) {
    const double mu = solve_mu(sorted, lambda);
    double div = 0.0;
    double obj = 0.0;
    for (double l : sorted) {
        const double r = std::max(0.0, 1.0 + (l - mu) / (2.0 * lambda));
        div += (r - 1.0) * (r - 1.0);
        obj += r * l;
    }
    const auto nd = static_cast<double>(sorted.size());
    return {div / nd, obj / nd};
}

}  // namespace

double empirical_risk(std::span<const std::uint8_t> losses01) {
    if (losses01.empty()) throw InvalidInput("risk: empty loss vector");
    return static_cast<double>(count_ones(losses01)) / static_cast<double>(losses01.size());
}

double empirical_adversarial_risk(std::span<const std::uint8_t> losses01, const AdvRiskSpec& spec) {
    check_spec(spec);
    const double p = empirical_risk(losses01);
    if (spec.delta == 0.0 || p == 0.0) return p;
    const double lifted = p + std::sqrt(spec.delta * p * (1.0 - p));
    return std::min(1.0, lifted);
}

double chi_square_divergence(std::span<const double> weights) {
    double acc = 0.0;
    for (double r : weights) acc += (r - 1.0) * (r - 1.0);
    return acc / static_cast<double>(weights.size());
}

double solve_adversarial_risk(std::span<const double> losses, const AdvRiskSpec& spec) {
    check_spec(spec);
    if (losses.empty()) throw InvalidInput("adversarial risk: empty loss vector");
    for (double l : losses)
        if (!std::isfinite(l)) throw InvalidInput("adversarial risk: non-finite loss");

    std::vector<double> sorted(losses.begin(), losses.end());
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    const auto nd = static_cast<double>(sorted.size());
    const double mean = std::accumulate(sorted.begin(), sorted.end(), 0.0) / nd;
    if (spec.delta == 0.0 || sorted.front() == sorted.back()) return mean;

    // Uniform weight on the maximisers is the cheapest way to reach the top loss.
    const auto top = static_cast<double>(
        std::count(sorted.begin(), sorted.end(), sorted.front()));
    if (spec.delta >= (nd - top) / top) return sorted.front();

    // Divergence falls as lambda grows; bracket the root, then bisect in log space.
    double lo = 1.0;
    double hi = 1.0;
    while (evaluate_lambda(sorted, lo).divergence < spec.delta) lo *= 0.5;
    while (evaluate_lambda(sorted, hi).divergence > spec.delta) hi *= 2.0;
    for (int it = 0; it < 200 && hi / lo > 1.0 + 1e-15; ++it) {
        const double mid = std::sqrt(lo * hi);
        if (evaluate_lambda(sorted, mid).divergence > spec.delta)
            lo = mid;
        else
            hi = mid;
    }
    return evaluate_lambda(sorted, hi).objective;
}

MonotonicityReport check_monotonicity(std::span<const std::vector<std::uint8_t>> loss_vectors,
                                      const AdvRiskSpec& spec) {
    if (loss_vectors.size() < 2) throw InvalidInput("monotonicity: need at least two loss vectors");
    for (const auto& v : loss_vectors)
        if (v.size() != loss_vectors.front().size())
            throw InvalidInput("monotonicity: loss vectors differ in length");

    std::vector<double> risk;
    std::vector<double> adv;
    for (const auto& v : loss_vectors) {
        risk.push_back(empirical_risk(v));
        adv.push_back(empirical_adversarial_risk(v, spec));
    }

    MonotonicityReport report;
    for (std::size_t a = 0; a < loss_vectors.size(); ++a) {
        for (std::size_t b = 0; b < loss_vectors.size(); ++b) {
            if (a == b) continue;
            ++report.pairs_checked;
            if (adv[a] < 1.0) {
                if ((risk[a] < risk[b]) != (adv[a] < adv[b]))
                    report.violations.push_back({a, b, "strict order of risk and adversarial risk disagree"});
            } else if (risk[a] <= risk[b] && adv[b] != 1.0) {
                report.violations.push_back({a, b, "saturated branch: R(a) <= R(b) but R_adv(b) < 1"});
            }
        }
    }
    return report;
}

}  // namespace npcl
