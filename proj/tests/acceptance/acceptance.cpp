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

// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.
// Usage: npcl_acceptance [criterion numbers...]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "npcl/adversarial.hpp"
#include "npcl/corruption.hpp"
#include "npcl/dataset.hpp"
#include "npcl/mlp.hpp"
#include "npcl/objectives.hpp"
#include "npcl/rng.hpp"
#include "npcl/selector.hpp"
#include "npcl/trainer.hpp"
#include "oracles.hpp"

#ifdef NPCL_HAVE_CLI
#include "cli.hpp"
#endif

namespace {

using namespace npcl;
using V = std::vector<double>;
using Bits = std::vector<std::uint8_t>;

struct Outcome {
    bool passed = false;
    std::string detail;
};

struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct SelectorInstance {
    V losses;
    double c;
};

std::vector<SelectorInstance> selector_instances() {
    npcl_test::Gen g(1001);
    std::vector<SelectorInstance> out(1000);
    for (auto& inst : out) {
        const std::size_t n = 1 + g.index(12);
        inst.losses = g.vec(n, 0.0, 4.0);
        inst.c = g.uniform(0.0, 2.0 * static_cast<double>(n));
    }
    return out;
}

Outcome selector_optimality() {
    const auto t0 = std::chrono::steady_clock::now();
    std::size_t mismatches = 0;
    for (const auto& inst : selector_instances())
        if (partial_optimize(inst.losses, inst.c).objective != npcl_test::brute_curriculum(inst.losses, inst.c))
            ++mismatches;
    const double secs = seconds_since(t0);
    return {mismatches == 0 && secs < 5.0,
            fmt::format("1000 instances, {} mismatches at zero tolerance, {:.2f} s (limit 5 s)", mismatches, secs)};
}

Outcome optimality_identities() {
    std::size_t violations = 0, with_next = 0;
    for (const auto& inst : selector_instances()) {
        const auto r = partial_optimize(inst.losses, inst.c);
        const auto t = static_cast<double>(r.selected_count);
        // Prefix sums recomputed here in sorted order.
        V sorted = inst.losses;
        std::sort(sorted.begin(), sorted.end());
        V prefix(sorted.size());
        std::partial_sum(sorted.begin(), sorted.end(), prefix.begin());
        const double lt = r.selected_count == 0 ? 0.0 : prefix[r.selected_count - 1];
        if (!(lt <= inst.c + 1.0 - t)) ++violations;
        if (r.selected_count < sorted.size()) {
            ++with_next;
            const double next = prefix[r.selected_count];
            if (!(next > inst.c - t)) ++violations;
            if (!(next > std::max(lt, inst.c - t))) ++violations;
        }
    }
    return {violations == 0,
            fmt::format("1000 instances ({} with a next sample), {} violations", with_next, violations)};
}

// Margins on a 1/256 grid keep every loss sum exact.
V dyadic_margins(npcl_test::Gen& g, std::size_t n) {
    V u(n);
    for (double& x : u) x = std::ldexp(static_cast<double>(static_cast<long>(g.index(1537)) - 512), -8);
    return u;
}

Outcome bound_chains() {
    const auto t0 = std::chrono::steady_clock::now();
    npcl_test::Gen g(3003);
    Rng rng(3004);
    const std::size_t sizes[] = {4, 8, 16};
    std::size_t violations = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const auto b = MarginBatch::from_hinge_margins(dyadic_margins(g, 64));
        const auto p = BatchPartition::shuffled(64, sizes[g.index(3)], rng);
        const double j = zero_one_objective(b);
        const double jhat = surrogate_objective(b);
        const double q = curriculum_objective(b, ThresholdMode::full_q()).value;
        const double e = curriculum_objective(b, ThresholdMode::full_e()).value;
        const double qhat = batched_objective(b, p, ThresholdMode::full_q()).value;
        const double ehat = batched_objective(b, p, ThresholdMode::full_e()).value;
        const bool ok = j <= q && q <= qhat && qhat <= jhat && j <= 2.0 * e && e <= ehat && ehat <= jhat && e <= q;
        if (!ok) ++violations;
    }
    const double secs = seconds_since(t0);
    return {violations == 0 && secs < 5.0,
            fmt::format("1000 margin vectors n=64, m in {{4,8,16}}, {} violations, {:.2f} s (limit 5 s)", violations,
                        secs)};
}

Outcome npcl_reduction() {
    npcl_test::Gen g(4004);
    std::size_t mismatches = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const auto b = MarginBatch::from_hinge_margins(g.vec(1 + g.index(128), -3.0, 3.0));
        if (curriculum_objective(b, ThresholdMode::npcl_fixed(0.0)).value !=
            curriculum_objective(b, ThresholdMode::full_e()).value)
            ++mismatches;
        if (curriculum_objective(b, ThresholdMode::npcl_adaptive(0.0)).value !=
            curriculum_objective(b, ThresholdMode::full_q()).value)
            ++mismatches;
    }
    return {mismatches == 0, fmt::format("100 batches, {} inexact pairs", mismatches)};
}

Outcome pruning_count() {
    npcl_test::Gen g(5005);
    const double eps_choices[] = {0.125, 0.25, 0.375, 0.5};
    std::size_t violations = 0, strict_cases = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 16 * (1 + g.index(8));
        const double eps = eps_choices[g.index(4)];
        const auto pruned = static_cast<std::size_t>(eps * static_cast<double>(n));
        const std::size_t keep = n - pruned;
        const double zero_share = trial % 2 == 0 ? 0.25 : 0.95;
        V losses(n);
        for (double& l : losses)
            l = g.uniform(0.0, 1.0) < zero_share ? 0.0 : g.uniform(0.0, 0.5 / static_cast<double>(n));
        const auto r = curriculum_objective(MarginBatch::from_losses(V(n, 1.0), losses), ThresholdMode::npcl_fixed(eps));
        V sorted = losses;
        std::sort(sorted.begin(), sorted.end());
        const std::size_t unselected = n - r.selection.selected_count;
        if (sorted[keep] != 0.0) {
            ++strict_cases;
            if (unselected != pruned) ++violations;
        } else if (unselected != pruned && unselected + 1 != pruned) {
            ++violations;
        }
    }
    return {violations == 0,
            fmt::format("100 batches ({} with nonzero boundary loss), {} violations", strict_cases, violations)};
}

Outcome gradient_fidelity() {
    const auto t0 = std::chrono::steady_clock::now();
    npcl_test::Gen g(6006);
    const BaseLoss kinds[] = {BaseLoss::hard_hinge(), BaseLoss::soft_hinge(), BaseLoss::weighted(0.5)};
    double worst = 0.0;
    std::size_t nets = 0, skipped = 0;
    std::uint64_t seed = 0;
    while (nets < 100) {
        std::vector<std::size_t> dims{1 + g.index(6)};
        const std::size_t depth = 1 + g.index(2);
        for (std::size_t l = 0; l < depth; ++l) dims.push_back(2 + g.index(8));
        dims.push_back(2 + g.index(5));
        const auto p = MlpParams::glorot(dims, ++seed);
        const std::size_t n = 1 + g.index(8);
        V features = g.vec(n * dims[0], -2.0, 2.0);
        std::vector<std::size_t> labels(n);
        for (auto& y : labels) y = g.index(dims.back());
        const SampleBatch batch{features, dims[0], labels};
        if (kink_distance(p, batch) < 1e-3) {
            ++skipped;
            continue;
        }
        for (const auto& k : kinds) worst = std::max(worst, grad_check(p, batch, k));
        ++nets;
    }
    const double secs = seconds_since(t0);
    return {worst < 1e-5 && secs < 30.0,
            fmt::format("100 nets x 3 losses ({} near-kink draws skipped), max rel err {:.3e} (limit 1e-5), "
                        "{:.2f} s (limit 30 s)",
                        skipped, worst, secs)};
}

// Worst-case reweighting of a 0-1 vector with mean p: mass moves onto the ones until the
// chi-square budget is spent or all weight sits on them.
double closed_form_adv(double p, double delta) { return std::min(1.0, p + std::sqrt(delta * p * (1.0 - p))); }

Outcome adversarial() {
    npcl_test::Gen g(7007);
    double worst = 0.0;
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t n = 1 + g.index(80);
        const double rate = g.uniform(0.0, 1.0);
        V losses(n);
        std::size_t ones = 0;
        for (double& l : losses) {
            l = g.uniform(0.0, 1.0) < rate ? 1.0 : 0.0;
            ones += l == 1.0 ? 1 : 0;
        }
        const double delta = std::exp(g.uniform(std::log(1e-3), std::log(10.0)));
        const double expected = closed_form_adv(static_cast<double>(ones) / static_cast<double>(n), delta);
        worst = std::max(worst, std::abs(solve_adversarial_risk(losses, {delta}) - expected));
    }
    std::size_t pairs = 0, violations = 0;
    for (double delta : {0.01, 0.1, 1.0}) {
        for (int trial = 0; trial < 200; ++trial) {
            const std::size_t n = 1 + g.index(40);
            std::vector<Bits> vs(2, Bits(n));
            for (auto& v : vs) {
                const double rate = g.uniform(0.0, 1.0);
                for (auto& b : v) b = g.uniform(0.0, 1.0) < rate ? 1 : 0;
            }
            const auto report = check_monotonicity(vs, {delta});
            pairs += report.pairs_checked;
            violations += report.violations.size();
        }
    }
    return {worst <= 1e-6 && violations == 0,
            fmt::format("500 solver cases max |diff| {:.2e} (limit 1e-6); 600 vector pairs ({} ordered checks) "
                        "at delta in {{0.01,0.1,1}}, {} violations",
                        worst, pairs, violations)};
}

// Scaled-down robustness runs shared by criteria 8 and 9.
constexpr double kTrueRate = 0.4;
constexpr std::uint64_t kSeeds[] = {1, 2, 3, 4, 5};

struct RunSummary {
    double final_accuracy = 0.0;
    double precision_last5 = 0.0;
};

struct BlobData {
    Dataset train_clean;
    Dataset train_noisy;
    Dataset test;
};

BlobData blob_data(std::uint64_t seed) {
    const auto all = synth_blobs(6000, 4, 3.0, 1.0, mix_seed(seed, 100));
    auto [tr, te] = split(all, 1000.0 / 6000.0, mix_seed(seed, 101));
    CorruptionSpec spec;
    spec.rate = kTrueRate;
    spec.seed = mix_seed(seed, 102);
    spec.num_classes = 4;
    auto noisy = corrupt_dataset(tr, spec);
    return {std::move(tr), std::move(noisy), std::move(te)};
}

TrainConfig blob_config(std::uint64_t seed, std::optional<double> prior) {
    TrainConfig cfg;
    cfg.epochs = 30;
    cfg.seed = seed;
    cfg.selection = prior.has_value();
    cfg.threshold = ThresholdMode::npcl_adaptive(prior.value_or(0.0));
    return cfg;
}

RunSummary summarize(const TrainResult& r) {
    RunSummary s;
    s.final_accuracy = r.metrics.back().test_accuracy;
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t i = r.metrics.size() - 5; i < r.metrics.size(); ++i)
        if (r.metrics[i].label_precision) {
            sum += *r.metrics[i].label_precision;
            ++count;
        }
    s.precision_last5 = count == 0 ? 0.0 : sum / static_cast<double>(count);
    return s;
}

struct SeedRuns {
    BlobData data;
    RunSummary baseline;
    std::vector<std::pair<double, RunSummary>> by_prior;
};

std::vector<SeedRuns>& seed_runs(const std::vector<double>& priors) {
    static std::vector<SeedRuns> cache;
    if (cache.empty())
        for (std::uint64_t seed : kSeeds) {
            SeedRuns s{blob_data(seed), {}, {}};
            s.baseline = summarize(train(blob_config(seed, std::nullopt), s.data.train_noisy, s.data.test));
            cache.push_back(std::move(s));
        }
    for (std::size_t k = 0; k < cache.size(); ++k)
        for (double prior : priors) {
            auto& have = cache[k].by_prior;
            if (std::any_of(have.begin(), have.end(), [&](const auto& e) { return e.first == prior; })) continue;
            const auto r = train(blob_config(kSeeds[k], prior), cache[k].data.train_noisy, cache[k].data.test);
            have.emplace_back(prior, summarize(r));
        }
    return cache;
}

RunSummary at_prior(const SeedRuns& s, double prior) {
    for (const auto& [p, r] : s.by_prior)
        if (p == prior) return r;
    return {};
}

Outcome desk_robustness() {
    const auto t0 = std::chrono::steady_clock::now();
    auto clean_cfg = blob_config(kSeeds[0], std::nullopt);
    const auto clean_data = blob_data(kSeeds[0]);
    const double clean_acc = train(clean_cfg, clean_data.train_clean, clean_data.test).metrics.back().test_accuracy;

    const auto& runs = seed_runs({kTrueRate});
    double npcl_acc = 0.0, base_acc = 0.0, precision = 0.0;
    for (const auto& s : runs) {
        npcl_acc += at_prior(s, kTrueRate).final_accuracy;
        precision += at_prior(s, kTrueRate).precision_last5;
        base_acc += s.baseline.final_accuracy;
    }
    const auto k = static_cast<double>(runs.size());
    npcl_acc /= k;
    base_acc /= k;
    precision /= k;
    const double gain = 100.0 * (npcl_acc - base_acc);
    const double secs = seconds_since(t0);
    const bool clean_ok = clean_acc > 0.95;
    const bool a = precision > 0.6;
    const bool b = gain >= 3.0;
    return {clean_ok && a && b && secs < 300.0,
            fmt::format("clean acc {:.4f} (need > 0.95) {}; (a) label precision {:.4f} (need > 0.6) {}; "
                        "(b) NPCL acc {:.4f} vs no-selection {:.4f}, gain {:+.2f} pts (need >= 3) {}; "
                        "{:.1f} s (limit 300 s)",
                        clean_acc, clean_ok ? "ok" : "FAIL", precision, a ? "ok" : "FAIL", npcl_acc, base_acc,
                        gain, b ? "ok" : "FAIL", secs)};
}

Outcome misspecified_prior() {
    const std::vector<double> priors{0.3, 0.4, 0.5};
    const auto& runs = seed_runs(priors);
    double base = 0.0;
    for (const auto& s : runs) base += s.baseline.precision_last5;
    base /= static_cast<double>(runs.size());
    bool ok = true;
    std::string parts;
    for (double prior : priors) {
        double p = 0.0;
        for (const auto& s : runs) p += at_prior(s, prior).precision_last5;
        p /= static_cast<double>(runs.size());
        ok = ok && p > base;
        parts += fmt::format("prior {:.1f}: {:.4f}; ", prior, p);
    }
    return {ok, fmt::format("{}no-selection baseline {:.4f}", parts, base)};
}

#ifdef NPCL_HAVE_CLI
std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

Outcome determinism() {
    namespace fs = std::filesystem;
    const auto root = fs::temp_directory_path() / "npcl_acceptance_determinism";
    fs::remove_all(root);
    std::vector<std::string> csvs;
    for (const char* leaf : {"a", "b"}) {
        const std::vector<std::string> args{"train",     "--synthetic", "blobs", "--noise",    "symmetric",
                                            "--noise-rate", "0.4",      "--epsilon-prior", "0.4", "--epochs",
                                            "5",         "--seed",      "7",     "--out",      (root / leaf).string()};
        std::ostringstream out, err;
        if (cli::run(args, out, err) != cli::kSuccess) {
            fs::remove_all(root);
            return {false, "train exited nonzero: " + err.str()};
        }
        csvs.push_back(slurp(root / leaf / "metrics.csv"));
    }
    fs::remove_all(root);
    const bool same = csvs[0] == csvs[1] && !csvs[0].empty();
    return {same, fmt::format("two train runs with seed 7, metrics.csv {} ({} bytes)",
                              same ? "byte-identical" : "differs", csvs[0].size())};
}
#else
Outcome determinism() { return {false, "built without the CLI"}; }
#endif

}  // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> criteria{
        {1, "selector optimality", selector_optimality},
        {2, "optimality identities", optimality_identities},
        {3, "bound chains", bound_chains},
        {4, "npcl reduction", npcl_reduction},
        {5, "pruning count", pruning_count},
        {6, "gradient fidelity", gradient_fidelity},
        {7, "adversarial risk", adversarial},
        {8, "desk-scale robustness", desk_robustness},
        {9, "misspecified prior", misspecified_prior},
        {10, "determinism", determinism},
    };
    std::set<int> wanted;
    for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));

    int failed = 0;
    for (const auto& c : criteria) {
        if (!wanted.empty() && !wanted.count(c.id)) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        if (!o.passed) ++failed;
        fmt::print("[{}] {:>2} {:<22} {} ({:.2f} s)\n", o.passed ? "PASS" : "FAIL", c.id, c.name, o.detail,
                   seconds_since(t0));
        std::fflush(stdout);
    }
    fmt::print("{} criteria failed\n", failed);
    return failed == 0 ? 0 : 1;
}
