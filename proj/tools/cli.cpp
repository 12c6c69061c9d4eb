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

#include "cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "npcl/corruption.hpp"
#include "npcl/dataset.hpp"
#include "npcl/error.hpp"
#include "npcl/rng.hpp"
#include "npcl/trainer.hpp"
#include "npcl/verify.hpp"

namespace npcl::cli {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

constexpr std::uint64_t kBlobStream = 100;
constexpr std::uint64_t kSplitStream = 101;
constexpr std::uint64_t kNoiseStream = 102;

constexpr std::size_t kDefaultBurnIn = 5;
constexpr double kSweepFactors[] = {0.5, 0.75, 1.0, 1.25, 1.5};

struct DataOptions {
    std::string dataset;
    std::string test_dataset;
    std::string synthetic;
    std::size_t n_train = 5000;
    std::size_t n_test = 1000;
    std::size_t classes = 4;
    double separation = 3.0;
    double noise_std = 1.0;
    double test_fraction = 0.2;
};

struct NoiseOptions {
    std::string kind = "symmetric";
    double rate = 0.0;
};

struct TrainOptions {
    std::string loss = "hinge";
    std::string threshold = "npcl-adaptive";
    std::optional<double> epsilon_prior;
    std::size_t epochs = 200;
    std::size_t batch_size = 128;
    std::optional<std::size_t> burn_in;
    double learning_rate = 1e-3;
    std::string hidden = "64,64";
    bool no_selection = false;
    bool no_shuffle = false;
    std::string checkpoint;
};

struct Common {
    std::uint64_t seed = 0;
    std::string out;
};

void add_data_options(CLI::App& app, DataOptions& d) {
    app.add_option("--dataset", d.dataset,
                   "Training data: '<images.idx>,<labels.idx>' or a dataset file written by 'corrupt'");
    app.add_option("--test-dataset", d.test_dataset, "Test data, same forms as --dataset");
    app.add_option("--synthetic", d.synthetic, "Generate data instead of loading it")
        ->check(CLI::IsMember({"blobs"}));
    app.add_option("--n-train", d.n_train, "Synthetic training samples")->capture_default_str();
    app.add_option("--n-test", d.n_test, "Synthetic test samples")->capture_default_str();
    app.add_option("--classes", d.classes, "Synthetic class count")->capture_default_str()
        ->check(CLI::Range(std::size_t{2}, std::size_t{1000}));
    app.add_option("--separation", d.separation, "Blob circle radius")->capture_default_str()
        ->check(CLI::PositiveNumber);
    app.add_option("--noise-std", d.noise_std, "Blob standard deviation")->capture_default_str()
        ->check(CLI::NonNegativeNumber);
    app.add_option("--test-fraction", d.test_fraction,
                   "Held-out fraction when --dataset has no --test-dataset")
        ->capture_default_str()->check(CLI::Range(0.0, 1.0));
}

void add_noise_options(CLI::App& app, NoiseOptions& n) {
    app.add_option("--noise", n.kind, "Label corruption model")->capture_default_str()
        ->check(CLI::IsMember({"symmetric", "pair"}));
    app.add_option("--noise-rate", n.rate, "Per-sample flip probability")->capture_default_str()
        ->check(CLI::Range(0.0, 1.0));
}

void add_train_options(CLI::App& app, TrainOptions& t) {
    app.add_option("--loss", t.loss, "Base loss: hinge, soft-hinge or weighted:<beta>")->capture_default_str();
    app.add_option("--threshold", t.threshold, "Selection threshold rule")->capture_default_str()
        ->check(CLI::IsMember({"full-q", "full-e", "npcl-fixed", "npcl-adaptive"}));
    app.add_option("--epsilon-prior", t.epsilon_prior, "Noise-rate prior (default: --noise-rate)")
        ->check(CLI::Range(0.0, 1.0));
    app.add_option("--epochs", t.epochs)->capture_default_str()->check(CLI::PositiveNumber);
    app.add_option("--batch-size", t.batch_size)->capture_default_str()->check(CLI::PositiveNumber);
    app.add_option("--burn-in", t.burn_in,
                   "Epochs trained on soft hinge without selection (default: min(5, epochs - 1))");
    app.add_option("--lr", t.learning_rate, "Adam learning rate")->capture_default_str()
        ->check(CLI::PositiveNumber);
    app.add_option("--hidden", t.hidden, "Comma-separated hidden layer widths")->capture_default_str();
    app.add_flag("--no-selection", t.no_selection, "Train on every sample (plain surrogate)");
    app.add_flag("--no-shuffle", t.no_shuffle, "Keep the training order fixed across epochs");
    app.add_option("--checkpoint", t.checkpoint, "Write final parameters to this file");
}

void add_common(CLI::App& app, Common& c, bool needs_out) {
    app.add_option("--seed", c.seed, "Run seed")->capture_default_str();
    auto* out = app.add_option("--out", c.out, "Output directory");
    if (needs_out) out->required();
    app.add_option("--config", "Read 'key = value' defaults from a file; flags override it");
}

BaseLoss parse_loss(const std::string& name) {
    if (name == "hinge") return BaseLoss::hard_hinge();
    if (name == "soft-hinge") return BaseLoss::soft_hinge();
    if (name.rfind("weighted:", 0) == 0) {
        std::size_t used = 0;
        const std::string tail = name.substr(9);
        double beta = 0.0;
        try {
            beta = std::stod(tail, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != tail.size()) throw InvalidInput("--loss: cannot parse beta in '" + name + "'");
        return BaseLoss::weighted(beta);
    }
    throw InvalidInput("--loss: expected hinge, soft-hinge or weighted:<beta>, got '" + name + "'");
}

std::string loss_name(const BaseLoss& loss) {
    switch (loss.kind()) {
        case BaseLoss::Kind::HardHinge: return "hinge";
        case BaseLoss::Kind::SoftHinge: return "soft-hinge";
        case BaseLoss::Kind::Weighted: return fmt::format("weighted:{}", loss.beta());
    }
    return "";
}

ThresholdMode parse_threshold(const std::string& name, double epsilon) {
    if (name == "full-q") return ThresholdMode::full_q();
    if (name == "full-e") return ThresholdMode::full_e();
    if (name == "npcl-fixed") return ThresholdMode::npcl_fixed(epsilon);
    return ThresholdMode::npcl_adaptive(epsilon);
}

std::vector<std::size_t> parse_hidden(const std::string& text) {
    std::vector<std::size_t> widths;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        std::size_t used = 0;
        unsigned long w = 0;
        try {
            w = std::stoul(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != item.size() || w == 0) throw InvalidInput("--hidden: bad width '" + item + "'");
        widths.push_back(w);
    }
    return widths;
}

Dataset load_any(const std::string& spec) {
    const auto comma = spec.find(',');
    if (comma != std::string::npos) return load_idx(spec.substr(0, comma), spec.substr(comma + 1));
    return load_dataset(spec);
}

std::pair<Dataset, Dataset> load_data(const DataOptions& d, std::uint64_t seed) {
    if (!d.synthetic.empty() && !d.dataset.empty())
        throw InvalidInput("use either --dataset or --synthetic, not both");
    if (d.synthetic == "blobs") {
        const std::size_t total = d.n_train + d.n_test;
        if (d.n_train == 0 || d.n_test == 0) throw InvalidInput("--n-train and --n-test must be positive");
        const auto all = synth_blobs(total, d.classes, d.separation, d.noise_std, mix_seed(seed, kBlobStream));
        return split(all, static_cast<double>(d.n_test) / static_cast<double>(total),
                     mix_seed(seed, kSplitStream));
    }
    if (d.dataset.empty()) throw InvalidInput("one of --dataset or --synthetic is required");
    Dataset train_set = load_any(d.dataset);
    if (!d.test_dataset.empty()) return {std::move(train_set), load_any(d.test_dataset)};
    return split(train_set, d.test_fraction, mix_seed(seed, kSplitStream));
}

CorruptionSpec noise_spec(const NoiseOptions& n, std::size_t classes, std::uint64_t seed) {
    CorruptionSpec spec;
    spec.kind = parse_noise_kind(n.kind);
    spec.rate = n.rate;
    spec.seed = mix_seed(seed, kNoiseStream);
    spec.num_classes = classes;
    return spec;
}

std::vector<std::uint8_t> flip_flags(const Dataset& ds) {
    std::vector<std::uint8_t> flags(ds.size());
    for (std::size_t i = 0; i < ds.size(); ++i) flags[i] = ds.is_noisy(i) ? 1 : 0;
    return flags;
}

TrainConfig make_config(const TrainOptions& t, const NoiseOptions& n, std::uint64_t seed) {
    TrainConfig cfg;
    cfg.epochs = t.epochs;
    cfg.batch_size = t.batch_size;
    cfg.burn_in_epochs = t.burn_in.value_or(std::min<std::size_t>(kDefaultBurnIn, t.epochs - 1));
    cfg.base_loss = parse_loss(t.loss);
    cfg.threshold = parse_threshold(t.threshold, t.epsilon_prior.value_or(n.rate));
    cfg.selection = !t.no_selection;
    cfg.optimizer.learning_rate = t.learning_rate;
    cfg.hidden = parse_hidden(t.hidden);
    cfg.seed = seed;
    cfg.shuffle = !t.no_shuffle;
    cfg.validate();
    return cfg;
}

std::string threshold_name(const ThresholdMode& mode) {
    switch (mode.kind()) {
        case ThresholdMode::Kind::FullQ: return "full-q";
        case ThresholdMode::Kind::FullE: return "full-e";
        case ThresholdMode::Kind::NpclFixed: return "npcl-fixed";
        case ThresholdMode::Kind::NpclAdaptive: return "npcl-adaptive";
    }
    return "";
}

json data_json(const DataOptions& d) {
    json j;
    if (!d.synthetic.empty()) {
        j["synthetic"] = d.synthetic;
        j["n_train"] = d.n_train;
        j["n_test"] = d.n_test;
        j["classes"] = d.classes;
        j["separation"] = d.separation;
        j["noise_std"] = d.noise_std;
    } else {
        j["dataset"] = d.dataset;
        if (d.test_dataset.empty())
            j["test_fraction"] = d.test_fraction;
        else
            j["test_dataset"] = d.test_dataset;
    }
    return j;
}

json config_json(const TrainConfig& cfg, const NoiseOptions& n) {
    json j;
    j["epochs"] = cfg.epochs;
    j["batch_size"] = cfg.batch_size;
    j["burn_in"] = cfg.burn_in_epochs;
    j["loss"] = loss_name(cfg.base_loss);
    j["threshold"] = threshold_name(cfg.threshold);
    j["epsilon_prior"] = cfg.threshold.epsilon();
    j["selection"] = cfg.selection;
    j["lr"] = cfg.optimizer.learning_rate;
    j["adam_beta1"] = cfg.optimizer.beta1;
    j["adam_beta2"] = cfg.optimizer.beta2;
    j["adam_eps"] = cfg.optimizer.epsilon;
    j["hidden"] = cfg.hidden;
    j["leaky_slope"] = cfg.leaky_slope;
    j["shuffle"] = cfg.shuffle;
    j["seed"] = cfg.seed;
    j["noise"] = n.kind;
    j["noise_rate"] = n.rate;
    return j;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot create " + path.string());
    out << text;
    if (!out) throw IoError("write failed: " + path.string());
}

void write_metrics(const fs::path& path, const std::vector<EpochMetrics>& metrics) {
    std::ostringstream csv;
    write_metrics_csv(csv, metrics);
    write_text(path, csv.str());
}

fs::path prepare_out(const std::string& out) {
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec) throw IoError("cannot create output directory " + out + ": " + ec.message());
    return fs::path(out);
}

double tail_precision(const std::vector<EpochMetrics>& metrics, std::size_t window) {
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t i = metrics.size() > window ? metrics.size() - window : 0; i < metrics.size(); ++i) {
        if (metrics[i].label_precision) {
            sum += *metrics[i].label_precision;
            ++count;
        }
    }
    return count == 0 ? 0.0 : sum / static_cast<double>(count);
}

int do_train(const DataOptions& d, const NoiseOptions& n, const TrainOptions& t, const Common& c,
             std::ostream& out) {
    const TrainConfig cfg = make_config(t, n, c.seed);
    auto [train_set, test_set] = load_data(d, c.seed);
    if (n.rate > 0.0) train_set = corrupt_dataset(train_set, noise_spec(n, train_set.num_classes, c.seed));
    const fs::path dir = prepare_out(c.out);

    json echo;
    echo["command"] = "train";
    echo["data"] = data_json(d);
    echo["train"] = config_json(cfg, n);
    if (!t.checkpoint.empty()) echo["checkpoint"] = t.checkpoint;
    write_text(dir / "config.json", echo.dump(2) + "\n");

    const auto result = train(cfg, train_set, test_set);
    write_metrics(dir / "metrics.csv", result.metrics);
    if (!t.checkpoint.empty()) save_params(result.params, t.checkpoint);

    const auto& last = result.metrics.back();
    out << fmt::format("trained {} epochs: test_acc={:.4f} label_precision={} -> {}\n", cfg.epochs,
                       last.test_accuracy,
                       last.label_precision ? fmt::format("{:.4f}", *last.label_precision) : "n/a",
                       (dir / "metrics.csv").string());
    return kSuccess;
}

int do_sweep(const DataOptions& d, const NoiseOptions& n, const TrainOptions& t, const Common& c,
             std::ostream& out) {
    if (t.no_selection) throw InvalidInput("sweep: --no-selection makes every cell identical");
    for (double f : kSweepFactors)
        if (f * n.rate >= 1.0)
            throw InvalidInput(fmt::format("sweep: prior {}x{} reaches 1", f, n.rate));
    auto [train_set, test_set] = load_data(d, c.seed);
    if (n.rate > 0.0) train_set = corrupt_dataset(train_set, noise_spec(n, train_set.num_classes, c.seed));
    const fs::path dir = prepare_out(c.out);

    json echo;
    echo["command"] = "sweep";
    echo["data"] = data_json(d);
    echo["factors"] = std::vector<double>(std::begin(kSweepFactors), std::end(kSweepFactors));
    echo["train"] = config_json(make_config(t, n, c.seed), n);
    write_text(dir / "config.json", echo.dump(2) + "\n");

    std::string summary = "cell,epsilon_prior,final_test_acc,mean_label_precision_last5\n";
    auto run_cell = [&](const std::string& name, TrainConfig cfg) {
        const auto result = train(cfg, train_set, test_set);
        write_metrics(dir / (name + ".csv"), result.metrics);
        const double prec = tail_precision(result.metrics, 5);
        summary += fmt::format("{},{:.10g},{:.10g},{:.10g}\n", name,
                               cfg.selection ? cfg.threshold.epsilon() : 0.0,
                               result.metrics.back().test_accuracy, prec);
        out << fmt::format("{:<14} test_acc={:.4f} precision(last5)={:.4f}\n", name,
                           result.metrics.back().test_accuracy, prec);
    };

    TrainOptions base_opts = t;
    base_opts.no_selection = true;
    run_cell("no_selection", make_config(base_opts, n, c.seed));
    for (double f : kSweepFactors) {
        TrainOptions cell = t;
        cell.epsilon_prior = f * n.rate;
        run_cell(fmt::format("prior_x{:.2f}", f), make_config(cell, n, c.seed));
    }
    write_text(dir / "summary.csv", summary);
    return kSuccess;
}

int do_corrupt(const DataOptions& d, const NoiseOptions& n, const Common& c, std::ostream& out) {
    Dataset source;
    if (d.synthetic == "blobs") {
        source = synth_blobs(d.n_train, d.classes, d.separation, d.noise_std, mix_seed(c.seed, kBlobStream));
    } else if (!d.dataset.empty()) {
        source = load_any(d.dataset);
    } else {
        throw InvalidInput("one of --dataset or --synthetic is required");
    }
    const auto spec = noise_spec(n, source.num_classes, c.seed);
    const Dataset corrupted = corrupt_dataset(source, spec);
    const fs::path dir = prepare_out(c.out);
    save_dataset(corrupted, dir / "dataset.bin");
    const auto flags = flip_flags(corrupted);
    write_text(dir / "dataset.corruption.json", corruption_sidecar_json(spec, flags));

    json echo;
    echo["command"] = "corrupt";
    echo["data"] = data_json(d);
    echo["noise"] = n.kind;
    echo["noise_rate"] = n.rate;
    echo["seed"] = c.seed;
    echo["noise_seed"] = spec.seed;
    write_text(dir / "config.json", echo.dump(2) + "\n");

    const auto flipped = std::count(flags.begin(), flags.end(), std::uint8_t{1});
    out << fmt::format("corrupted {} of {} labels -> {}\n", flipped, corrupted.size(),
                       (dir / "dataset.bin").string());
    return kSuccess;
}

int do_verify(const std::string& suite, const Common& c, std::ostream& out) {
    const auto results = run_verification(suite, c.seed);
    bool ok = true;
    out << fmt::format("{:<52} {:<6} {:>7}  {}\n", "check", "result", "cases", "detail");
    for (const auto& r : results) {
        ok = ok && r.passed;
        out << fmt::format("{:<52} {:<6} {:>7}  {}\n", r.name, r.passed ? "PASS" : "FAIL", r.cases, r.detail);
    }
    if (!c.out.empty()) {
        const fs::path dir = prepare_out(c.out);
        std::string csv = "check,passed,cases,failures\n";
        for (const auto& r : results)
            csv += fmt::format("\"{}\",{},{},{}\n", r.name, r.passed ? 1 : 0, r.cases, r.failures);
        write_text(dir / "verify.csv", csv);
        json echo;
        echo["command"] = "verify";
        echo["suite"] = suite;
        echo["seed"] = c.seed;
        write_text(dir / "config.json", echo.dump(2) + "\n");
    }
    return ok ? kSuccess : kVerificationFailed;
}

std::string trim(std::string s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return "";
    const auto last = s.find_last_not_of(" \t\r");
    s = s.substr(first, last - first + 1);
    if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front())
        s = s.substr(1, s.size() - 2);
    return s;
}

// Turns each `key = value` line into `--key value`; boolean flags become `--key` when true.
std::vector<std::string> config_tokens(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file " + path);
    static const std::vector<std::string> kFlags = {"no-selection", "no-shuffle"};
    std::vector<std::string> tokens;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = trim(line);
        if (line.empty() || line[0] == '#' || line[0] == ';' || line[0] == '[') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw InvalidInput(fmt::format("{}:{}: expected 'key = value'", path, lineno));
        std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.rfind("--", 0) == 0) key = key.substr(2);
        if (key.empty() || key == "config")
            throw InvalidInput(fmt::format("{}:{}: bad key", path, lineno));
        if (std::find(kFlags.begin(), kFlags.end(), key) != kFlags.end()) {
            if (value == "true" || value == "1") tokens.push_back("--" + key);
            else if (value != "false" && value != "0")
                throw InvalidInput(fmt::format("{}:{}: {} expects true or false", path, lineno, key));
            continue;
        }
        tokens.push_back("--" + key);
        tokens.push_back(value);
    }
    return tokens;
}

// Splices config-file tokens in right after the subcommand name so later command-line flags win.
std::vector<std::string> expand_config(std::span<const std::string> args) {
    std::vector<std::string> rest;
    std::vector<std::string> from_file;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) {
            auto t = config_tokens(args[++i]);
            from_file.insert(from_file.end(), t.begin(), t.end());
        } else if (args[i].rfind("--config=", 0) == 0) {
            auto t = config_tokens(args[i].substr(9));
            from_file.insert(from_file.end(), t.begin(), t.end());
        } else {
            rest.push_back(args[i]);
        }
    }
    if (from_file.empty() || rest.empty()) return rest;
    std::vector<std::string> out{rest.front()};
    out.insert(out.end(), from_file.begin(), from_file.end());
    out.insert(out.end(), rest.begin() + 1, rest.end());
    return out;
}

}  // namespace

int run(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Curriculum-loss training and verification toolkit", "npcl"};
    app.require_subcommand(1);
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

    DataOptions data;
    NoiseOptions noise;
    TrainOptions train_opts;
    Common common;
    std::string suite = "all";

    auto* train_cmd = app.add_subcommand("train", "Train a network with per-batch curriculum selection");
    add_data_options(*train_cmd, data);
    add_noise_options(*train_cmd, noise);
    add_train_options(*train_cmd, train_opts);
    add_common(*train_cmd, common, true);

    auto* sweep_cmd = app.add_subcommand("sweep", "Train across noise-prior multiples {0.5,0.75,1,1.25,1.5}");
    add_data_options(*sweep_cmd, data);
    add_noise_options(*sweep_cmd, noise);
    add_train_options(*sweep_cmd, train_opts);
    add_common(*sweep_cmd, common, true);

    auto* corrupt_cmd = app.add_subcommand("corrupt", "Write a label-corrupted dataset and its sidecar");
    add_data_options(*corrupt_cmd, data);
    add_noise_options(*corrupt_cmd, noise);
    add_common(*corrupt_cmd, common, true);

    auto* verify_cmd = app.add_subcommand("verify", "Run the property suites and print a pass/fail table");
    verify_cmd->add_option("suite", suite, "selector, bounds, gradients, adversarial or all")
        ->capture_default_str()
        ->check(CLI::IsMember(verification_suites()));
    add_common(*verify_cmd, common, false);

    std::vector<std::string> expanded;
    try {
        expanded = expand_config(args);
    } catch (const IoError& e) {
        err << "error: " << e.what() << '\n';
        return kIo;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kValidation;
    }

    try {
        std::vector<std::string> reversed(expanded.rbegin(), expanded.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kValidation;
    }

    try {
        if (*train_cmd) return do_train(data, noise, train_opts, common, out);
        if (*sweep_cmd) return do_sweep(data, noise, train_opts, common, out);
        if (*corrupt_cmd) return do_corrupt(data, noise, common, out);
        if (*verify_cmd) return do_verify(suite, common, out);
    } catch (const ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kIo;
    } catch (const IoError& e) {
        err << "error: " << e.what() << '\n';
        return kIo;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kValidation;
    }
    return kValidation;
}

}  // namespace npcl::cli
