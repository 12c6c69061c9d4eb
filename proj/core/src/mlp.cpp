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

#include "npcl/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "binary_io.hpp"
#include "npcl/dataset.hpp"
#include "npcl/error.hpp"
#include "npcl/rng.hpp"

namespace npcl {

namespace {

// Pre-activations z[1..L] and activations a[0..L-1] of one forward pass.
struct Trace {
    std::vector<std::vector<double>> z;
    std::vector<std::vector<double>> a;
};

void check_dims(std::span<const std::size_t> dims) {
    if (dims.size() < 2) throw InvalidInput("mlp: need an input and an output dimension");
    for (std::size_t d : dims)
        if (d == 0) throw InvalidInput("mlp: zero layer width");
    if (dims.back() < 2) throw InvalidInput("mlp: need at least 2 output classes");
}

void run_forward(const MlpParams& p, std::span<const double> x, Trace& trace) {
    const std::size_t layers = p.num_layers();
    trace.z.resize(layers + 1);
    trace.a.resize(layers);
    trace.a[0].assign(x.begin(), x.end());
    for (std::size_t l = 0; l < layers; ++l) {
        const std::size_t din = p.dims[l];
        const std::size_t dout = p.dims[l + 1];
        auto& z = trace.z[l + 1];
        z.assign(p.values.begin() + static_cast<std::ptrdiff_t>(p.bias_offset(l)),
                 p.values.begin() + static_cast<std::ptrdiff_t>(p.bias_offset(l) + dout));
        const double* w = p.values.data() + p.weight_offset(l);
        const auto& in = trace.a[l];
        for (std::size_t i = 0; i < din; ++i) {
            const double xi = in[i];
            const double* wrow = w + i * dout;
            for (std::size_t o = 0; o < dout; ++o) z[o] += xi * wrow[o];
        }
        if (l + 1 < layers) {
            auto& act = trace.a[l + 1];
            act.resize(dout);
            for (std::size_t o = 0; o < dout; ++o) act[o] = z[o] > 0.0 ? z[o] : p.leaky_slope * z[o];
        }
    }
}

void check_batch(const MlpParams& params, const SampleBatch& batch) {
    if (batch.dim != params.input_dim())
        throw InvalidInput("mlp: feature dimension " + std::to_string(batch.dim) +
                           " does not match input width " + std::to_string(params.input_dim()));
    if (batch.features.size() != batch.size() * batch.dim)
        throw InvalidInput("mlp: feature buffer does not match batch shape");
}

}  // namespace

std::size_t parameter_count(std::span<const std::size_t> dims) {
    std::size_t total = 0;
    for (std::size_t l = 0; l + 1 < dims.size(); ++l) total += dims[l] * dims[l + 1] + dims[l + 1];
    return total;
}

MlpParams MlpParams::zeros(std::vector<std::size_t> dims, double leaky_slope) {
    check_dims(dims);
    MlpParams p;
    p.values.assign(parameter_count(dims), 0.0);
    p.dims = std::move(dims);
    p.leaky_slope = leaky_slope;
    return p;
}

MlpParams MlpParams::glorot(std::vector<std::size_t> dims, std::uint64_t seed, double leaky_slope) {
    MlpParams p = zeros(std::move(dims), leaky_slope);
    Rng rng(seed);
    for (std::size_t l = 0; l < p.num_layers(); ++l) {
        const double limit = std::sqrt(6.0 / static_cast<double>(p.dims[l] + p.dims[l + 1]));
        const std::size_t begin = p.weight_offset(l);
        const std::size_t end = begin + p.dims[l] * p.dims[l + 1];
        for (std::size_t i = begin; i < end; ++i) p.values[i] = rng.uniform(-limit, limit);
    }
    return p;
}

std::size_t MlpParams::weight_offset(std::size_t layer) const {
    std::size_t off = 0;
    for (std::size_t l = 0; l < layer; ++l) off += dims[l] * dims[l + 1] + dims[l + 1];
    return off;
}

std::size_t MlpParams::bias_offset(std::size_t layer) const {
    return weight_offset(layer) + dims[layer] * dims[layer + 1];
}

void MlpParams::validate() const {
    check_dims(dims);
    if (values.size() != parameter_count(dims))
        throw InvalidInput("mlp: parameter vector does not match layer dimensions");
}

std::vector<double> forward(const MlpParams& params, std::span<const double> features) {
    if (features.size() != params.input_dim())
        throw InvalidInput("mlp: feature dimension " + std::to_string(features.size()) +
                           " does not match input width " + std::to_string(params.input_dim()));
    Trace trace;
    run_forward(params, features, trace);
    return std::move(trace.z.back());
}

std::vector<double> forward_batch(const MlpParams& params, const SampleBatch& batch) {
    check_batch(params, batch);
    const std::size_t k = params.num_classes();
    std::vector<double> logits(batch.size() * k);
    Trace trace;
    for (std::size_t i = 0; i < batch.size(); ++i) {
        run_forward(params, batch.row(i), trace);
        std::copy(trace.z.back().begin(), trace.z.back().end(), logits.begin() + static_cast<std::ptrdiff_t>(i * k));
    }
    return logits;
}

Gradient backward(const MlpParams& params, const SampleBatch& batch, const BaseLoss& kind,
                  std::span<const std::uint8_t> mask) {
    check_batch(params, batch);
    if (mask.size() != batch.size()) throw InvalidInput("mlp: mask length differs from batch size");

    Gradient out;
    out.values.assign(params.values.size(), 0.0);
    out.selected = static_cast<std::size_t>(std::count_if(mask.begin(), mask.end(), [](auto m) { return m != 0; }));
    if (out.selected == 0) return out;

    const double scale = 1.0 / static_cast<double>(out.selected);
    const std::size_t layers = params.num_layers();
    Trace trace;
    std::vector<double> delta;
    std::vector<double> prev;
    double loss_sum = 0.0;

    for (std::size_t s = 0; s < batch.size(); ++s) {
        if (!mask[s]) continue;
        run_forward(params, batch.row(s), trace);
        const auto& logits = trace.z.back();
        loss_sum += base_loss(logits, batch.labels[s], kind);
        delta.resize(logits.size());
        loss_gradient(logits, batch.labels[s], kind, delta);
        for (double& d : delta) d *= scale;

        for (std::size_t l = layers; l-- > 0;) {
            const std::size_t din = params.dims[l];
            const std::size_t dout = params.dims[l + 1];
            double* gw = out.values.data() + params.weight_offset(l);
            double* gb = out.values.data() + params.bias_offset(l);
            const auto& in = trace.a[l];
            for (std::size_t o = 0; o < dout; ++o) gb[o] += delta[o];
            for (std::size_t i = 0; i < din; ++i) {
                const double xi = in[i];
                double* grow = gw + i * dout;
                for (std::size_t o = 0; o < dout; ++o) grow[o] += xi * delta[o];
            }
            if (l == 0) break;
            prev.assign(din, 0.0);
            const double* w = params.values.data() + params.weight_offset(l);
            for (std::size_t i = 0; i < din; ++i) {
                const double* wrow = w + i * dout;
                double acc = 0.0;
                for (std::size_t o = 0; o < dout; ++o) acc += wrow[o] * delta[o];
                prev[i] = trace.z[l][i] > 0.0 ? acc : params.leaky_slope * acc;
            }
            delta.swap(prev);
        }
    }
    out.mean_loss = loss_sum * scale;
    return out;
}

double masked_mean_loss(const MlpParams& params, const SampleBatch& batch, const BaseLoss& kind,
                        std::span<const std::uint8_t> mask) {
    check_batch(params, batch);
    if (mask.size() != batch.size()) throw InvalidInput("mlp: mask length differs from batch size");
    Trace trace;
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t s = 0; s < batch.size(); ++s) {
        if (!mask[s]) continue;
        run_forward(params, batch.row(s), trace);
        sum += base_loss(trace.z.back(), batch.labels[s], kind);
        ++count;
    }
    return count == 0 ? 0.0 : sum / static_cast<double>(count);
}

AdamState::AdamState(std::size_t parameter_count, AdamConfig cfg)
    : config(cfg), first_moment(parameter_count, 0.0), second_moment(parameter_count, 0.0) {}

void adam_step(MlpParams& params, std::span<const double> gradient, AdamState& state) {
    if (gradient.size() != params.values.size() || state.first_moment.size() != params.values.size())
        throw InvalidInput("adam: gradient or state shape does not match parameters");
    const auto& c = state.config;
    ++state.step;
    const double t = static_cast<double>(state.step);
    const double correction1 = 1.0 - std::pow(c.beta1, t);
    const double correction2 = 1.0 - std::pow(c.beta2, t);
    for (std::size_t i = 0; i < gradient.size(); ++i) {
        const double g = gradient[i];
        double& m = state.first_moment[i];
        double& v = state.second_moment[i];
        m = c.beta1 * m + (1.0 - c.beta1) * g;
        v = c.beta2 * v + (1.0 - c.beta2) * g * g;
        const double m_hat = m / correction1;
        const double v_hat = v / correction2;
        params.values[i] -= c.learning_rate * m_hat / (std::sqrt(v_hat) + c.epsilon);
    }
}

double grad_check(const MlpParams& params, const SampleBatch& batch, const BaseLoss& kind,
                  const GradCheckOptions& options) {
    const std::vector<std::uint8_t> all(batch.size(), 1);
    const Gradient analytic = backward(params, batch, kind, all);
    MlpParams probe = params;
    double worst = 0.0;
    for (std::size_t i = 0; i < probe.values.size(); ++i) {
        const double saved = probe.values[i];
        probe.values[i] = saved + options.step;
        const double up = masked_mean_loss(probe, batch, kind, all);
        probe.values[i] = saved - options.step;
        const double down = masked_mean_loss(probe, batch, kind, all);
        probe.values[i] = saved;
        const double numeric = (up - down) / (2.0 * options.step);
        const double a = analytic.values[i];
        const double denom = std::max({std::abs(a), std::abs(numeric), options.floor});
        worst = std::max(worst, std::abs(a - numeric) / denom);
    }
    return worst;
}

double kink_distance(const MlpParams& params, const SampleBatch& batch) {
    check_batch(params, batch);
    double nearest = std::numeric_limits<double>::infinity();
    Trace trace;
    for (std::size_t s = 0; s < batch.size(); ++s) {
        run_forward(params, batch.row(s), trace);
        for (std::size_t l = 1; l < params.num_layers(); ++l)
            for (double z : trace.z[l]) nearest = std::min(nearest, std::abs(z));
        const auto& logits = trace.z.back();
        const std::size_t y = batch.labels[s];
        const double u = multiclass_margin(logits, y);
        nearest = std::min({nearest, std::abs(u), std::abs(u - 1.0)});
        const std::size_t rival = runner_up_index(logits, y);
        for (std::size_t i = 0; i < logits.size(); ++i)
            if (i != y && i != rival) nearest = std::min(nearest, logits[rival] - logits[i]);
    }
    return nearest;
}

std::vector<std::uint8_t> encode_params(const MlpParams& params) {
    params.validate();
    detail::ByteWriter w;
    w.u32_le(kCheckpointMagic);
    w.u32_le(static_cast<std::uint32_t>(params.num_layers()));
    for (std::size_t d : params.dims) w.u32_le(static_cast<std::uint32_t>(d));
    w.f64_le(params.leaky_slope);
    for (double v : params.values) w.f64_le(v);
    return std::move(w.bytes());
}

MlpParams decode_params(std::span<const std::uint8_t> bytes) {
    detail::ByteReader r(bytes, "checkpoint");
    if (r.u32_le() != kCheckpointMagic)
        throw ParseError(ParseError::Kind::BadMagic, 0, "checkpoint: bad magic at offset 0");
    const std::uint32_t layers = r.u32_le();
    if (layers == 0 || layers > 1024)
        throw ParseError(ParseError::Kind::BadHeader, 4, "checkpoint: implausible layer count");
    std::vector<std::size_t> dims(layers + 1);
    for (auto& d : dims) d = r.u32_le();
    MlpParams p;
    try {
        check_dims(dims);
    } catch (const InvalidInput& e) {
        throw ParseError(ParseError::Kind::BadHeader, 8, std::string("checkpoint: ") + e.what());
    }
    p.leaky_slope = r.f64_le();
    const std::size_t count = parameter_count(dims);
    r.require(count * 8);
    p.values.resize(count);
    for (auto& v : p.values) v = r.f64_le();
    if (r.remaining() != 0)
        throw ParseError(ParseError::Kind::CountMismatch, r.offset(), "checkpoint: trailing bytes");
    p.dims = std::move(dims);
    return p;
}

void save_params(const MlpParams& params, const std::filesystem::path& path) {
    write_file(path, encode_params(params));
}

MlpParams load_params(const std::filesystem::path& path) {
    return decode_params(read_file(path));
}

}  // namespace npcl
