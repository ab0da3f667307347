#include "ordsim/nn.hpp"

#include <cmath>
#include <string>

#include "ordsim/errors.hpp"

namespace ordsim {

namespace {

void validate_specs(int input_dim, std::span<const LayerSpec> specs) {
    if (input_dim < 1) throw UsageError("nn: input_dim must be positive");
    int expected = input_dim;
    for (std::size_t i = 0; i < specs.size(); ++i) {
        const auto& s = specs[i];
        if (s.input_dim < 1 || s.output_dim < 1)
            throw UsageError("nn: layer " + std::to_string(i) +
                             " has non-positive dimensions");
        if (s.input_dim != expected)
            throw UsageError("nn: layer " + std::to_string(i) + " expects input " +
                             std::to_string(s.input_dim) + ", previous width is " +
                             std::to_string(expected));
        if (!(s.dropout >= 0.0 && s.dropout < 1.0))
            throw UsageError("nn: layer " + std::to_string(i) +
                             " dropout must lie in [0, 1)");
        expected = s.output_dim;
    }
}

void check_finite(std::span<const double> values, const char* where) {
    for (const double v : values)
        if (!std::isfinite(v))
            throw NumericError(std::string("nn: non-finite value in ") + where);
}

}  // namespace

std::size_t param_count(const ModelParams& params) {
    std::size_t n = 0;
    for (const auto& layer : params.layers) n += layer.w.size() + layer.b.size();
    return n + params.head_w.size() + params.head_b.size();
}

std::vector<std::span<double>> param_arrays(ModelParams& params) {
    std::vector<std::span<double>> out;
    out.reserve(params.layers.size() * 2 + 2);
    for (auto& layer : params.layers) {
        out.emplace_back(layer.w);
        out.emplace_back(layer.b);
    }
    out.emplace_back(params.head_w);
    out.emplace_back(params.head_b);
    return out;
}

std::vector<std::span<const double>> param_arrays(const ModelParams& params) {
    std::vector<std::span<const double>> out;
    out.reserve(params.layers.size() * 2 + 2);
    for (const auto& layer : params.layers) {
        out.emplace_back(layer.w);
        out.emplace_back(layer.b);
    }
    out.emplace_back(params.head_w);
    out.emplace_back(params.head_b);
    return out;
}

std::vector<double> flatten_params(const ModelParams& params) {
    std::vector<double> flat;
    flat.reserve(param_count(params));
    for (const auto arr : param_arrays(params))
        flat.insert(flat.end(), arr.begin(), arr.end());
    return flat;
}

void assign_params(ModelParams& params, std::span<const double> flat) {
    if (flat.size() != param_count(params))
        throw UsageError("assign_params: expected " +
                         std::to_string(param_count(params)) + " values, got " +
                         std::to_string(flat.size()));
    std::size_t offset = 0;
    for (auto arr : param_arrays(params)) {
        for (auto& v : arr) v = flat[offset++];
    }
}

ModelParams init_params(int input_dim, std::span<const LayerSpec> specs,
                        const HeadConfig& head, std::uint64_t seed) {
    validate_specs(input_dim, specs);
    if (head.kind == HeadKind::coral && head.coral_outputs < 1)
        throw UsageError("nn: coral head needs at least one output");

    ModelParams params;
    params.input_dim = input_dim;
    params.specs.assign(specs.begin(), specs.end());
    params.head = head;

    Rng rng(seed);
    auto he_uniform = [&rng](std::vector<double>& w, int fan_in) {
        const double bound = std::sqrt(6.0 / static_cast<double>(fan_in));
        for (auto& v : w) v = rng.uniform(-bound, bound);
    };

    params.layers.resize(specs.size());
    for (std::size_t i = 0; i < specs.size(); ++i) {
        auto& layer = params.layers[i];
        layer.w.resize(static_cast<std::size_t>(specs[i].output_dim) *
                       specs[i].input_dim);
        layer.b.assign(static_cast<std::size_t>(specs[i].output_dim), 0.0);
        he_uniform(layer.w, specs[i].input_dim);
    }

    const int tau = params.penultimate_dim();
    params.head_w.resize(static_cast<std::size_t>(tau));
    he_uniform(params.head_w, tau);
    if (head.kind == HeadKind::coral) {
        params.head_b.assign(static_cast<std::size_t>(head.coral_outputs), 0.0);
    } else if (head.bias) {
        params.head_b.assign(1, 0.0);
    }
    return params;
}

namespace {

// Shared layer walk; masks == nullptr means infer mode.
void run_layers(const ModelParams& params, std::span<const double> x,
                Rng* rng, ForwardTrace* trace, std::vector<double>& activation) {
    if (x.size() != static_cast<std::size_t>(params.input_dim))
        throw UsageError("nn: input has length " + std::to_string(x.size()) +
                         ", model expects " + std::to_string(params.input_dim));
    if (params.layers.size() != params.specs.size())
        throw UsageError("nn: params and specs are out of sync");

    activation.assign(x.begin(), x.end());
    check_finite(activation, "input");

    for (std::size_t i = 0; i < params.layers.size(); ++i) {
        const auto& spec = params.specs[i];
        const auto& layer = params.layers[i];
        const auto in_dim = static_cast<std::size_t>(spec.input_dim);
        const auto out_dim = static_cast<std::size_t>(spec.output_dim);
        if (layer.w.size() != in_dim * out_dim || layer.b.size() != out_dim)
            throw UsageError("nn: layer " + std::to_string(i) + " shape mismatch");

        std::vector<double> pre(out_dim);
        for (std::size_t r = 0; r < out_dim; ++r) {
            const double* row = layer.w.data() + r * in_dim;
            double acc = layer.b[r];
            for (std::size_t c = 0; c < in_dim; ++c) acc += row[c] * activation[c];
            pre[r] = acc;
        }
        check_finite(pre, "layer pre-activation");

        std::vector<double> out(out_dim);
        if (spec.activation == Activation::relu) {
            for (std::size_t r = 0; r < out_dim; ++r)
                out[r] = pre[r] > 0.0 ? pre[r] : 0.0;
        } else {
            out = pre;
        }

        std::vector<double> mask;
        if (rng != nullptr && spec.dropout > 0.0) {
            const double keep = 1.0 - spec.dropout;
            const double scale = 1.0 / keep;
            mask.resize(out_dim);
            for (std::size_t r = 0; r < out_dim; ++r) {
                mask[r] = rng->bernoulli(keep) ? scale : 0.0;
                out[r] *= mask[r];
            }
        }

        if (trace != nullptr) {
            trace->pre.push_back(std::move(pre));
            trace->mask.push_back(std::move(mask));
            trace->act.push_back(out);
        }
        activation = std::move(out);
    }
}

std::vector<double> head_forward(const ModelParams& params,
                                 std::span<const double> a) {
    const auto tau = static_cast<std::size_t>(params.penultimate_dim());
    if (params.head_w.size() != tau)
        throw UsageError("nn: head weight length does not match model width");
    double dot = 0.0;
    for (std::size_t j = 0; j < tau; ++j) dot += params.head_w[j] * a[j];

    std::vector<double> out;
    if (params.head.kind == HeadKind::coral) {
        const auto k = static_cast<std::size_t>(params.head.coral_outputs);
        if (params.head_b.size() != k)
            throw UsageError("nn: coral head bias count mismatch");
        out.resize(k);
        for (std::size_t i = 0; i < k; ++i) out[i] = dot + params.head_b[i];
    } else {
        if (params.head_b.size() != (params.head.bias ? 1u : 0u))
            throw UsageError("nn: scalar head bias count mismatch");
        out.assign(1, params.head.bias ? dot + params.head_b[0] : dot);
    }
    check_finite(out, "head output");
    return out;
}

}  // namespace

std::vector<double> forward_infer(const ModelParams& params,
                                  std::span<const double> x) {
    std::vector<double> activation;
    run_layers(params, x, nullptr, nullptr, activation);
    return head_forward(params, activation);
}

ForwardTrace forward_train(const ModelParams& params, std::span<const double> x,
                           Rng& rng) {
    ForwardTrace trace;
    trace.input.assign(x.begin(), x.end());
    trace.pre.reserve(params.layers.size());
    trace.act.reserve(params.layers.size());
    trace.mask.reserve(params.layers.size());
    std::vector<double> activation;
    run_layers(params, x, &rng, &trace, activation);
    trace.output = head_forward(params, activation);
    return trace;
}

void backward_accumulate(const ModelParams& params, const ForwardTrace& trace,
                         std::span<const double> d_output,
                         std::span<double> grads) {
    if (grads.size() != param_count(params))
        throw UsageError("backward: gradient buffer has wrong size");
    if (trace.pre.size() != params.layers.size() ||
        trace.act.size() != params.layers.size())
        throw UsageError("backward: trace does not match the model");
    if (d_output.size() != static_cast<std::size_t>(params.output_dim()))
        throw UsageError("backward: head gradient has wrong length");

    const auto tau = static_cast<std::size_t>(params.penultimate_dim());
    const std::span<const double> a =
        params.layers.empty() ? std::span<const double>(trace.input)
                              : std::span<const double>(trace.act.back());
    if (a.size() != tau) throw UsageError("backward: trace width mismatch");

    // Flat offsets of the head blocks; layer blocks precede them in order.
    std::size_t head_w_off = 0;
    for (const auto& layer : params.layers)
        head_w_off += layer.w.size() + layer.b.size();
    const std::size_t head_b_off = head_w_off + params.head_w.size();

    // All head kinds share one weight vector, so d_head sums over outputs.
    double d_sum = 0.0;
    for (std::size_t k = 0; k < d_output.size(); ++k) {
        d_sum += d_output[k];
        if (!params.head_b.empty()) grads[head_b_off + k] += d_output[k];
    }
    for (std::size_t j = 0; j < tau; ++j)
        grads[head_w_off + j] += d_sum * a[j];

    std::vector<double> d_act(tau);
    for (std::size_t j = 0; j < tau; ++j) d_act[j] = d_sum * params.head_w[j];

    std::size_t block_off = head_w_off;
    for (std::size_t i = params.layers.size(); i-- > 0;) {
        const auto& spec = params.specs[i];
        const auto& layer = params.layers[i];
        const auto in_dim = static_cast<std::size_t>(spec.input_dim);
        const auto out_dim = static_cast<std::size_t>(spec.output_dim);
        block_off -= layer.w.size() + layer.b.size();

        const auto& pre = trace.pre[i];
        const auto& mask = trace.mask[i];
        std::vector<double> d_pre(out_dim);
        for (std::size_t r = 0; r < out_dim; ++r) {
            double d = d_act[r];
            if (!mask.empty()) d *= mask[r];
            if (spec.activation == Activation::relu && pre[r] <= 0.0) d = 0.0;
            d_pre[r] = d;
        }

        const std::span<const double> in =
            i == 0 ? std::span<const double>(trace.input)
                   : std::span<const double>(trace.act[i - 1]);
        if (in.size() != in_dim) throw UsageError("backward: trace width mismatch");

        double* gw = grads.data() + block_off;
        double* gb = gw + layer.w.size();
        for (std::size_t r = 0; r < out_dim; ++r) {
            const double d = d_pre[r];
            if (d != 0.0) {
                double* grow = gw + r * in_dim;
                for (std::size_t c = 0; c < in_dim; ++c) grow[c] += d * in[c];
            }
            gb[r] += d;
        }

        if (i > 0) {
            std::vector<double> d_in(in_dim, 0.0);
            for (std::size_t r = 0; r < out_dim; ++r) {
                const double d = d_pre[r];
                if (d == 0.0) continue;
                const double* row = layer.w.data() + r * in_dim;
                for (std::size_t c = 0; c < in_dim; ++c) d_in[c] += d * row[c];
            }
            d_act = std::move(d_in);
        }
    }
}

std::vector<double> backward(const ModelParams& params,
                             const ForwardTrace& trace,
                             std::span<const double> d_output) {
    std::vector<double> grads(param_count(params), 0.0);
    backward_accumulate(params, trace, d_output, grads);
    return grads;
}

void adam_step(ModelParams& params, std::span<const double> grads,
               AdamState& state, const AdamConfig& config) {
    const std::size_t n = param_count(params);
    if (grads.size() != n)
        throw UsageError("adam_step: gradient size does not match parameters");
    if (state.m.empty() && state.v.empty() && state.step == 0) {
        state.m.assign(n, 0.0);
        state.v.assign(n, 0.0);
    }
    if (state.m.size() != n || state.v.size() != n)
        throw UsageError("adam_step: state size does not match parameters");

    state.step += 1;
    const double b1t = 1.0 - std::pow(config.beta1, static_cast<double>(state.step));
    const double b2t = 1.0 - std::pow(config.beta2, static_cast<double>(state.step));

    std::size_t offset = 0;
    for (auto arr : param_arrays(params)) {
        for (auto& p : arr) {
            const double g = grads[offset];
            double& m = state.m[offset];
            double& v = state.v[offset];
            m = config.beta1 * m + (1.0 - config.beta1) * g;
            v = config.beta2 * v + (1.0 - config.beta2) * g * g;
            const double mhat = m / b1t;
            const double vhat = v / b2t;
            p -= config.lr * mhat / (std::sqrt(vhat) + config.eps);
            ++offset;
        }
    }
}

}  // namespace ordsim
