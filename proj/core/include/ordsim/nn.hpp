#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ordsim/rng.hpp"

namespace ordsim {

enum class Activation { relu, identity };

struct LayerSpec {
    int input_dim = 0;
    int output_dim = 0;
    Activation activation = Activation::relu;
    double dropout = 0.0;  // [0, 1), applied to the layer output in training
};

enum class HeadKind {
    scalar_linear,  // yhat = w . a (+ bias)
    coral,          // z_k = w . a + b_k for k = 0 .. outputs-1
};

struct HeadConfig {
    HeadKind kind = HeadKind::scalar_linear;
    // scalar_linear only; the coral head always carries its per-task biases.
    bool bias = true;
    // coral only: number of cumulative tasks, K - 1.
    int coral_outputs = 0;
};

struct DenseLayer {
    std::vector<double> w;  // row-major, output_dim x input_dim
    std::vector<double> b;  // output_dim
};

struct ModelParams {
    int input_dim = 0;
    std::vector<LayerSpec> specs;  // may be empty: head acts on the input
    std::vector<DenseLayer> layers;
    HeadConfig head;
    std::vector<double> head_w;  // size = width of the last layer
    std::vector<double> head_b;  // scalar: 0 or 1 entries; coral: coral_outputs

    // Width feeding the head.
    int penultimate_dim() const {
        return specs.empty() ? input_dim : specs.back().output_dim;
    }
    int output_dim() const {
        return head.kind == HeadKind::coral ? head.coral_outputs : 1;
    }
};

std::size_t param_count(const ModelParams& params);

// The flat parameter order used by gradients, Adam state and checkpoints:
// layer 0 weights, layer 0 biases, layer 1 weights, ..., head weights,
// head biases.
std::vector<std::span<double>> param_arrays(ModelParams& params);
std::vector<std::span<const double>> param_arrays(const ModelParams& params);

std::vector<double> flatten_params(const ModelParams& params);
void assign_params(ModelParams& params, std::span<const double> flat);

// Weights uniform in +-sqrt(6 / fan_in), biases zero, fully determined by
// the seed. Validates that the specs chain dimensionally.
ModelParams init_params(int input_dim, std::span<const LayerSpec> specs,
                        const HeadConfig& head, std::uint64_t seed);

// Everything backward needs about one training-mode evaluation. Dropout
// masks hold 0 or 1/(1-p) (inverted dropout); layers without dropout keep
// an empty mask vector and draw nothing from the rng.
struct ForwardTrace {
    std::vector<double> input;
    std::vector<std::vector<double>> pre;  // pre-activation per layer
    std::vector<std::vector<double>> act;  // post-activation, post-mask
    std::vector<std::vector<double>> mask;
    std::vector<double> output;
};

// Pure function of (params, x). Dropout is identity here.
std::vector<double> forward_infer(const ModelParams& params,
                                  std::span<const double> x);

ForwardTrace forward_train(const ModelParams& params, std::span<const double> x,
                           Rng& rng);

// Adds this instance's parameter gradients into `grads` (flat layout,
// size param_count). d_output is dLoss/dOutput for the head outputs of
// the traced forward pass.
void backward_accumulate(const ModelParams& params, const ForwardTrace& trace,
                         std::span<const double> d_output,
                         std::span<double> grads);

std::vector<double> backward(const ModelParams& params,
                             const ForwardTrace& trace,
                             std::span<const double> d_output);

struct AdamConfig {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

struct AdamState {
    std::int64_t step = 0;
    std::vector<double> m;
    std::vector<double> v;
};

// Standard bias-corrected Adam update, in place. A fresh (empty) state is
// sized on first use.
void adam_step(ModelParams& params, std::span<const double> grads,
               AdamState& state, const AdamConfig& config);

}  // namespace ordsim
