#include "ordsim/losses.hpp"

#include <cmath>
#include <string>

#include "ordsim/errors.hpp"

namespace ordsim {

namespace {

void check_labels(std::span<const int> labels, int bucket_count) {
    for (int l : labels) {
        if (l < 0 || l >= bucket_count) {
            throw UsageError("label " + std::to_string(l) + " out of range [0, " +
                             std::to_string(bucket_count - 1) + "]");
        }
    }
}

double softplus(double z) {
    return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

}  // namespace

double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

LossResult atmsel_loss(std::span<const double> yhat, std::span<const int> labels,
                       const BucketScheme& scheme) {
    if (yhat.empty()) throw UsageError("loss over an empty batch");
    if (yhat.size() != labels.size()) {
        throw UsageError("prediction and label counts differ");
    }
    check_labels(labels, scheme.bucket_count());

    const double n = static_cast<double>(yhat.size());
    LossResult out;
    out.gradient.resize(yhat.size());
    for (std::size_t i = 0; i < yhat.size(); ++i) {
        const double d = yhat[i] - scheme.midpoint(labels[i]);
        out.value += d * d;
        out.gradient[i] = 2.0 * d / n;
    }
    out.value /= n;
    return out;
}

LossResult mse_loss(std::span<const double> yhat, std::span<const double> y) {
    if (yhat.empty()) throw UsageError("loss over an empty batch");
    if (yhat.size() != y.size()) throw UsageError("prediction and target counts differ");

    const double n = static_cast<double>(yhat.size());
    LossResult out;
    out.gradient.resize(yhat.size());
    for (std::size_t i = 0; i < yhat.size(); ++i) {
        const double d = yhat[i] - y[i];
        out.value += d * d;
        out.gradient[i] = 2.0 * d / n;
    }
    out.value /= n;
    return out;
}

std::vector<int> coral_encode(int label, int bucket_count) {
    if (bucket_count < 2) throw UsageError("cumulative encoding needs at least 2 labels");
    if (label < 0 || label >= bucket_count) {
        throw UsageError("label " + std::to_string(label) + " out of range [0, " +
                         std::to_string(bucket_count - 1) + "]");
    }
    std::vector<int> bits(static_cast<std::size_t>(bucket_count - 1), 0);
    for (int k = 0; k < label; ++k) bits[static_cast<std::size_t>(k)] = 1;
    return bits;
}

int coral_decode(std::span<const double> probs, int bucket_count) {
    if (bucket_count < 2) throw UsageError("cumulative decoding needs at least 2 labels");
    if (probs.size() != static_cast<std::size_t>(bucket_count - 1)) {
        throw UsageError("expected " + std::to_string(bucket_count - 1) +
                         " probabilities, got " + std::to_string(probs.size()));
    }
    int label = 0;
    for (double p : probs) {
        if (!(p >= 0.0 && p <= 1.0)) {
            throw DataError("probability outside [0, 1] in cumulative decoding");
        }
        if (p > 0.5) {
            ++label;
        } else {
            break;
        }
    }
    return label;
}

LossResult coral_loss(std::span<const double> logits, std::span<const int> labels,
                      int bucket_count) {
    if (labels.empty()) throw UsageError("loss over an empty batch");
    const std::size_t tasks = static_cast<std::size_t>(bucket_count - 1);
    if (logits.size() != labels.size() * tasks) {
        throw UsageError("logit matrix shape does not match batch size and label count");
    }
    check_labels(labels, bucket_count);

    const double scale = 1.0 / (static_cast<double>(labels.size()) * static_cast<double>(tasks));
    LossResult out;
    out.gradient.resize(logits.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        for (std::size_t k = 0; k < tasks; ++k) {
            const double z = logits[i * tasks + k];
            const double target = labels[i] > static_cast<int>(k) ? 1.0 : 0.0;
            out.value += softplus(z) - target * z;
            out.gradient[i * tasks + k] = (sigmoid(z) - target) * scale;
        }
    }
    out.value *= scale;
    return out;
}

}  // namespace ordsim
