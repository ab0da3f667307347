#pragma once

#include <span>
#include <vector>

#include "ordsim/bucket_scheme.hpp"

namespace ordsim {

// A loss value together with its gradient with respect to the model
// outputs it was computed from. All loss functions here are pure.
struct LossResult {
    double value = 0.0;
    std::vector<double> gradient;  // same layout as the input outputs
};

// Interval regression loss: mean squared deviation of each prediction from
// the midpoint of its true label's bucket,
//   L = (1/N) sum_i (yhat_i - theta_{l_i})^2.
// Gradient component i is 2 (yhat_i - theta_{l_i}) / N.
LossResult atmsel_loss(std::span<const double> yhat, std::span<const int> labels,
                       const BucketScheme& scheme);

// Plain mean squared error against raw similarity targets.
LossResult mse_loss(std::span<const double> yhat, std::span<const double> y);

// Cumulative binary encoding of an ordinal label: K-1 bits, bit k is 1
// iff label > k, so label 3 with K = 5 encodes as [1,1,1,0].
std::vector<int> coral_encode(int label, int bucket_count);

// Decode K-1 probabilities to a label: threshold each at 0.5 (strictly
// greater) and count consecutive ones from the left, stopping at the first
// zero. Rank-inconsistent patterns like [1,0,1,0] decode to 1.
int coral_decode(std::span<const double> probs, int bucket_count);

// Mean binary cross-entropy over N instances and K-1 cumulative tasks.
// `logits` is row-major N x (K-1). Computed in a saturation-safe softplus
// form; gradient per logit is (sigmoid(z) - target) / (N (K-1)).
LossResult coral_loss(std::span<const double> logits, std::span<const int> labels,
                      int bucket_count);

double sigmoid(double z);

}  // namespace ordsim
