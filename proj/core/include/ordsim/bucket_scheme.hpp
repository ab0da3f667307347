#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace ordsim {

// Ordered, variable-width discretization of the similarity range (0, 1].
//
// A scheme with K buckets is defined by K+1 strictly increasing boundaries
// b_0 = 0 < b_1 < ... < b_K = 1; bucket j is the half-open interval
// (b_j, b_{j+1}] and carries ordinal label j. Higher label means higher
// similarity. Each bucket has a midpoint theta_j = (b_j + b_{j+1}) / 2,
// the regression target used by the interval loss.
//
// Immutable after construction; safe to share across threads.
class BucketScheme {
public:
    // Midpoints are computed as arithmetic midranges of the boundaries.
    explicit BucketScheme(std::vector<double> boundaries);

    // Explicit midpoints; each must lie strictly inside its interval and
    // the sequence must be strictly increasing.
    BucketScheme(std::vector<double> boundaries, std::vector<double> midpoints);

    int bucket_count() const { return static_cast<int>(midpoints_.size()); }
    std::span<const double> boundaries() const { return boundaries_; }
    std::span<const double> midpoints() const { return midpoints_; }

    // The map H: similarity value -> ordinal label. Values at or below 0
    // clamp to label 0 and values above 1 clamp to label K-1, so every
    // finite model output gets a label. Throws DataError on non-finite input.
    int label_for(double y) const;

    // theta for a label. Throws UsageError if the label is out of range.
    double midpoint(int label) const;

private:
    std::vector<double> boundaries_;
    std::vector<double> midpoints_;
};

// The fixed 5-bucket production scheme with boundaries
// [0, 0.82, 0.90, 0.95, 0.97, 1.0].
BucketScheme reference_scheme();

// Equal-frequency scheme: interior boundaries are nearest-rank empirical
// quantiles of `similarities` at fractions j/K, with b_0 = 0 and b_K = 1.
// All inputs must lie in (0, 1]. Throws DataError if the data cannot
// support K distinct buckets (duplicate quantile boundaries).
BucketScheme derive_quantile_scheme(std::span<const double> similarities, int bucket_count);

// Key-value text persistence. Files carry K, boundaries and midpoints and
// round-trip bit-exactly.
void save_scheme(const BucketScheme& scheme, const std::filesystem::path& path);
BucketScheme load_scheme(const std::filesystem::path& path);

}  // namespace ordsim
