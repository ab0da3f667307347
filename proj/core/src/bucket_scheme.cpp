#include "ordsim/bucket_scheme.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "ordsim/errors.hpp"
#include "ordsim/text_format.hpp"

namespace ordsim {

namespace {

void validate_boundaries(const std::vector<double>& b) {
    if (b.size() < 3) {
        throw UsageError("a bucket scheme needs at least 2 buckets (3 boundaries), got " +
                         std::to_string(b.size()) + " boundaries");
    }
    if (b.front() != 0.0 || b.back() != 1.0) {
        throw UsageError("bucket boundaries must start at 0 and end at 1");
    }
    for (std::size_t i = 0; i + 1 < b.size(); ++i) {
        if (!(b[i] < b[i + 1])) {
            throw UsageError("bucket boundaries must be strictly increasing (violated at index " +
                             std::to_string(i + 1) + ")");
        }
    }
    for (double v : b) {
        if (!std::isfinite(v)) throw UsageError("bucket boundaries must be finite");
    }
}

}  // namespace

BucketScheme::BucketScheme(std::vector<double> boundaries)
    : boundaries_(std::move(boundaries)) {
    validate_boundaries(boundaries_);
    midpoints_.reserve(boundaries_.size() - 1);
    for (std::size_t j = 0; j + 1 < boundaries_.size(); ++j) {
        midpoints_.push_back((boundaries_[j] + boundaries_[j + 1]) / 2.0);
    }
}

BucketScheme::BucketScheme(std::vector<double> boundaries, std::vector<double> midpoints)
    : boundaries_(std::move(boundaries)), midpoints_(std::move(midpoints)) {
    validate_boundaries(boundaries_);
    if (midpoints_.size() != boundaries_.size() - 1) {
        throw UsageError("midpoint count must equal bucket count");
    }
    for (std::size_t j = 0; j < midpoints_.size(); ++j) {
        if (!(boundaries_[j] < midpoints_[j] && midpoints_[j] < boundaries_[j + 1])) {
            throw UsageError("midpoint " + std::to_string(j) +
                             " does not lie strictly inside its bucket");
        }
    }
}

int BucketScheme::label_for(double y) const {
    if (!std::isfinite(y)) {
        throw DataError("cannot map non-finite similarity value to a label");
    }
    // First boundary >= y; y in (b_j, b_{j+1}] has index j+1, so label j.
    const auto it = std::lower_bound(boundaries_.begin(), boundaries_.end(), y);
    const long idx = it - boundaries_.begin() - 1;
    const long top = bucket_count() - 1;
    return static_cast<int>(std::clamp(idx, 0L, top));
}

double BucketScheme::midpoint(int label) const {
    if (label < 0 || label >= bucket_count()) {
        throw UsageError("label " + std::to_string(label) + " out of range [0, " +
                         std::to_string(bucket_count() - 1) + "]");
    }
    return midpoints_[static_cast<std::size_t>(label)];
}

BucketScheme reference_scheme() {
    return BucketScheme({0.0, 0.82, 0.90, 0.95, 0.97, 1.0});
}

BucketScheme derive_quantile_scheme(std::span<const double> similarities, int bucket_count) {
    if (bucket_count < 2) {
        throw UsageError("bucket count must be at least 2, got " + std::to_string(bucket_count));
    }
    if (similarities.empty()) {
        throw DataError("cannot derive a bucket scheme from an empty similarity list");
    }
    std::vector<double> sorted(similarities.begin(), similarities.end());
    for (double v : sorted) {
        if (!std::isfinite(v) || v <= 0.0 || v > 1.0) {
            throw DataError("similarity values must lie in (0, 1] to derive a scheme");
        }
    }
    std::sort(sorted.begin(), sorted.end());

    const std::size_t n = sorted.size();
    std::vector<double> boundaries;
    boundaries.reserve(static_cast<std::size_t>(bucket_count) + 1);
    boundaries.push_back(0.0);
    for (int j = 1; j < bucket_count; ++j) {
        // Nearest-rank quantile at fraction j/K: the ceil(j*n/K)-th order statistic.
        const std::size_t rank =
            (static_cast<std::size_t>(j) * n + static_cast<std::size_t>(bucket_count) - 1) /
            static_cast<std::size_t>(bucket_count);
        boundaries.push_back(sorted[rank - 1]);
    }
    boundaries.push_back(1.0);

    std::vector<double> distinct;
    distinct.reserve(boundaries.size());
    for (double b : boundaries) {
        if (distinct.empty() || b > distinct.back()) distinct.push_back(b);
    }
    if (distinct.size() != boundaries.size()) {
        throw DataError("degenerate scheme: data does not have " + std::to_string(bucket_count) +
                        " distinct quantile boundaries (too many tied values)");
    }
    return BucketScheme(std::move(boundaries));
}

void save_scheme(const BucketScheme& scheme, const std::filesystem::path& path) {
    AtomicFile file(path);
    std::string text = "ordsim-scheme v1\n";
    text += "k " + std::to_string(scheme.bucket_count()) + "\n";
    text += "boundaries";
    for (double b : scheme.boundaries()) text += " " + format_double(b);
    text += "\nmidpoints";
    for (double m : scheme.midpoints()) text += " " + format_double(m);
    text += "\n";
    file.write(text);
    file.commit();
}

BucketScheme load_scheme(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open scheme file '" + path.string() + "'");
    std::string line;
    if (!std::getline(in, line) || line != "ordsim-scheme v1") {
        throw DataError("'" + path.string() + "' is not an ordsim scheme file");
    }
    long k = -1;
    std::vector<double> boundaries;
    std::vector<double> midpoints;
    while (std::getline(in, line)) {
        const auto fields = split_whitespace(line);
        if (fields.empty()) continue;
        if (fields[0] == "k" && fields.size() == 2) {
            k = parse_int(fields[1], "k");
        } else if (fields[0] == "boundaries") {
            for (std::size_t i = 1; i < fields.size(); ++i) {
                boundaries.push_back(parse_double(fields[i], "boundary"));
            }
        } else if (fields[0] == "midpoints") {
            for (std::size_t i = 1; i < fields.size(); ++i) {
                midpoints.push_back(parse_double(fields[i], "midpoint"));
            }
        } else {
            throw DataError("unrecognized line in scheme file: '" + line + "'");
        }
    }
    if (k < 2 || boundaries.size() != static_cast<std::size_t>(k) + 1) {
        throw DataError("scheme file '" + path.string() +
                        "' is inconsistent: k does not match the boundary list");
    }
    if (midpoints.empty()) return BucketScheme(std::move(boundaries));
    return BucketScheme(std::move(boundaries), std::move(midpoints));
}

}  // namespace ordsim
