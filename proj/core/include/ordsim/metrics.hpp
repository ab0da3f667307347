#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "ordsim/bucket_scheme.hpp"

namespace ordsim {

// Evaluation summary for one prediction run.
//
// confusion is K x K, row-major, indexed (actual, predicted); row sums
// equal the actual-label histogram and the total count equals n.
struct EvalReport {
    std::size_t n = 0;
    int bucket_count = 0;
    double male = 0.0;
    double mse = 0.0;
    std::vector<std::int64_t> confusion;
    std::vector<std::int64_t> histogram_actual;
    std::vector<std::int64_t> histogram_predicted;
};

// Mean absolute label error between two equally long label lists.
double male(std::span<const int> actual, std::span<const int> predicted);

// Maps both raw similarity lists through the scheme (predictions clamp at
// the extreme labels when outside (0, 1]) and fills the report. Targets y
// must lie in (0, 1]; MSE is computed on the raw values.
EvalReport evaluate(std::span<const double> yhat, std::span<const double> y,
                    const BucketScheme& scheme);

// Fixed field order, 17-significant-digit numbers: two runs that computed
// identical values serialize to identical bytes.
void save_report(const EvalReport& report, const std::filesystem::path& path);
EvalReport load_report(const std::filesystem::path& path);

}  // namespace ordsim
