#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "ordsim/embedding.hpp"

namespace ordsim {

// One labeled question pair. Categories are either both present or both
// absent, decided per dataset.
struct Instance {
    std::string q1;
    std::string q2;
    std::string cat1;
    std::string cat2;
    double y = 0.0;
};

struct Dataset {
    bool has_categories = false;
    std::vector<Instance> instances;
};

enum class ParseMode {
    strict,    // any malformed row raises DataError
    skip_bad,  // malformed rows are dropped and counted
};

struct ParseStats {
    std::size_t rows_kept = 0;
    std::size_t rows_skipped = 0;
};

// Tab-separated rows, "q1<TAB>q2<TAB>y" or with categories
// "q1<TAB>q2<TAB>cat1<TAB>cat2<TAB>y". Empty lines and lines starting
// with '#' are ignored. y must be finite and in (0, 1].
Dataset parse_dataset(const std::filesystem::path& path, bool has_categories,
                      ParseMode mode, ParseStats* stats = nullptr);

// Prediction input: the same grammar minus the trailing y column. Parsed
// instances keep y = 0, which is outside the valid target range and must
// never be read.
Dataset parse_unlabeled(const std::filesystem::path& path, bool has_categories,
                        ParseMode mode, ParseStats* stats = nullptr);

void save_dataset(const Dataset& data, const std::filesystem::path& path);

// Feature vector for one instance: mean-pooled query embedding for each
// side, each side optionally followed by its category-path embedding.
// Length 2 * dim without categories, 4 * dim with. Throws DataError when
// any required field has no in-vocabulary token.
std::vector<double> assemble_features(const EmbeddingTable& table,
                                      const Instance& inst,
                                      bool has_categories);

// Row-major n x feature_dim matrix plus the target vector.
struct FeatureMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> values;
    std::vector<double> targets;
};

struct AssembleStats {
    std::size_t rows_kept = 0;
    std::size_t rows_dropped = 0;
};

// With stats == nullptr an unembeddable instance is an error; otherwise
// such instances are dropped and counted, and kept_rows (when given)
// receives the surviving instance indices.
FeatureMatrix assemble_matrix(const Dataset& data, const EmbeddingTable& table,
                              AssembleStats* stats = nullptr,
                              std::vector<std::size_t>* kept_rows = nullptr);

}  // namespace ordsim
