#pragma once

#include <cstdint>

#include "ordsim/dataset.hpp"
#include "ordsim/embedding.hpp"

namespace ordsim {

struct SyntheticConfig {
    int vocab_size = 1000;
    int dim = 16;
    std::size_t n_pairs = 1000;
    double skew = 0.95;       // per-token retention probability
    std::uint64_t seed = 0;
};

struct SyntheticData {
    EmbeddingTable table;
    Dataset data;
};

// Builds a random unit-vector vocabulary, then for each pair samples q1
// with 2..6 distinct tokens and derives q2 by keeping each token with
// probability skew and redrawing the rest from the whole vocabulary.
// A pair left untouched by the redraw pass gets one forced redraw (which
// may pick the original token again), so identical pairs stay possible
// but never dominate the pool at skew < 1.
//
// y = cosine(meanpool(q1), meanpool(q2)) clamped into (1e-6, 1];
// identical pairs get y = 1.0 exactly. Deterministic in the seed; the
// vocabulary depends only on vocab_size, dim and seed.
SyntheticData generate_synthetic(const SyntheticConfig& config);

}  // namespace ordsim
