#pragma once

#include <cstdint>
#include <filesystem>

#include "ordsim/bucket_scheme.hpp"
#include "ordsim/nn.hpp"

namespace ordsim {

// A trained model plus everything eval/predict need to reproduce its
// outputs: the architecture, every parameter value, the bucket scheme it
// was trained against, and the training seed.
struct Checkpoint {
    std::uint64_t seed = 0;
    double best_val_loss = 0.0;
    ModelParams params;
    BucketScheme scheme = reference_scheme();
};

// Line-oriented versioned text document. Parameter values use shortest
// round-trip formatting, so save/load reproduces every double bit-exactly
// and identical checkpoints serialize to identical bytes.
void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace ordsim
