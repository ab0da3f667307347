#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "ordsim/bucket_scheme.hpp"
#include "ordsim/dataset.hpp"
#include "ordsim/nn.hpp"

namespace ordsim {

enum class LossKind {
    atmsel,      // MLP + scalar head, midpoint interval loss
    coral,       // MLP + cumulative-task head, binary cross-entropy
    mse,         // MLP + scalar head, plain MSE
    mse_linear,  // no hidden layers: ordinary linear regression
};

LossKind loss_kind_from(std::string_view name);
std::string_view loss_kind_name(LossKind kind);

struct TrainConfig {
    LossKind loss = LossKind::atmsel;
    std::vector<int> hidden;     // exactly two for MLP losses, empty for mse_linear
    std::vector<double> dropout; // matches hidden
    bool head_bias = true;
    bool with_categories = false;
    int max_epochs = 1000;
    int patience = 30;
    int batch_size = 256;
    double lr = 1e-3;
    std::uint64_t seed = 0;
    std::filesystem::path scheme_path;
    std::filesystem::path embeddings_path;
    std::filesystem::path train_path;
    std::filesystem::path val_path;
};

// Key-value text file, one setting per line, '#' comments. Unknown keys
// are errors. Relative paths resolve against the config file's directory.
// Omitted hyperparameters fall back to the reference protocol: hidden
// "256 128", dropout "0.4 0.1", max_epochs 1000, patience 30,
// batch_size 256, lr 0.001, seed 0.
TrainConfig load_train_config(const std::filesystem::path& path);

struct EpochRecord {
    int epoch = 0;  // 1-based
    double train_loss = 0.0;
    double val_loss = 0.0;
    double val_male = 0.0;
};

struct TrainLog {
    std::vector<EpochRecord> epochs;
    int best_epoch = 0;            // 1-based index into epochs
    double best_val_loss = 0.0;
    std::string stop_reason;       // "early-stop" or "max-epochs"
};

void save_train_log(const TrainLog& log, const std::filesystem::path& path);

struct TrainResult {
    ModelParams params;  // snapshot from the best validation epoch
    TrainLog log;
};

// Mini-batch training with per-epoch reshuffling and validation-loss early
// stopping. Three independent RNG streams are derived from config.seed:
// parameter init, epoch shuffling, and dropout, so e.g. disabling dropout
// does not change the data order. Deterministic: identical inputs give a
// bitwise-identical result.
TrainResult train(const TrainConfig& config, const Dataset& train_data,
                  const Dataset& val_data, const EmbeddingTable& table);

// Real-valued predictions comparable across heads: the scalar head returns
// raw outputs, the coral head returns the midpoint of the decoded label's
// bucket. y fields of `data` are ignored.
std::vector<double> predict(const ModelParams& params, const Dataset& data,
                            const EmbeddingTable& table,
                            const BucketScheme& scheme);

}  // namespace ordsim
