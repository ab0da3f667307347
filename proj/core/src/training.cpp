#include "ordsim/training.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>

#include "ordsim/errors.hpp"
#include "ordsim/losses.hpp"
#include "ordsim/metrics.hpp"
#include "ordsim/text_format.hpp"

namespace ordsim {

LossKind loss_kind_from(std::string_view name) {
    if (name == "atmsel") return LossKind::atmsel;
    if (name == "coral") return LossKind::coral;
    if (name == "mse") return LossKind::mse;
    if (name == "mse-linear") return LossKind::mse_linear;
    throw UsageError("unknown loss '" + std::string(name) +
                     "', expected atmsel|coral|mse|mse-linear");
}

std::string_view loss_kind_name(LossKind kind) {
    switch (kind) {
        case LossKind::atmsel: return "atmsel";
        case LossKind::coral: return "coral";
        case LossKind::mse: return "mse";
        case LossKind::mse_linear: return "mse-linear";
    }
    throw UsageError("invalid loss kind");
}

namespace {

bool parse_on_off(std::string_view value, std::string_view key) {
    if (value == "on") return true;
    if (value == "off") return false;
    throw UsageError("config: " + std::string(key) + " must be on|off, got '" +
                     std::string(value) + "'");
}

}  // namespace

TrainConfig load_train_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open config: " + path.string());
    const auto base = path.has_parent_path() ? path.parent_path()
                                             : std::filesystem::path(".");
    auto resolve = [&base](std::string_view value) {
        std::filesystem::path p{std::string(value)};
        return p.is_absolute() ? p : base / p;
    };

    TrainConfig config;
    std::map<std::string, std::vector<std::string>, std::less<>> entries;
    std::string buf;
    std::size_t lineno = 0;
    while (std::getline(in, buf)) {
        ++lineno;
        if (!buf.empty() && buf.back() == '\r') buf.pop_back();
        if (buf.empty() || buf[0] == '#') continue;
        const auto fields = split_whitespace(buf);
        if (fields.empty()) continue;
        if (fields.size() < 2)
            throw UsageError("config line " + std::to_string(lineno) +
                             ": key '" + std::string(fields[0]) +
                             "' has no value");
        std::vector<std::string> values;
        for (std::size_t i = 1; i < fields.size(); ++i)
            values.emplace_back(fields[i]);
        if (!entries.emplace(std::string(fields[0]), std::move(values)).second)
            throw UsageError("config line " + std::to_string(lineno) +
                             ": duplicate key '" + std::string(fields[0]) + "'");
    }

    auto take = [&entries](std::string_view key) {
        auto it = entries.find(key);
        if (it == entries.end()) return std::vector<std::string>{};
        auto v = std::move(it->second);
        entries.erase(it);
        return v;
    };
    auto take_one = [&take](std::string_view key) {
        auto v = take(key);
        if (v.size() > 1)
            throw UsageError("config: key '" + std::string(key) +
                             "' takes one value");
        return v.empty() ? std::string{} : v[0];
    };
    auto numeric = [](auto fn, std::string_view key) {
        try {
            return fn();
        } catch (const DataError& e) {
            throw UsageError("config: bad value for '" + std::string(key) +
                             "': " + e.what());
        }
    };

    const auto loss = take_one("loss");
    if (loss.empty()) throw UsageError("config: missing required key 'loss'");
    config.loss = loss_kind_from(loss);

    const bool is_linear = config.loss == LossKind::mse_linear;
    const auto hidden = take("hidden");
    const auto dropout = take("dropout");
    if (is_linear) {
        if (!hidden.empty() || !dropout.empty())
            throw UsageError(
                "config: mse-linear has no hidden layers; drop the "
                "hidden/dropout keys");
    } else {
        config.hidden = {256, 128};
        if (!hidden.empty()) {
            if (hidden.size() != 2)
                throw UsageError("config: 'hidden' takes exactly two sizes");
            config.hidden.clear();
            for (const auto& h : hidden)
                config.hidden.push_back(static_cast<int>(numeric(
                    [&] { return parse_int(h, "hidden"); }, "hidden")));
            for (const int h : config.hidden)
                if (h < 1)
                    throw UsageError("config: hidden sizes must be positive");
        }
        config.dropout = {0.4, 0.1};
        if (!dropout.empty()) {
            if (dropout.size() != 2)
                throw UsageError("config: 'dropout' takes exactly two values");
            config.dropout.clear();
            for (const auto& d : dropout)
                config.dropout.push_back(numeric(
                    [&] { return parse_double(d, "dropout"); }, "dropout"));
            for (const double d : config.dropout)
                if (!(d >= 0.0 && d < 1.0))
                    throw UsageError("config: dropout must lie in [0, 1)");
        }
    }

    for (const auto& [key, member] :
         std::initializer_list<std::pair<const char*, std::filesystem::path*>>{
             {"scheme", &config.scheme_path},
             {"embeddings", &config.embeddings_path},
             {"train", &config.train_path},
             {"val", &config.val_path}}) {
        const auto value = take_one(key);
        if (value.empty())
            throw UsageError("config: missing required key '" +
                             std::string(key) + "'");
        *member = resolve(value);
    }

    if (const auto v = take_one("max_epochs"); !v.empty())
        config.max_epochs = static_cast<int>(numeric(
            [&] { return parse_int(v, "max_epochs"); }, "max_epochs"));
    if (const auto v = take_one("patience"); !v.empty())
        config.patience = static_cast<int>(
            numeric([&] { return parse_int(v, "patience"); }, "patience"));
    if (const auto v = take_one("batch_size"); !v.empty())
        config.batch_size = static_cast<int>(numeric(
            [&] { return parse_int(v, "batch_size"); }, "batch_size"));
    if (const auto v = take_one("lr"); !v.empty())
        config.lr = numeric([&] { return parse_double(v, "lr"); }, "lr");
    if (const auto v = take_one("seed"); !v.empty())
        config.seed = numeric([&] { return parse_u64(v, "seed"); }, "seed");
    if (const auto v = take_one("head_bias"); !v.empty())
        config.head_bias = parse_on_off(v, "head_bias");
    if (const auto v = take_one("with_categories"); !v.empty())
        config.with_categories = parse_on_off(v, "with_categories");

    if (!entries.empty())
        throw UsageError("config: unknown key '" + entries.begin()->first + "'");

    if (config.max_epochs < 1)
        throw UsageError("config: max_epochs must be at least 1");
    if (config.patience < 1) throw UsageError("config: patience must be at least 1");
    if (config.batch_size < 1)
        throw UsageError("config: batch_size must be at least 1");
    if (!(config.lr > 0.0) || !std::isfinite(config.lr))
        throw UsageError("config: lr must be positive and finite");
    return config;
}

void save_train_log(const TrainLog& log, const std::filesystem::path& path) {
    AtomicFile out(path);
    out.write("ordsim-trainlog v1\n");
    for (const auto& rec : log.epochs) {
        out.write("epoch " + std::to_string(rec.epoch) + " " +
                  format_double17(rec.train_loss) + " " +
                  format_double17(rec.val_loss) + " " +
                  format_double17(rec.val_male) + "\n");
    }
    out.write("best_epoch " + std::to_string(log.best_epoch) + "\n");
    out.write("best_val_loss " + format_double17(log.best_val_loss) + "\n");
    out.write("stop_reason " + log.stop_reason + "\n");
    out.commit();
}

namespace {

struct Batchers {
    // Row views into a FeatureMatrix.
    static std::span<const double> row(const FeatureMatrix& m, std::size_t i) {
        return {m.values.data() + i * m.cols, m.cols};
    }
};

std::vector<int> labels_of(std::span<const double> targets,
                           const BucketScheme& scheme) {
    std::vector<int> labels;
    labels.reserve(targets.size());
    for (const double y : targets) labels.push_back(scheme.label_for(y));
    return labels;
}

// Head outputs for every row, infer mode.
std::vector<double> infer_outputs(const ModelParams& params,
                                  const FeatureMatrix& m) {
    const auto width = static_cast<std::size_t>(params.output_dim());
    std::vector<double> out;
    out.reserve(m.rows * width);
    for (std::size_t i = 0; i < m.rows; ++i) {
        const auto o = forward_infer(params, Batchers::row(m, i));
        out.insert(out.end(), o.begin(), o.end());
    }
    return out;
}

std::vector<int> decode_outputs(LossKind loss, std::span<const double> outputs,
                                const BucketScheme& scheme) {
    const int k = scheme.bucket_count();
    std::vector<int> labels;
    if (loss == LossKind::coral) {
        const auto width = static_cast<std::size_t>(k - 1);
        labels.reserve(outputs.size() / width);
        std::vector<double> probs(width);
        for (std::size_t i = 0; i < outputs.size(); i += width) {
            for (std::size_t j = 0; j < width; ++j)
                probs[j] = sigmoid(outputs[i + j]);
            labels.push_back(coral_decode(probs, k));
        }
    } else {
        labels.reserve(outputs.size());
        for (const double yhat : outputs) labels.push_back(scheme.label_for(yhat));
    }
    return labels;
}

}  // namespace

TrainResult train(const TrainConfig& config, const Dataset& train_data,
                  const Dataset& val_data, const EmbeddingTable& table) {
    if (train_data.has_categories != config.with_categories ||
        val_data.has_categories != config.with_categories)
        throw UsageError("train: dataset layout disagrees with the config");

    const BucketScheme scheme = load_scheme(config.scheme_path);
    const FeatureMatrix train_m = assemble_matrix(train_data, table);
    const FeatureMatrix val_m = assemble_matrix(val_data, table);

    const bool needs_labels =
        config.loss == LossKind::atmsel || config.loss == LossKind::coral;
    const std::vector<int> train_labels =
        needs_labels ? labels_of(train_m.targets, scheme) : std::vector<int>{};
    const std::vector<int> val_labels =
        needs_labels ? labels_of(val_m.targets, scheme) : std::vector<int>{};
    const std::vector<int> val_actual = labels_of(val_m.targets, scheme);

    std::vector<LayerSpec> specs;
    for (std::size_t i = 0; i < config.hidden.size(); ++i) {
        LayerSpec spec;
        spec.input_dim = i == 0 ? static_cast<int>(train_m.cols)
                                : config.hidden[i - 1];
        spec.output_dim = config.hidden[i];
        spec.activation = Activation::relu;
        spec.dropout = i < config.dropout.size() ? config.dropout[i] : 0.0;
        specs.push_back(spec);
    }
    HeadConfig head;
    if (config.loss == LossKind::coral) {
        head.kind = HeadKind::coral;
        head.coral_outputs = scheme.bucket_count() - 1;
    } else {
        head.kind = HeadKind::scalar_linear;
        head.bias = config.head_bias;
    }

    ModelParams params = init_params(static_cast<int>(train_m.cols), specs,
                                     head, mix_seed(config.seed, 0));
    Rng shuffle_rng(mix_seed(config.seed, 1));
    Rng dropout_rng(mix_seed(config.seed, 2));

    const auto out_width = static_cast<std::size_t>(params.output_dim());
    const int k = scheme.bucket_count();
    AdamState adam;
    AdamConfig adam_config;
    adam_config.lr = config.lr;

    std::vector<std::size_t> order(train_m.rows);
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    TrainResult result;
    result.params = params;
    result.log.best_val_loss = std::numeric_limits<double>::infinity();
    int bad_streak = 0;

    std::vector<double> grads(param_count(params));
    std::vector<ForwardTrace> traces;
    std::vector<double> outputs;
    std::vector<double> batch_y;
    std::vector<int> batch_labels;

    for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
        // Fisher-Yates reshuffle each epoch.
        for (std::size_t i = order.size(); i > 1; --i) {
            const std::size_t j = shuffle_rng.index(i);
            std::swap(order[i - 1], order[j]);
        }

        double loss_sum = 0.0;
        const auto batch_size = static_cast<std::size_t>(config.batch_size);
        for (std::size_t start = 0, batch_no = 1; start < train_m.rows;
             start += batch_size, ++batch_no) {
            const std::size_t n = std::min(batch_size, train_m.rows - start);
            try {
                traces.clear();
                traces.reserve(n);
                outputs.clear();
                batch_y.clear();
                batch_labels.clear();
                for (std::size_t i = 0; i < n; ++i) {
                    const std::size_t row = order[start + i];
                    traces.push_back(forward_train(
                        params, Batchers::row(train_m, row), dropout_rng));
                    const auto& o = traces.back().output;
                    outputs.insert(outputs.end(), o.begin(), o.end());
                    if (needs_labels) batch_labels.push_back(train_labels[row]);
                    batch_y.push_back(train_m.targets[row]);
                }

                LossResult loss;
                switch (config.loss) {
                    case LossKind::atmsel:
                        loss = atmsel_loss(outputs, batch_labels, scheme);
                        break;
                    case LossKind::coral:
                        loss = coral_loss(outputs, batch_labels, k);
                        break;
                    case LossKind::mse:
                    case LossKind::mse_linear:
                        loss = mse_loss(outputs, batch_y);
                        break;
                }
                if (!std::isfinite(loss.value))
                    throw NumericError("loss is " + format_double(loss.value));

                std::fill(grads.begin(), grads.end(), 0.0);
                for (std::size_t i = 0; i < n; ++i) {
                    backward_accumulate(
                        params, traces[i],
                        std::span<const double>(loss.gradient)
                            .subspan(i * out_width, out_width),
                        grads);
                }
                adam_step(params, grads, adam, adam_config);
                loss_sum += loss.value * static_cast<double>(n);
            } catch (const NumericError& e) {
                throw NumericError("train: epoch " + std::to_string(epoch) +
                                   ", batch " + std::to_string(batch_no) + ": " +
                                   e.what());
            }
        }

        EpochRecord rec;
        rec.epoch = epoch;
        rec.train_loss = loss_sum / static_cast<double>(train_m.rows);

        const auto val_out = infer_outputs(params, val_m);
        switch (config.loss) {
            case LossKind::atmsel:
                rec.val_loss = atmsel_loss(val_out, val_labels, scheme).value;
                break;
            case LossKind::coral:
                rec.val_loss = coral_loss(val_out, val_labels, k).value;
                break;
            case LossKind::mse:
            case LossKind::mse_linear:
                rec.val_loss = mse_loss(val_out, val_m.targets).value;
                break;
        }
        const auto val_predicted = decode_outputs(config.loss, val_out, scheme);
        rec.val_male = male(val_actual, val_predicted);
        result.log.epochs.push_back(rec);

        if (rec.val_loss < result.log.best_val_loss) {
            result.log.best_val_loss = rec.val_loss;
            result.log.best_epoch = epoch;
            result.params = params;
            bad_streak = 0;
        } else if (++bad_streak >= config.patience) {
            result.log.stop_reason = "early-stop";
            break;
        }
    }
    if (result.log.stop_reason.empty()) result.log.stop_reason = "max-epochs";
    return result;
}

std::vector<double> predict(const ModelParams& params, const Dataset& data,
                            const EmbeddingTable& table,
                            const BucketScheme& scheme) {
    const int expected =
        table.dim() * (data.has_categories ? 4 : 2);
    if (params.input_dim != expected)
        throw UsageError("predict: model expects input width " +
                         std::to_string(params.input_dim) +
                         ", embeddings and layout give " +
                         std::to_string(expected));
    const int k = scheme.bucket_count();
    if (params.head.kind == HeadKind::coral &&
        params.head.coral_outputs != k - 1)
        throw UsageError("predict: coral head has " +
                         std::to_string(params.head.coral_outputs) +
                         " tasks but the scheme has " + std::to_string(k) +
                         " buckets");

    std::vector<double> out;
    out.reserve(data.instances.size());
    std::vector<double> probs(
        params.head.kind == HeadKind::coral ? static_cast<std::size_t>(k - 1)
                                            : 0);
    for (const auto& inst : data.instances) {
        const auto features =
            assemble_features(table, inst, data.has_categories);
        const auto o = forward_infer(params, features);
        if (params.head.kind == HeadKind::coral) {
            for (std::size_t j = 0; j < probs.size(); ++j)
                probs[j] = sigmoid(o[j]);
            out.push_back(scheme.midpoint(coral_decode(probs, k)));
        } else {
            out.push_back(o[0]);
        }
    }
    return out;
}

}  // namespace ordsim
