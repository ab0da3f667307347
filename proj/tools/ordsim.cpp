// ordsim: bucketed similarity models from the command line.
//
// Exit codes: 0 success, 1 usage/configuration error, 2 data error,
// 3 numeric failure. Output files are written atomically, so a failing
// command never leaves a partial artifact behind.

#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ordsim/bucket_scheme.hpp"
#include "ordsim/checkpoint.hpp"
#include "ordsim/dataset.hpp"
#include "ordsim/embedding.hpp"
#include "ordsim/errors.hpp"
#include "ordsim/losses.hpp"
#include "ordsim/metrics.hpp"
#include "ordsim/synthetic.hpp"
#include "ordsim/text_format.hpp"
#include "ordsim/training.hpp"

namespace {

using namespace ordsim;

ParseMode mode_of(bool skip_bad) {
    return skip_bad ? ParseMode::skip_bad : ParseMode::strict;
}

void report_skipped(const ParseStats& stats, const std::string& path) {
    if (stats.rows_skipped > 0)
        std::cerr << "warning: skipped " << stats.rows_skipped
                  << " malformed row(s) in " << path << "\n";
}

// Instances no head can embed (every token out of vocabulary) are dropped
// up front so training and evaluation see only usable rows.
std::size_t drop_unembeddable(Dataset& data, const EmbeddingTable& table) {
    std::vector<Instance> kept;
    kept.reserve(data.instances.size());
    std::size_t dropped = 0;
    for (auto& inst : data.instances) {
        try {
            assemble_features(table, inst, data.has_categories);
        } catch (const DataError&) {
            ++dropped;
            continue;
        }
        kept.push_back(std::move(inst));
    }
    if (kept.empty())
        throw DataError("no instance has any in-vocabulary token");
    data.instances = std::move(kept);
    return dropped;
}

void warn_dropped(std::size_t dropped, const std::string& what) {
    if (dropped > 0)
        std::cerr << "warning: dropped " << dropped << " " << what
                  << " instance(s) with no in-vocabulary token\n";
}

struct BucketsArgs {
    bool paper = false;
    std::string input;
    int k = 5;
    bool with_categories = false;
    bool skip_bad = false;
    std::string out;
};

int cmd_buckets(const BucketsArgs& args) {
    if (args.paper == !args.input.empty())
        throw UsageError("pass exactly one of --paper or --input");

    if (args.paper) {
        const auto scheme = reference_scheme();
        save_scheme(scheme, args.out);
        std::cout << "k " << scheme.bucket_count() << "\n";
        return 0;
    }

    ParseStats stats;
    const auto data = parse_dataset(args.input, args.with_categories,
                                    mode_of(args.skip_bad), &stats);
    report_skipped(stats, args.input);

    std::vector<double> ys;
    ys.reserve(data.instances.size());
    for (const auto& inst : data.instances) ys.push_back(inst.y);

    const auto scheme = derive_quantile_scheme(ys, args.k);
    save_scheme(scheme, args.out);

    std::vector<std::size_t> counts(static_cast<std::size_t>(args.k), 0);
    for (const double y : ys) ++counts[static_cast<std::size_t>(scheme.label_for(y))];
    std::cout << "k " << scheme.bucket_count() << "\n";
    const auto bounds = scheme.boundaries();
    for (int j = 0; j < scheme.bucket_count(); ++j) {
        std::cout << "bucket " << j << " " << format_double(bounds[j]) << " "
                  << format_double(bounds[j + 1]) << " " << counts[j] << "\n";
    }
    return 0;
}

struct SynthArgs {
    SyntheticConfig config;
    std::string out_dir;
};

int cmd_synth(const SynthArgs& args) {
    auto generated = generate_synthetic(args.config);
    std::filesystem::create_directories(args.out_dir);
    const std::filesystem::path dir(args.out_dir);

    save_embeddings(generated.table, dir / "embeddings.vec");

    const std::size_t n = generated.data.instances.size();
    const std::size_t n_train = n * 6 / 10;
    const std::size_t n_val = n * 2 / 10;
    const std::size_t n_test = n - n_train - n_val;

    auto slice = [&generated](std::size_t begin, std::size_t end) {
        Dataset part;
        part.has_categories = generated.data.has_categories;
        part.instances.assign(generated.data.instances.begin() + begin,
                              generated.data.instances.begin() + end);
        return part;
    };
    save_dataset(slice(0, n_train), dir / "train.tsv");
    save_dataset(slice(n_train, n_train + n_val), dir / "val.tsv");
    save_dataset(slice(n_train + n_val, n), dir / "test.tsv");

    std::cout << "train " << n_train << "\nval " << n_val << "\ntest "
              << n_test << "\n";
    return 0;
}

struct TrainArgs {
    std::string config;
    std::string checkpoint;
    std::string log;
    std::optional<std::uint64_t> seed;
};

int cmd_train(const TrainArgs& args) {
    TrainConfig config = load_train_config(args.config);
    if (args.seed) config.seed = *args.seed;

    const auto table = load_embeddings(config.embeddings_path);
    auto train_data = parse_dataset(config.train_path, config.with_categories,
                                    ParseMode::strict);
    auto val_data = parse_dataset(config.val_path, config.with_categories,
                                  ParseMode::strict);
    warn_dropped(drop_unembeddable(train_data, table), "training");
    warn_dropped(drop_unembeddable(val_data, table), "validation");

    const auto result = train(config, train_data, val_data, table);

    Checkpoint ckpt;
    ckpt.seed = config.seed;
    ckpt.best_val_loss = result.log.best_val_loss;
    ckpt.params = result.params;
    ckpt.scheme = load_scheme(config.scheme_path);
    save_checkpoint(ckpt, args.checkpoint);
    if (!args.log.empty()) save_train_log(result.log, args.log);

    std::cout << "best_epoch " << result.log.best_epoch << "\n"
              << "best_val_loss " << format_double(result.log.best_val_loss)
              << "\n"
              << "stop_reason " << result.log.stop_reason << "\n";
    return 0;
}

struct EvalArgs {
    std::string checkpoint;
    std::string embeddings;
    std::string data;
    std::string scheme;
    std::string report;
    bool with_categories = false;
    bool skip_bad = false;
};

int cmd_eval(const EvalArgs& args) {
    const auto ckpt = load_checkpoint(args.checkpoint);
    BucketScheme scheme = ckpt.scheme;
    if (!args.scheme.empty()) {
        scheme = load_scheme(args.scheme);
        if (scheme.bucket_count() != ckpt.scheme.bucket_count())
            throw UsageError(
                "--scheme has " + std::to_string(scheme.bucket_count()) +
                " buckets but the checkpoint was trained with " +
                std::to_string(ckpt.scheme.bucket_count()));
    }

    const auto table = load_embeddings(args.embeddings);
    ParseStats stats;
    auto data = parse_dataset(args.data, args.with_categories,
                              mode_of(args.skip_bad), &stats);
    report_skipped(stats, args.data);
    warn_dropped(drop_unembeddable(data, table), "evaluation");

    const auto yhat = predict(ckpt.params, data, table, scheme);
    std::vector<double> y;
    y.reserve(data.instances.size());
    for (const auto& inst : data.instances) y.push_back(inst.y);

    const auto report = evaluate(yhat, y, scheme);
    save_report(report, args.report);
    std::cout << "male " << format_double(report.male) << "\n";
    return 0;
}

struct PredictArgs {
    std::string checkpoint;
    std::string embeddings;
    std::string data;
    bool with_y = false;
    bool with_categories = false;
    bool skip_bad = false;
    std::string q1, q2, cat1, cat2;
    std::string out;
};

int cmd_predict(const PredictArgs& args) {
    const bool literal = !args.q1.empty() || !args.q2.empty();
    if (literal == !args.data.empty())
        throw UsageError("pass either --data or a --q1/--q2 pair");

    Dataset data;
    if (literal) {
        if (args.q1.empty() || args.q2.empty())
            throw UsageError("--q1 and --q2 must be given together");
        if (args.cat1.empty() != args.cat2.empty())
            throw UsageError("--cat1 and --cat2 must be given together");
        data.has_categories = !args.cat1.empty();
        data.instances.push_back(
            Instance{args.q1, args.q2, args.cat1, args.cat2, 0.0});
    } else {
        ParseStats stats;
        data = args.with_y
                   ? parse_dataset(args.data, args.with_categories,
                                   mode_of(args.skip_bad), &stats)
                   : parse_unlabeled(args.data, args.with_categories,
                                     mode_of(args.skip_bad), &stats);
        report_skipped(stats, args.data);
    }

    const auto ckpt = load_checkpoint(args.checkpoint);
    const auto table = load_embeddings(args.embeddings);
    const auto yhat = predict(ckpt.params, data, table, ckpt.scheme);

    std::string text;
    for (std::size_t i = 0; i < data.instances.size(); ++i) {
        const auto& inst = data.instances[i];
        text += inst.q1;
        text += '\t';
        text += inst.q2;
        text += '\t';
        text += format_double(yhat[i]);
        text += '\t';
        text += std::to_string(ckpt.scheme.label_for(yhat[i]));
        text += '\n';
    }
    if (args.out.empty()) {
        std::cout << text;
    } else {
        AtomicFile file(args.out);
        file.write(text);
        file.commit();
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "Ordinal similarity models: bucket schemes, synthetic data, "
        "training, evaluation and prediction."};
    app.require_subcommand(1);
    app.set_version_flag("--version", "ordsim 0.1.0");

    BucketsArgs buckets;
    auto* cmd_b = app.add_subcommand(
        "buckets", "Derive an equal-frequency bucket scheme from data, or "
                   "emit the fixed production scheme");
    auto* opt_paper = cmd_b->add_flag(
        "--paper", buckets.paper,
        "Emit the fixed 5-bucket scheme [0, 0.82, 0.90, 0.95, 0.97, 1]");
    auto* opt_input = cmd_b->add_option(
        "--input", buckets.input, "Labeled TSV dataset to take quantiles from");
    opt_paper->excludes(opt_input);
    cmd_b->add_option("--k", buckets.k, "Number of buckets (default 5)");
    cmd_b->add_flag("--with-categories", buckets.with_categories,
                    "Input rows carry category columns");
    cmd_b->add_flag("--skip-bad", buckets.skip_bad,
                    "Skip malformed rows instead of failing");
    cmd_b->add_option("--out", buckets.out, "Scheme file to write")->required();

    SynthArgs synth;
    auto* cmd_s = app.add_subcommand(
        "synth", "Generate a synthetic embedding table and labeled "
                 "train/val/test splits (6:2:2)");
    cmd_s->add_option("--pairs", synth.config.n_pairs, "Number of pairs")
        ->required();
    cmd_s->add_option("--vocab", synth.config.vocab_size,
                      "Vocabulary size (default 1000)");
    cmd_s->add_option("--dim", synth.config.dim,
                      "Embedding dimension (default 16)");
    cmd_s->add_option("--skew", synth.config.skew,
                      "Per-token retention probability (default 0.95)");
    cmd_s->add_option("--seed", synth.config.seed, "RNG seed (default 0)");
    cmd_s->add_option("--out-dir", synth.out_dir,
                      "Directory for embeddings.vec and the three TSVs")
        ->required();

    TrainArgs train;
    auto* cmd_t = app.add_subcommand("train", "Train a model from a config file");
    cmd_t->add_option("--config", train.config, "Training config file")
        ->required();
    cmd_t->add_option("--checkpoint", train.checkpoint, "Checkpoint to write")
        ->required();
    cmd_t->add_option("--log", train.log, "Per-epoch training log to write");
    std::uint64_t train_seed = 0;
    auto* opt_seed = cmd_t->add_option(
        "--seed", train_seed, "Override the seed from the config file");

    EvalArgs eval;
    auto* cmd_e = app.add_subcommand(
        "eval", "Evaluate a checkpoint on a labeled dataset");
    cmd_e->add_option("--checkpoint", eval.checkpoint, "Trained checkpoint")
        ->required();
    cmd_e->add_option("--embeddings", eval.embeddings, "Embedding table file")
        ->required();
    cmd_e->add_option("--data", eval.data, "Labeled TSV dataset")->required();
    cmd_e->add_option("--scheme", eval.scheme,
                      "Evaluate under this scheme instead of the checkpoint's "
                      "(bucket count must match)");
    cmd_e->add_option("--report", eval.report, "Report file to write")
        ->required();
    cmd_e->add_flag("--with-categories", eval.with_categories,
                    "Data rows carry category columns");
    cmd_e->add_flag("--skip-bad", eval.skip_bad,
                    "Skip malformed rows instead of failing");

    PredictArgs predict;
    auto* cmd_p = app.add_subcommand(
        "predict", "Predict similarity for a dataset or a literal pair");
    cmd_p->add_option("--checkpoint", predict.checkpoint, "Trained checkpoint")
        ->required();
    cmd_p->add_option("--embeddings", predict.embeddings,
                      "Embedding table file")
        ->required();
    cmd_p->add_option("--data", predict.data,
                      "TSV of pairs; no similarity column unless --with-y");
    cmd_p->add_flag("--with-y", predict.with_y,
                    "Input rows end with a similarity column (ignored)");
    cmd_p->add_flag("--with-categories", predict.with_categories,
                    "Input rows carry category columns");
    cmd_p->add_flag("--skip-bad", predict.skip_bad,
                    "Skip malformed rows instead of failing");
    cmd_p->add_option("--q1", predict.q1, "First query literal");
    cmd_p->add_option("--q2", predict.q2, "Second query literal");
    cmd_p->add_option("--cat1", predict.cat1, "First category path literal");
    cmd_p->add_option("--cat2", predict.cat2, "Second category path literal");
    cmd_p->add_option("--out", predict.out,
                      "Write the prediction TSV here instead of stdout");

    try {
        app.parse(argc, argv);
        if (cmd_b->parsed()) return cmd_buckets(buckets);
        if (cmd_s->parsed()) return cmd_synth(synth);
        if (cmd_t->parsed()) {
            if (opt_seed->count() > 0) train.seed = train_seed;
            return cmd_train(train);
        }
        if (cmd_e->parsed()) return cmd_eval(eval);
        if (cmd_p->parsed()) return cmd_predict(predict);
        throw UsageError("no subcommand given");
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const DataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const NumericError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 3;
    }
}
