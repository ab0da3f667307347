// Acceptance gate: eight release criteria, one per command-line argument
// (1..8, no argument runs them all). Each criterion prints its evidence
// and a final "[ACCEPT] criterion N: PASS|FAIL" line; the process exits
// nonzero if any requested criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "ordsim/bucket_scheme.hpp"
#include "ordsim/checkpoint.hpp"
#include "ordsim/dataset.hpp"
#include "ordsim/embedding.hpp"
#include "ordsim/errors.hpp"
#include "ordsim/losses.hpp"
#include "ordsim/metrics.hpp"
#include "ordsim/nn.hpp"
#include "ordsim/rng.hpp"
#include "ordsim/synthetic.hpp"
#include "ordsim/training.hpp"

#include "../subprocess.hpp"

using namespace ordsim;

namespace {

const std::string kCli = shell_quote(ORDSIM_CLI_PATH);
const std::filesystem::path kWork = "work_acceptance";

std::string p(const std::filesystem::path& path) {
    return shell_quote(path.string());
}

int g_checks = 0;
int g_failures = 0;

void expect(bool ok, const std::string& what) {
    ++g_checks;
    if (!ok) {
        ++g_failures;
        std::printf("  FAIL: %s\n", what.c_str());
    }
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start)
        .count();
}

// ---------------------------------------------------------------- 1
// Bucketing exactness: the reference boundary map at its documented probe
// points (zero tolerance) and the exact interior midpoints.
bool criterion1() {
    const BucketScheme scheme = reference_scheme();
    const std::vector<std::pair<double, int>> probes = {
        {0.0, 0},      {0.82, 0},     {0.820001, 1}, {0.90, 1},
        {0.900001, 2}, {0.95, 2},     {0.950001, 3}, {0.97, 3},
        {0.970001, 4}, {1.0, 4},      {-0.1, 0},     {1.3, 4},
    };
    for (const auto& [y, label] : probes)
        expect(scheme.label_for(y) == label,
               "label_for(" + std::to_string(y) + ") != " +
                   std::to_string(label));

    expect(scheme.midpoint(2) == 0.925, "midpoint 2 is not exactly 0.925");
    expect(scheme.midpoint(3) == 0.96, "midpoint 3 is not exactly 0.96");
    std::printf("  probes: 12/12 exact, midpoints 0.925 and 0.96 exact\n");
    return true;
}

// ---------------------------------------------------------------- 2
// Loss correctness: the worked interval-loss value within 1e-12, the
// cumulative encoding of label 3, the rank-inconsistent decode, and its
// absolute-label-error contribution.
bool criterion2() {
    const BucketScheme scheme = reference_scheme();
    const std::vector<double> yhat = {0.901};
    const std::vector<int> labels = {2};
    const double loss = atmsel_loss(yhat, labels, scheme).value;
    expect(std::abs(loss - 5.76e-4) < 1e-12,
           "interval loss of (0.901, label 2) is " + std::to_string(loss));
    std::printf("  interval loss(0.901, label 2) = %.17g (want 5.76e-4)\n",
                loss);

    expect(coral_encode(3, 5) == std::vector<int>{1, 1, 1, 0},
           "encode(3, 5) != [1,1,1,0]");

    const std::vector<double> inconsistent = {1.0, 0.0, 1.0, 0.0};
    const int decoded = coral_decode(inconsistent, 5);
    expect(decoded == 1, "decode([1,0,1,0]) != 1");

    const std::vector<int> actual = {3};
    const std::vector<int> predicted = {decoded};
    expect(male(actual, predicted) == 2.0,
           "MALE contribution of the decode is not exactly 2");
    std::printf("  encode(3,5) = [1,1,1,0]; decode([1,0,1,0]) = %d; "
                "label error = 2\n", decoded);
    return true;
}

// ---------------------------------------------------------------- 3
// Gradient oracle: analytic gradients against central finite differences
// (h = 1e-5) on a 4-8-4 network, 20 random parameter points per loss,
// every coordinate, max relative error below 1e-4, in under 10 seconds.
bool criterion3() {
    const auto start = std::chrono::steady_clock::now();
    const double h = 1e-5;
    const BucketScheme scheme = reference_scheme();
    std::mt19937_64 gen(2718281828);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    std::uniform_real_distribution<double> target(0.05, 1.0);

    double worst = 0.0;
    for (const char* loss_name : {"atmsel", "coral", "mse"}) {
        const bool coral = std::string(loss_name) == "coral";
        const std::vector<LayerSpec> specs = {{4, 8, Activation::relu, 0.0}};
        const HeadConfig head =
            coral ? HeadConfig{HeadKind::coral, true, 4}
                  : HeadConfig{HeadKind::scalar_linear, true, 0};

        for (int point = 0; point < 20; ++point) {
            const ModelParams params =
                init_params(4, specs, head, 1000 + point);
            const int n = 4;
            std::vector<std::vector<double>> xs(n, std::vector<double>(4));
            std::vector<int> labels(n);
            std::vector<double> ys(n);
            for (int i = 0; i < n; ++i) {
                for (double& v : xs[i]) v = unif(gen);
                labels[i] = static_cast<int>(gen() % 5);
                ys[i] = target(gen);
            }

            auto batch_loss = [&](const std::vector<double>& flat) {
                ModelParams q = params;
                assign_params(q, flat);
                std::vector<double> outputs;
                for (int i = 0; i < n; ++i) {
                    const auto o = forward_infer(q, xs[i]);
                    outputs.insert(outputs.end(), o.begin(), o.end());
                }
                if (coral) return coral_loss(outputs, labels, 5).value;
                if (std::string(loss_name) == "atmsel")
                    return atmsel_loss(outputs, labels, scheme).value;
                return mse_loss(outputs, ys).value;
            };

            // Analytic gradient accumulated per instance.
            std::vector<double> grads(param_count(params), 0.0);
            Rng rng(0);
            std::vector<ForwardTrace> traces;
            std::vector<double> outputs;
            for (int i = 0; i < n; ++i) {
                traces.push_back(forward_train(params, xs[i], rng));
                outputs.insert(outputs.end(), traces.back().output.begin(),
                               traces.back().output.end());
            }
            std::vector<double> d_out;
            if (coral) d_out = coral_loss(outputs, labels, 5).gradient;
            else if (std::string(loss_name) == "atmsel")
                d_out = atmsel_loss(outputs, labels, scheme).gradient;
            else d_out = mse_loss(outputs, ys).gradient;
            const int width = params.output_dim();
            for (int i = 0; i < n; ++i)
                backward_accumulate(
                    params, traces[i],
                    std::span<const double>(d_out).subspan(
                        static_cast<std::size_t>(i) * width, width),
                    grads);

            const std::vector<double> flat = flatten_params(params);
            for (std::size_t j = 0; j < flat.size(); ++j) {
                std::vector<double> plus = flat, minus = flat;
                plus[j] += h;
                minus[j] -= h;
                const double numeric =
                    (batch_loss(plus) - batch_loss(minus)) / (2.0 * h);
                const double denom =
                    std::max({std::abs(numeric), std::abs(grads[j]), 1e-8});
                worst = std::max(worst,
                                 std::abs(numeric - grads[j]) / denom);
            }
        }
    }

    const double elapsed = seconds_since(start);
    std::printf("  max relative error %.3g over 3 losses x 20 points "
                "(%.2fs)\n", worst, elapsed);
    expect(worst < 1e-4, "max relative gradient error exceeds 1e-4");
    expect(elapsed < 10.0, "gradient check took 10s or longer");
    return true;
}

// ---------------------------------------------------------------- 4
// Metric equivalence: list-based MALE equals confusion-derived MALE
// exactly on 1,000 random evaluations, and the uniform-prediction Monte
// Carlo baseline lands within 1.6 +- 0.05 at n = 100,000.
bool criterion4() {
    const BucketScheme scheme = reference_scheme();
    std::mt19937_64 gen(31415926);
    std::uniform_real_distribution<double> y_dist(1e-9, 1.0);
    std::uniform_real_distribution<double> yhat_dist(-0.2, 1.2);
    std::uniform_int_distribution<int> n_dist(1, 200);

    int exact = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const int n = n_dist(gen);
        std::vector<double> y(n), yhat(n);
        std::vector<int> actual(n), predicted(n);
        for (int i = 0; i < n; ++i) {
            y[i] = y_dist(gen);
            yhat[i] = yhat_dist(gen);
            actual[i] = scheme.label_for(y[i]);
            predicted[i] = scheme.label_for(yhat[i]);
        }
        const EvalReport report = evaluate(yhat, y, scheme);

        double confusion_sum = 0.0;
        for (int a = 0; a < 5; ++a)
            for (int q = 0; q < 5; ++q)
                confusion_sum +=
                    static_cast<double>(report.confusion[a * 5 + q]) *
                    std::abs(a - q);
        const double from_confusion =
            confusion_sum / static_cast<double>(report.n);
        const double from_lists = male(actual, predicted);
        if (from_lists == from_confusion && from_lists == report.male)
            ++exact;
    }
    std::printf("  list MALE == confusion MALE on %d/1000 random cases\n",
                exact);
    expect(exact == 1000, "MALE equivalence failed on some case");

    std::uniform_int_distribution<int> label(0, 4);
    const int n = 100000;
    std::vector<int> a(n), b(n);
    for (int i = 0; i < n; ++i) {
        a[i] = label(gen);
        b[i] = label(gen);
    }
    const double baseline = male(a, b);
    std::printf("  uniform-prediction baseline at n=100000: %.4f "
                "(want 1.6 +- 0.05)\n", baseline);
    expect(std::abs(baseline - 1.6) <= 0.05,
           "Monte Carlo baseline outside 1.6 +- 0.05");
    return true;
}

// ---------------------------------------------------------------- 5
// Pipeline determinism and runtime: two identical synth -> buckets ->
// train -> eval runs over 50,000 pairs (d = 32, hidden 64/32) produce
// byte-identical checkpoints and reports, each run in under 5 minutes.
bool criterion5() {
    const auto root = kWork / "c5";
    std::filesystem::remove_all(root);

    auto run_once = [&](const std::filesystem::path& dir) {
        std::filesystem::create_directories(dir);
        CommandResult r = run_command(
            kCli + " synth --pairs 50000 --vocab 4000 --dim 32 --skew 0.95"
                   " --seed 42 --out-dir " + p(dir));
        expect(r.exit_code == 0, "synth failed: " + r.err);
        r = run_command(kCli + " buckets --input " + p(dir / "train.tsv") +
                        " --k 5 --out " + p(dir / "scheme.txt"));
        expect(r.exit_code == 0, "buckets failed: " + r.err);
        write_file((dir / "train.cfg").string(),
                   "loss atmsel\n"
                   "hidden 64 32\n"
                   "max_epochs 15\n"
                   "patience 15\n"
                   "scheme scheme.txt\n"
                   "embeddings embeddings.vec\n"
                   "train train.tsv\n"
                   "val val.tsv\n");
        r = run_command(kCli + " train --config " + p(dir / "train.cfg") +
                        " --checkpoint " + p(dir / "model.ckpt") + " --log " +
                        p(dir / "log.txt"));
        expect(r.exit_code == 0, "train failed: " + r.err);
        r = run_command(kCli + " eval --checkpoint " + p(dir / "model.ckpt") +
                        " --embeddings " + p(dir / "embeddings.vec") +
                        " --data " + p(dir / "test.tsv") + " --report " +
                        p(dir / "report.txt"));
        expect(r.exit_code == 0, "eval failed: " + r.err);
    };

    const auto start_a = std::chrono::steady_clock::now();
    run_once(root / "run_a");
    const double elapsed_a = seconds_since(start_a);
    const auto start_b = std::chrono::steady_clock::now();
    run_once(root / "run_b");
    const double elapsed_b = seconds_since(start_b);

    bool identical = true;
    for (const char* name :
         {"scheme.txt", "model.ckpt", "log.txt", "report.txt"}) {
        const std::string a = read_file((root / "run_a" / name).string());
        const std::string b = read_file((root / "run_b" / name).string());
        expect(!a.empty(), std::string(name) + " is empty");
        expect(a == b, std::string(name) + " differs between runs");
        identical = identical && !a.empty() && a == b;
    }
    std::printf("  runs: %.1fs and %.1fs (limit 300s each); artifacts %s\n",
                elapsed_a, elapsed_b,
                identical ? "byte-identical" : "DIFFER");
    expect(elapsed_a < 300.0, "first pipeline run took 300s or longer");
    expect(elapsed_b < 300.0, "second pipeline run took 300s or longer");
    return true;
}

// ---------------------------------------------------------------- 6
// Ordinal gain: on 50,000/16,600/16,600 synthetic splits (skew 0.95,
// quantile K = 5), the interval loss beats linear regression by at least
// 0.05 mean test MALE across 5 seeds and stays at or below 0.8 MALE.
// The interval-vs-cumulative gap is reported but not gated.
bool criterion6() {
    const auto start = std::chrono::steady_clock::now();
    const auto root = kWork / "c6";
    std::filesystem::create_directories(root);

    const std::size_t n_train = 50000, n_val = 16600, n_test = 16600;
    std::vector<double> male_atmsel, male_linear, male_coral;

    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        SyntheticConfig synth;
        synth.vocab_size = 4000;
        synth.dim = 16;
        synth.n_pairs = n_train + n_val + n_test;
        synth.skew = 0.95;
        synth.seed = seed;
        const SyntheticData generated = generate_synthetic(synth);

        auto slice = [&](std::size_t begin, std::size_t end) {
            Dataset part;
            part.has_categories = false;
            part.instances.assign(generated.data.instances.begin() + begin,
                                  generated.data.instances.begin() + end);
            return part;
        };
        const Dataset train_data = slice(0, n_train);
        const Dataset val_data = slice(n_train, n_train + n_val);
        const Dataset test_data = slice(n_train + n_val, synth.n_pairs);

        std::vector<double> train_ys;
        train_ys.reserve(n_train);
        for (const auto& inst : train_data.instances)
            train_ys.push_back(inst.y);
        const BucketScheme scheme = derive_quantile_scheme(train_ys, 5);
        const auto scheme_path =
            root / ("scheme_" + std::to_string(seed) + ".txt");
        save_scheme(scheme, scheme_path);

        std::vector<double> test_ys;
        test_ys.reserve(n_test);
        for (const auto& inst : test_data.instances)
            test_ys.push_back(inst.y);

        auto run = [&](LossKind loss) {
            TrainConfig config;
            config.loss = loss;
            if (loss != LossKind::mse_linear) {
                config.hidden = {64, 32};
                config.dropout = {0.2, 0.1};
            }
            config.max_epochs = 40;
            config.patience = 8;
            config.batch_size = 256;
            config.lr = loss == LossKind::mse_linear ? 0.01 : 1e-3;
            config.seed = seed;
            config.scheme_path = scheme_path;
            const TrainResult result =
                train(config, train_data, val_data, generated.table);
            const std::vector<double> yhat =
                predict(result.params, test_data, generated.table, scheme);
            return evaluate(yhat, test_ys, scheme).male;
        };

        male_atmsel.push_back(run(LossKind::atmsel));
        male_linear.push_back(run(LossKind::mse_linear));
        male_coral.push_back(run(LossKind::coral));
        std::printf("  seed %llu: interval %.4f, linear %.4f, "
                    "cumulative %.4f\n",
                    static_cast<unsigned long long>(seed),
                    male_atmsel.back(), male_linear.back(),
                    male_coral.back());
    }

    auto mean = [](const std::vector<double>& v) {
        double s = 0.0;
        for (double x : v) s += x;
        return s / static_cast<double>(v.size());
    };
    const double m_atmsel = mean(male_atmsel);
    const double m_linear = mean(male_linear);
    const double m_coral = mean(male_coral);
    std::printf("  means over 5 seeds: interval %.4f, linear %.4f "
                "(margin %.4f, need >= 0.05)\n",
                m_atmsel, m_linear, m_linear - m_atmsel);
    std::printf("  interval vs cumulative gap (reported, not gated): "
                "%.4f\n", m_coral - m_atmsel);
    std::printf("  elapsed %.1fs\n", seconds_since(start));

    expect(m_atmsel <= 0.8, "mean interval-loss MALE above 0.8");
    expect(m_linear - m_atmsel >= 0.05,
           "interval loss beats linear regression by less than 0.05 MALE");
    return true;
}

// ---------------------------------------------------------------- 7
// Convergence: on 1,000 instances whose targets sit exactly on bucket
// midpoints, interval-loss training drives the train loss below 1e-4
// within 500 epochs.
bool criterion7() {
    const BucketScheme scheme = reference_scheme();
    const auto root = kWork / "c7";
    std::filesystem::create_directories(root);
    const auto scheme_path = root / "scheme.txt";
    save_scheme(scheme, scheme_path);

    // Ten 4-d tokens; five fixed query pairs, one per bucket.
    EmbeddingTable table(4);
    Rng rng(99);
    for (int i = 0; i < 10; ++i) {
        std::vector<double> v(4);
        for (double& x : v) x = rng.normal();
        table.insert("t" + std::to_string(i), std::move(v));
    }
    Dataset data;
    data.has_categories = false;
    for (int i = 0; i < 1000; ++i) {
        const int label = i % 5;
        Instance inst;
        inst.q1 = "t" + std::to_string(label);
        inst.q2 = "t" + std::to_string(label + 5);
        inst.y = scheme.midpoint(label);
        data.instances.push_back(std::move(inst));
    }

    TrainConfig config;
    config.loss = LossKind::atmsel;
    config.hidden = {16, 8};
    config.dropout = {0.0, 0.0};
    config.max_epochs = 500;
    config.patience = 500;
    config.batch_size = 256;
    config.lr = 0.01;
    config.seed = 0;
    config.scheme_path = scheme_path;

    const TrainResult result = train(config, data, data, table);
    double best_train = result.log.epochs[0].train_loss;
    int at_epoch = 0;
    for (const EpochRecord& rec : result.log.epochs) {
        if (rec.train_loss < best_train) best_train = rec.train_loss;
        if (rec.train_loss < 1e-4 && at_epoch == 0) at_epoch = rec.epoch;
    }
    std::printf("  min train loss %.3g%s (limit 1e-4 within 500 epochs)\n",
                best_train,
                at_epoch > 0
                    ? (" reached at epoch " + std::to_string(at_epoch)).c_str()
                    : "");
    expect(at_epoch > 0 && at_epoch <= 500,
           "train loss never fell below 1e-4 within 500 epochs");
    return true;
}

// ---------------------------------------------------------------- 8
// Format robustness: eight malformed input files are rejected with a
// data error (exit code 2) and a diagnostic, both through the library
// and through the CLI.
bool criterion8() {
    const auto root = kWork / "c8";
    std::filesystem::remove_all(root);
    std::filesystem::create_directories(root);

    // Valid companions so exactly one artifact is at fault per case.
    write_file((root / "good.tsv").string(),
               "a b\tc\t0.5\nc\ta\t0.9\nb\tc a\t0.25\n");
    write_file((root / "good.vec").string(),
               "3 2\na 1 0\nb 0 1\nc 0.5 0.5\n");
    expect(run_command(kCli + " buckets --paper --out " +
                       p(root / "scheme.txt")).exit_code == 0,
           "setup: cannot write reference scheme");

    struct Case {
        const char* name;
        const char* kind;  // "embeddings" or "dataset"
        std::string content;
        const char* fragment;  // expected diagnostic substring
    };
    const std::vector<Case> cases = {
        {"bad header", "embeddings", "3\na 1 0\nb 0 1\nc 0.5 0.5\n",
         "header"},
        {"arity mismatch", "embeddings", "2 3\na 1 0 0\nb 1 0\n",
         "expected 3"},
        {"duplicate token", "embeddings", "2 2\na 1 0\na 0 1\n",
         "duplicate token"},
        {"similarity zero", "dataset", "a\tb\t0.0\n", "outside (0, 1]"},
        {"similarity above one", "dataset", "a\tb\t1.3\n", "outside (0, 1]"},
        {"wrong column count", "dataset", "a\tb\n", "columns"},
        {"non-numeric similarity", "dataset", "a\tb\tabc\n",
         "unparsable similarity"},
        {"empty file", "dataset", "", "no usable rows"},
    };

    int pass = 0;
    for (std::size_t i = 0; i < cases.size(); ++i) {
        const Case& c = cases[i];
        const auto bad = root / ("bad_" + std::to_string(i) + ".txt");
        write_file(bad.string(), c.content);

        // Library level: the parser throws the data-error class.
        bool threw = false;
        try {
            if (std::string(c.kind) == "embeddings") load_embeddings(bad);
            else parse_dataset(bad, false, ParseMode::strict);
        } catch (const DataError&) {
            threw = true;
        } catch (...) {
        }
        expect(threw, std::string(c.name) + ": parser did not raise the "
                                            "data error class");

        // CLI level: the command exits with code 2 and a diagnostic.
        CommandResult r;
        if (std::string(c.kind) == "embeddings") {
            const auto cfg = root / ("cfg_" + std::to_string(i) + ".txt");
            write_file(cfg.string(),
                       "loss atmsel\nscheme scheme.txt\nembeddings " +
                           bad.filename().string() +
                           "\ntrain good.tsv\nval good.tsv\n");
            r = run_command(kCli + " train --config " + p(cfg) +
                            " --checkpoint " + p(root / "x.ckpt"));
        } else {
            r = run_command(kCli + " buckets --input " + p(bad) + " --out " +
                            p(root / "x.txt"));
        }
        const bool code_ok = r.exit_code == 2;
        const bool msg_ok = r.err.find(c.fragment) != std::string::npos;
        expect(code_ok, std::string(c.name) + ": exit code " +
                            std::to_string(r.exit_code) + ", want 2");
        expect(msg_ok, std::string(c.name) + ": diagnostic lacks '" +
                           c.fragment + "': " + r.err);
        if (threw && code_ok && msg_ok) {
            ++pass;
            std::printf("  %-24s -> data error, exit 2\n", c.name);
        }
    }
    expect(pass == 8, "not all malformed files were rejected cleanly");
    return true;
}

}  // namespace

int main(int argc, char** argv) {
    using CriterionFn = bool (*)();
    const CriterionFn criteria[] = {criterion1, criterion2, criterion3,
                                    criterion4, criterion5, criterion6,
                                    criterion7, criterion8};

    int first = 1, last = 8;
    if (argc > 1) {
        const int n = std::atoi(argv[1]);
        if (n < 1 || n > 8) {
            std::fprintf(stderr, "usage: %s [criterion 1..8]\n", argv[0]);
            return 2;
        }
        first = last = n;
    }

    std::filesystem::create_directories(kWork);
    bool all_pass = true;
    for (int n = first; n <= last; ++n) {
        const int failures_before = g_failures;
        bool ran = false;
        try {
            ran = criteria[n - 1]();
        } catch (const std::exception& e) {
            std::printf("  FAIL: unexpected exception: %s\n", e.what());
        }
        const bool pass = ran && g_failures == failures_before;
        std::printf("[ACCEPT] criterion %d: %s\n", n, pass ? "PASS" : "FAIL");
        all_pass = all_pass && pass;
    }
    return all_pass ? 0 : 1;
}
