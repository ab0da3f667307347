#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <random>
#include <vector>

#include "ordsim/bucket_scheme.hpp"
#include "ordsim/errors.hpp"
#include "ordsim/metrics.hpp"

using namespace ordsim;

namespace {

// Independent recomputation of MALE from a confusion matrix.
double male_from_confusion(const EvalReport& r) {
    double sum = 0.0;
    for (int a = 0; a < r.bucket_count; ++a)
        for (int p = 0; p < r.bucket_count; ++p)
            sum += static_cast<double>(r.confusion[a * r.bucket_count + p]) *
                   std::abs(a - p);
    return sum / static_cast<double>(r.n);
}

}  // namespace

TEST_CASE("male matches hand-computed values") {
    const std::vector<int> actual = {0, 1, 4, 2};
    const std::vector<int> predicted = {0, 3, 1, 2};
    // |0-0| + |1-3| + |4-1| + |2-2| = 5, over 4 instances.
    CHECK(male(actual, predicted) == 5.0 / 4.0);

    const std::vector<int> same = {2, 2, 2};
    CHECK(male(same, same) == 0.0);

    CHECK_THROWS_AS(male({}, {}), UsageError);
    const std::vector<int> short_list = {1};
    CHECK_THROWS_AS(male(actual, short_list), UsageError);
}

TEST_CASE("evaluate fills a consistent report on random data") {
    std::mt19937_64 gen(23);
    std::uniform_real_distribution<double> unif(1e-9, 1.0);
    std::uniform_real_distribution<double> wide(-0.2, 1.2);
    const BucketScheme scheme = reference_scheme();

    const int n = 4000;
    std::vector<double> y(n), yhat(n);
    for (int i = 0; i < n; ++i) {
        y[i] = unif(gen);
        yhat[i] = wide(gen);  // predictions may fall outside (0, 1]
    }

    const EvalReport r = evaluate(yhat, y, scheme);
    REQUIRE(r.n == static_cast<std::size_t>(n));
    REQUIRE(r.bucket_count == 5);
    REQUIRE(r.confusion.size() == 25);

    // Row sums reproduce the actual histogram; the matrix total is n.
    std::int64_t total = 0;
    for (int a = 0; a < 5; ++a) {
        std::int64_t row = 0;
        for (int p = 0; p < 5; ++p) row += r.confusion[a * 5 + p];
        CHECK(row == r.histogram_actual[a]);
        total += row;
    }
    CHECK(total == n);
    for (int p = 0; p < 5; ++p) {
        std::int64_t col = 0;
        for (int a = 0; a < 5; ++a) col += r.confusion[a * 5 + p];
        CHECK(col == r.histogram_predicted[p]);
    }

    // MALE from the label lists and from the confusion matrix are the same
    // sum of small integers, so they must agree exactly.
    CHECK(r.male == male_from_confusion(r));

    double expected_mse = 0.0;
    for (int i = 0; i < n; ++i)
        expected_mse += (yhat[i] - y[i]) * (yhat[i] - y[i]);
    expected_mse /= n;
    CHECK(r.mse == doctest::Approx(expected_mse).epsilon(1e-12));
}

TEST_CASE("evaluate clamps predictions but rejects bad targets") {
    const BucketScheme scheme = reference_scheme();
    const std::vector<double> yhat = {-0.5, 2.0};
    const std::vector<double> y = {0.5, 0.99};

    const EvalReport r = evaluate(yhat, y, scheme);
    CHECK(r.histogram_predicted[0] == 1);
    CHECK(r.histogram_predicted[4] == 1);

    const std::vector<double> bad_zero = {0.0, 0.99};
    CHECK_THROWS_AS(evaluate(yhat, bad_zero, scheme), DataError);
    const std::vector<double> bad_high = {0.5, 1.2};
    CHECK_THROWS_AS(evaluate(yhat, bad_high, scheme), DataError);
    CHECK_THROWS_AS(evaluate({}, {}, scheme), UsageError);
}

TEST_CASE("reports round-trip through files and serialize deterministically") {
    const std::filesystem::path dir = "work_metrics";
    std::filesystem::create_directories(dir);

    std::mt19937_64 gen(29);
    std::uniform_real_distribution<double> unif(1e-9, 1.0);
    const BucketScheme scheme = reference_scheme();
    std::vector<double> y(300), yhat(300);
    for (std::size_t i = 0; i < y.size(); ++i) {
        y[i] = unif(gen);
        yhat[i] = unif(gen);
    }
    const EvalReport original = evaluate(yhat, y, scheme);

    const auto path_a = dir / "report_a.txt";
    const auto path_b = dir / "report_b.txt";
    save_report(original, path_a);
    save_report(original, path_b);

    // Identical values serialize to identical bytes.
    std::ifstream fa(path_a, std::ios::binary), fb(path_b, std::ios::binary);
    const std::string bytes_a((std::istreambuf_iterator<char>(fa)), {});
    const std::string bytes_b((std::istreambuf_iterator<char>(fb)), {});
    CHECK(bytes_a == bytes_b);

    const EvalReport loaded = load_report(path_a);
    CHECK(loaded.n == original.n);
    CHECK(loaded.bucket_count == original.bucket_count);
    CHECK(loaded.male == original.male);
    CHECK(loaded.mse == original.mse);
    CHECK(loaded.confusion == original.confusion);
    CHECK(loaded.histogram_actual == original.histogram_actual);
    CHECK(loaded.histogram_predicted == original.histogram_predicted);
}

TEST_CASE("report loader rejects malformed files") {
    const std::filesystem::path dir = "work_metrics";
    std::filesystem::create_directories(dir);

    auto write = [&](const char* name, const std::string& content) {
        std::ofstream out(dir / name, std::ios::trunc);
        out << content;
        return dir / name;
    };

    CHECK_THROWS_AS(load_report(dir / "missing.txt"), DataError);
    CHECK_THROWS_AS(load_report(write("bad_magic.txt", "ordsim-scheme v1\n")),
                    DataError);
    CHECK_THROWS_AS(
        load_report(write("truncated.txt", "ordsim-report v1\nn 10\n")),
        DataError);
}
