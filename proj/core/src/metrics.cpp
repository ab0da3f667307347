#include "ordsim/metrics.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <string>

#include "ordsim/errors.hpp"
#include "ordsim/text_format.hpp"

namespace ordsim {

double male(std::span<const int> actual, std::span<const int> predicted) {
    if (actual.empty()) throw UsageError("male: empty label list");
    if (actual.size() != predicted.size())
        throw UsageError("male: actual and predicted sizes differ");
    double sum = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i)
        sum += std::abs(actual[i] - predicted[i]);
    return sum / static_cast<double>(actual.size());
}

EvalReport evaluate(std::span<const double> yhat, std::span<const double> y,
                    const BucketScheme& scheme) {
    if (yhat.empty()) throw UsageError("evaluate: empty prediction list");
    if (yhat.size() != y.size())
        throw UsageError("evaluate: prediction and target sizes differ");

    const int k = scheme.bucket_count();
    EvalReport report;
    report.n = y.size();
    report.bucket_count = k;
    report.confusion.assign(static_cast<std::size_t>(k) * k, 0);
    report.histogram_actual.assign(k, 0);
    report.histogram_predicted.assign(k, 0);

    double abs_sum = 0.0;
    double sq_sum = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (!(y[i] > 0.0) || y[i] > 1.0)
            throw DataError("evaluate: target outside (0, 1] at row " +
                            std::to_string(i + 1));
        const int actual = scheme.label_for(y[i]);
        const int predicted = scheme.label_for(yhat[i]);
        report.confusion[static_cast<std::size_t>(actual) * k + predicted] += 1;
        report.histogram_actual[actual] += 1;
        report.histogram_predicted[predicted] += 1;
        abs_sum += std::abs(actual - predicted);
        const double d = yhat[i] - y[i];
        sq_sum += d * d;
    }
    report.male = abs_sum / static_cast<double>(report.n);
    report.mse = sq_sum / static_cast<double>(report.n);
    return report;
}

void save_report(const EvalReport& report, const std::filesystem::path& path) {
    AtomicFile out(path);
    out.write("ordsim-report v1\n");
    out.write("n " + std::to_string(report.n) + "\n");
    out.write("k " + std::to_string(report.bucket_count) + "\n");
    out.write("male " + format_double17(report.male) + "\n");
    out.write("mse " + format_double17(report.mse) + "\n");
    out.write("confusion");
    for (const auto c : report.confusion) out.write(" " + std::to_string(c));
    out.write("\nhistogram_actual");
    for (const auto c : report.histogram_actual)
        out.write(" " + std::to_string(c));
    out.write("\nhistogram_predicted");
    for (const auto c : report.histogram_predicted)
        out.write(" " + std::to_string(c));
    out.write("\n");
    out.commit();
}

namespace {

std::vector<std::string_view> expect_line(std::ifstream& in, std::string& buf,
                                          std::string_view key) {
    if (!std::getline(in, buf))
        throw DataError("report: missing '" + std::string(key) + "' line");
    auto fields = split_whitespace(buf);
    if (fields.empty() || fields[0] != key)
        throw DataError("report: expected '" + std::string(key) + "' line");
    return fields;
}

std::vector<std::int64_t> parse_counts(std::span<const std::string_view> fields,
                                       std::size_t expected,
                                       std::string_view key) {
    if (fields.size() != expected + 1)
        throw DataError("report: wrong count on '" + std::string(key) +
                        "' line");
    std::vector<std::int64_t> out;
    out.reserve(expected);
    for (std::size_t i = 1; i < fields.size(); ++i)
        out.push_back(parse_int(fields[i]));
    return out;
}

}  // namespace

EvalReport load_report(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open report: " + path.string());
    std::string buf;
    if (!std::getline(in, buf) || buf != "ordsim-report v1")
        throw DataError("report: bad magic line in " + path.string());

    EvalReport report;
    {
        auto f = expect_line(in, buf, "n");
        if (f.size() != 2) throw DataError("report: malformed 'n' line");
        const auto n = parse_int(f[1]);
        if (n < 0) throw DataError("report: negative n");
        report.n = static_cast<std::size_t>(n);
    }
    {
        auto f = expect_line(in, buf, "k");
        if (f.size() != 2) throw DataError("report: malformed 'k' line");
        const auto k = parse_int(f[1]);
        if (k < 1) throw DataError("report: bucket count must be positive");
        report.bucket_count = static_cast<int>(k);
    }
    {
        auto f = expect_line(in, buf, "male");
        if (f.size() != 2) throw DataError("report: malformed 'male' line");
        report.male = parse_double(f[1]);
    }
    {
        auto f = expect_line(in, buf, "mse");
        if (f.size() != 2) throw DataError("report: malformed 'mse' line");
        report.mse = parse_double(f[1]);
    }
    const auto k = static_cast<std::size_t>(report.bucket_count);
    {
        auto f = expect_line(in, buf, "confusion");
        report.confusion = parse_counts(f, k * k, "confusion");
    }
    {
        auto f = expect_line(in, buf, "histogram_actual");
        report.histogram_actual = parse_counts(f, k, "histogram_actual");
    }
    {
        auto f = expect_line(in, buf, "histogram_predicted");
        report.histogram_predicted = parse_counts(f, k, "histogram_predicted");
    }
    return report;
}

}  // namespace ordsim
