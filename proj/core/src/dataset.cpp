#include "ordsim/dataset.hpp"

#include <cmath>
#include <fstream>

#include "ordsim/errors.hpp"
#include "ordsim/text_format.hpp"

namespace ordsim {

namespace {

std::vector<std::string_view> split_tabs(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find('\t', start);
        if (pos == std::string_view::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

Dataset parse_rows(const std::filesystem::path& path, bool has_categories,
                   bool labeled, ParseMode mode, ParseStats* stats) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open dataset: " + path.string());

    Dataset data;
    data.has_categories = has_categories;
    ParseStats local;
    const std::size_t want_cols =
        (has_categories ? 4 : 2) + (labeled ? 1 : 0);
    std::size_t lineno = 0;
    std::string buf;

    auto bad_row = [&](const std::string& what) {
        if (mode == ParseMode::strict)
            throw DataError("dataset " + path.string() + " line " +
                            std::to_string(lineno) + ": " + what);
        ++local.rows_skipped;
    };

    while (std::getline(in, buf)) {
        ++lineno;
        if (!buf.empty() && buf.back() == '\r') buf.pop_back();
        if (buf.empty() || buf[0] == '#') continue;

        auto fields = split_tabs(buf);
        if (fields.size() != want_cols) {
            bad_row("expected " + std::to_string(want_cols) +
                    " tab-separated columns, got " +
                    std::to_string(fields.size()));
            continue;
        }
        if (fields[0].empty() || fields[1].empty()) {
            bad_row("empty question field");
            continue;
        }

        double y = 0.0;
        if (labeled) {
            try {
                y = parse_double(fields.back());
            } catch (const DataError&) {
                bad_row("unparsable similarity value '" +
                        std::string(fields.back()) + "'");
                continue;
            }
            if (!std::isfinite(y) || !(y > 0.0) || y > 1.0) {
                bad_row("similarity " + std::string(fields.back()) +
                        " outside (0, 1]");
                continue;
            }
        }

        Instance inst;
        inst.q1 = std::string(fields[0]);
        inst.q2 = std::string(fields[1]);
        if (has_categories) {
            inst.cat1 = std::string(fields[2]);
            inst.cat2 = std::string(fields[3]);
        }
        inst.y = y;
        data.instances.push_back(std::move(inst));
        ++local.rows_kept;
    }

    if (data.instances.empty())
        throw DataError("dataset " + path.string() + " has no usable rows");
    if (stats != nullptr) *stats = local;
    return data;
}

}  // namespace

Dataset parse_dataset(const std::filesystem::path& path, bool has_categories,
                      ParseMode mode, ParseStats* stats) {
    return parse_rows(path, has_categories, true, mode, stats);
}

Dataset parse_unlabeled(const std::filesystem::path& path, bool has_categories,
                        ParseMode mode, ParseStats* stats) {
    return parse_rows(path, has_categories, false, mode, stats);
}

void save_dataset(const Dataset& data, const std::filesystem::path& path) {
    AtomicFile out(path);
    for (const auto& inst : data.instances) {
        out.write(inst.q1);
        out.write("\t");
        out.write(inst.q2);
        if (data.has_categories) {
            out.write("\t");
            out.write(inst.cat1);
            out.write("\t");
            out.write(inst.cat2);
        }
        out.write("\t");
        out.write(format_double(inst.y));
        out.write("\n");
    }
    out.commit();
}

std::vector<double> assemble_features(const EmbeddingTable& table,
                                      const Instance& inst,
                                      bool has_categories) {
    const auto dim = static_cast<std::size_t>(table.dim());
    std::vector<double> features;
    features.reserve(dim * (has_categories ? 4 : 2));

    auto push = [&](const std::vector<double>& v) {
        features.insert(features.end(), v.begin(), v.end());
    };
    push(table.embed_text(inst.q1));
    if (has_categories) push(table.embed_tokens(tokenize_category(inst.cat1)));
    push(table.embed_text(inst.q2));
    if (has_categories) push(table.embed_tokens(tokenize_category(inst.cat2)));
    return features;
}

FeatureMatrix assemble_matrix(const Dataset& data, const EmbeddingTable& table,
                              AssembleStats* stats,
                              std::vector<std::size_t>* kept_rows) {
    if (data.instances.empty())
        throw UsageError("assemble_matrix: empty dataset");

    FeatureMatrix m;
    m.cols = static_cast<std::size_t>(table.dim()) *
             (data.has_categories ? 4 : 2);
    AssembleStats local;
    for (std::size_t i = 0; i < data.instances.size(); ++i) {
        const auto& inst = data.instances[i];
        std::vector<double> f;
        try {
            f = assemble_features(table, inst, data.has_categories);
        } catch (const DataError&) {
            if (stats == nullptr) throw;
            ++local.rows_dropped;
            continue;
        }
        m.values.insert(m.values.end(), f.begin(), f.end());
        m.targets.push_back(inst.y);
        if (kept_rows != nullptr) kept_rows->push_back(i);
        ++local.rows_kept;
        ++m.rows;
    }
    if (m.rows == 0)
        throw DataError("assemble_matrix: no instance could be embedded");
    if (stats != nullptr) *stats = local;
    return m;
}

}  // namespace ordsim
