#include "ordsim/embedding.hpp"

#include <cmath>
#include <fstream>

#include "ordsim/errors.hpp"
#include "ordsim/text_format.hpp"

namespace ordsim {

EmbeddingTable::EmbeddingTable(int dim) : dim_(dim) {
    if (dim < 1) throw UsageError("embedding dimension must be positive");
}

void EmbeddingTable::insert(std::string token, std::vector<double> vec) {
    if (dim_ == 0) dim_ = static_cast<int>(vec.size());
    if (vec.size() != static_cast<std::size_t>(dim_))
        throw UsageError("embedding vector for '" + token +
                         "' has wrong dimension");
    auto [it, inserted] = index_.try_emplace(token, tokens_.size());
    if (inserted) {
        tokens_.push_back(std::move(token));
        vectors_.push_back(std::move(vec));
    } else {
        vectors_[it->second] = std::move(vec);
    }
}

bool EmbeddingTable::contains(std::string_view token) const {
    return find(token) != nullptr;
}

const double* EmbeddingTable::find(std::string_view token) const {
    auto it = index_.find(std::string(token));
    if (it == index_.end()) return nullptr;
    return vectors_[it->second].data();
}

std::vector<double> EmbeddingTable::embed_tokens(
    std::span<const std::string> toks) const {
    if (dim_ == 0) throw UsageError("embedding table is empty");
    std::vector<double> acc(static_cast<std::size_t>(dim_), 0.0);
    std::size_t known = 0;
    for (const auto& tok : toks) {
        const double* v = find(tok);
        if (v == nullptr) continue;
        for (int i = 0; i < dim_; ++i) acc[i] += v[i];
        ++known;
    }
    if (known == 0)
        throw DataError("no in-vocabulary token, cannot embed");
    const double inv = 1.0 / static_cast<double>(known);
    for (auto& x : acc) x *= inv;
    return acc;
}

std::vector<double> EmbeddingTable::embed_text(std::string_view text) const {
    return embed_tokens(tokenize(text));
}

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> out;
    for (const auto piece : split_whitespace(text)) out.push_back(to_lower(piece));
    return out;
}

std::vector<std::string> tokenize_category(std::string_view path) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= path.size()) {
        const auto pos = path.find("->", start);
        const auto level =
            path.substr(start, pos == std::string_view::npos ? std::string_view::npos
                                                             : pos - start);
        for (const auto piece : split_whitespace(level))
            out.push_back(to_lower(piece));
        if (pos == std::string_view::npos) break;
        start = pos + 2;
    }
    return out;
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || a.size() != b.size())
        throw UsageError("cosine: vectors must be non-empty and equal length");
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0.0 || nb == 0.0)
        throw NumericError("cosine: zero-norm vector");
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

EmbeddingTable load_embeddings(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open embeddings: " + path.string());

    std::string buf;
    if (!std::getline(in, buf))
        throw DataError("embeddings: empty file " + path.string());
    auto header = split_whitespace(buf);
    if (header.size() != 2)
        throw DataError("embeddings: header must be 'count dim'");
    const auto count = parse_int(header[0]);
    const auto dim = parse_int(header[1]);
    if (count < 1 || dim < 1)
        throw DataError("embeddings: count and dim must be positive");

    EmbeddingTable table(static_cast<int>(dim));
    std::int64_t seen = 0;
    std::size_t lineno = 1;
    while (std::getline(in, buf)) {
        ++lineno;
        auto fields = split_whitespace(buf);
        if (fields.empty()) continue;
        if (fields.size() != static_cast<std::size_t>(dim) + 1)
            throw DataError("embeddings: line " + std::to_string(lineno) +
                            " has " + std::to_string(fields.size() - 1) +
                            " values, expected " + std::to_string(dim));
        std::vector<double> vec;
        vec.reserve(static_cast<std::size_t>(dim));
        for (std::size_t i = 1; i < fields.size(); ++i) {
            const double x = parse_double(fields[i]);
            if (!std::isfinite(x))
                throw DataError("embeddings: non-finite value at line " +
                                std::to_string(lineno));
            vec.push_back(x);
        }
        if (table.contains(fields[0]))
            throw DataError("embeddings: duplicate token '" +
                            std::string(fields[0]) + "' at line " +
                            std::to_string(lineno));
        table.insert(std::string(fields[0]), std::move(vec));
        ++seen;
    }
    if (seen != count)
        throw DataError("embeddings: header declares " + std::to_string(count) +
                        " vectors, file has " + std::to_string(seen));
    return table;
}

void save_embeddings(const EmbeddingTable& table,
                     const std::filesystem::path& path) {
    if (table.size() == 0) throw UsageError("save_embeddings: empty table");
    AtomicFile out(path);
    out.write(std::to_string(table.size()) + " " +
               std::to_string(table.dim()) + "\n");
    for (const auto& tok : table.tokens()) {
        out.write(tok);
        const double* v = table.find(tok);
        for (int i = 0; i < table.dim(); ++i)
            out.write(" " + format_double(v[i]));
        out.write("\n");
    }
    out.commit();
}

}  // namespace ordsim
