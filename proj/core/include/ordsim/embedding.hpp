#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace ordsim {

// Word vectors, all the same dimension, keyed by token.
class EmbeddingTable {
public:
    EmbeddingTable() = default;
    explicit EmbeddingTable(int dim);

    int dim() const { return dim_; }
    std::size_t size() const { return tokens_.size(); }

    // Replaces the vector when the token is already present.
    void insert(std::string token, std::vector<double> vec);

    bool contains(std::string_view token) const;
    // nullptr when absent.
    const double* find(std::string_view token) const;

    // Insertion order; save/load round-trips preserve it.
    std::span<const std::string> tokens() const { return tokens_; }

    // Mean of the vectors of the in-vocabulary tokens; unknown tokens are
    // skipped. All tokens unknown (or none given) is a DataError: the
    // caller decides whether the instance is dropped or the run fails.
    std::vector<double> embed_tokens(std::span<const std::string> toks) const;
    std::vector<double> embed_text(std::string_view text) const;

private:
    int dim_ = 0;
    std::vector<std::string> tokens_;
    std::vector<std::vector<double>> vectors_;
    std::unordered_map<std::string, std::size_t> index_;
};

// Lowercased whitespace tokenization.
std::vector<std::string> tokenize(std::string_view text);

// Category paths use "->" between levels ("Clothing->Men's Clothing");
// levels are whitespace-tokenized after splitting.
std::vector<std::string> tokenize_category(std::string_view path);

double cosine_similarity(std::span<const double> a, std::span<const double> b);

// word2vec text format: "count dim" header then one "token v1 .. vdim"
// line per word.
EmbeddingTable load_embeddings(const std::filesystem::path& path);
void save_embeddings(const EmbeddingTable& table,
                     const std::filesystem::path& path);

}  // namespace ordsim
