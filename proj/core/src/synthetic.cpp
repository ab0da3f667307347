#include "ordsim/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ordsim/errors.hpp"
#include "ordsim/rng.hpp"

namespace ordsim {

namespace {

constexpr double kSimilarityFloor = 1e-6;

std::string join_tokens(const std::vector<std::string>& vocab,
                        const std::vector<std::uint64_t>& ids) {
    std::string out;
    for (std::size_t i = 0; i < ids.size(); ++i) {
        if (i > 0) out += ' ';
        out += vocab[ids[i]];
    }
    return out;
}

}  // namespace

SyntheticData generate_synthetic(const SyntheticConfig& config) {
    if (config.vocab_size < 10)
        throw UsageError("generate_synthetic: vocab_size must be >= 10");
    if (config.dim < 2) throw UsageError("generate_synthetic: dim must be >= 2");
    if (config.n_pairs < 1)
        throw UsageError("generate_synthetic: n_pairs must be >= 1");
    if (!(config.skew >= 0.0 && config.skew <= 1.0))
        throw UsageError("generate_synthetic: skew must be in [0, 1]");

    const auto v = static_cast<std::uint64_t>(config.vocab_size);
    SyntheticData out;
    out.table = EmbeddingTable(config.dim);
    out.data.has_categories = false;

    std::vector<std::string> vocab;
    vocab.reserve(v);
    {
        Rng rng(mix_seed(config.seed, 0));
        for (std::uint64_t i = 0; i < v; ++i) {
            std::vector<double> vec(static_cast<std::size_t>(config.dim));
            double norm2 = 0.0;
            do {
                norm2 = 0.0;
                for (auto& x : vec) {
                    x = rng.normal();
                    norm2 += x * x;
                }
            } while (norm2 < 1e-12);
            const double inv = 1.0 / std::sqrt(norm2);
            for (auto& x : vec) x *= inv;
            vocab.push_back("w" + std::to_string(i));
            out.table.insert(vocab.back(), std::move(vec));
        }
    }

    Rng rng(mix_seed(config.seed, 1));
    out.data.instances.reserve(config.n_pairs);
    std::vector<std::uint64_t> q1, q2;
    for (std::size_t pair = 0; pair < config.n_pairs; ++pair) {
        const std::size_t len = 2 + static_cast<std::size_t>(rng.index(5));
        q1.clear();
        while (q1.size() < len) {
            const auto tok = rng.index(v);
            if (std::find(q1.begin(), q1.end(), tok) == q1.end())
                q1.push_back(tok);
        }
        q2 = q1;
        for (auto& tok : q2)
            if (!rng.bernoulli(config.skew)) tok = rng.index(v);
        if (q2 == q1 && config.skew < 1.0)
            q2[rng.index(len)] = rng.index(v);

        Instance inst;
        inst.q1 = join_tokens(vocab, q1);
        inst.q2 = join_tokens(vocab, q2);
        if (q2 == q1) {
            inst.y = 1.0;
        } else {
            const double cos = cosine_similarity(out.table.embed_text(inst.q1),
                                                 out.table.embed_text(inst.q2));
            inst.y = std::min(1.0, std::max(cos, kSimilarityFloor));
        }
        out.data.instances.push_back(std::move(inst));
    }
    return out;
}

}  // namespace ordsim
