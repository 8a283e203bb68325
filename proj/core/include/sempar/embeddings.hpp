#pragma once

#include "sempar/kb.hpp"
#include "sempar/lexicon.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace sempar {

// Pretrained word vectors (word2vec text format) plus a per-language
// stopword set. Immutable after load.
class EmbeddingSpace {
public:
    EmbeddingSpace() = default;
    EmbeddingSpace(std::size_t dimension, std::set<std::string> stopwords)
        : dimension_(dimension), stopwords_(std::move(stopwords)) {}

    static EmbeddingSpace load_word2vec(std::istream& in, std::set<std::string> stopwords);
    static EmbeddingSpace load_word2vec_file(const std::string& path,
                                             std::set<std::string> stopwords);
    static std::set<std::string> load_stopwords_file(const std::string& path);

    void add_vector(const std::string& token, std::vector<double> v);

    std::size_t dimension() const { return dimension_; }
    std::size_t vocabulary_size() const { return vectors_.size(); }

    // Sum of token vectors for non-stopword, in-vocabulary tokens.
    // nullopt when no token is covered (the absent marker).
    std::optional<std::vector<double>> mention_vector(const std::string& mention) const;

    // Ranks all labelled entries by cosine(mention, token-sum of label);
    // keeps the top k at or above threshold. Zero-norm cosine is -1.
    std::vector<RankedCandidate> candidates(const std::map<KbId, std::string>& labels,
                                            const std::string& mention, double threshold,
                                            std::size_t k) const;

private:
    std::size_t dimension_ = 0;
    std::map<std::string, std::vector<double>> vectors_;
    std::set<std::string> stopwords_;
};

double cosine(const std::vector<double>& a, const std::vector<double>& b);

// Index candidates first (exact matches outrank distributional ones), then
// embedding candidates not already present.
std::vector<RankedCandidate> merge_candidates(std::vector<RankedCandidate> index_candidates,
                                              const std::vector<RankedCandidate>& embedding_candidates);

}  // namespace sempar
