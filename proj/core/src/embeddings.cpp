#include "sempar/embeddings.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>

namespace sempar {

EmbeddingSpace EmbeddingSpace::load_word2vec(std::istream& in,
                                             std::set<std::string> stopwords) {
    std::size_t count = 0, dim = 0;
    if (!(in >> count >> dim))
        throw std::runtime_error("embeddings: malformed header line");
    EmbeddingSpace space(dim, std::move(stopwords));
    for (std::size_t i = 0; i < count; ++i) {
        std::string token;
        if (!(in >> token))
            throw std::runtime_error("embeddings: fewer vectors than header declares");
        std::vector<double> v(dim);
        for (std::size_t d = 0; d < dim; ++d)
            if (!(in >> v[d]))
                throw std::runtime_error("embeddings: truncated vector for token '" +
                                         token + "'");
        space.add_vector(token, std::move(v));
    }
    return space;
}

EmbeddingSpace EmbeddingSpace::load_word2vec_file(const std::string& path,
                                                  std::set<std::string> stopwords) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open embeddings file: " + path);
    return load_word2vec(in, std::move(stopwords));
}

std::set<std::string> EmbeddingSpace::load_stopwords_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open stopword file: " + path);
    std::set<std::string> out;
    std::string w;
    while (in >> w) out.insert(normalize_term(w));
    return out;
}

void EmbeddingSpace::add_vector(const std::string& token, std::vector<double> v) {
    if (dimension_ == 0) dimension_ = v.size();
    if (v.size() != dimension_)
        throw std::runtime_error("embeddings: vector for '" + token +
                                 "' has dimension " + std::to_string(v.size()) +
                                 ", expected " + std::to_string(dimension_));
    vectors_[normalize_term(token)] = std::move(v);
}

std::optional<std::vector<double>> EmbeddingSpace::mention_vector(
    const std::string& mention) const {
    std::istringstream tokens(normalize_term(mention));
    std::vector<double> sum(dimension_, 0.0);
    bool covered = false;
    std::string tok;
    while (tokens >> tok) {
        if (stopwords_.count(tok)) continue;
        auto it = vectors_.find(tok);
        if (it == vectors_.end()) continue;
        for (std::size_t d = 0; d < dimension_; ++d) sum[d] += it->second[d];
        covered = true;
    }
    if (!covered) return std::nullopt;
    return sum;
}

double cosine(const std::vector<double>& a, const std::vector<double>& b) {
    double dot = 0, na = 0, nb = 0;
    for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0.0 || nb == 0.0) return -1.0;  // always pruned
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

std::vector<RankedCandidate> EmbeddingSpace::candidates(
    const std::map<KbId, std::string>& labels, const std::string& mention,
    double threshold, std::size_t k) const {
    auto m = mention_vector(mention);
    if (!m) return {};
    std::vector<RankedCandidate> ranked;
    for (const auto& [id, label] : labels) {
        auto e = mention_vector(label);
        if (!e) continue;
        double sim = cosine(*m, *e);
        if (sim < threshold) continue;
        ranked.push_back({id, std::nullopt, sim, CandidateOrigin::Embedding});
    }
    std::sort(ranked.begin(), ranked.end(),
              [](const RankedCandidate& a, const RankedCandidate& b) {
                  if (a.score != b.score) return a.score > b.score;
                  return a.kb_id < b.kb_id;
              });
    if (ranked.size() > k) ranked.resize(k);
    return ranked;
}

std::vector<RankedCandidate> merge_candidates(
    std::vector<RankedCandidate> index_candidates,
    const std::vector<RankedCandidate>& embedding_candidates) {
    for (const auto& c : embedding_candidates) {
        bool present = std::any_of(index_candidates.begin(), index_candidates.end(),
                                   [&](const RankedCandidate& i) { return i.kb_id == c.kb_id; });
        if (!present) index_candidates.push_back(c);
    }
    return index_candidates;
}

}  // namespace sempar
