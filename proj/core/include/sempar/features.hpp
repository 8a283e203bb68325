#pragma once

#include "sempar/conllu.hpp"
#include "sempar/dudes.hpp"
#include "sempar/kb.hpp"
#include "sempar/lexicon.hpp"

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace sempar {

using FeatureVector = std::map<std::string, double>;

double dot(const FeatureVector& f, const FeatureVector& theta);
FeatureVector diff(const FeatureVector& a, const FeatureVector& b);  // a - b
double norm_sq(const FeatureVector& f);

// Normalized Levenshtein similarity on lowercased, camelCase-split strings.
double string_similarity(const std::string& a, const std::string& b);
std::string split_camel_case(const std::string& s);

// Per-node assignment payload: the KB id plus what the lexicon knew about it.
struct NodeAssignment {
    KbId kb_id;
    std::optional<Term> restriction_object;
    double frequency_score = 0.0;

    friend bool operator==(const NodeAssignment&, const NodeAssignment&) = default;
};

struct EdgeKey {
    int parent = 0;
    int child = 0;
    friend bool operator==(const EdgeKey&, const EdgeKey&) = default;
    friend auto operator<=>(const EdgeKey&, const EdgeKey&) = default;
};

// Partial interpretation (W, E, alpha, beta, gamma) over a dependency tree.
struct ParseState {
    std::shared_ptr<const DepTree> tree;
    std::map<int, NodeAssignment> alpha;   // node -> KB id (absent for QueryVar)
    std::map<int, DudeKind> beta;          // node -> DUDES kind
    std::map<EdgeKey, int> gamma;          // edge -> argument index {1,2}

    mutable std::optional<double> cached_model_score;
    mutable std::optional<double> cached_objective_score;

    // Canonical text key; equal states compare equal by key.
    std::string key() const;

    friend bool operator==(const ParseState& a, const ParseState& b) {
        return a.key() == b.key();
    }
};

struct Factor {
    std::string template_id;
    std::string scope_key;  // which state fragment the factor is bound to
    FeatureVector features;
};

// All factors from one template share theta.
struct Template {
    std::string id;
    FeatureVector theta;
};

struct TemplateModel {
    std::vector<Template> templates;

    Template& at(const std::string& id);
    const Template& at(const std::string& id) const;

    static TemplateModel default_model();  // "node" and "edge" templates

    void save(const std::string& path) const;  // sorted tsv, exact reload
    static TemplateModel load(const std::string& path);
    std::string serialize() const;
};

struct FactorContext {
    const TripleStore* kb = nullptr;
};

// Deterministic factor list: one node factor per assigned node, one edge
// factor per gamma-assigned edge.
std::vector<Factor> roll_out(const ParseState& state, const FactorContext& ctx);

FeatureVector node_features(const ParseState& state, int node_id);
FeatureVector edge_features(const ParseState& state, const EdgeKey& e,
                            const FactorContext& ctx);

// Sum over factors of f . theta; the log of the unnormalized product. The
// partition function is never computed; acceptance uses differences only.
double model_score(const ParseState& state, const TemplateModel& model,
                   const FactorContext& ctx);

}  // namespace sempar
