#pragma once

#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace sempar {

struct DepNode {
    int id = 0;             // node id after preprocessing (stable, 1-based)
    std::string surface;
    std::string lemma;
    std::string upos;
    int span_begin = 0;     // original token index range covered by this node
    int span_end = 0;       // inclusive
};

struct DepEdge {
    int parent = 0;
    int child = 0;
    std::string relation;

    friend bool operator==(const DepEdge&, const DepEdge&) = default;
    friend auto operator<=>(const DepEdge&, const DepEdge&) = default;
};

struct DepTree {
    std::vector<DepNode> nodes;
    std::vector<DepEdge> edges;
    int root = 0;
    std::string sent_id;
    std::string text;
    std::string lang;

    const DepNode& node(int id) const;
    std::vector<const DepEdge*> children_of(int id) const;  // span order
    void check_tree() const;  // throws ConlluError if not a tree
};

struct ConlluError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::vector<DepTree> parse_conllu(std::istream& in, const std::string& lang = "");
std::vector<DepTree> parse_conllu_file(const std::string& path, const std::string& lang = "");

// Collapses maximal chains of `compound` edges into single nodes; merged
// surface/lemma are span-ordered, space-joined. Idempotent.
DepTree merge_compounds(const DepTree& t);

// Which UD relations belong to which taxonomy class. Shipped as a versioned
// data file; defaults() carries the same table compiled in.
class RelationClassTable {
public:
    static RelationClassTable defaults();
    static RelationClassTable load(const std::string& path);

    // Class name for a relation ("" when unknown); subtypes (obl:agent) fall
    // back to the base relation.
    std::string class_of(const std::string& relation) const;
    bool is_traversable(const std::string& relation) const;

private:
    std::map<std::string, std::string> classes_;
};

struct TraversalCandidates {
    std::set<int> nodes;
    std::vector<DepEdge> edges;
};

// Nodes with POS in {NOUN, VERB, ADJ, PRON, PROPN, DET}; edges in the
// core-arguments / non-core-dependents / nominal-dependents classes.
TraversalCandidates traversal_candidates(const DepTree& t, const RelationClassTable& table);

}  // namespace sempar
