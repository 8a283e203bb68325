#pragma once

#include "sempar/conllu.hpp"
#include "sempar/dudes.hpp"
#include "sempar/embeddings.hpp"
#include "sempar/features.hpp"
#include "sempar/kb.hpp"
#include "sempar/lexicon.hpp"
#include "sempar/rng.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace sempar {

enum class ScoreMode { ModelScore, ObjectiveScore };
enum class Schedule { Alternate, ModelOnly, ObjectiveOnly };

ScoreMode mode_at(Schedule s, int iteration);  // alternation starts with objective

struct ChainConfig {
    int m = 50;              // sampling steps per layer
    int k = 10;              // beam width
    int candidate_cap = 20;  // top lexicon candidates per (node, kind)
    std::uint64_t seed = 0;
    Schedule schedule = Schedule::ModelOnly;

    void validate() const;
};

struct Proposal {
    ParseState state;
    std::string note;  // human-readable delta description
};

// Everything proposal generation needs to see.
struct InferenceContext {
    const TripleStore* kb = nullptr;
    const LexiconIndex* lexicon = nullptr;
    const EmbeddingSpace* embeddings = nullptr;  // optional fallback retrieval
    SourceMask source_mask;
    bool use_embeddings = false;
    double embedding_threshold = 0.4;
    std::size_t embedding_k = 50;
    std::set<DudeKind> embedding_kinds = {DudeKind::Property};
    std::string lang = "en";
    RelationClassTable relation_classes = RelationClassTable::defaults();

    FactorContext factor_context() const { return FactorContext{kb}; }

    // Property labels for embedding retrieval, from the store's rdfs:label
    // triples, filtered to property ids.
    std::map<KbId, std::string> embedding_labels() const;
};

// Ranked (kind, assignment) candidates for one node, index plus embedding
// fallback, capped per kind.
std::vector<std::pair<DudeKind, NodeAssignment>> node_candidates(
    const InferenceContext& ctx, const DepNode& node, int cap);

// The triple patterns contributed by one edge of a state, via DUDES
// application of the endpoint assignments.
std::vector<TriplePattern> edge_patterns(const ParseState& state, const EdgeKey& edge);

// L2KB proposals: joint and single-endpoint changes per traversal edge,
// pruned when the edge's pattern set is unsatisfiable.
std::vector<Proposal> propose_l2kb(const ParseState& state, const InferenceContext& ctx,
                                   int candidate_cap);

// QC proposals: QueryVar assignments to PRON/DET children filling open
// argument slots of assigned functor nodes.
std::vector<Proposal> propose_qc(const ParseState& state, const InferenceContext& ctx);

// Metropolis acceptance: accept with probability min(1, exp(next - current)).
bool accept_decision(double current_score, double proposal_score, Rng& rng);

using Scorer = std::function<double(const ParseState&)>;
using Proposer = std::function<std::vector<Proposal>(const ParseState&)>;
using AcceptedPairHook = std::function<void(const ParseState& current, const ParseState& accepted)>;

struct Scorers {
    Scorer model;
    Scorer objective;  // may be empty at test time (ModelOnly schedules)

    const Scorer& for_mode(ScoreMode m) const;
};

// One inference layer: m iterations of propose / accept / rank / top-k.
// The previous beam is always carried into the ranking pool, so the best
// state found is never lost.
std::vector<ParseState> run_layer(std::vector<ParseState> beam, const Proposer& proposer,
                                  const Scorers& scorers, const ChainConfig& config,
                                  Rng& rng, const AcceptedPairHook& hook = nullptr);

struct UninterpretableError : std::runtime_error {
    ParseState best_partial;
    UninterpretableError(std::string msg, ParseState best)
        : std::runtime_error(std::move(msg)), best_partial(std::move(best)) {}
};

struct InterpretResult {
    ConjunctiveQuery query;
    ParseState state;
    Dude dude;
};

ParseState empty_state(std::shared_ptr<const DepTree> tree);

// Bottom-up DUDES composition along the tree (post-order, siblings in span
// order). nullopt when the state assigns nothing.
std::optional<Dude> compose(const ParseState& state);

// Full two-layer pipeline. When `objectives` is given (oracle mode or
// training diagnostics) the layer schedule may draw on objective scores and
// final selection prefers the objective; otherwise model score only.
struct LayerObjectives {
    Scorer l2kb;  // linking objective
    Scorer qc;    // query-similarity objective
};

InterpretResult interpret(std::shared_ptr<const DepTree> tree, const TemplateModel& model,
                          const InferenceContext& ctx, const ChainConfig& config, Rng& rng,
                          const std::optional<LayerObjectives>& objectives = std::nullopt,
                          const AcceptedPairHook& hook = nullptr,
                          std::vector<ParseState>* final_beam = nullptr);

// Human-readable dump of a state: alpha/beta/gamma, factor scores, and the
// composed DUDES rendering.
std::string explain(const ParseState& state, const TemplateModel& model,
                    const InferenceContext& ctx);

}  // namespace sempar
