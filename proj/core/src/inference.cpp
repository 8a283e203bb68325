#include "sempar/inference.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace sempar {

ScoreMode mode_at(Schedule s, int iteration) {
    switch (s) {
        case Schedule::ModelOnly: return ScoreMode::ModelScore;
        case Schedule::ObjectiveOnly: return ScoreMode::ObjectiveScore;
        case Schedule::Alternate:
            return iteration % 2 == 0 ? ScoreMode::ObjectiveScore : ScoreMode::ModelScore;
    }
    return ScoreMode::ModelScore;
}

void ChainConfig::validate() const {
    if (m < 0) throw std::runtime_error("chain config: m must be >= 0");
    if (k < 1) throw std::runtime_error("chain config: k must be >= 1");
    if (candidate_cap < 1) throw std::runtime_error("chain config: candidate cap must be >= 1");
}

const Scorer& Scorers::for_mode(ScoreMode m) const {
    if (m == ScoreMode::ModelScore) {
        if (!model) throw std::logic_error("model scorer not configured");
        return model;
    }
    if (!objective) throw std::logic_error("objective scorer not configured");
    return objective;
}

std::map<KbId, std::string> InferenceContext::embedding_labels() const {
    std::map<KbId, std::string> out;
    if (!kb) return out;
    for (const auto& [id, label] : kb->labels()) {
        IdKind k = kb->kind_of(id);
        if (k == IdKind::ObjectProperty || k == IdKind::DatatypeProperty) {
            KbId annotated = id;
            annotated.kind = k;
            out.emplace(annotated, label);
        }
    }
    return out;
}

namespace {

IdKind id_kind_for_dude(DudeKind k, const TripleStore* kb, const KbId& id) {
    switch (k) {
        case DudeKind::Resource: return IdKind::Resource;
        case DudeKind::Class: return IdKind::Class;
        case DudeKind::Property:
        case DudeKind::RestrictionClass: {
            if (kb) {
                IdKind inferred = kb->kind_of(id);
                if (inferred == IdKind::DatatypeProperty) return inferred;
            }
            return IdKind::ObjectProperty;
        }
        case DudeKind::QueryVar: return IdKind::Resource;
    }
    return IdKind::Resource;
}

bool slotted(DudeKind k) {
    return k == DudeKind::Property || k == DudeKind::RestrictionClass;
}

std::optional<Dude> node_dude(const ParseState& state, int node, VarGen& vars) {
    auto b = state.beta.find(node);
    if (b == state.beta.end()) return std::nullopt;
    if (b->second == DudeKind::QueryVar) return make_dude(DudeKind::QueryVar, std::nullopt, vars);
    auto a = state.alpha.find(node);
    if (a == state.alpha.end()) return std::nullopt;
    return make_dude(b->second, a->second.kb_id, vars, a->second.restriction_object);
}

// Conjunction merge without slot filling.
Dude merge_dudes(const Dude& a, const Dude& b) {
    Dude out = a;
    out.conditions.insert(out.conditions.end(), b.conditions.begin(), b.conditions.end());
    out.referents.insert(b.referents.begin(), b.referents.end());
    for (const auto& v : b.projection) out.projection.push_back(v);
    out.slots.insert(out.slots.end(), b.slots.begin(), b.slots.end());
    return out;
}

bool has_slot(const Dude& d, int idx) {
    return std::any_of(d.slots.begin(), d.slots.end(),
                       [&](const Slot& s) { return s.arg_index == idx; });
}

}  // namespace

std::vector<TriplePattern> edge_patterns(const ParseState& state, const EdgeKey& edge) {
    VarGen vars;
    auto pd = node_dude(state, edge.parent, vars);
    auto cd = node_dude(state, edge.child, vars);
    auto g = state.gamma.find(edge);

    auto has_main = [](const Dude& d) { return d.main_variable || d.binding; };
    if (pd && cd) {
        if (g != state.gamma.end()) {
            int idx = g->second;
            // A DUDES can only fill a slot when it has a main term to unify.
            if (has_slot(*pd, idx) && has_main(*cd)) return apply(*pd, *cd, idx, vars).conditions;
            if (has_slot(*cd, idx) && has_main(*pd)) return apply(*cd, *pd, idx, vars).conditions;
        }
        return merge_dudes(*pd, *cd).conditions;
    }
    if (pd) return pd->conditions;
    if (cd) return cd->conditions;
    return {};
}

std::vector<std::pair<DudeKind, NodeAssignment>> node_candidates(
    const InferenceContext& ctx, const DepNode& node, int cap) {
    std::vector<std::pair<DudeKind, NodeAssignment>> out;
    static const DudeKind kKinds[] = {DudeKind::Resource, DudeKind::Class,
                                      DudeKind::Property, DudeKind::RestrictionClass};
    for (DudeKind kind : kKinds) {
        std::vector<RankedCandidate> cands;
        if (ctx.lexicon) {
            cands = ctx.lexicon->lookup(node.lemma, kind, ctx.lang, ctx.source_mask);
            if (cands.empty() && node.surface != node.lemma)
                cands = ctx.lexicon->lookup(node.surface, kind, ctx.lang, ctx.source_mask);
        }
        if (ctx.use_embeddings && ctx.embeddings && ctx.embedding_kinds.count(kind)) {
            auto emb = ctx.embeddings->candidates(ctx.embedding_labels(), node.lemma,
                                                  ctx.embedding_threshold, ctx.embedding_k);
            cands = merge_candidates(std::move(cands), emb);
        }
        if (int(cands.size()) > cap) cands.resize(cap);
        for (const auto& c : cands) {
            KbId id = c.kb_id;
            id.kind = id_kind_for_dude(kind, ctx.kb, id);
            out.push_back({kind, NodeAssignment{id, c.restriction_object, c.score}});
        }
    }
    return out;
}

std::vector<Proposal> propose_l2kb(const ParseState& state, const InferenceContext& ctx,
                                   int candidate_cap) {
    std::vector<Proposal> out;
    auto trav = traversal_candidates(*state.tree, ctx.relation_classes);
    std::string current_key = state.key();
    std::set<std::string> seen;

    for (const auto& edge : trav.edges) {
        EdgeKey ek{edge.parent, edge.child};

        // Assignment options per endpoint: keep the current value, or one of
        // the lexicon/embedding candidates.
        using Option = std::optional<std::pair<DudeKind, NodeAssignment>>;
        auto options_for = [&](int node_id) {
            std::vector<Option> opts = {std::nullopt};  // keep
            if (trav.nodes.count(node_id)) {
                auto cands = node_candidates(ctx, state.tree->node(node_id), candidate_cap);
                for (auto& c : cands) opts.push_back(std::move(c));
            }
            return opts;
        };
        auto parent_opts = options_for(edge.parent);
        auto child_opts = options_for(edge.child);

        for (const auto& po : parent_opts) {
            for (const auto& co : child_opts) {
                ParseState base = state;
                std::ostringstream note;
                note << edge.relation << "(" << edge.parent << "," << edge.child << ")";
                if (po) {
                    base.beta[edge.parent] = po->first;
                    base.alpha[edge.parent] = po->second;
                    note << " p=" << po->second.kb_id.str() << "/" << dude_kind_name(po->first);
                }
                if (co) {
                    base.beta[edge.child] = co->first;
                    base.alpha[edge.child] = co->second;
                    note << " c=" << co->second.kb_id.str() << "/" << dude_kind_name(co->first);
                }

                // Which argument indexes make sense for the resulting kinds.
                auto kind_of = [&](int node_id) -> std::optional<DudeKind> {
                    auto it = base.beta.find(node_id);
                    if (it == base.beta.end()) return std::nullopt;
                    return it->second;
                };
                auto pk = kind_of(edge.parent);
                auto ck = kind_of(edge.child);
                std::vector<std::optional<int>> arg_opts = {std::nullopt};
                // An argument index is only meaningful when both endpoints are
                // assigned and one of them takes arguments.
                if (pk && ck) {
                    DudeKind functor_kind = DudeKind::QueryVar;
                    DudeKind arg_kind = DudeKind::QueryVar;
                    if (slotted(*pk)) {
                        functor_kind = *pk;
                        arg_kind = *ck;
                    } else if (slotted(*ck)) {
                        functor_kind = *ck;
                        arg_kind = *pk;
                    }
                    // The argument must have a main term to fill the slot; a
                    // Property DUDES has none.
                    if (slotted(functor_kind) && arg_kind != DudeKind::Property) {
                        arg_opts.push_back(1);
                        if (functor_kind == DudeKind::Property) arg_opts.push_back(2);
                    }
                }

                for (const auto& arg : arg_opts) {
                    ParseState next = base;
                    std::string n = note.str();
                    if (arg) {
                        next.gamma[ek] = *arg;
                        n += " arg=" + std::to_string(*arg);
                    }
                    std::string key = next.key();
                    if (key == current_key || !seen.insert(key).second) continue;
                    auto patterns = edge_patterns(next, ek);
                    if (!patterns.empty() && ctx.kb && !ctx.kb->is_satisfiable(patterns))
                        continue;  // satisfiability pruning
                    out.push_back({std::move(next), std::move(n)});
                }
            }
        }
    }
    return out;
}

std::vector<Proposal> propose_qc(const ParseState& state, const InferenceContext& ctx) {
    std::vector<Proposal> out;
    auto trav = traversal_candidates(*state.tree, ctx.relation_classes);

    // Argument indexes already consumed per functor node.
    std::map<int, std::set<int>> used;
    for (const auto& [edge, idx] : state.gamma) {
        auto pk = state.beta.find(edge.parent);
        auto ck = state.beta.find(edge.child);
        if (pk != state.beta.end() && slotted(pk->second))
            used[edge.parent].insert(idx);
        else if (ck != state.beta.end() && slotted(ck->second))
            used[edge.child].insert(idx);
    }

    std::set<std::string> seen;
    for (const auto& [node, kind] : state.beta) {
        if (!slotted(kind) || !state.alpha.count(node)) continue;
        std::set<int> open = kind == DudeKind::Property ? std::set<int>{1, 2}
                                                        : std::set<int>{1};
        for (int u : used[node]) open.erase(u);
        if (open.empty()) continue;

        for (const auto& edge : trav.edges) {
            int other;
            if (edge.parent == node) other = edge.child;
            else if (edge.child == node) other = edge.parent;
            else continue;
            EdgeKey ek{edge.parent, edge.child};
            if (state.gamma.count(ek)) continue;
            const DepNode& on = state.tree->node(other);
            if (on.upos != "PRON" && on.upos != "DET") continue;
            if (state.beta.count(other)) continue;

            for (int idx : open) {
                ParseState next = state;
                next.beta[other] = DudeKind::QueryVar;
                next.gamma[ek] = idx;
                std::string key = next.key();
                if (!seen.insert(key).second) continue;
                std::ostringstream note;
                note << "QueryVar(" << other << ") " << edge.relation << " arg=" << idx;
                out.push_back({std::move(next), note.str()});
            }
        }
    }
    return out;
}

bool accept_decision(double current_score, double proposal_score, Rng& rng) {
    if (proposal_score >= current_score) return true;
    return rng.uniform() < std::exp(proposal_score - current_score);
}

std::vector<ParseState> run_layer(std::vector<ParseState> beam, const Proposer& proposer,
                                  const Scorers& scorers, const ChainConfig& config,
                                  Rng& rng, const AcceptedPairHook& hook) {
    config.validate();
    if (beam.empty()) return beam;

    // Proposal generation is deterministic per state; cache by state key.
    std::map<std::string, std::vector<Proposal>> proposal_cache;

    for (int it = 0; it < config.m; ++it) {
        const Scorer& score = scorers.for_mode(mode_at(config.schedule, it));

        std::vector<std::pair<double, ParseState>> pool;
        std::set<std::string> pooled;
        auto add = [&](double sc, const ParseState& s) {
            if (pooled.insert(s.key()).second) pool.push_back({sc, s});
        };

        for (const auto& s : beam) {
            double s_score = score(s);
            add(s_score, s);  // the previous beam is always ranked again
            auto key = s.key();
            auto it_cache = proposal_cache.find(key);
            if (it_cache == proposal_cache.end())
                it_cache = proposal_cache.emplace(key, proposer(s)).first;
            for (const auto& p : it_cache->second) {
                double p_score = score(p.state);
                if (accept_decision(s_score, p_score, rng)) {
                    if (hook) hook(s, p.state);
                    add(p_score, p.state);
                }
            }
        }

        std::sort(pool.begin(), pool.end(),
                  [](const auto& a, const auto& b) {
                      if (a.first != b.first) return a.first > b.first;
                      return a.second.key() < b.second.key();
                  });
        if (int(pool.size()) > config.k) pool.resize(config.k);
        beam.clear();
        for (auto& [sc, s] : pool) beam.push_back(std::move(s));
    }
    return beam;
}

ParseState empty_state(std::shared_ptr<const DepTree> tree) {
    ParseState s;
    s.tree = std::move(tree);
    return s;
}

namespace {

std::optional<Dude> compose_node(const ParseState& state, int node, VarGen& vars) {
    std::optional<Dude> own = node_dude(state, node, vars);
    for (const DepEdge* e : state.tree->children_of(node)) {
        auto cd = compose_node(state, e->child, vars);
        if (!cd) continue;
        auto g = state.gamma.find(EdgeKey{e->parent, e->child});
        if (own && g != state.gamma.end()) {
            int idx = g->second;
            auto has_main = [](const Dude& d) { return d.main_variable || d.binding; };
            if (has_slot(*own, idx) && has_main(*cd)) {
                own = apply(*own, *cd, idx, vars);
            } else if (has_slot(*cd, idx) && has_main(*own)) {
                own = apply(*cd, *own, idx, vars);
            } else {
                own = merge_dudes(*own, *cd);
            }
        } else if (own) {
            own = merge_dudes(*own, *cd);
        } else {
            own = cd;
        }
    }
    return own;
}

}  // namespace

std::optional<Dude> compose(const ParseState& state) {
    VarGen vars;
    return compose_node(state, state.tree->root, vars);
}

InterpretResult interpret(std::shared_ptr<const DepTree> tree, const TemplateModel& model,
                          const InferenceContext& ctx, const ChainConfig& config, Rng& rng,
                          const std::optional<LayerObjectives>& objectives,
                          const AcceptedPairHook& hook,
                          std::vector<ParseState>* final_beam) {
    ChainConfig layer_config = config;
    if (!objectives) layer_config.schedule = Schedule::ModelOnly;

    FactorContext fctx = ctx.factor_context();
    Scorer model_scorer = [&](const ParseState& s) { return model_score(s, model, fctx); };

    Scorers l2kb_scorers{model_scorer, objectives ? objectives->l2kb : Scorer{}};
    Proposer l2kb = [&](const ParseState& s) {
        return propose_l2kb(s, ctx, config.candidate_cap);
    };
    auto beam = run_layer({empty_state(tree)}, l2kb, l2kb_scorers, layer_config, rng, hook);

    Scorers qc_scorers{model_scorer, objectives ? objectives->qc : Scorer{}};
    Proposer qc = [&](const ParseState& s) { return propose_qc(s, ctx); };
    beam = run_layer(std::move(beam), qc, qc_scorers, layer_config, rng, hook);

    // Final selection: highest score first, saturated states only.
    Scorer selector = objectives ? objectives->qc : model_scorer;
    std::stable_sort(beam.begin(), beam.end(), [&](const ParseState& a, const ParseState& b) {
        double sa = selector(a), sb = selector(b);
        if (sa != sb) return sa > sb;
        return a.key() < b.key();
    });
    if (final_beam) *final_beam = beam;

    for (const auto& s : beam) {
        try {
            auto d = compose(s);
            if (!d) continue;
            auto q = to_query(*d);
            return InterpretResult{std::move(q), s, std::move(*d)};
        } catch (const DudesError&) {
            continue;  // unsaturated or ill-formed composition
        } catch (const QueryError&) {
            continue;
        }
    }
    ParseState best = beam.empty() ? empty_state(tree) : beam.front();
    throw UninterpretableError("no saturated interpretation found for sentence " +
                                   tree->sent_id,
                               std::move(best));
}

std::string explain(const ParseState& state, const TemplateModel& model,
                    const InferenceContext& ctx) {
    std::ostringstream out;
    out << "# sentence: " << state.tree->sent_id << "\n";
    for (const auto& n : state.tree->nodes) {
        out << "node " << n.id << " '" << n.surface << "' (" << n.upos << ")";
        auto b = state.beta.find(n.id);
        if (b != state.beta.end()) out << " beta=" << dude_kind_name(b->second);
        auto a = state.alpha.find(n.id);
        if (a != state.alpha.end()) {
            out << " alpha=" << a->second.kb_id.str();
            if (a->second.restriction_object)
                out << "|" << term_str(*a->second.restriction_object);
        }
        out << "\n";
    }
    for (const auto& e : state.tree->edges) {
        out << "edge " << e.relation << "(" << e.parent << "," << e.child << ")";
        auto g = state.gamma.find(EdgeKey{e.parent, e.child});
        if (g != state.gamma.end()) out << " gamma=" << g->second;
        out << "\n";
    }
    FactorContext fctx = ctx.factor_context();
    for (const auto& f : roll_out(state, fctx))
        out << "factor " << f.template_id << "[" << f.scope_key
            << "] score=" << dot(f.features, model.at(f.template_id).theta) << "\n";
    out << "model_score " << model_score(state, model, fctx) << "\n";
    try {
        auto d = compose(state);
        if (d) out << "dudes:\n" << render(*d);
    } catch (const DudesError& e) {
        out << "dudes: <" << e.what() << ">\n";
    }
    return out.str();
}

}  // namespace sempar
