#include "sempar/trainer.hpp"

#include "sempar/query_text.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>

namespace sempar {

void TrainConfig::validate() const {
    if (epochs < 1) throw std::runtime_error("train config: epochs must be >= 1");
    if (learning_rate < 0) throw std::runtime_error("train config: learning rate must be >= 0");
    chain.validate();
}

std::set<KbId> gold_ids_of(const ConjunctiveQuery& q) {
    std::set<KbId> ids;
    for (const auto& p : q.patterns)
        for (const auto* t : {&p.subject, &p.predicate, &p.object})
            if (const auto* id = std::get_if<KbId>(t))
                if (!is_reserved(*id)) ids.insert(*id);
    return ids;
}

double linking_objective(const ParseState& state, const std::set<KbId>& gold_ids) {
    std::set<KbId> inferred;
    for (const auto& [node, a] : state.alpha) {
        inferred.insert(a.kb_id);
        if (a.restriction_object)
            if (const auto* id = std::get_if<KbId>(&*a.restriction_object))
                inferred.insert(*id);
    }
    if (inferred.empty() && gold_ids.empty()) return 1.0;
    if (inferred.empty() || gold_ids.empty()) return 0.0;
    std::size_t overlap = 0;
    for (const auto& id : inferred)
        if (gold_ids.count(id)) ++overlap;
    if (overlap == 0) return 0.0;
    double precision = double(overlap) / double(inferred.size());
    double recall = double(overlap) / double(gold_ids.size());
    return 2 * precision * recall / (precision + recall);
}

namespace {

std::vector<std::string> query_variables(const ConjunctiveQuery& q) {
    std::vector<std::string> vars;
    for (const auto& p : q.patterns)
        for (const auto* t : {&p.subject, &p.predicate, &p.object})
            if (const auto* v = std::get_if<Variable>(t))
                if (std::find(vars.begin(), vars.end(), v->name) == vars.end())
                    vars.push_back(v->name);
    return vars;
}

PatternTerm map_term(const PatternTerm& t, const std::map<std::string, std::string>& m) {
    if (const auto* v = std::get_if<Variable>(&t)) {
        auto it = m.find(v->name);
        if (it != m.end()) return Variable{it->second};
        return Variable{"\x01unmapped:" + v->name};
    }
    return t;
}

std::size_t matched_patterns(const ConjunctiveQuery& inferred, const ConjunctiveQuery& gold,
                             const std::map<std::string, std::string>& m) {
    std::vector<bool> used(gold.patterns.size(), false);
    std::size_t matches = 0;
    for (const auto& p : inferred.patterns) {
        TriplePattern mapped{map_term(p.subject, m), map_term(p.predicate, m),
                             map_term(p.object, m)};
        for (std::size_t j = 0; j < gold.patterns.size(); ++j) {
            if (!used[j] && gold.patterns[j] == mapped) {
                used[j] = true;
                ++matches;
                break;
            }
        }
    }
    return matches;
}

void best_mapping(const std::vector<std::string>& inf_vars,
                  const std::vector<std::string>& gold_vars, std::size_t i,
                  std::map<std::string, std::string>& m, std::set<std::string>& taken,
                  const ConjunctiveQuery& inferred, const ConjunctiveQuery& gold,
                  std::size_t& best) {
    if (i == inf_vars.size()) {
        best = std::max(best, matched_patterns(inferred, gold, m));
        return;
    }
    // leave unmapped
    best_mapping(inf_vars, gold_vars, i + 1, m, taken, inferred, gold, best);
    for (const auto& g : gold_vars) {
        if (taken.count(g)) continue;
        taken.insert(g);
        m[inf_vars[i]] = g;
        best_mapping(inf_vars, gold_vars, i + 1, m, taken, inferred, gold, best);
        m.erase(inf_vars[i]);
        taken.erase(g);
    }
}

}  // namespace

double query_similarity(const ConjunctiveQuery& inferred, const ConjunctiveQuery& gold) {
    if (inferred.patterns.empty() || gold.patterns.empty()) return 0.0;
    auto inf_vars = query_variables(inferred);
    auto gold_vars = query_variables(gold);
    std::size_t best = 0;
    std::map<std::string, std::string> m;
    std::set<std::string> taken;
    best_mapping(inf_vars, gold_vars, 0, m, taken, inferred, gold, best);
    if (best == 0) return 0.0;
    double precision = double(best) / double(inferred.patterns.size());
    double recall = double(best) / double(gold.patterns.size());
    return 2 * precision * recall / (precision + recall);
}

namespace {

std::map<std::string, FeatureVector> template_feature_sums(const ParseState& s,
                                                           const FactorContext& ctx) {
    std::map<std::string, FeatureVector> sums;
    for (const auto& f : roll_out(s, ctx)) {
        auto& acc = sums[f.template_id];
        for (const auto& [name, v] : f.features) acc[name] += v;
    }
    return sums;
}

}  // namespace

bool samplerank_update(TemplateModel& model, const ParseState& s_prev,
                       const ParseState& s_next, double objective_prev,
                       double objective_next, double learning_rate,
                       const FactorContext& ctx) {
    if (objective_prev == objective_next) return false;  // no preference
    const ParseState& preferred = objective_next > objective_prev ? s_next : s_prev;
    const ParseState& dispreferred = objective_next > objective_prev ? s_prev : s_next;

    if (model_score(preferred, model, ctx) > model_score(dispreferred, model, ctx))
        return false;  // model already agrees

    auto pref = template_feature_sums(preferred, ctx);
    auto disp = template_feature_sums(dispreferred, ctx);
    std::set<std::string> ids;
    for (const auto& [id, f] : pref) ids.insert(id);
    for (const auto& [id, f] : disp) ids.insert(id);
    for (const auto& id : ids) {
        FeatureVector delta = diff(pref[id], disp[id]);
        auto& theta = model.at(id).theta;
        for (const auto& [name, v] : delta) {
            double step = learning_rate * v;
            if (step != 0.0) theta[name] += step;
        }
    }
    return true;
}

std::string TrainResult::log_csv() const {
    std::ostringstream out;
    out << "epoch,mean_linking_f1,mean_query_similarity\n";
    out.precision(10);
    for (const auto& e : log)
        out << e.epoch << "," << e.mean_linking << "," << e.mean_query_similarity << "\n";
    return out.str();
}

std::vector<TrainInstance> load_dataset(const std::string& json_path,
                                        const std::string& conllu_path,
                                        const std::string& lang_filter) {
    std::ifstream in(json_path);
    if (!in) throw std::runtime_error("cannot open dataset file: " + json_path);
    nlohmann::json doc;
    in >> doc;
    if (!doc.is_array()) throw std::runtime_error("dataset must be a JSON array");

    std::map<std::string, std::shared_ptr<const DepTree>> trees;
    for (auto& t : parse_conllu_file(conllu_path)) {
        auto merged = merge_compounds(t);
        std::string key = merged.sent_id;
        trees[key] = std::make_shared<const DepTree>(std::move(merged));
    }

    std::vector<TrainInstance> out;
    for (const auto& item : doc) {
        TrainInstance inst;
        inst.id = item.at("id").get<std::string>();
        inst.lang = item.value("language", "en");
        if (!lang_filter.empty() && inst.lang != lang_filter) continue;
        inst.question = item.value("question", "");
        inst.gold_query = parse_query(item.at("query").get<std::string>());
        inst.gold_ids = gold_ids_of(inst.gold_query);
        auto it = trees.find(inst.id);
        if (it == trees.end())
            throw std::runtime_error("dataset instance '" + inst.id +
                                     "' has no CoNLL-U sentence with that sent_id");
        inst.tree = it->second;
        out.push_back(std::move(inst));
    }
    return out;
}

TrainResult train(const std::vector<TrainInstance>& dataset, const TrainConfig& config,
                  const InferenceContext& base_ctx) {
    config.validate();
    if (dataset.empty()) throw std::runtime_error("train: dataset is empty");

    TrainResult result;
    result.model = TemplateModel::default_model();
    FactorContext fctx = base_ctx.factor_context();

    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        // Seeded per-epoch shuffle.
        std::vector<std::size_t> order(dataset.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        Rng shuffle_rng(derive_seed(config.chain.seed, "shuffle/" + std::to_string(epoch)));
        for (std::size_t i = order.size(); i > 1; --i)
            std::swap(order[i - 1], order[shuffle_rng.below(i)]);

        double linking_sum = 0.0, qsim_sum = 0.0;
        std::size_t counted = 0;

        for (std::size_t idx : order) {
            const TrainInstance& inst = dataset[idx];
            InferenceContext ctx = base_ctx;
            ctx.lang = inst.lang;

            if (ctx.kb) {
                try {
                    ctx.kb->execute(inst.gold_query);
                } catch (const QueryError& e) {
                    std::cerr << "warning: skipping instance '" << inst.id
                              << "': gold query does not execute: " << e.what() << "\n";
                    continue;
                }
            }

            Scorer model_scorer = [&](const ParseState& s) {
                return model_score(s, result.model, fctx);
            };

            // L2KB chain under the linking objective.
            std::map<std::string, double> link_cache;
            Scorer linking = [&](const ParseState& s) {
                auto key = s.key();
                auto it = link_cache.find(key);
                if (it != link_cache.end()) return it->second;
                double v = linking_objective(s, inst.gold_ids);
                link_cache.emplace(std::move(key), v);
                return v;
            };
            AcceptedPairHook l2kb_hook = [&](const ParseState& prev, const ParseState& next) {
                samplerank_update(result.model, prev, next, linking(prev), linking(next),
                                  config.learning_rate, fctx);
            };
            Proposer l2kb = [&](const ParseState& s) {
                return propose_l2kb(s, ctx, config.chain.candidate_cap);
            };
            Rng l2kb_rng(derive_seed(config.chain.seed, "train/" + std::to_string(epoch) +
                                                            "/" + inst.id + "/l2kb"));
            auto beam = run_layer({empty_state(inst.tree)}, l2kb,
                                  Scorers{model_scorer, linking}, config.chain, l2kb_rng,
                                  l2kb_hook);

            double best_linking = 0.0;
            for (const auto& s : beam) best_linking = std::max(best_linking, linking(s));

            // QC chain under the query-similarity objective.
            std::map<std::string, double> qsim_cache;
            Scorer qsim = [&](const ParseState& s) {
                auto key = s.key();
                auto it = qsim_cache.find(key);
                if (it != qsim_cache.end()) return it->second;
                double v = 0.0;
                try {
                    auto d = compose(s);
                    if (d) v = query_similarity(to_query(*d), inst.gold_query);
                } catch (const DudesError&) {
                } catch (const QueryError&) {
                }
                qsim_cache.emplace(std::move(key), v);
                return v;
            };
            AcceptedPairHook qc_hook = [&](const ParseState& prev, const ParseState& next) {
                samplerank_update(result.model, prev, next, qsim(prev), qsim(next),
                                  config.learning_rate, fctx);
            };
            Proposer qc = [&](const ParseState& s) { return propose_qc(s, ctx); };
            Rng qc_rng(derive_seed(config.chain.seed, "train/" + std::to_string(epoch) +
                                                          "/" + inst.id + "/qc"));
            beam = run_layer(std::move(beam), qc, Scorers{model_scorer, qsim}, config.chain,
                             qc_rng, qc_hook);

            double best_qsim = 0.0;
            for (const auto& s : beam) best_qsim = std::max(best_qsim, qsim(s));

            linking_sum += best_linking;
            qsim_sum += best_qsim;
            ++counted;
        }

        EpochStats stats;
        stats.epoch = epoch + 1;
        stats.mean_linking = counted ? linking_sum / double(counted) : 0.0;
        stats.mean_query_similarity = counted ? qsim_sum / double(counted) : 0.0;
        result.log.push_back(stats);
    }
    return result;
}

}  // namespace sempar
