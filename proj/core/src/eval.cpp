#include "sempar/eval.hpp"

#include "sempar/query_text.hpp"

#include <algorithm>
#include <sstream>

namespace sempar {

double answer_f1(const ConjunctiveQuery& predicted, const ConjunctiveQuery& gold,
                 const TripleStore& kb) {
    ResultSet pr = kb.execute(predicted);
    ResultSet gr = kb.execute(gold);
    if (pr.form != gr.form) return 0.0;
    if (gr.form == ConjunctiveQuery::Form::Ask)
        return pr.ask_answer == gr.ask_answer ? 1.0 : 0.0;

    // Compare single-column answer sets; multi-variable rows are flattened
    // per projection column would be overkill for the paper's queries.
    auto values = [](const ResultSet& rs) {
        std::set<std::vector<Term>> v = rs.rows;
        return v;
    };
    auto pv = values(pr);
    auto gv = values(gr);
    if (pv.empty() && gv.empty()) return 1.0;
    if (pv.empty() || gv.empty()) return 0.0;
    std::size_t overlap = 0;
    for (const auto& row : pv)
        if (gv.count(row)) ++overlap;
    if (overlap == 0) return 0.0;
    double precision = double(overlap) / double(pv.size());
    double recall = double(overlap) / double(gv.size());
    return 2 * precision * recall / (precision + recall);
}

namespace {

std::set<KbId> resource_ids(const ConjunctiveQuery& q) {
    std::set<KbId> out;
    for (const auto& p : q.patterns) {
        for (const auto* t : {&p.subject, &p.object})
            if (const auto* id = std::get_if<KbId>(t))
                if (!is_reserved(*id)) out.insert(*id);
    }
    return out;
}

std::set<KbId> property_ids(const ConjunctiveQuery& q) {
    std::set<KbId> out;
    for (const auto& p : q.patterns)
        if (const auto* id = std::get_if<KbId>(&p.predicate))
            if (!is_reserved(*id)) out.insert(*id);
    return out;
}

bool has_swapped_pattern(const ConjunctiveQuery& inferred, const ConjunctiveQuery& gold) {
    auto ground = [](const PatternTerm& t) { return as_ground(t); };
    for (const auto& gp : gold.patterns) {
        for (const auto& ip : inferred.patterns) {
            if (!(gp.predicate == ip.predicate)) continue;
            auto gs = ground(gp.subject), go = ground(gp.object);
            auto is = ground(ip.subject), io = ground(ip.object);
            // Ground term moved to the opposite slot of the same property.
            if (gs && io && *gs == *io && !(is && go && *is == *go && *gs == *go)) return true;
            if (go && is && *go == *is && !(gs && io && *gs == *io && *go == *is)) return true;
        }
    }
    return false;
}

}  // namespace

std::string categorize_error(const std::optional<ConjunctiveQuery>& inferred,
                             const ConjunctiveQuery& gold) {
    if (!inferred) return "no-parse";
    if (resource_ids(*inferred) != resource_ids(gold)) return "wrong-resource";
    if (property_ids(*inferred) != property_ids(gold)) return "wrong-property";
    if (has_swapped_pattern(*inferred, gold)) return "wrong-slot";
    if (inferred->form != gold.form) return "wrong-query-type";
    return "other";
}

double eval_linking(const std::vector<double>& per_question_f1) {
    if (per_question_f1.empty()) return 0.0;
    double sum = 0;
    for (double v : per_question_f1) sum += v;
    return sum / double(per_question_f1.size());
}

std::string EvalReport::csv() const {
    std::ostringstream out;
    out << "id,lang,linking_f1,answer_f1,category,inferred_query,gold_query\n";
    out.precision(10);
    auto quote = [](const std::string& s) {
        std::string q = "\"";
        for (char c : s) {
            if (c == '"') q += '"';
            q += c;
        }
        q += "\"";
        return q;
    };
    for (const auto& r : records)
        out << r.id << "," << r.lang << "," << r.linking_f1 << "," << r.answer_f1 << ","
            << r.category << "," << quote(r.inferred_query_text.value_or("")) << ","
            << quote(r.gold_query_text) << "\n";
    out << "macro,," << macro_linking_f1 << "," << macro_answer_f1 << ",,,\n";
    return out.str();
}

std::string EvalReport::summary(const std::string& configuration_name) const {
    std::ostringstream out;
    out.precision(4);
    out << "configuration: " << configuration_name << "\n";
    out << "questions: " << records.size() << "\n";
    out << "macro linking F1: " << macro_linking_f1 << "\n";
    out << "macro QA F1:      " << macro_answer_f1 << "\n";
    std::map<std::string, int> categories;
    for (const auto& r : records)
        if (!r.category.empty()) ++categories[r.category];
    for (const auto& [cat, n] : categories)
        out << "  " << cat << ": " << n << "\n";
    return out.str();
}

EvalReport evaluate(const std::vector<TrainInstance>& dataset, const TemplateModel& model,
                    const InferenceContext& base_ctx, const ChainConfig& config,
                    bool oracle_mode) {
    EvalReport report;
    double linking_sum = 0, answer_sum = 0;

    for (const auto& inst : dataset) {
        InferenceContext ctx = base_ctx;
        ctx.lang = inst.lang;

        QuestionRecord rec;
        rec.id = inst.id;
        rec.lang = inst.lang;
        rec.question = inst.question;
        rec.gold_query_text = write_query(inst.gold_query);

        std::optional<LayerObjectives> objectives;
        ChainConfig cfg = config;
        if (oracle_mode) {
            cfg.schedule = Schedule::ObjectiveOnly;
            objectives = LayerObjectives{
                [&inst](const ParseState& s) { return linking_objective(s, inst.gold_ids); },
                [&inst](const ParseState& s) {
                    try {
                        auto d = compose(s);
                        if (d) return query_similarity(to_query(*d), inst.gold_query);
                    } catch (const DudesError&) {
                    } catch (const QueryError&) {
                    }
                    return 0.0;
                }};
        }

        Rng rng(derive_seed(config.seed, std::string(oracle_mode ? "oracle/" : "eval/") +
                                             inst.id));
        std::optional<ConjunctiveQuery> inferred;
        try {
            auto result = interpret(inst.tree, model, ctx, cfg, rng, objectives);
            inferred = result.query;
            rec.inferred_query_text = write_query(result.query);
            rec.linking_f1 = linking_objective(result.state, inst.gold_ids);
            if (ctx.kb) rec.answer_f1 = answer_f1(result.query, inst.gold_query, *ctx.kb);
        } catch (const UninterpretableError& e) {
            rec.linking_f1 = linking_objective(e.best_partial, inst.gold_ids);
            rec.answer_f1 = 0.0;
        } catch (const QueryError&) {
            rec.answer_f1 = 0.0;  // predicted query failed to execute
        }
        if (rec.answer_f1 < 1.0) rec.category = categorize_error(inferred, inst.gold_query);
        linking_sum += rec.linking_f1;
        answer_sum += rec.answer_f1;
        report.records.push_back(std::move(rec));
    }

    if (!report.records.empty()) {
        report.macro_linking_f1 = linking_sum / double(report.records.size());
        report.macro_answer_f1 = answer_sum / double(report.records.size());
    }
    return report;
}

}  // namespace sempar
