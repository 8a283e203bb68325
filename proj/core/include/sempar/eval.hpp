#pragma once

#include "sempar/trainer.hpp"

#include <optional>
#include <string>
#include <vector>

namespace sempar {

struct QuestionRecord {
    std::string id;
    std::string lang;
    std::string question;
    std::string gold_query_text;
    std::optional<std::string> inferred_query_text;
    double linking_f1 = 0.0;
    double answer_f1 = 0.0;
    std::string category;  // empty when fully correct
};

struct EvalReport {
    std::vector<QuestionRecord> records;
    double macro_linking_f1 = 0.0;  // unweighted mean, zero-scoring convention
    double macro_answer_f1 = 0.0;

    std::string csv() const;
    std::string summary(const std::string& configuration_name) const;
};

// F1 over the two queries' answer sets on the KB; Ask answers compare as
// booleans (F1 in {0, 1}).
double answer_f1(const ConjunctiveQuery& predicted, const ConjunctiveQuery& gold,
                 const TripleStore& kb);

// First matching category by precedence: resource > property > slot > type,
// then "other"; "no-parse" when there is no inferred query.
std::string categorize_error(const std::optional<ConjunctiveQuery>& inferred,
                             const ConjunctiveQuery& gold);

double eval_linking(const std::vector<double>& per_question_f1);

// Full end-to-end evaluation. Oracle mode accepts by objective score only
// (requires gold, upper-bound configuration).
EvalReport evaluate(const std::vector<TrainInstance>& dataset, const TemplateModel& model,
                    const InferenceContext& base_ctx, const ChainConfig& config,
                    bool oracle_mode);

}  // namespace sempar
