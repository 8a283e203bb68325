#pragma once

#include "sempar/inference.hpp"

#include <memory>
#include <set>
#include <string>
#include <vector>

namespace sempar {

struct TrainConfig {
    int epochs = 10;
    double learning_rate = 0.01;
    ChainConfig chain;  // chain.schedule defaults to Alternate for training

    TrainConfig() { chain.schedule = Schedule::Alternate; }
    void validate() const;
};

struct TrainInstance {
    std::string id;
    std::string lang;
    std::string question;
    std::shared_ptr<const DepTree> tree;  // preprocessed (compounds merged)
    ConjunctiveQuery gold_query;
    std::set<KbId> gold_ids;  // non-variable, non-reserved ids in the gold query
};

std::set<KbId> gold_ids_of(const ConjunctiveQuery& q);

// F1 between the state's assigned KB ids and the gold id set.
double linking_objective(const ParseState& state, const std::set<KbId>& gold_ids);

// Triple-pattern F1 under the best variable bijection.
double query_similarity(const ConjunctiveQuery& inferred, const ConjunctiveQuery& gold);

// Perceptron-style SampleRank step: update only when the model ranking
// contradicts the objective preference.
// Returns true if an update fired.
bool samplerank_update(TemplateModel& model, const ParseState& s_prev,
                       const ParseState& s_next, double objective_prev,
                       double objective_next, double learning_rate,
                       const FactorContext& ctx);

struct EpochStats {
    int epoch = 0;
    double mean_linking = 0.0;
    double mean_query_similarity = 0.0;
};

struct TrainResult {
    TemplateModel model;
    std::vector<EpochStats> log;

    std::string log_csv() const;
};

// QALD-style dataset: JSON array of {id, language, question, query,
// answers}, paired with a CoNLL-U file keyed by sent_id.
std::vector<TrainInstance> load_dataset(const std::string& json_path,
                                        const std::string& conllu_path,
                                        const std::string& lang_filter = "");

TrainResult train(const std::vector<TrainInstance>& dataset, const TrainConfig& config,
                  const InferenceContext& base_ctx);

}  // namespace sempar
