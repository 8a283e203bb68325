// Microbenchmarks for the hot paths of the parsing pipeline: query
// evaluation, lexicon lookup, feature extraction, proposal generation, and
// end-to-end interpretation on the bundled fixtures.

#include "sempar/inference.hpp"
#include "sempar/trainer.hpp"

#include <benchmark/benchmark.h>

#include <memory>

using namespace sempar;

#ifndef SEMPAR_DATA_DIR
#error "SEMPAR_DATA_DIR must be defined by the build"
#endif

namespace {

std::string data(const std::string& name) {
    return std::string(SEMPAR_DATA_DIR) + "/" + name;
}

struct Fixture {
    TripleStore kb;
    LexiconIndex lexicon;
    InferenceContext ctx;
    std::vector<TrainInstance> dataset;

    Fixture() {
        kb = load_turtle_file(data("toy_kb.ttl"));
        kb.freeze();
        lexicon = LexiconIndex::load_tsv_file(data("lexicon.tsv"));
        ctx.kb = &kb;
        ctx.lexicon = &lexicon;
        dataset = load_dataset(data("micro_corpus.json"), data("micro_corpus.conllu"));
    }
};

Fixture& fixture() {
    static Fixture f;
    return f;
}

void BM_ExecuteJoin(benchmark::State& state) {
    auto& f = fixture();
    ConjunctiveQuery q;
    q.form = ConjunctiveQuery::Form::Select;
    q.projection = {"w"};
    q.patterns = {{Variable{"w"}, KbId{"dbo", "author", IdKind::ObjectProperty}, Variable{"p"}},
                  {Variable{"p"}, rdf_type(), KbId{"dbo", "Person", IdKind::Class}}};
    for (auto _ : state) benchmark::DoNotOptimize(f.kb.execute(q));
}
BENCHMARK(BM_ExecuteJoin);

void BM_Satisfiability(benchmark::State& state) {
    auto& f = fixture();
    std::vector<TriplePattern> patterns = {
        {KbId{"dbr", "Wikipedia"}, KbId{"dbo", "author", IdKind::ObjectProperty}, Variable{"y"}}};
    for (auto _ : state) benchmark::DoNotOptimize(f.kb.is_satisfiable(patterns));
}
BENCHMARK(BM_Satisfiability);

void BM_LexiconLookup(benchmark::State& state) {
    auto& f = fixture();
    for (auto _ : state)
        benchmark::DoNotOptimize(f.lexicon.lookup("total population", DudeKind::Property, "en"));
}
BENCHMARK(BM_LexiconLookup);

void BM_StringSimilarity(benchmark::State& state) {
    for (auto _ : state)
        benchmark::DoNotOptimize(string_similarity("populationTotal", "total population"));
}
BENCHMARK(BM_StringSimilarity);

void BM_ProposeL2kb(benchmark::State& state) {
    auto& f = fixture();
    ParseState empty;
    empty.tree = f.dataset[0].tree;
    for (auto _ : state) benchmark::DoNotOptimize(propose_l2kb(empty, f.ctx, 20));
}
BENCHMARK(BM_ProposeL2kb);

void BM_ModelScore(benchmark::State& state) {
    auto& f = fixture();
    ParseState s;
    s.tree = f.dataset[0].tree;
    s.alpha[2] = {KbId{"dbo", "author", IdKind::ObjectProperty}, std::nullopt, 0.75};
    s.beta[2] = DudeKind::Property;
    s.alpha[3] = {KbId{"dbr", "Wikipedia"}, std::nullopt, 1.0};
    s.beta[3] = DudeKind::Resource;
    s.beta[1] = DudeKind::QueryVar;
    s.gamma[EdgeKey{2, 3}] = 1;
    s.gamma[EdgeKey{2, 1}] = 2;
    auto model = TemplateModel::default_model();
    FactorContext ctx = f.ctx.factor_context();
    for (auto _ : state) benchmark::DoNotOptimize(model_score(s, model, ctx));
}
BENCHMARK(BM_ModelScore);

void BM_Interpret(benchmark::State& state) {
    auto& f = fixture();
    const auto& inst = f.dataset[0];
    auto model = TemplateModel::default_model();
    LayerObjectives obj;
    obj.l2kb = [&](const ParseState& s) { return linking_objective(s, inst.gold_ids); };
    obj.qc = [&](const ParseState& s) {
        try {
            auto d = compose(s);
            if (!d || !d->saturated()) return 0.0;
            return query_similarity(to_query(*d), inst.gold_query);
        } catch (const std::exception&) {
            return 0.0;
        }
    };
    ChainConfig config;
    config.m = 25;
    config.k = 10;
    config.schedule = Schedule::ObjectiveOnly;
    for (auto _ : state) {
        Rng rng(derive_seed(7, "bench/" + inst.id));
        benchmark::DoNotOptimize(interpret(inst.tree, model, f.ctx, config, rng, obj));
    }
}
BENCHMARK(BM_Interpret);

void BM_TrainEpoch(benchmark::State& state) {
    auto& f = fixture();
    TrainConfig config;
    config.epochs = 1;
    config.chain.m = 25;
    config.chain.k = 10;
    config.chain.seed = 7;
    for (auto _ : state) benchmark::DoNotOptimize(train(f.dataset, config, f.ctx));
}
BENCHMARK(BM_TrainEpoch);

}  // namespace

BENCHMARK_MAIN();
