// Command-line entry point: train / parse / eval / lexicon subcommands.
//
// Exit codes: 0 success, 1 validation error, 2 runtime error.

#include "sempar/eval.hpp"
#include "sempar/query_text.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace sempar;

struct RunConfig {
    std::string kb_path;
    std::vector<std::string> lexicon_paths;
    std::string embeddings_path;
    std::string stopwords_path;
    std::string dataset_path;
    std::string conllu_path;
    std::string relation_classes_path;
    std::string model_path;

    int epochs = 10;
    double learning_rate = 0.01;
    int k = 10;
    int m = 50;
    int candidate_cap = 20;
    double embedding_threshold = 0.4;
    std::size_t embedding_k = 50;
    std::uint64_t seed = 0;
    std::string lang = "en";
    int jobs = 1;

    bool kb_labels = true;
    bool external_lexicon = true;
    bool manual_dict = true;
    bool translated_labels = true;
    bool use_embeddings = false;

    SourceMask source_mask() const {
        return SourceMask{kb_labels, external_lexicon, manual_dict, translated_labels};
    }
};

// Materialized inputs for one run; everything loads up front (fail-fast).
struct Loaded {
    TripleStore kb;
    LexiconIndex lexicon;
    EmbeddingSpace embeddings;
    RelationClassTable relation_classes = RelationClassTable::defaults();
};

LexiconIndex load_lexicons(const std::vector<std::string>& paths) {
    // Concatenate the TSV files so duplicate rows merge by frequency.
    std::stringstream all;
    for (const auto& p : paths) {
        std::ifstream in(p);
        if (!in) throw std::runtime_error("cannot open lexicon file: " + p);
        all << in.rdbuf() << '\n';
    }
    return LexiconIndex::load_tsv(all);
}

Loaded load_inputs(const RunConfig& cfg, bool need_kb = true) {
    Loaded out;
    if (!cfg.kb_path.empty()) {
        out.kb = load_turtle_file(cfg.kb_path);
        out.kb.freeze();
    } else if (need_kb) {
        throw std::runtime_error("a knowledge base file is required (--kb)");
    }
    if (!cfg.lexicon_paths.empty()) out.lexicon = load_lexicons(cfg.lexicon_paths);
    if (cfg.use_embeddings) {
        if (cfg.embeddings_path.empty())
            throw std::runtime_error("--use-embeddings requires --embeddings");
        std::set<std::string> stop;
        if (!cfg.stopwords_path.empty())
            stop = EmbeddingSpace::load_stopwords_file(cfg.stopwords_path);
        out.embeddings = EmbeddingSpace::load_word2vec_file(cfg.embeddings_path, std::move(stop));
    }
    if (!cfg.relation_classes_path.empty())
        out.relation_classes = RelationClassTable::load(cfg.relation_classes_path);
    return out;
}

InferenceContext make_context(const RunConfig& cfg, const Loaded& in) {
    InferenceContext ctx;
    ctx.kb = &in.kb;
    ctx.lexicon = &in.lexicon;
    ctx.embeddings = cfg.use_embeddings ? &in.embeddings : nullptr;
    ctx.source_mask = cfg.source_mask();
    ctx.use_embeddings = cfg.use_embeddings;
    ctx.embedding_threshold = cfg.embedding_threshold;
    ctx.embedding_k = cfg.embedding_k;
    ctx.lang = cfg.lang;
    ctx.relation_classes = in.relation_classes;
    return ctx;
}

ChainConfig make_chain(const RunConfig& cfg) {
    ChainConfig c;
    c.m = cfg.m;
    c.k = cfg.k;
    c.candidate_cap = cfg.candidate_cap;
    c.seed = cfg.seed;
    return c;
}

int cmd_train(const RunConfig& cfg, const std::string& log_path) {
    Loaded in = load_inputs(cfg);
    auto dataset = load_dataset(cfg.dataset_path, cfg.conllu_path);
    InferenceContext ctx = make_context(cfg, in);

    TrainConfig tc;
    tc.epochs = cfg.epochs;
    tc.learning_rate = cfg.learning_rate;
    tc.chain = make_chain(cfg);
    tc.chain.schedule = Schedule::Alternate;
    tc.validate();

    auto result = train(dataset, tc, ctx);
    result.model.save(cfg.model_path);
    if (!log_path.empty()) {
        std::ofstream log(log_path);
        if (!log) throw std::runtime_error("cannot write training log: " + log_path);
        log << result.log_csv();
    }
    std::cout << result.log_csv();
    std::cout << "model written to " << cfg.model_path << "\n";
    return 0;
}

int cmd_parse(const RunConfig& cfg, const std::string& sent_id, bool explain_state,
              bool execute_query) {
    Loaded in = load_inputs(cfg);
    TemplateModel model = TemplateModel::load(cfg.model_path);
    InferenceContext ctx = make_context(cfg, in);

    auto trees = parse_conllu_file(cfg.conllu_path, cfg.lang);
    const DepTree* picked = nullptr;
    for (const auto& t : trees)
        if (sent_id.empty() || t.sent_id == sent_id) {
            picked = &t;
            break;
        }
    if (!picked)
        throw std::runtime_error("no sentence" +
                                 (sent_id.empty() ? std::string{}
                                                  : " with sent_id '" + sent_id + "'") +
                                 " in " + cfg.conllu_path);
    auto tree = std::make_shared<const DepTree>(merge_compounds(*picked));

    Rng rng(derive_seed(cfg.seed, "parse/" + tree->sent_id));
    try {
        auto result = interpret(tree, model, ctx, make_chain(cfg), rng);
        std::cout << write_query(result.query) << "\n";
        if (explain_state) std::cout << explain(result.state, model, ctx);
        if (execute_query) std::cout << write_result_set(in.kb.execute(result.query));
        return 0;
    } catch (const UninterpretableError& e) {
        std::cerr << "error: " << e.what() << "\n";
        std::cerr << "best partial state:\n" << explain(e.best_partial, model, ctx);
        return 2;
    }
}

int cmd_eval(const RunConfig& cfg, bool oracle_mode, const std::string& report_path) {
    Loaded in = load_inputs(cfg);
    TemplateModel model = cfg.model_path.empty() ? TemplateModel::default_model()
                                                 : TemplateModel::load(cfg.model_path);
    InferenceContext ctx = make_context(cfg, in);
    auto dataset = load_dataset(cfg.dataset_path, cfg.conllu_path);

    auto report = evaluate(dataset, model, ctx, make_chain(cfg), oracle_mode);
    if (!report_path.empty()) {
        std::ofstream out(report_path);
        if (!out) throw std::runtime_error("cannot write report: " + report_path);
        out << report.csv();
    }
    std::string config_name = oracle_mode ? "oracle" : "learned";
    config_name += cfg.kb_labels ? "+kb-labels" : "";
    config_name += cfg.external_lexicon ? "+external-lexicon" : "";
    config_name += cfg.manual_dict ? "+manual-dict" : "";
    config_name += cfg.translated_labels ? "+translated-labels" : "";
    config_name += cfg.use_embeddings ? "+embeddings" : "";
    std::cout << report.summary(config_name);
    return 0;
}

int cmd_lexicon(const RunConfig& cfg, const std::string& mention, const std::string& kind_name,
                const std::string& recall_gold_path, std::size_t top) {
    Loaded in = load_inputs(cfg, /*need_kb=*/cfg.use_embeddings);
    auto kind = parse_dude_kind(kind_name);
    if (!kind) throw std::runtime_error("unknown DUDES kind: " + kind_name);

    auto candidates_for = [&](const std::string& term) {
        auto cands = in.lexicon.lookup(term, *kind, cfg.lang, cfg.source_mask());
        if (cfg.use_embeddings) {
            InferenceContext ctx = make_context(cfg, in);
            auto emb = in.embeddings.candidates(ctx.embedding_labels(), term,
                                                cfg.embedding_threshold, cfg.embedding_k);
            cands = merge_candidates(std::move(cands), emb);
        }
        if (cands.size() > top) cands.resize(top);
        return cands;
    };

    if (!recall_gold_path.empty()) {
        // Gold file: mention <TAB> kb_id per line; output a Recall@k curve CSV.
        std::ifstream gold_in(recall_gold_path);
        if (!gold_in) throw std::runtime_error("cannot open gold file: " + recall_gold_path);
        std::map<std::string, KbId> gold;
        std::map<std::string, std::vector<RankedCandidate>> all;
        std::string line;
        while (std::getline(gold_in, line)) {
            if (line.empty() || line[0] == '#') continue;
            auto tab = line.find('\t');
            if (tab == std::string::npos)
                throw std::runtime_error("malformed gold line: " + line);
            std::string term = line.substr(0, tab);
            std::string id = line.substr(tab + 1);
            auto colon = id.find(':');
            if (colon == std::string::npos)
                throw std::runtime_error("malformed gold KB id: " + id);
            gold[term] = KbId{id.substr(0, colon), id.substr(colon + 1)};
            all[term] = candidates_for(term);
        }
        std::cout << "k,recall\n";
        for (std::size_t k = 1; k <= top; ++k)
            std::cout << k << "," << recall_at_k(all, gold, k) << "\n";
        return 0;
    }

    std::cout << "rank\tkb_id\tscore\torigin\n";
    int rank = 0;
    for (const auto& c : candidates_for(mention)) {
        std::cout << ++rank << "\t" << c.kb_id.str();
        if (c.restriction_object) std::cout << " " << term_str(*c.restriction_object);
        std::cout << "\t" << c.score << "\t"
                  << (c.origin == CandidateOrigin::Index ? "index" : "embedding") << "\n";
    }
    return 0;
}

void add_common_options(CLI::App* sub, RunConfig& cfg) {
    sub->add_option("--kb", cfg.kb_path, "Turtle knowledge base file")
        ->check(CLI::ExistingFile);
    sub->add_option("--lexicon", cfg.lexicon_paths, "lexicon TSV file (repeatable)")
        ->check(CLI::ExistingFile);
    sub->add_option("--embeddings", cfg.embeddings_path, "word2vec text embeddings")
        ->check(CLI::ExistingFile);
    sub->add_option("--stopwords", cfg.stopwords_path, "stopword list, one per line")
        ->check(CLI::ExistingFile);
    sub->add_option("--relation-classes", cfg.relation_classes_path,
                    "dependency relation class table TSV")
        ->check(CLI::ExistingFile);
    sub->add_option("--lang", cfg.lang, "language code for lexicon lookups");
    sub->add_option("--seed", cfg.seed, "root random seed");
    sub->add_option("--k", cfg.k, "beam width")->check(CLI::PositiveNumber);
    sub->add_option("--m", cfg.m, "sampling steps per layer")
        ->check(CLI::NonNegativeNumber);
    sub->add_option("--candidate-cap", cfg.candidate_cap,
                    "top lexicon candidates per node and kind")
        ->check(CLI::PositiveNumber);
    sub->add_option("--threshold", cfg.embedding_threshold,
                    "cosine threshold for embedding retrieval");
    sub->add_option("--embedding-k", cfg.embedding_k, "embedding candidates kept per mention");
    sub->add_option("--jobs", cfg.jobs, "parallelism bound (results are seed-deterministic)")
        ->check(CLI::PositiveNumber);
    sub->add_flag("--kb-labels,!--no-kb-labels", cfg.kb_labels,
                  "use KB-label lexicon entries");
    sub->add_flag("--external-lexicon,!--no-external-lexicon", cfg.external_lexicon,
                  "use external-lexicon entries");
    sub->add_flag("--manual-dict,!--no-manual-dict", cfg.manual_dict,
                  "use manual-dictionary entries");
    sub->add_flag("--translated-labels,!--no-translated-labels", cfg.translated_labels,
                  "use translated-label entries");
    sub->add_flag("--use-embeddings", cfg.use_embeddings,
                  "enable embedding fallback retrieval");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"semantic parsing for question answering over RDF data"};
    app.require_subcommand(1);
    app.set_config("--config", "", "key=value configuration file (flags override it)");

    RunConfig cfg;
    std::string log_path, sent_id, report_path, mention, kind_name = "Property",
                            recall_gold_path;
    std::size_t top = 10;
    bool explain_state = false, execute_query = false, oracle_mode = false;

    auto* train_cmd = app.add_subcommand("train", "train a model with SampleRank");
    add_common_options(train_cmd, cfg);
    train_cmd->add_option("--dataset", cfg.dataset_path, "dataset JSON")
        ->required()
        ->check(CLI::ExistingFile);
    train_cmd->add_option("--conllu", cfg.conllu_path, "dependency parses (CoNLL-U)")
        ->required()
        ->check(CLI::ExistingFile);
    train_cmd->add_option("--model-out", cfg.model_path, "output model file")->required();
    train_cmd->add_option("--log-out", log_path, "output training-log CSV");
    train_cmd->add_option("--epochs", cfg.epochs, "training epochs")
        ->check(CLI::PositiveNumber);
    train_cmd->add_option("--learning-rate", cfg.learning_rate, "SampleRank step size");

    auto* parse_cmd = app.add_subcommand("parse", "map one question to a query");
    add_common_options(parse_cmd, cfg);
    parse_cmd->add_option("--conllu", cfg.conllu_path, "dependency parse (CoNLL-U)")
        ->required()
        ->check(CLI::ExistingFile);
    parse_cmd->add_option("--sent-id", sent_id, "sentence to parse (default: first)");
    parse_cmd->add_option("--model", cfg.model_path, "trained model file")
        ->required()
        ->check(CLI::ExistingFile);
    parse_cmd->add_flag("--explain", explain_state, "dump the chosen state");
    parse_cmd->add_flag("--execute", execute_query, "execute the query on the KB");

    auto* eval_cmd = app.add_subcommand("eval", "evaluate linking and QA F1");
    add_common_options(eval_cmd, cfg);
    eval_cmd->add_option("--dataset", cfg.dataset_path, "dataset JSON")
        ->required()
        ->check(CLI::ExistingFile);
    eval_cmd->add_option("--conllu", cfg.conllu_path, "dependency parses (CoNLL-U)")
        ->required()
        ->check(CLI::ExistingFile);
    eval_cmd->add_option("--model", cfg.model_path, "trained model file")
        ->check(CLI::ExistingFile);
    eval_cmd->add_flag("--oracle", oracle_mode,
                       "accept by objective score only (upper bound)");
    eval_cmd->add_option("--report-out", report_path, "per-question report CSV");

    auto* lexicon_cmd = app.add_subcommand("lexicon", "inspect candidate rankings");
    add_common_options(lexicon_cmd, cfg);
    lexicon_cmd->add_option("mention", mention, "mention to look up");
    lexicon_cmd->add_option("--kind", kind_name, "DUDES kind (default Property)");
    lexicon_cmd->add_option("--top", top, "candidates to print")->check(CLI::PositiveNumber);
    lexicon_cmd->add_option("--recall-eval", recall_gold_path,
                            "gold TSV (mention<TAB>kb_id); print a Recall@k curve")
        ->check(CLI::ExistingFile);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;  // validation failures are exit code 1
    }

    try {
        if (train_cmd->parsed()) return cmd_train(cfg, log_path);
        if (parse_cmd->parsed()) return cmd_parse(cfg, sent_id, explain_state, execute_query);
        if (eval_cmd->parsed()) return cmd_eval(cfg, oracle_mode, report_path);
        if (lexicon_cmd->parsed()) {
            if (mention.empty() && recall_gold_path.empty())
                throw std::runtime_error("lexicon: a mention or --recall-eval is required");
            return cmd_lexicon(cfg, mention, kind_name, recall_gold_path, top);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
