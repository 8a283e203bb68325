#pragma once

#include "sempar/dudes.hpp"
#include "sempar/kb.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace sempar {

enum class LexSource { KbLabels, ExternalLexicon, ManualDict, TranslatedLabels };

std::string lex_source_name(LexSource s);
std::optional<LexSource> parse_lex_source(const std::string& s);

// Which lexicon sources participate in a lookup; mirrors the DBP / DBLex /
// Dict / translated-label configurations.
struct SourceMask {
    bool kb_labels = true;
    bool external_lexicon = true;
    bool manual_dict = true;
    bool translated_labels = true;

    bool enabled(LexSource s) const;
};

struct LexEntry {
    std::string term;  // lowercase, whitespace-normalized
    KbId kb_id;
    std::optional<Term> restriction_object;  // RestrictionClass rows only
    DudeKind kind = DudeKind::Resource;
    long frequency = 1;
    LexSource source = LexSource::KbLabels;
    std::string lang = "en";
};

enum class CandidateOrigin { Index, Embedding };

struct RankedCandidate {
    KbId kb_id;
    std::optional<Term> restriction_object;
    double score = 0.0;
    CandidateOrigin origin = CandidateOrigin::Index;
};

std::string normalize_term(const std::string& s);

// Inverted index grouped by (lang, kind, term). Immutable after build.
class LexiconIndex {
public:
    void add(LexEntry e);  // duplicate (term, kb_id, kind) frequencies are summed

    // Exact-match candidates, frequency-normalized over the enabled sources,
    // sorted non-increasing by score with kb_id tie-break.
    std::vector<RankedCandidate> lookup(const std::string& term, DudeKind kind,
                                        const std::string& lang,
                                        const SourceMask& mask = {}) const;

    bool empty() const { return entries_.empty(); }
    std::size_t size() const { return entries_.size(); }

    static LexiconIndex load_tsv(std::istream& in);
    static LexiconIndex load_tsv_file(const std::string& path);

private:
    struct Row {
        KbId kb_id;
        std::optional<Term> restriction_object;
        long frequency;
        LexSource source;
    };
    // key: lang \x1f kind \x1f term
    std::map<std::string, std::vector<Row>> entries_;
};

// Fraction of gold mentions whose gold id appears in the top-k candidates.
double recall_at_k(const std::map<std::string, std::vector<RankedCandidate>>& candidates,
                   const std::map<std::string, KbId>& gold, std::size_t k);

}  // namespace sempar
