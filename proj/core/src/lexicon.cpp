#include "sempar/lexicon.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <istream>
#include <sstream>

namespace sempar {

std::string lex_source_name(LexSource s) {
    switch (s) {
        case LexSource::KbLabels: return "KbLabels";
        case LexSource::ExternalLexicon: return "ExternalLexicon";
        case LexSource::ManualDict: return "ManualDict";
        case LexSource::TranslatedLabels: return "TranslatedLabels";
    }
    return "?";
}

std::optional<LexSource> parse_lex_source(const std::string& s) {
    if (s == "KbLabels") return LexSource::KbLabels;
    if (s == "ExternalLexicon") return LexSource::ExternalLexicon;
    if (s == "ManualDict") return LexSource::ManualDict;
    if (s == "TranslatedLabels") return LexSource::TranslatedLabels;
    return std::nullopt;
}

bool SourceMask::enabled(LexSource s) const {
    switch (s) {
        case LexSource::KbLabels: return kb_labels;
        case LexSource::ExternalLexicon: return external_lexicon;
        case LexSource::ManualDict: return manual_dict;
        case LexSource::TranslatedLabels: return translated_labels;
    }
    return false;
}

std::string normalize_term(const std::string& s) {
    std::string out;
    bool pending_space = false;
    for (unsigned char c : s) {
        if (std::isspace(c)) {
            if (!out.empty()) pending_space = true;
            continue;
        }
        if (pending_space) {
            out += ' ';
            pending_space = false;
        }
        out += char(std::tolower(c));
    }
    return out;
}

namespace {

std::string entry_key(const std::string& lang, DudeKind kind, const std::string& term) {
    return lang + '\x1f' + dude_kind_name(kind) + '\x1f' + term;
}

KbId parse_kb_id(const std::string& s, IdKind kind_hint) {
    auto pos = s.find(':');
    if (pos == std::string::npos || pos + 1 >= s.size())
        throw std::runtime_error("malformed KB id in lexicon: '" + s + "'");
    return KbId{s.substr(0, pos), s.substr(pos + 1), kind_hint};
}

IdKind id_kind_for(DudeKind k) {
    switch (k) {
        case DudeKind::Resource: return IdKind::Resource;
        case DudeKind::Class: return IdKind::Class;
        case DudeKind::Property: return IdKind::ObjectProperty;
        case DudeKind::RestrictionClass: return IdKind::ObjectProperty;
        case DudeKind::QueryVar: return IdKind::Resource;
    }
    return IdKind::Resource;
}

}  // namespace

void LexiconIndex::add(LexEntry e) {
    if (e.frequency < 1) throw std::runtime_error("lexicon entry frequency must be >= 1");
    e.term = normalize_term(e.term);
    auto& rows = entries_[entry_key(e.lang, e.kind, e.term)];
    for (auto& r : rows) {
        if (r.kb_id == e.kb_id && r.source == e.source &&
            r.restriction_object == e.restriction_object) {
            r.frequency += e.frequency;
            return;
        }
    }
    rows.push_back({e.kb_id, e.restriction_object, e.frequency, e.source});
}

std::vector<RankedCandidate> LexiconIndex::lookup(const std::string& term, DudeKind kind,
                                                  const std::string& lang,
                                                  const SourceMask& mask) const {
    auto it = entries_.find(entry_key(lang, kind, normalize_term(term)));
    if (it == entries_.end()) return {};

    // Merge rows of the same id across enabled sources, then normalize per term.
    std::map<std::pair<KbId, std::optional<Term>>, long> merged;
    long total = 0;
    for (const auto& r : it->second) {
        if (!mask.enabled(r.source)) continue;
        merged[{r.kb_id, r.restriction_object}] += r.frequency;
        total += r.frequency;
    }
    if (total == 0) return {};

    std::vector<RankedCandidate> out;
    out.reserve(merged.size());
    for (const auto& [key, freq] : merged)
        out.push_back({key.first, key.second, double(freq) / double(total),
                       CandidateOrigin::Index});
    std::sort(out.begin(), out.end(), [](const RankedCandidate& a, const RankedCandidate& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.kb_id < b.kb_id;
    });
    return out;
}

LexiconIndex LexiconIndex::load_tsv(std::istream& in) {
    LexiconIndex idx;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> cols;
        std::size_t start = 0;
        for (;;) {
            auto pos = line.find('\t', start);
            if (pos == std::string::npos) {
                cols.push_back(line.substr(start));
                break;
            }
            cols.push_back(line.substr(start, pos - start));
            start = pos + 1;
        }
        if (cols.size() != 6)
            throw std::runtime_error("lexicon line " + std::to_string(line_no) +
                                     ": expected 6 tab-separated columns");
        LexEntry e;
        e.term = cols[0];
        auto kind = parse_dude_kind(cols[2]);
        if (!kind)
            throw std::runtime_error("lexicon line " + std::to_string(line_no) +
                                     ": unknown DUDES kind '" + cols[2] + "'");
        e.kind = *kind;
        // RestrictionClass rows carry "property object" in the kb_id column.
        auto space = cols[1].find(' ');
        if (e.kind == DudeKind::RestrictionClass && space != std::string::npos) {
            e.kb_id = parse_kb_id(cols[1].substr(0, space), id_kind_for(e.kind));
            e.restriction_object =
                Term{parse_kb_id(cols[1].substr(space + 1), IdKind::Resource)};
        } else {
            e.kb_id = parse_kb_id(cols[1], id_kind_for(e.kind));
        }
        e.frequency = std::stol(cols[3]);
        auto src = parse_lex_source(cols[4]);
        if (!src)
            throw std::runtime_error("lexicon line " + std::to_string(line_no) +
                                     ": unknown source '" + cols[4] + "'");
        e.source = *src;
        e.lang = cols[5];
        idx.add(std::move(e));
    }
    return idx;
}

LexiconIndex LexiconIndex::load_tsv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open lexicon file: " + path);
    return load_tsv(in);
}

double recall_at_k(const std::map<std::string, std::vector<RankedCandidate>>& candidates,
                   const std::map<std::string, KbId>& gold, std::size_t k) {
    if (gold.empty()) throw std::runtime_error("recall_at_k: empty gold map");
    std::size_t hits = 0;
    for (const auto& [mention, gold_id] : gold) {
        auto it = candidates.find(mention);
        if (it == candidates.end()) continue;
        const auto& list = it->second;
        std::size_t limit = std::min(k, list.size());
        for (std::size_t i = 0; i < limit; ++i) {
            if (list[i].kb_id == gold_id) {
                ++hits;
                break;
            }
        }
    }
    return double(hits) / double(gold.size());
}

}  // namespace sempar
