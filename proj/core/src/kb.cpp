#include "sempar/kb.hpp"

#include <algorithm>
#include <sstream>

namespace sempar {

const KbId& rdf_type() {
    static const KbId id{"rdf", "type", IdKind::ObjectProperty};
    return id;
}
const KbId& rdfs_domain() {
    static const KbId id{"rdfs", "domain", IdKind::ObjectProperty};
    return id;
}
const KbId& rdfs_range() {
    static const KbId id{"rdfs", "range", IdKind::ObjectProperty};
    return id;
}
const KbId& rdfs_label() {
    static const KbId id{"rdfs", "label", IdKind::DatatypeProperty};
    return id;
}

bool is_reserved(const KbId& id) {
    return id == rdf_type() || id == rdfs_domain() || id == rdfs_range() ||
           id == rdfs_label();
}

std::string term_str(const Term& t) {
    if (const auto* id = std::get_if<KbId>(&t)) return id->str();
    return std::get<Literal>(t).str_repr();
}

std::string pattern_term_str(const PatternTerm& t) {
    if (const auto* v = std::get_if<Variable>(&t)) return "?" + v->name;
    if (const auto* id = std::get_if<KbId>(&t)) return id->str();
    return std::get<Literal>(t).str_repr();
}

bool is_variable(const PatternTerm& t) {
    return std::holds_alternative<Variable>(t);
}

std::optional<Term> as_ground(const PatternTerm& t) {
    if (const auto* id = std::get_if<KbId>(&t)) return Term{*id};
    if (const auto* l = std::get_if<Literal>(&t)) return Term{*l};
    return std::nullopt;
}

std::string TriplePattern::str() const {
    return pattern_term_str(subject) + " " + pattern_term_str(predicate) + " " +
           pattern_term_str(object);
}

void ConjunctiveQuery::validate() const {
    if (patterns.empty()) throw QueryError("query has no triple patterns");
    if (form == Form::Select && projection.empty())
        throw QueryError("SELECT query with empty projection");
    if (form == Form::Ask && !projection.empty())
        throw QueryError("ASK query with non-empty projection");
    std::set<std::string> seen;
    for (const auto& p : patterns)
        for (const auto* pt : {&p.subject, &p.predicate, &p.object})
            if (const auto* v = std::get_if<Variable>(pt)) seen.insert(v->name);
    for (const auto& v : projection)
        if (!seen.count(v))
            throw QueryError("projection variable ?" + v + " not used in any pattern");
}

namespace {

std::string ground_key(const Term& t) { return term_str(t); }

void note_kind(std::map<KbId, IdKind>& kinds, const KbId& id, IdKind k) {
    auto it = kinds.find(id);
    if (it == kinds.end()) {
        kinds.emplace(id, k);
        return;
    }
    // Class beats Resource; property kinds beat both.
    auto rank = [](IdKind x) {
        switch (x) {
            case IdKind::Resource: return 0;
            case IdKind::Class: return 1;
            case IdKind::ObjectProperty: return 2;
            case IdKind::DatatypeProperty: return 3;
        }
        return 0;
    };
    if (rank(k) > rank(it->second)) it->second = k;
}

}  // namespace

void TripleStore::add(Triple t) {
    if (frozen_) throw std::logic_error("TripleStore is frozen");
    if (!is_reserved(t.predicate)) {
        note_kind(kinds_, t.predicate,
                  std::holds_alternative<Literal>(t.object)
                      ? IdKind::DatatypeProperty
                      : IdKind::ObjectProperty);
        note_kind(kinds_, t.subject, IdKind::Resource);
        if (const auto* o = std::get_if<KbId>(&t.object))
            note_kind(kinds_, *o, IdKind::Resource);
    } else if (t.predicate == rdf_type()) {
        note_kind(kinds_, t.subject, IdKind::Resource);
        if (const auto* o = std::get_if<KbId>(&t.object))
            note_kind(kinds_, *o, IdKind::Class);
    } else if (t.predicate == rdfs_domain() || t.predicate == rdfs_range()) {
        note_kind(kinds_, t.subject, IdKind::ObjectProperty);
        if (const auto* o = std::get_if<KbId>(&t.object))
            note_kind(kinds_, *o, IdKind::Class);
        auto& table = t.predicate == rdfs_domain() ? domain_ : range_;
        if (const auto* o = std::get_if<KbId>(&t.object)) table[t.subject] = *o;
    } else if (t.predicate == rdfs_label()) {
        if (const auto* l = std::get_if<Literal>(&t.object))
            labels_[t.subject] = l->text;
    }
    triples_.push_back(std::move(t));
}

void TripleStore::freeze() {
    std::sort(triples_.begin(), triples_.end());
    triples_.erase(std::unique(triples_.begin(), triples_.end()), triples_.end());
    for (std::size_t i = 0; i < triples_.size(); ++i) {
        by_subject_[triples_[i].subject.str()].push_back(i);
        by_predicate_[triples_[i].predicate.str()].push_back(i);
        by_object_[ground_key(triples_[i].object)].push_back(i);
    }
    frozen_ = true;
}

bool TripleStore::contains(const Triple& t) const {
    return std::binary_search(triples_.begin(), triples_.end(), t);
}

std::optional<KbId> TripleStore::domain_of(const KbId& p) const {
    auto it = domain_.find(p);
    if (it == domain_.end()) return std::nullopt;
    return it->second;
}

std::optional<KbId> TripleStore::range_of(const KbId& p) const {
    auto it = range_.find(p);
    if (it == range_.end()) return std::nullopt;
    return it->second;
}

bool TripleStore::is_instance_of(const KbId& id, const KbId& cls) const {
    return contains(Triple{id, rdf_type(), Term{cls}});
}

IdKind TripleStore::kind_of(const KbId& id) const {
    auto it = kinds_.find(id);
    return it == kinds_.end() ? IdKind::Resource : it->second;
}

std::vector<std::size_t> TripleStore::candidate_rows(const TriplePattern& p,
                                                     const Binding& b) const {
    auto resolve = [&](const PatternTerm& t) -> std::optional<std::string> {
        if (auto g = as_ground(t)) return ground_key(*g);
        const auto& name = std::get<Variable>(t).name;
        auto it = b.find(name);
        if (it != b.end()) return ground_key(it->second);
        return std::nullopt;
    };
    const std::vector<std::size_t>* best = nullptr;
    if (auto k = resolve(p.subject)) {
        auto it = by_subject_.find(*k);
        if (it == by_subject_.end()) return {};
        best = &it->second;
    }
    if (auto k = resolve(p.predicate)) {
        auto it = by_predicate_.find(*k);
        if (it == by_predicate_.end()) return {};
        if (!best || it->second.size() < best->size()) best = &it->second;
    }
    if (auto k = resolve(p.object)) {
        auto it = by_object_.find(*k);
        if (it == by_object_.end()) return {};
        if (!best || it->second.size() < best->size()) best = &it->second;
    }
    if (best) return *best;
    std::vector<std::size_t> all(triples_.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    return all;
}

namespace {

// Backtracking natural join over the pattern list, most-selective-first.
class Evaluator {
public:
    Evaluator(const TripleStore& store, std::vector<TriplePattern> patterns)
        : store_(store), patterns_(std::move(patterns)) {
        // Fewer variable positions first; deterministic tie-break on rendering.
        std::stable_sort(patterns_.begin(), patterns_.end(),
                         [](const TriplePattern& a, const TriplePattern& b) {
                             return var_count(a) < var_count(b);
                         });
    }

    // Calls sink for each satisfying binding; sink returning false stops.
    template <typename Sink>
    bool enumerate(Sink&& sink) {
        Binding b;
        return recurse(0, b, sink);
    }

private:
    static int var_count(const TriplePattern& p) {
        return int(is_variable(p.subject)) + int(is_variable(p.predicate)) +
               int(is_variable(p.object));
    }

    static bool match_term(const PatternTerm& pat, const Term& val, Binding& b,
                           std::vector<std::string>& bound_here) {
        if (auto g = as_ground(pat)) return *g == val;
        const auto& name = std::get<Variable>(pat).name;
        auto it = b.find(name);
        if (it != b.end()) return it->second == val;
        b.emplace(name, val);
        bound_here.push_back(name);
        return true;
    }

    template <typename Sink>
    bool recurse(std::size_t i, Binding& b, Sink& sink) {
        if (i == patterns_.size()) return sink(b);
        const auto& pat = patterns_[i];
        for (std::size_t row : store_.candidate_rows(pat, b)) {
            const Triple& t = store_.triples()[row];
            std::vector<std::string> bound_here;
            bool ok = match_term(pat.subject, Term{t.subject}, b, bound_here) &&
                      match_term(pat.predicate, Term{t.predicate}, b, bound_here) &&
                      match_term(pat.object, t.object, b, bound_here);
            if (ok && !recurse(i + 1, b, sink)) return false;
            for (const auto& name : bound_here) b.erase(name);
        }
        return true;
    }

    const TripleStore& store_;
    std::vector<TriplePattern> patterns_;
};

}  // namespace

ResultSet TripleStore::execute(const ConjunctiveQuery& q) const {
    q.validate();
    ResultSet rs;
    rs.form = q.form;
    rs.projection = q.projection;
    Evaluator ev(*this, q.patterns);
    if (q.form == ConjunctiveQuery::Form::Ask) {
        ev.enumerate([&](const Binding&) {
            rs.ask_answer = true;
            return false;  // one witness suffices
        });
        return rs;
    }
    ev.enumerate([&](const Binding& b) {
        std::vector<Term> row;
        row.reserve(q.projection.size());
        for (const auto& v : q.projection) row.push_back(b.at(v));
        rs.rows.insert(std::move(row));
        return true;
    });
    return rs;
}

bool TripleStore::is_satisfiable(const std::vector<TriplePattern>& patterns) const {
    if (patterns.empty()) throw QueryError("is_satisfiable: empty pattern list");
    bool found = false;
    Evaluator ev(*this, patterns);
    ev.enumerate([&](const Binding&) {
        found = true;
        return false;
    });
    return found;
}

std::string TripleStore::serialize() const {
    std::vector<std::string> lines;
    lines.reserve(triples_.size());
    for (const auto& t : triples_)
        lines.push_back(t.subject.str() + " " + t.predicate.str() + " " +
                        term_str(t.object) + " .");
    std::sort(lines.begin(), lines.end());
    std::string out;
    for (const auto& l : lines) {
        out += l;
        out += '\n';
    }
    return out;
}

}  // namespace sempar
