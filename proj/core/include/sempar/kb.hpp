#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace sempar {

// Identifier kinds mirror how an id may be used in triples. The kind is an
// annotation; identity is (ns, local) only.
enum class IdKind { Resource, Class, ObjectProperty, DatatypeProperty };

struct KbId {
    std::string ns;
    std::string local;
    IdKind kind = IdKind::Resource;

    std::string str() const { return ns + ":" + local; }

    friend bool operator==(const KbId& a, const KbId& b) {
        return a.ns == b.ns && a.local == b.local;
    }
    friend auto operator<=>(const KbId& a, const KbId& b) {
        if (auto c = a.ns <=> b.ns; c != 0) return c;
        return a.local <=> b.local;
    }
};

// Reserved schema vocabulary. No OWL reasoning, no subclass inference.
const KbId& rdf_type();
const KbId& rdfs_domain();
const KbId& rdfs_range();
const KbId& rdfs_label();
bool is_reserved(const KbId& id);

struct Literal {
    enum class Type { String, Integer };
    Type type = Type::String;
    std::string text;   // lexical form
    std::int64_t value = 0;

    static Literal str(std::string s) { return {Type::String, std::move(s), 0}; }
    static Literal integer(std::int64_t v) {
        return {Type::Integer, std::to_string(v), v};
    }
    std::string str_repr() const {
        if (type == Type::Integer) return text;
        return "\"" + text + "\"";
    }
    friend bool operator==(const Literal& a, const Literal& b) {
        return a.type == b.type && a.text == b.text;
    }
    friend auto operator<=>(const Literal& a, const Literal& b) {
        if (auto c = a.type <=> b.type; c != 0) return c;
        return a.text <=> b.text;
    }
};

using Term = std::variant<KbId, Literal>;

std::string term_str(const Term& t);

struct Variable {
    std::string name;
    friend bool operator==(const Variable& a, const Variable& b) = default;
    friend auto operator<=>(const Variable& a, const Variable& b) = default;
};

// One position of a triple pattern: ground id, literal, or variable.
using PatternTerm = std::variant<KbId, Literal, Variable>;

std::string pattern_term_str(const PatternTerm& t);
bool is_variable(const PatternTerm& t);
std::optional<Term> as_ground(const PatternTerm& t);

struct TriplePattern {
    PatternTerm subject;
    PatternTerm predicate;
    PatternTerm object;
    friend bool operator==(const TriplePattern&, const TriplePattern&) = default;
    friend auto operator<=>(const TriplePattern&, const TriplePattern&) = default;
    std::string str() const;
};

struct ConjunctiveQuery {
    enum class Form { Select, Ask };
    Form form = Form::Select;
    std::vector<std::string> projection;  // empty iff Ask
    std::vector<TriplePattern> patterns;

    void validate() const;  // throws QueryError on invariant violation
};

struct Triple {
    KbId subject;
    KbId predicate;
    Term object;
    friend bool operator==(const Triple&, const Triple&) = default;
    friend auto operator<=>(const Triple&, const Triple&) = default;
};

using Binding = std::map<std::string, Term>;

struct ResultSet {
    ConjunctiveQuery::Form form = ConjunctiveQuery::Form::Select;
    bool ask_answer = false;
    std::vector<std::string> projection;
    std::set<std::vector<Term>> rows;  // DISTINCT by construction

    bool empty() const { return form == ConjunctiveQuery::Form::Ask ? !ask_answer : rows.empty(); }
};

struct QueryError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct TurtleError : std::runtime_error {
    int line;
    TurtleError(int line_, const std::string& msg)
        : std::runtime_error("line " + std::to_string(line_) + ": " + msg), line(line_) {}
};

// Immutable after load; safe for concurrent reads.
class TripleStore {
public:
    void add(Triple t);  // load-time only
    void freeze();       // sorts and finalizes indexes

    std::size_t size() const { return triples_.size(); }
    const std::vector<Triple>& triples() const { return triples_; }

    bool contains(const Triple& t) const;

    ResultSet execute(const ConjunctiveQuery& q) const;
    bool is_satisfiable(const std::vector<TriplePattern>& patterns) const;

    // Declared rdfs:domain / rdfs:range for a property, if present.
    std::optional<KbId> domain_of(const KbId& p) const;
    std::optional<KbId> range_of(const KbId& p) const;

    // True if `id` has an rdf:type triple for class `cls`.
    bool is_instance_of(const KbId& id, const KbId& cls) const;

    // rdfs:label string literals, keyed by subject.
    const std::map<KbId, std::string>& labels() const { return labels_; }

    // Inferred kind for an id seen during load.
    IdKind kind_of(const KbId& id) const;

    // Deterministic N-Triples-style rendering, one triple per line, sorted.
    std::string serialize() const;

    // Index rows a pattern could match under the given partial binding.
    std::vector<std::size_t> candidate_rows(const TriplePattern& p, const Binding& b) const;

private:
    std::vector<Triple> triples_;
    std::map<std::string, std::vector<std::size_t>> by_subject_;
    std::map<std::string, std::vector<std::size_t>> by_predicate_;
    std::map<std::string, std::vector<std::size_t>> by_object_;
    std::map<KbId, KbId> domain_;
    std::map<KbId, KbId> range_;
    std::map<KbId, std::string> labels_;
    std::map<KbId, IdKind> kinds_;
    bool frozen_ = false;
};

// Parse the supported Turtle subset (prefix declarations, `a` shorthand,
// `;`/`,` continuation, string and integer literals).
TripleStore load_turtle(std::istream& in);
TripleStore load_turtle_file(const std::string& path);

}  // namespace sempar
