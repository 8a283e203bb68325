#pragma once

#include "sempar/kb.hpp"

#include <optional>
#include <set>
#include <string>
#include <vector>

namespace sempar {

enum class DudeKind { Resource, Class, Property, RestrictionClass, QueryVar };

std::string dude_kind_name(DudeKind k);
std::optional<DudeKind> parse_dude_kind(const std::string& s);

// Fresh-variable source for one composition session; runs are reproducible
// because names come from a monotone counter.
class VarGen {
public:
    std::string fresh() { return "v" + std::to_string(++counter_); }
    std::string fresh_avoiding(const std::set<std::string>& reserved) {
        std::string v = fresh();
        while (reserved.count(v)) v = fresh();
        return v;
    }

private:
    int counter_ = 0;
};

struct Slot {
    std::string variable;
    std::string anchor;  // stored, not used operationally
    int arg_index;       // 1 = subject position, 2 = object position

    friend bool operator==(const Slot&, const Slot&) = default;
};

struct DudesError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// 5-tuple semantic representation plus a kind tag. Conditions are kept
// directly as triple patterns; a Resource binds its main variable to a
// ground id via `binding`.
struct Dude {
    DudeKind kind = DudeKind::Resource;
    std::optional<std::string> main_variable;
    std::optional<Term> binding;             // ground value of main_variable, if any
    std::vector<std::string> projection;     // first-introduced order
    int label = 1;
    std::set<std::string> referents;
    std::vector<TriplePattern> conditions;
    std::vector<Slot> slots;

    bool saturated() const { return slots.empty(); }
    std::set<std::string> variables() const;

    // The term another DUDES unifies with when this one fills a slot.
    PatternTerm main_term() const;
};

// Canonical template instance for a kind. `kb_id` is required except for
// QueryVar; RestrictionClass additionally needs the fixed object `restriction_object`.
Dude make_dude(DudeKind kind, const std::optional<KbId>& kb_id, VarGen& vars,
               const std::optional<Term>& restriction_object = std::nullopt);

// Fills the functor's slot with the given arg_index; the argument is
// alpha-renamed apart first.
Dude apply(const Dude& functor, const Dude& argument, int arg_index, VarGen& vars);

Dude rename_apart(const Dude& d, const std::set<std::string>& reserved, VarGen& vars);

ConjunctiveQuery to_query(const Dude& d);

// Canonical text rendering (one line per tuple component); variables are
// renamed v1, v2, ... in order of first appearance so alpha-equivalent
// DUDES render identically.
std::string render(const Dude& d);

}  // namespace sempar
