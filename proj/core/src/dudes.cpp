#include "sempar/dudes.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace sempar {

std::string dude_kind_name(DudeKind k) {
    switch (k) {
        case DudeKind::Resource: return "Resource";
        case DudeKind::Class: return "Class";
        case DudeKind::Property: return "Property";
        case DudeKind::RestrictionClass: return "RestrictionClass";
        case DudeKind::QueryVar: return "QueryVar";
    }
    return "?";
}

std::optional<DudeKind> parse_dude_kind(const std::string& s) {
    if (s == "Resource") return DudeKind::Resource;
    if (s == "Class") return DudeKind::Class;
    if (s == "Property") return DudeKind::Property;
    if (s == "RestrictionClass") return DudeKind::RestrictionClass;
    if (s == "QueryVar") return DudeKind::QueryVar;
    return std::nullopt;
}

std::set<std::string> Dude::variables() const {
    std::set<std::string> vars;
    if (main_variable) vars.insert(*main_variable);
    for (const auto& v : projection) vars.insert(v);
    vars.insert(referents.begin(), referents.end());
    for (const auto& c : conditions)
        for (const auto* t : {&c.subject, &c.predicate, &c.object})
            if (const auto* v = std::get_if<Variable>(t)) vars.insert(v->name);
    for (const auto& s : slots) vars.insert(s.variable);
    return vars;
}

PatternTerm Dude::main_term() const {
    if (binding) {
        if (const auto* id = std::get_if<KbId>(&*binding)) return *id;
        return std::get<Literal>(*binding);
    }
    if (main_variable) return Variable{*main_variable};
    throw DudesError("DUDES has neither a main variable nor a binding");
}

Dude make_dude(DudeKind kind, const std::optional<KbId>& kb_id, VarGen& vars,
               const std::optional<Term>& restriction_object) {
    if (kind == DudeKind::QueryVar) {
        if (kb_id) throw DudesError("QueryVar DUDES takes no KB id");
        Dude d;
        d.kind = kind;
        d.main_variable = vars.fresh();
        d.projection = {*d.main_variable};
        return d;
    }
    if (!kb_id) throw DudesError(dude_kind_name(kind) + " DUDES requires a KB id");

    Dude d;
    d.kind = kind;
    switch (kind) {
        case DudeKind::Resource: {
            if (kb_id->kind != IdKind::Resource)
                throw DudesError("Resource DUDES from non-resource id " + kb_id->str());
            d.main_variable = vars.fresh();
            d.binding = Term{*kb_id};
            break;
        }
        case DudeKind::Class: {
            if (kb_id->kind == IdKind::ObjectProperty || kb_id->kind == IdKind::DatatypeProperty)
                throw DudesError("Class DUDES from property id " + kb_id->str());
            d.main_variable = vars.fresh();
            d.referents.insert(*d.main_variable);
            d.conditions.push_back({Variable{*d.main_variable}, rdf_type(), *kb_id});
            break;
        }
        case DudeKind::Property: {
            if (kb_id->kind != IdKind::ObjectProperty && kb_id->kind != IdKind::DatatypeProperty)
                throw DudesError("Property DUDES from non-property id " + kb_id->str());
            std::string x1 = vars.fresh();
            std::string x2 = vars.fresh();
            d.referents = {x1, x2};
            d.conditions.push_back({Variable{x1}, *kb_id, Variable{x2}});
            d.slots.push_back({x1, "a1", 1});
            d.slots.push_back({x2, "a2", 2});
            break;
        }
        case DudeKind::RestrictionClass: {
            // Intersective-adjective shape: one slot, fixed property-value pair.
            if (!restriction_object)
                throw DudesError("RestrictionClass DUDES requires a property-value pair");
            std::string v = vars.fresh();
            d.main_variable = v;
            d.referents.insert(v);
            PatternTerm obj = std::holds_alternative<KbId>(*restriction_object)
                                  ? PatternTerm{std::get<KbId>(*restriction_object)}
                                  : PatternTerm{std::get<Literal>(*restriction_object)};
            d.conditions.push_back({Variable{v}, *kb_id, obj});
            d.slots.push_back({v, "a1", 1});
            break;
        }
        case DudeKind::QueryVar:
            break;  // handled above
    }
    return d;
}

namespace {

PatternTerm substitute(const PatternTerm& t, const std::string& var, const PatternTerm& repl) {
    if (const auto* v = std::get_if<Variable>(&t))
        if (v->name == var) return repl;
    return t;
}

Dude rename(const Dude& d, const std::map<std::string, std::string>& m) {
    auto rn = [&](const std::string& v) {
        auto it = m.find(v);
        return it == m.end() ? v : it->second;
    };
    Dude out = d;
    if (out.main_variable) out.main_variable = rn(*out.main_variable);
    for (auto& v : out.projection) v = rn(v);
    std::set<std::string> refs;
    for (const auto& v : out.referents) refs.insert(rn(v));
    out.referents = std::move(refs);
    for (auto& c : out.conditions)
        for (auto* t : {&c.subject, &c.predicate, &c.object})
            if (const auto* v = std::get_if<Variable>(t)) *t = Variable{rn(v->name)};
    for (auto& s : out.slots) s.variable = rn(s.variable);
    return out;
}

}  // namespace

Dude rename_apart(const Dude& d, const std::set<std::string>& reserved, VarGen& vars) {
    std::map<std::string, std::string> m;
    for (const auto& v : d.variables())
        if (reserved.count(v)) m[v] = vars.fresh_avoiding(reserved);
    if (m.empty()) return d;
    return rename(d, m);
}

Dude apply(const Dude& functor, const Dude& argument, int arg_index, VarGen& vars) {
    if (arg_index != 1 && arg_index != 2)
        throw DudesError("argument index must be 1 or 2, got " + std::to_string(arg_index));
    auto slot_it = std::find_if(functor.slots.begin(), functor.slots.end(),
                                [&](const Slot& s) { return s.arg_index == arg_index; });
    if (slot_it == functor.slots.end())
        throw DudesError("no unfilled slot with argument index " + std::to_string(arg_index));
    const Slot slot = *slot_it;

    Dude arg = rename_apart(argument, functor.variables(), vars);
    PatternTerm filler = arg.main_term();

    Dude out;
    out.kind = functor.kind;
    out.label = functor.label;

    // Unify the slot variable with the argument's main term.
    out.conditions.reserve(functor.conditions.size() + arg.conditions.size());
    for (const auto& c : functor.conditions)
        out.conditions.push_back({substitute(c.subject, slot.variable, filler),
                                  substitute(c.predicate, slot.variable, filler),
                                  substitute(c.object, slot.variable, filler)});
    out.conditions.insert(out.conditions.end(), arg.conditions.begin(), arg.conditions.end());

    out.main_variable = functor.main_variable;
    out.binding = functor.binding;
    if (functor.main_variable && *functor.main_variable == slot.variable) {
        out.main_variable = arg.main_variable;
        out.binding = arg.binding;
    }

    for (const auto& r : functor.referents)
        if (r != slot.variable) out.referents.insert(r);
    out.referents.insert(arg.referents.begin(), arg.referents.end());
    if (const auto* v = std::get_if<Variable>(&filler)) out.referents.insert(v->name);

    out.projection = functor.projection;
    for (auto& v : out.projection)
        if (v == slot.variable && arg.main_variable) v = *arg.main_variable;
    for (const auto& v : arg.projection) out.projection.push_back(v);

    for (const auto& s : functor.slots)
        if (!(s.arg_index == slot.arg_index && s.variable == slot.variable))
            out.slots.push_back(s);

    return out;
}

ConjunctiveQuery to_query(const Dude& d) {
    if (!d.saturated()) {
        std::ostringstream msg;
        msg << "cannot convert unsaturated DUDES; open slots:";
        for (const auto& s : d.slots)
            msg << " (" << s.variable << ", " << s.anchor << ", " << s.arg_index << ")";
        throw DudesError(msg.str());
    }
    ConjunctiveQuery q;
    q.patterns = d.conditions;
    if (d.projection.empty()) {
        q.form = ConjunctiveQuery::Form::Ask;
    } else {
        q.form = ConjunctiveQuery::Form::Select;
        for (const auto& v : d.projection)
            if (std::find(q.projection.begin(), q.projection.end(), v) == q.projection.end())
                q.projection.push_back(v);
    }
    q.validate();
    return q;
}

std::string render(const Dude& d) {
    // Canonical alpha-renaming in order of first appearance.
    std::map<std::string, std::string> canon;
    int next = 0;
    auto name = [&](const std::string& v) -> std::string {
        auto it = canon.find(v);
        if (it != canon.end()) return it->second;
        std::string n = "v" + std::to_string(++next);
        canon.emplace(v, n);
        return n;
    };
    auto term = [&](const PatternTerm& t) -> std::string {
        if (const auto* v = std::get_if<Variable>(&t)) return name(v->name);
        return pattern_term_str(t);
    };

    std::ostringstream out;
    out << "kind: " << dude_kind_name(d.kind) << "\n";
    if (d.binding)
        out << "v: " << (d.main_variable ? name(*d.main_variable) : std::string("-"))
            << " = " << term_str(*d.binding) << "\n";
    else
        out << "v: " << (d.main_variable ? name(*d.main_variable) : std::string("-")) << "\n";
    out << "vs: {";
    for (std::size_t i = 0; i < d.projection.size(); ++i)
        out << (i ? ", " : "") << name(d.projection[i]);
    out << "}\n";
    out << "l: " << d.label << "\n";
    out << "drs: [";
    for (std::size_t i = 0; i < d.conditions.size(); ++i) {
        const auto& c = d.conditions[i];
        out << (i ? ", " : "") << term(c.predicate) << "(" << term(c.subject) << ", "
            << term(c.object) << ")";
    }
    out << "]\n";
    out << "slots: {";
    for (std::size_t i = 0; i < d.slots.size(); ++i)
        out << (i ? ", " : "") << "(" << name(d.slots[i].variable) << ", "
            << d.slots[i].anchor << ", " << d.slots[i].arg_index << ")";
    out << "}\n";
    return out.str();
}

}  // namespace sempar
