#include "sempar/query_text.hpp"

#include <cctype>
#include <sstream>
#include <vector>

namespace sempar {

namespace {

std::vector<std::string> tokenize(const std::string& text) {
    std::vector<std::string> toks;
    std::size_t i = 0;
    while (i < text.size()) {
        char c = text[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        if (c == '{' || c == '}') {
            toks.emplace_back(1, c);
            ++i;
            continue;
        }
        if (c == '.') {
            toks.emplace_back(".");
            ++i;
            continue;
        }
        if (c == '"') {
            std::size_t j = text.find('"', i + 1);
            if (j == std::string::npos) throw QueryError("unterminated string literal");
            toks.push_back(text.substr(i, j - i + 1));
            i = j + 1;
            continue;
        }
        std::size_t j = i;
        while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j])) &&
               text[j] != '{' && text[j] != '}')
            ++j;
        std::string tok = text.substr(i, j - i);
        // A trailing '.' terminates a pattern, not the token.
        while (!tok.empty() && tok.back() == '.') {
            tok.pop_back();
            --j;
        }
        if (!tok.empty()) toks.push_back(tok);
        i = j;
    }
    return toks;
}

PatternTerm parse_term(const std::string& tok) {
    if (tok.empty()) throw QueryError("empty term");
    if (tok[0] == '?') return Variable{tok.substr(1)};
    if (tok[0] == '"') return Literal::str(tok.substr(1, tok.size() - 2));
    if (tok[0] == '-' || std::isdigit(static_cast<unsigned char>(tok[0])))
        return Literal::integer(std::stoll(tok));
    if (tok == "a") return rdf_type();
    auto pos = tok.find(':');
    if (pos == std::string::npos)
        throw QueryError("expected prefixed name, variable, or literal: '" + tok + "'");
    return KbId{tok.substr(0, pos), tok.substr(pos + 1), IdKind::Resource};
}

std::string upper(std::string s) {
    for (auto& c : s) c = char(std::toupper(static_cast<unsigned char>(c)));
    return s;
}

}  // namespace

ConjunctiveQuery parse_query(const std::string& text) {
    auto toks = tokenize(text);
    std::size_t i = 0;
    auto need = [&](const char* what) -> const std::string& {
        if (i >= toks.size()) throw QueryError(std::string("unexpected end of query, expected ") + what);
        return toks[i];
    };

    ConjunctiveQuery q;
    std::string head = upper(need("SELECT or ASK"));
    ++i;
    if (head == "SELECT") {
        q.form = ConjunctiveQuery::Form::Select;
        if (i < toks.size() && upper(toks[i]) == "DISTINCT") ++i;
        while (i < toks.size() && toks[i][0] == '?') {
            q.projection.push_back(toks[i].substr(1));
            ++i;
        }
        if (q.projection.empty()) throw QueryError("SELECT without projection variables");
    } else if (head == "ASK") {
        q.form = ConjunctiveQuery::Form::Ask;
    } else {
        throw QueryError("query must start with SELECT or ASK");
    }
    if (i < toks.size() && upper(toks[i]) == "WHERE") ++i;
    if (need("'{'") != "{") throw QueryError("expected '{'");
    ++i;
    while (i < toks.size() && toks[i] != "}") {
        if (toks[i] == ".") {
            ++i;
            continue;
        }
        TriplePattern p;
        p.subject = parse_term(need("subject"));
        ++i;
        p.predicate = parse_term(need("predicate"));
        ++i;
        p.object = parse_term(need("object"));
        ++i;
        q.patterns.push_back(std::move(p));
    }
    if (i >= toks.size()) throw QueryError("expected '}'");
    q.validate();
    return q;
}

std::string write_query(const ConjunctiveQuery& q) {
    std::ostringstream out;
    if (q.form == ConjunctiveQuery::Form::Select) {
        out << "SELECT DISTINCT";
        for (const auto& v : q.projection) out << " ?" << v;
        out << " WHERE {";
    } else {
        out << "ASK WHERE {";
    }
    for (const auto& p : q.patterns) out << " " << p.str() << " .";
    out << " }";
    return out.str();
}

std::string write_result_set(const ResultSet& rs) {
    std::ostringstream out;
    if (rs.form == ConjunctiveQuery::Form::Ask) {
        out << (rs.ask_answer ? "true" : "false") << "\n";
        return out.str();
    }
    for (const auto& row : rs.rows) {
        bool first = true;
        for (const auto& t : row) {
            if (!first) out << "\t";
            out << term_str(t);
            first = false;
        }
        out << "\n";
    }
    return out.str();
}

}  // namespace sempar
