#include "sempar/kb.hpp"

#include <cctype>
#include <fstream>
#include <istream>
#include <sstream>

namespace sempar {

namespace {

struct Tok {
    enum class Kind { PName, IriRef, A, StringLit, IntLit, Dot, Semi, Comma, Prefix, End };
    Kind kind;
    std::string text;  // "ns:local" for PName, raw IRI for IriRef, literal body otherwise
    std::int64_t value = 0;
    int line = 0;
};

class Lexer {
public:
    Lexer(std::istream& in) : in_(in) {}

    Tok next() {
        skip_ws_and_comments();
        int line = line_;
        int c = peek();
        if (c == EOF) return {Tok::Kind::End, "", 0, line};
        if (c == '.') { get(); return {Tok::Kind::Dot, ".", 0, line}; }
        if (c == ';') { get(); return {Tok::Kind::Semi, ";", 0, line}; }
        if (c == ',') { get(); return {Tok::Kind::Comma, ",", 0, line}; }
        if (c == '"') return string_lit(line);
        if (c == '<') return iri_ref(line);
        if (c == '-' || std::isdigit(c)) return int_lit(line);
        return name(line);
    }

    int line() const { return line_; }

private:
    int peek() { return in_.peek(); }
    int get() {
        int c = in_.get();
        if (c == '\n') ++line_;
        return c;
    }

    void skip_ws_and_comments() {
        for (;;) {
            int c = peek();
            if (c == '#') {
                while (c != EOF && c != '\n') c = get();
            } else if (c != EOF && std::isspace(c)) {
                get();
            } else {
                return;
            }
        }
    }

    Tok string_lit(int line) {
        get();  // opening quote
        std::string s;
        for (;;) {
            int c = get();
            if (c == EOF) throw TurtleError(line, "unterminated string literal");
            if (c == '"') break;
            if (c == '\\') {
                int e = get();
                switch (e) {
                    case 'n': s += '\n'; break;
                    case 't': s += '\t'; break;
                    case '"': s += '"'; break;
                    case '\\': s += '\\'; break;
                    default: throw TurtleError(line, "unsupported escape in string literal");
                }
            } else {
                s += char(c);
            }
        }
        return {Tok::Kind::StringLit, s, 0, line};
    }

    Tok iri_ref(int line) {
        get();  // '<'
        std::string s;
        for (;;) {
            int c = get();
            if (c == EOF) throw TurtleError(line, "unterminated IRI reference");
            if (c == '>') break;
            s += char(c);
        }
        return {Tok::Kind::IriRef, s, 0, line};
    }

    Tok int_lit(int line) {
        std::string s;
        if (peek() == '-') s += char(get());
        while (std::isdigit(peek())) s += char(get());
        if (s.empty() || s == "-") throw TurtleError(line, "malformed integer literal");
        return {Tok::Kind::IntLit, s, std::stoll(s), line};
    }

    Tok name(int line) {
        std::string s;
        while (true) {
            int c = peek();
            if (c == EOF || std::isspace(c) || c == '.' || c == ';' || c == ',' ||
                c == '"' || c == '<')
                break;
            // A trailing '.' statement terminator is not part of a name, but a
            // '.' inside (e.g. a dotted local name) is not in the subset anyway.
            s += char(get());
        }
        if (s.empty()) throw TurtleError(line, "unexpected character");
        if (s == "a") return {Tok::Kind::A, "a", 0, line};
        if (s == "@prefix") return {Tok::Kind::Prefix, s, 0, line};
        if (s.find(':') == std::string::npos)
            throw TurtleError(line, "expected prefixed name, got '" + s + "'");
        return {Tok::Kind::PName, s, 0, line};
    }

    std::istream& in_;
    int line_ = 1;
};

KbId split_pname(const std::string& s, int line) {
    auto pos = s.find(':');
    std::string ns = s.substr(0, pos);
    std::string local = s.substr(pos + 1);
    if (local.empty())
        throw TurtleError(line, "prefixed name with empty local part: '" + s + "'");
    for (char c : local)
        if (std::isspace(static_cast<unsigned char>(c)))
            throw TurtleError(line, "whitespace in local name: '" + s + "'");
    return KbId{ns, local, IdKind::Resource};
}

}  // namespace

TripleStore load_turtle(std::istream& in) {
    Lexer lex(in);
    TripleStore store;
    std::map<std::string, std::string> prefixes;

    Tok t = lex.next();
    while (t.kind != Tok::Kind::End) {
        if (t.kind == Tok::Kind::Prefix) {
            Tok p = lex.next();
            if (p.kind != Tok::Kind::PName && !(p.kind == Tok::Kind::A))
                throw TurtleError(p.line, "expected prefix name after @prefix");
            std::string ns = p.text.substr(0, p.text.find(':'));
            Tok iri = lex.next();
            if (iri.kind != Tok::Kind::IriRef)
                throw TurtleError(iri.line, "expected IRI after prefix name");
            auto it = prefixes.find(ns);
            if (it != prefixes.end() && it->second != iri.text)
                throw TurtleError(iri.line, "prefix '" + ns +
                                                "' redefined with a conflicting IRI");
            prefixes[ns] = iri.text;
            Tok dot = lex.next();
            if (dot.kind != Tok::Kind::Dot)
                throw TurtleError(dot.line, "expected '.' after prefix declaration");
            t = lex.next();
            continue;
        }

        if (t.kind != Tok::Kind::PName)
            throw TurtleError(t.line, "expected subject");
        KbId subject = split_pname(t.text, t.line);

        for (;;) {  // predicate-object groups separated by ';'
            Tok pt = lex.next();
            KbId predicate;
            if (pt.kind == Tok::Kind::A) {
                predicate = rdf_type();
            } else if (pt.kind == Tok::Kind::PName) {
                predicate = split_pname(pt.text, pt.line);
            } else {
                throw TurtleError(pt.line, "expected predicate");
            }

            for (;;) {  // objects separated by ','
                Tok ot = lex.next();
                Term object;
                if (ot.kind == Tok::Kind::PName) {
                    object = Term{split_pname(ot.text, ot.line)};
                } else if (ot.kind == Tok::Kind::StringLit) {
                    object = Term{Literal::str(ot.text)};
                } else if (ot.kind == Tok::Kind::IntLit) {
                    object = Term{Literal::integer(ot.value)};
                } else {
                    throw TurtleError(ot.line, "expected object");
                }
                store.add(Triple{subject, predicate, std::move(object)});
                Tok sep = lex.next();
                if (sep.kind == Tok::Kind::Comma) continue;
                if (sep.kind == Tok::Kind::Semi) goto next_predicate;
                if (sep.kind == Tok::Kind::Dot) goto next_statement;
                throw TurtleError(sep.line, "expected '.', ';' or ',' after object");
            }
        next_predicate:;
        }
    next_statement:
        t = lex.next();
    }

    store.freeze();
    return store;
}

TripleStore load_turtle_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open turtle file: " + path);
    return load_turtle(in);
}

}  // namespace sempar
