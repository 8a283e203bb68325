#include "sempar/features.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace sempar {

double dot(const FeatureVector& f, const FeatureVector& theta) {
    double s = 0;
    for (const auto& [name, value] : f) {
        auto it = theta.find(name);
        if (it != theta.end()) s += value * it->second;
    }
    return s;
}

FeatureVector diff(const FeatureVector& a, const FeatureVector& b) {
    FeatureVector out = a;
    for (const auto& [name, value] : b) {
        out[name] -= value;
        if (out[name] == 0.0) out.erase(name);
    }
    return out;
}

double norm_sq(const FeatureVector& f) {
    double s = 0;
    for (const auto& [name, value] : f) s += value * value;
    return s;
}

std::string split_camel_case(const std::string& s) {
    std::string out;
    for (std::size_t i = 0; i < s.size(); ++i) {
        unsigned char c = s[i];
        if (std::isupper(c) && i > 0 && !std::isupper(static_cast<unsigned char>(s[i - 1])))
            out += ' ';
        if (c == '_') {
            out += ' ';
            continue;
        }
        out += char(std::tolower(c));
    }
    return out;
}

namespace {

std::size_t levenshtein(const std::string& a, const std::string& b) {
    std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        cur[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

}  // namespace

double string_similarity(const std::string& a, const std::string& b) {
    std::string na = normalize_term(split_camel_case(a));
    std::string nb = normalize_term(split_camel_case(b));
    std::size_t longest = std::max(na.size(), nb.size());
    if (longest == 0) return 1.0;  // both empty
    return 1.0 - double(levenshtein(na, nb)) / double(longest);
}

std::string ParseState::key() const {
    std::ostringstream out;
    for (const auto& [node, kind] : beta) {
        out << node << "=" << dude_kind_name(kind);
        auto it = alpha.find(node);
        if (it != alpha.end()) {
            out << ":" << it->second.kb_id.str();
            if (it->second.restriction_object)
                out << "|" << term_str(*it->second.restriction_object);
        }
        out << ";";
    }
    out << "/";
    for (const auto& [edge, idx] : gamma)
        out << edge.parent << ">" << edge.child << "=" << idx << ";";
    return out.str();
}

Template& TemplateModel::at(const std::string& id) {
    for (auto& t : templates)
        if (t.id == id) return t;
    throw std::runtime_error("no template with id '" + id + "'");
}

const Template& TemplateModel::at(const std::string& id) const {
    for (const auto& t : templates)
        if (t.id == id) return t;
    throw std::runtime_error("no template with id '" + id + "'");
}

TemplateModel TemplateModel::default_model() {
    return TemplateModel{{Template{"node", {}}, Template{"edge", {}}}};
}

std::string TemplateModel::serialize() const {
    // template_id \t feature \t weight, lexicographically sorted.
    std::vector<std::string> lines;
    for (const auto& t : templates)
        for (const auto& [name, w] : t.theta) {
            std::ostringstream line;
            line.precision(17);
            line << t.id << "\t" << name << "\t" << w;
            lines.push_back(line.str());
        }
    std::sort(lines.begin(), lines.end());
    std::string out = "sempar-model\tv1\n";
    for (const auto& l : lines) {
        out += l;
        out += '\n';
    }
    return out;
}

void TemplateModel::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write model file: " + path);
    out << serialize();
}

TemplateModel TemplateModel::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open model file: " + path);
    std::string header;
    if (!std::getline(in, header) || header.rfind("sempar-model\t", 0) != 0)
        throw std::runtime_error("not a model file: " + path);
    TemplateModel model = default_model();
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto t1 = line.find('\t');
        auto t2 = line.rfind('\t');
        if (t1 == std::string::npos || t2 == t1)
            throw std::runtime_error("malformed model line: " + line);
        model.at(line.substr(0, t1)).theta[line.substr(t1 + 1, t2 - t1 - 1)] =
            std::stod(line.substr(t2 + 1));
    }
    return model;
}

FeatureVector node_features(const ParseState& state, int node_id) {
    FeatureVector f;
    const DepNode& n = state.tree->node(node_id);
    auto kind_it = state.beta.find(node_id);
    if (kind_it == state.beta.end()) return f;
    const std::string kind = dude_kind_name(kind_it->second);

    auto a = state.alpha.find(node_id);
    if (a != state.alpha.end()) {
        const auto& as = a->second;
        f["lemma=" + n.lemma + "\x1e" + "kbid=" + as.kb_id.str() + "\x1e" +
          "pos=" + n.upos + "\x1e" + "kind=" + kind] = 1.0;
        if (as.frequency_score != 0.0) f["freq"] = as.frequency_score;
        f["strsim"] = string_similarity(as.kb_id.local, n.lemma);
    } else {
        // QueryVar nodes carry no KB id.
        f["lemma=" + n.lemma + "\x1e" + "pos=" + n.upos + "\x1e" + "kind=" + kind] = 1.0;
    }
    return f;
}

FeatureVector edge_features(const ParseState& state, const EdgeKey& e,
                            const FactorContext& ctx) {
    FeatureVector f;
    auto g = state.gamma.find(e);
    if (g == state.gamma.end()) return f;
    int arg = g->second;

    std::string rel = "?";
    for (const auto& edge : state.tree->edges)
        if (edge.parent == e.parent && edge.child == e.child) rel = edge.relation;

    auto kind_name = [&](int node) -> std::string {
        auto it = state.beta.find(node);
        return it == state.beta.end() ? "-" : dude_kind_name(it->second);
    };
    f["rel=" + rel + "\x1e" + "pkind=" + kind_name(e.parent) + "\x1e" +
      "ckind=" + kind_name(e.child) + "\x1e" + "arg=" + std::to_string(arg)] = 1.0;

    // Domain/range compatibility for a property parent; arg 1 checks the
    // declared domain, arg 2 the declared range.
    auto pk = state.beta.find(e.parent);
    auto pa = state.alpha.find(e.parent);
    if (ctx.kb && pk != state.beta.end() &&
        (pk->second == DudeKind::Property || pk->second == DudeKind::RestrictionClass) &&
        pa != state.alpha.end()) {
        const char* side = arg == 1 ? "domain" : "range";
        auto declared = arg == 1 ? ctx.kb->domain_of(pa->second.kb_id)
                                 : ctx.kb->range_of(pa->second.kb_id);
        auto ca = state.alpha.find(e.child);
        if (!declared || ca == state.alpha.end()) {
            f[std::string(side) + "-unknown"] = 1.0;
        } else if (ctx.kb->is_instance_of(ca->second.kb_id, *declared)) {
            f[std::string(side) + "-compatible"] = 1.0;
        } else {
            f[std::string(side) + "-incompatible"] = 1.0;
        }
    }
    return f;
}

std::vector<Factor> roll_out(const ParseState& state, const FactorContext& ctx) {
    std::vector<Factor> factors;
    for (const auto& [node, kind] : state.beta) {
        (void)kind;
        factors.push_back({"node", "n" + std::to_string(node), node_features(state, node)});
    }
    for (const auto& [edge, idx] : state.gamma) {
        (void)idx;
        factors.push_back({"edge",
                           "e" + std::to_string(edge.parent) + ">" + std::to_string(edge.child),
                           edge_features(state, edge, ctx)});
    }
    return factors;
}

double model_score(const ParseState& state, const TemplateModel& model,
                   const FactorContext& ctx) {
    double score = 0;
    for (const auto& factor : roll_out(state, ctx))
        score += dot(factor.features, model.at(factor.template_id).theta);
    return score;
}

}  // namespace sempar
