#include "sempar/conllu.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <istream>
#include <sstream>

namespace sempar {

namespace {

const std::set<std::string> kUposTags = {
    "ADJ", "ADP", "ADV", "AUX", "CCONJ", "DET", "INTJ", "NOUN", "NUM",
    "PART", "PRON", "PROPN", "PUNCT", "SCONJ", "SYM", "VERB", "X"};

// v1 -> v2 label drift.
const std::map<std::string, std::string> kRelationAliases = {
    {"dobj", "obj"},
    {"nsubjpass", "nsubj:pass"},
    {"auxpass", "aux:pass"},
    {"neg", "advmod"},
};

std::string normalize_relation(const std::string& rel) {
    auto it = kRelationAliases.find(rel);
    return it == kRelationAliases.end() ? rel : it->second;
}

std::string lowercase(std::string s) {
    for (auto& c : s) c = char(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

std::vector<std::string> split_tabs(const std::string& line) {
    std::vector<std::string> cols;
    std::size_t start = 0;
    for (;;) {
        auto pos = line.find('\t', start);
        if (pos == std::string::npos) {
            cols.push_back(line.substr(start));
            return cols;
        }
        cols.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

}  // namespace

const DepNode& DepTree::node(int id) const {
    for (const auto& n : nodes)
        if (n.id == id) return n;
    throw ConlluError("no node with id " + std::to_string(id));
}

std::vector<const DepEdge*> DepTree::children_of(int id) const {
    std::vector<const DepEdge*> out;
    for (const auto& e : edges)
        if (e.parent == id) out.push_back(&e);
    std::sort(out.begin(), out.end(), [this](const DepEdge* a, const DepEdge* b) {
        return node(a->child).span_begin < node(b->child).span_begin;
    });
    return out;
}

void DepTree::check_tree() const {
    std::map<int, int> parent_count;
    for (const auto& n : nodes) parent_count[n.id] = 0;
    for (const auto& e : edges) {
        if (!parent_count.count(e.parent) || !parent_count.count(e.child))
            throw ConlluError("edge references unknown node in sentence " + sent_id);
        ++parent_count[e.child];
    }
    if (!parent_count.count(root))
        throw ConlluError("root id not among nodes in sentence " + sent_id);
    for (const auto& [id, cnt] : parent_count) {
        if (id == root && cnt != 0)
            throw ConlluError("root node has a head in sentence " + sent_id);
        if (id != root && cnt != 1)
            throw ConlluError("node " + std::to_string(id) +
                              " has " + std::to_string(cnt) + " heads in sentence " + sent_id);
    }
    // Connectivity: walk up from every node and make sure we reach the root.
    std::map<int, int> head;
    for (const auto& e : edges) head[e.child] = e.parent;
    for (const auto& n : nodes) {
        int cur = n.id;
        std::set<int> seen;
        while (cur != root) {
            if (!seen.insert(cur).second)
                throw ConlluError("cycle through node " + std::to_string(cur) +
                                  " in sentence " + sent_id);
            auto it = head.find(cur);
            if (it == head.end())
                throw ConlluError("node " + std::to_string(cur) +
                                  " is disconnected in sentence " + sent_id);
            cur = it->second;
        }
    }
}

std::vector<DepTree> parse_conllu(std::istream& in, const std::string& lang) {
    std::vector<DepTree> trees;
    DepTree cur;
    cur.lang = lang;
    std::vector<std::pair<int, std::pair<int, std::string>>> heads;  // child -> (head, rel)
    int line_no = 0;

    auto flush = [&]() {
        if (cur.nodes.empty()) return;
        int root = 0;
        for (const auto& [child, hr] : heads) {
            if (hr.first == 0) {
                if (root != 0)
                    throw ConlluError("multiple roots in sentence " + cur.sent_id);
                root = child;
            } else {
                cur.edges.push_back({hr.first, child, hr.second});
            }
        }
        if (root == 0) throw ConlluError("no root in sentence " + cur.sent_id);
        cur.root = root;
        cur.check_tree();
        trees.push_back(std::move(cur));
        cur = DepTree{};
        cur.lang = lang;
        heads.clear();
    };

    std::string line;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) {
            flush();
            continue;
        }
        if (line[0] == '#') {
            auto eq = line.find('=');
            if (eq != std::string::npos) {
                std::string key = line.substr(1, eq - 1);
                std::string val = line.substr(eq + 1);
                auto trim = [](std::string s) {
                    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
                        s.erase(s.begin());
                    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
                        s.pop_back();
                    return s;
                };
                key = trim(key);
                val = trim(val);
                if (key == "sent_id") cur.sent_id = val;
                if (key == "text") cur.text = val;
            }
            continue;
        }
        auto cols = split_tabs(line);
        if (cols.size() != 10)
            throw ConlluError("line " + std::to_string(line_no) + " (sentence " +
                              cur.sent_id + "): expected 10 columns, got " +
                              std::to_string(cols.size()));
        // Multiword-token ranges (1-2) and empty nodes (1.1) are ignored.
        if (cols[0].find('-') != std::string::npos ||
            cols[0].find('.') != std::string::npos)
            continue;
        DepNode n;
        try {
            n.id = std::stoi(cols[0]);
        } catch (const std::exception&) {
            throw ConlluError("line " + std::to_string(line_no) + ": bad token id");
        }
        n.surface = cols[1];
        n.lemma = cols[2] == "_" ? lowercase(cols[1]) : cols[2];
        n.upos = cols[3];
        if (!kUposTags.count(n.upos))
            throw ConlluError("line " + std::to_string(line_no) + ": unknown UPOS tag '" +
                              n.upos + "'");
        n.span_begin = n.span_end = n.id;
        int head;
        try {
            head = std::stoi(cols[6]);
        } catch (const std::exception&) {
            throw ConlluError("line " + std::to_string(line_no) + ": bad HEAD column");
        }
        heads.emplace_back(n.id, std::make_pair(head, normalize_relation(cols[7])));
        cur.nodes.push_back(std::move(n));
    }
    flush();
    return trees;
}

std::vector<DepTree> parse_conllu_file(const std::string& path, const std::string& lang) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open CoNLL-U file: " + path);
    return parse_conllu(in, lang);
}

DepTree merge_compounds(const DepTree& t) {
    // Union-find over compound edges.
    std::map<int, int> rep;
    for (const auto& n : t.nodes) rep[n.id] = n.id;
    std::function<int(int)> find = [&](int x) {
        while (rep[x] != x) x = rep[x] = rep[rep[x]];
        return x;
    };
    for (const auto& e : t.edges)
        if (e.relation == "compound") rep[find(e.child)] = find(e.parent);

    std::map<int, std::vector<const DepNode*>> groups;
    for (const auto& n : t.nodes) groups[find(n.id)].push_back(&n);

    DepTree out;
    out.sent_id = t.sent_id;
    out.text = t.text;
    out.lang = t.lang;
    for (auto& [root_id, members] : groups) {
        std::sort(members.begin(), members.end(),
                  [](const DepNode* a, const DepNode* b) { return a->span_begin < b->span_begin; });
        DepNode n;
        n.id = root_id;
        n.upos = t.node(root_id).upos;
        n.span_begin = members.front()->span_begin;
        n.span_end = members.back()->span_end;
        for (std::size_t i = 0; i < members.size(); ++i) {
            if (i) {
                n.surface += ' ';
                n.lemma += ' ';
            }
            n.surface += members[i]->surface;
            n.lemma += members[i]->lemma;
        }
        out.nodes.push_back(std::move(n));
    }
    std::sort(out.nodes.begin(), out.nodes.end(),
              [](const DepNode& a, const DepNode& b) { return a.span_begin < b.span_begin; });
    for (const auto& e : t.edges) {
        if (e.relation == "compound") continue;
        DepEdge ne{find(e.parent), find(e.child), e.relation};
        if (ne.parent != ne.child) out.edges.push_back(ne);
    }
    out.root = find(t.root);
    out.check_tree();
    return out;
}

RelationClassTable RelationClassTable::defaults() {
    RelationClassTable t;
    auto put = [&](std::initializer_list<const char*> rels, const char* cls) {
        for (const char* r : rels) t.classes_[r] = cls;
    };
    put({"nsubj", "obj", "iobj", "csubj", "ccomp", "xcomp"}, "core_arguments");
    put({"obl", "vocative", "expl", "dislocated", "advcl", "advmod", "discourse",
         "aux", "cop", "mark"},
        "noncore_dependents");
    put({"nmod", "appos", "nummod", "acl", "amod", "det", "clf"}, "nominal_dependents");
    put({"case"}, "case_marking");
    put({"conj", "cc"}, "coordination");
    put({"fixed", "flat", "compound"}, "mwe");
    put({"list", "parataxis"}, "loose");
    put({"orphan", "goeswith", "reparandum"}, "special");
    put({"punct", "root", "dep"}, "other");
    return t;
}

RelationClassTable RelationClassTable::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open relation class table: " + path);
    RelationClassTable t;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        auto tab = line.find('\t');
        if (tab == std::string::npos)
            throw std::runtime_error("malformed relation class line: " + line);
        t.classes_[line.substr(0, tab)] = line.substr(tab + 1);
    }
    return t;
}

std::string RelationClassTable::class_of(const std::string& relation) const {
    auto it = classes_.find(relation);
    if (it != classes_.end()) return it->second;
    auto colon = relation.find(':');
    if (colon != std::string::npos) {
        it = classes_.find(relation.substr(0, colon));
        if (it != classes_.end()) return it->second;
    }
    return "";
}

bool RelationClassTable::is_traversable(const std::string& relation) const {
    auto cls = class_of(relation);
    return cls == "core_arguments" || cls == "noncore_dependents" ||
           cls == "nominal_dependents";
}

TraversalCandidates traversal_candidates(const DepTree& t, const RelationClassTable& table) {
    static const std::set<std::string> kPos = {"NOUN", "VERB", "ADJ", "PRON", "PROPN", "DET"};
    TraversalCandidates out;
    for (const auto& n : t.nodes)
        if (kPos.count(n.upos)) out.nodes.insert(n.id);
    for (const auto& e : t.edges)
        if (table.is_traversable(e.relation)) out.edges.push_back(e);
    return out;
}

}  // namespace sempar
