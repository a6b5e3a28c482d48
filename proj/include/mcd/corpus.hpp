#pragma once
// Portable AST JSON and the corpus file format.
//
//   node:   {"label": <string>, "children": [<node>...]}
//   corpus: {"submissions": [{"id", "source" | "ast", "rubric": [bool x6], "overall"}]}

#include <array>
#include <cstddef>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "mcd/ast.hpp"
#include "mcd/errors.hpp"
#include "mcd/rubric.hpp"
#include "mcd/turtle.hpp"

namespace mcd {

using json = nlohmann::json;

inline json ast_to_json(const AstNode& node) {
    json children = json::array();
    for (const auto& c : node.children) children.push_back(ast_to_json(c));
    return json{{"label", node.label}, {"children", std::move(children)}};
}

inline AstNode ast_from_json(const json& j, const std::string& where = "$") {
    if (!j.is_object()) throw SchemaError(where + ": node must be an object");
    auto label = j.find("label");
    if (label == j.end() || !label->is_string()) throw SchemaError(where + ": node missing string \"label\"");
    if (label->get_ref<const std::string&>().empty()) throw SchemaError(where + ": empty label");
    AstNode node{label->get<std::string>()};
    if (auto ch = j.find("children"); ch != j.end()) {
        if (!ch->is_array()) throw SchemaError(where + ": \"children\" must be an array");
        for (std::size_t i = 0; i < ch->size(); ++i)
            node.children.push_back(ast_from_json((*ch)[i], where + ".children[" + std::to_string(i) + "]"));
    }
    for (const auto& [key, _] : j.items())
        if (key != "label" && key != "children") throw SchemaError(where + ": unexpected key \"" + key + "\"");
    return node;
}

inline std::string to_portable(const Ast& ast) { return ast_to_json(ast.root).dump(); }

inline Ast from_portable(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw SchemaError(std::string("malformed JSON: ") + e.what());
    }
    return Ast{ast_from_json(j)};
}

struct Submission {
    std::string id;
    std::optional<std::string> source;  // exactly one of source / stored ast is serialized
    Ast ast;                             // always populated after loading
    RubricScore rubric;
};

struct Corpus {
    std::vector<Submission> submissions;

    std::size_t size() const noexcept { return submissions.size(); }
    std::vector<int> labels() const {
        std::vector<int> y;
        y.reserve(submissions.size());
        for (const auto& s : submissions) y.push_back(s.rubric.overall ? 1 : 0);
        return y;
    }
};

inline json corpus_to_json(const Corpus& corpus) {
    json subs = json::array();
    for (const auto& s : corpus.submissions) {
        json j;
        j["id"] = s.id;
        if (s.source)
            j["source"] = *s.source;
        else
            j["ast"] = ast_to_json(s.ast.root);
        j["rubric"] = json(std::vector<bool>(s.rubric.items.begin(), s.rubric.items.end()));
        j["overall"] = s.rubric.overall;
        subs.push_back(std::move(j));
    }
    return json{{"submissions", std::move(subs)}};
}

inline Corpus corpus_from_json(const json& j) {
    if (!j.is_object() || !j.contains("submissions") || !j["submissions"].is_array())
        throw SchemaError("corpus must be an object with a \"submissions\" array");
    Corpus corpus;
    std::set<std::string> ids;
    for (std::size_t i = 0; i < j["submissions"].size(); ++i) {
        const json& s = j["submissions"][i];
        const std::string where = "submissions[" + std::to_string(i) + "]";
        if (!s.is_object()) throw SchemaError(where + " must be an object");
        if (!s.contains("id") || !s["id"].is_string()) throw SchemaError(where + ": missing string \"id\"");
        Submission sub;
        sub.id = s["id"].get<std::string>();
        if (!ids.insert(sub.id).second) throw SchemaError(where + ": duplicate id \"" + sub.id + "\"");
        const bool has_src = s.contains("source"), has_ast = s.contains("ast");
        if (has_src == has_ast) throw SchemaError(where + ": exactly one of \"source\" or \"ast\" is required");
        if (has_src) {
            if (!s["source"].is_string()) throw SchemaError(where + ": \"source\" must be a string");
            sub.source = s["source"].get<std::string>();
            sub.ast = parse(*sub.source);
        } else {
            sub.ast = Ast{ast_from_json(s["ast"], where + ".ast")};
        }
        if (!s.contains("rubric") || !s["rubric"].is_array() || s["rubric"].size() != kRubricItems)
            throw SchemaError(where + ": \"rubric\" must be an array of 6 booleans");
        for (std::size_t k = 0; k < kRubricItems; ++k) {
            if (!s["rubric"][k].is_boolean()) throw SchemaError(where + ": rubric entries must be booleans");
            sub.rubric.items[k] = s["rubric"][k].get<bool>();
        }
        if (!s.contains("overall") || !s["overall"].is_boolean())
            throw SchemaError(where + ": missing boolean \"overall\"");
        sub.rubric.overall = s["overall"].get<bool>();
        bool all = true;
        for (bool b : sub.rubric.items) all = all && b;
        if (all != sub.rubric.overall) throw SchemaError(where + ": \"overall\" must equal the AND of the rubric");
        corpus.submissions.push_back(std::move(sub));
    }
    return corpus;
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + path + "'");
    out << text;
    if (!out) throw IoError("failed writing '" + path + "'");
}

inline Corpus load_corpus(const std::string& path) {
    json j;
    try {
        j = json::parse(read_text_file(path));
    } catch (const json::parse_error& e) {
        throw SchemaError("'" + path + "': " + e.what());
    }
    return corpus_from_json(j);
}

inline void save_corpus(const std::string& path, const Corpus& corpus) {
    write_text_file(path, corpus_to_json(corpus).dump(1) + "\n");
}

}  // namespace mcd
