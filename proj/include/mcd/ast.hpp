#pragma once
// Ordered labeled trees. Internal nodes carry a node kind (ProcDef, Repeat,
// Move, ...); leaves carry either a childless kind (PenDown, an empty Body) or
// the literal/identifier text of the program.

#include <cstddef>
#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace mcd {

struct AstNode {
    std::string label;
    std::vector<AstNode> children;

    AstNode() = default;
    explicit AstNode(std::string l) : label(std::move(l)) {}
    AstNode(std::string l, std::vector<AstNode> c) : label(std::move(l)), children(std::move(c)) {}

    bool is_leaf() const noexcept { return children.empty(); }

    friend bool operator==(const AstNode&, const AstNode&) = default;
};

struct Ast {
    AstNode root;

    friend bool operator==(const Ast&, const Ast&) = default;
};

inline std::size_t tree_size(const AstNode& node) {
    std::size_t n = 1;
    for (const auto& c : node.children) n += tree_size(c);
    return n;
}

inline std::size_t tree_size(const Ast& ast) { return tree_size(ast.root); }

// Pre-order visit; the callback receives the node and its depth.
inline void visit_preorder(const AstNode& node, const std::function<void(const AstNode&, std::size_t)>& fn,
                           std::size_t depth = 0) {
    fn(node, depth);
    for (const auto& c : node.children) visit_preorder(c, fn, depth + 1);
}

// Leaves in left-to-right order.
inline std::vector<const AstNode*> leaves(const AstNode& root) {
    std::vector<const AstNode*> out;
    std::function<void(const AstNode&)> walk = [&](const AstNode& n) {
        if (n.is_leaf()) {
            out.push_back(&n);
            return;
        }
        for (const auto& c : n.children) walk(c);
    };
    walk(root);
    return out;
}

// Compact functional notation, e.g. Program(ProcDef(Name(spiral), Body(PenDown))).
inline void to_sexpr(const AstNode& node, std::string& out) {
    out += node.label;
    if (node.children.empty()) return;
    out += '(';
    for (std::size_t i = 0; i < node.children.size(); ++i) {
        if (i) out += ", ";
        to_sexpr(node.children[i], out);
    }
    out += ')';
}

inline std::string to_sexpr(const AstNode& node) {
    std::string s;
    to_sexpr(node, s);
    return s;
}

inline std::string to_sexpr(const Ast& ast) { return to_sexpr(ast.root); }

}  // namespace mcd
