#pragma once
// Leaf-to-leaf path contexts over an Ast.

#include <cstddef>
#include <string>
#include <vector>

#include "mcd/ast.hpp"

namespace mcd {

enum class Direction : unsigned char { Up, Down };

struct PathStep {
    std::string label;
    Direction dir;

    friend bool operator==(const PathStep&, const PathStep&) = default;
    friend auto operator<=>(const PathStep&, const PathStep&) = default;
};

// (start terminal, internal path, end terminal). Steps below and including
// the lowest common ancestor are entered going Up; the rest going Down.
struct PathContext {
    std::string start;
    std::vector<PathStep> path;
    std::string end;

    // Key used for vocabulary lookup, e.g. "^Lit^Move^Block_Turn_Lit_".
    // The trailing '_' is the final descent into the end terminal.
    std::string path_key() const {
        std::string k;
        for (const auto& s : path) {
            k += s.dir == Direction::Up ? '^' : '_';
            k += s.label;
        }
        k += '_';
        return k;
    }

    friend bool operator==(const PathContext&, const PathContext&) = default;
    friend auto operator<=>(const PathContext&, const PathContext&) = default;
};

struct PathConfig {
    std::size_t max_length = 8;  // internal nodes on the path
    std::size_t max_width = 2;   // leaf-order index difference
};

namespace detail {

struct LeafInfo {
    const AstNode* leaf;
    std::vector<const AstNode*> ancestors;  // root first, parent last
};

inline void collect_leaves(const AstNode& n, std::vector<const AstNode*>& stack, std::vector<LeafInfo>& out) {
    if (n.is_leaf()) {
        out.push_back({&n, stack});
        return;
    }
    stack.push_back(&n);
    for (const auto& c : n.children) collect_leaves(c, stack, out);
    stack.pop_back();
}

}  // namespace detail

/// All leaf pairs (i < j in leaf order) with j - i <= max_width whose
/// connecting path has at most max_length internal nodes, ordered by (i, j).
inline std::vector<PathContext> extract_paths(const Ast& ast, const PathConfig& cfg = {}) {
    std::vector<detail::LeafInfo> leaves;
    std::vector<const AstNode*> stack;
    detail::collect_leaves(ast.root, stack, leaves);

    std::vector<PathContext> out;
    for (std::size_t i = 0; i < leaves.size(); ++i) {
        for (std::size_t j = i + 1; j < leaves.size() && j - i <= cfg.max_width; ++j) {
            const auto& a = leaves[i].ancestors;
            const auto& b = leaves[j].ancestors;
            std::size_t common = 0;
            while (common < a.size() && common < b.size() && a[common] == b[common]) ++common;
            // a[common-1] is the LCA; it exists because both share the root.
            const std::size_t up = a.size() - (common - 1);
            const std::size_t down = b.size() - common;
            if (up + down > cfg.max_length) continue;
            PathContext ctx;
            ctx.start = leaves[i].leaf->label;
            ctx.end = leaves[j].leaf->label;
            ctx.path.reserve(up + down);
            for (std::size_t k = a.size(); k-- > common - 1;) ctx.path.push_back({a[k]->label, Direction::Up});
            for (std::size_t k = common; k < b.size(); ++k) ctx.path.push_back({b[k]->label, Direction::Down});
            out.push_back(std::move(ctx));
        }
    }
    return out;
}

}  // namespace mcd
