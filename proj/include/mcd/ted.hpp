#pragma once
// Zhang-Shasha ordered tree edit distance with unit insert/delete/relabel costs.

#include <algorithm>
#include <cstddef>
#include <string>
#include <vector>

#include "mcd/ast.hpp"

namespace mcd {

// Postorder flattening with leftmost-leaf-descendant indices and keyroots;
// reusable when one tree takes part in many comparisons.
class TedTree {
public:
    explicit TedTree(const AstNode& root) {
        build(root);
        std::vector<bool> seen(labels_.size() + 1, false);
        for (std::size_t i = labels_.size(); i-- > 0;) {
            if (!seen[lml_[i]]) {
                keyroots_.push_back(i);
                seen[lml_[i]] = true;
            }
        }
        std::reverse(keyroots_.begin(), keyroots_.end());
    }
    explicit TedTree(const Ast& ast) : TedTree(ast.root) {}

    std::size_t size() const noexcept { return labels_.size(); }
    const std::vector<std::string>& labels() const noexcept { return labels_; }
    const std::vector<std::size_t>& leftmost() const noexcept { return lml_; }
    const std::vector<std::size_t>& keyroots() const noexcept { return keyroots_; }

private:
    std::size_t build(const AstNode& n) {
        std::size_t first = static_cast<std::size_t>(-1);
        for (const auto& c : n.children) {
            std::size_t l = build(c);
            if (first == static_cast<std::size_t>(-1)) first = l;
        }
        const std::size_t idx = labels_.size();
        labels_.push_back(n.label);
        lml_.push_back(first == static_cast<std::size_t>(-1) ? idx : first);
        return lml_.back();
    }

    std::vector<std::string> labels_;
    std::vector<std::size_t> lml_;
    std::vector<std::size_t> keyroots_;
};

inline std::size_t tree_edit_distance(const TedTree& a, const TedTree& b) {
    const std::size_t n = a.size(), m = b.size();
    std::vector<std::size_t> td(n * m, 0);
    std::vector<std::size_t> fd((n + 1) * (m + 1), 0);
    const auto& la = a.leftmost();
    const auto& lb = b.leftmost();
    const auto& laba = a.labels();
    const auto& labb = b.labels();

    for (std::size_t i : a.keyroots()) {
        for (std::size_t j : b.keyroots()) {
            const std::size_t li = la[i], lj = lb[j];
            const std::size_t rows = i - li + 2, cols = j - lj + 2;
            auto FD = [&](std::size_t r, std::size_t c) -> std::size_t& { return fd[r * cols + c]; };
            FD(0, 0) = 0;
            for (std::size_t r = 1; r < rows; ++r) FD(r, 0) = FD(r - 1, 0) + 1;
            for (std::size_t c = 1; c < cols; ++c) FD(0, c) = FD(0, c - 1) + 1;
            for (std::size_t r = 1; r < rows; ++r) {
                const std::size_t x = li + r - 1;
                for (std::size_t c = 1; c < cols; ++c) {
                    const std::size_t y = lj + c - 1;
                    const std::size_t del = FD(r - 1, c) + 1;
                    const std::size_t ins = FD(r, c - 1) + 1;
                    if (la[x] == li && lb[y] == lj) {
                        const std::size_t rel = FD(r - 1, c - 1) + (laba[x] == labb[y] ? 0 : 1);
                        FD(r, c) = std::min({del, ins, rel});
                        td[x * m + y] = FD(r, c);
                    } else {
                        const std::size_t sub = FD(la[x] - li, lb[y] - lj) + td[x * m + y];
                        FD(r, c) = std::min({del, ins, sub});
                    }
                }
            }
        }
    }
    return td[(n - 1) * m + (m - 1)];
}

inline std::size_t tree_edit_distance(const Ast& a, const Ast& b) {
    return tree_edit_distance(TedTree(a), TedTree(b));
}

inline std::size_t tree_edit_distance(const AstNode& a, const AstNode& b) {
    return tree_edit_distance(TedTree(a), TedTree(b));
}

}  // namespace mcd
