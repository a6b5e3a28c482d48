#pragma once
// Independent reference implementations used by the unit and acceptance
// tests. None of these share code with the library routines they check.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "mcd/ast.hpp"
#include "mcd/code2vec.hpp"
#include "mcd/matrix.hpp"

namespace oracle {

// ---------------------------------------------------------------------------
// Tree edit distance by breadth-first search over single edit operations.
//
// An optimal unit-cost script can always be ordered deletions, relabels,
// insertions, so every intermediate tree has at most max(|a|, |b|) nodes.
// Searching the graph of all trees up to that size is therefore exact.

struct Tree {
    char label;
    std::vector<Tree> kids;
};

inline std::string encode(const Tree& t) {
    std::string s(1, t.label);
    if (!t.kids.empty()) {
        s += '(';
        for (const auto& k : t.kids) s += encode(k);
        s += ')';
    }
    return s;
}

inline std::size_t count(const Tree& t) {
    std::size_t n = 1;
    for (const auto& k : t.kids) n += count(k);
    return n;
}

// Applies fn to every node, passing a mutable reference inside a copy of the root.
inline void for_each_node(const Tree& root, const std::function<void(Tree& copy, Tree& node)>& fn) {
    std::vector<std::size_t> path;
    std::function<void(const Tree&)> walk = [&](const Tree& n) {
        Tree copy = root;
        Tree* cur = &copy;
        for (auto i : path) cur = &cur->kids[i];
        fn(copy, *cur);
        for (std::size_t i = 0; i < n.kids.size(); ++i) {
            path.push_back(i);
            walk(n.kids[i]);
            path.pop_back();
        }
    };
    walk(root);
}

inline std::vector<Tree> neighbours(const Tree& t, const std::string& alphabet, std::size_t max_nodes) {
    std::vector<Tree> out;
    const std::size_t n = count(t);
    // relabel
    for_each_node(t, [&](Tree& copy, Tree& node) {
        const char old = node.label;
        for (char l : alphabet)
            if (l != old) {
                node.label = l;
                out.push_back(copy);
            }
        node.label = old;
    });
    // delete a non-root node: its children take its place in the parent
    for_each_node(t, [&](Tree& copy, Tree& node) {
        for (std::size_t i = 0; i < node.kids.size(); ++i) {
            Tree removed = node.kids[i];
            std::vector<Tree> kids;
            for (std::size_t j = 0; j < node.kids.size(); ++j) {
                if (j == i)
                    kids.insert(kids.end(), removed.kids.begin(), removed.kids.end());
                else
                    kids.push_back(node.kids[j]);
            }
            auto saved = node.kids;
            node.kids = kids;
            out.push_back(copy);
            node.kids = saved;
        }
    });
    // delete the root when it has a single child
    if (t.kids.size() == 1) out.push_back(t.kids[0]);
    if (n < max_nodes) {
        // insert below a node, adopting a contiguous run of its children
        for_each_node(t, [&](Tree& copy, Tree& node) {
            const std::size_t k = node.kids.size();
            for (std::size_t i = 0; i <= k; ++i)
                for (std::size_t j = i; j <= k; ++j)
                    for (char l : alphabet) {
                        auto saved = node.kids;
                        Tree fresh{l, {}};
                        fresh.kids.assign(saved.begin() + static_cast<std::ptrdiff_t>(i),
                                          saved.begin() + static_cast<std::ptrdiff_t>(j));
                        std::vector<Tree> kids(saved.begin(), saved.begin() + static_cast<std::ptrdiff_t>(i));
                        kids.push_back(fresh);
                        kids.insert(kids.end(), saved.begin() + static_cast<std::ptrdiff_t>(j), saved.end());
                        node.kids = kids;
                        out.push_back(copy);
                        node.kids = saved;
                    }
        });
        // insert a new root above the old one
        for (char l : alphabet) out.push_back(Tree{l, {t}});
    }
    return out;
}

struct TreeUniverse {
    std::vector<Tree> trees;
    std::vector<std::vector<std::uint32_t>> adj;
    std::unordered_map<std::string, std::uint32_t> index;
};

inline TreeUniverse enumerate_trees(const std::string& alphabet, std::size_t max_nodes) {
    TreeUniverse u;
    std::deque<std::uint32_t> queue;
    auto add = [&](const Tree& t) {
        const std::string key = encode(t);
        auto [it, fresh] = u.index.emplace(key, static_cast<std::uint32_t>(u.trees.size()));
        if (fresh) {
            u.trees.push_back(t);
            queue.push_back(it->second);
        }
        return it->second;
    };
    for (char l : alphabet) add(Tree{l, {}});
    std::vector<std::vector<std::uint32_t>> adj;
    while (!queue.empty()) {
        const std::uint32_t id = queue.front();
        queue.pop_front();
        const Tree t = u.trees[id];
        std::vector<std::uint32_t> nb;
        for (const auto& x : neighbours(t, alphabet, max_nodes)) nb.push_back(add(x));
        std::sort(nb.begin(), nb.end());
        nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
        if (adj.size() <= id) adj.resize(id + 1);
        adj[id] = std::move(nb);
    }
    u.adj = std::move(adj);
    return u;
}

// All-pairs edit distances (row-major, trees.size()^2 bytes).
inline std::vector<std::uint8_t> all_pairs_bfs(const TreeUniverse& u) {
    const std::size_t n = u.trees.size();
    std::vector<std::uint8_t> d(n * n, 0xff);
    std::vector<std::uint32_t> frontier, next;
    for (std::size_t s = 0; s < n; ++s) {
        std::uint8_t* row = d.data() + s * n;
        row[s] = 0;
        frontier.assign(1, static_cast<std::uint32_t>(s));
        for (std::uint8_t depth = 1; !frontier.empty(); ++depth) {
            next.clear();
            for (auto v : frontier)
                for (auto w : u.adj[v])
                    if (row[w] == 0xff) {
                        row[w] = depth;
                        next.push_back(w);
                    }
            frontier.swap(next);
        }
    }
    return d;
}

inline mcd::AstNode to_ast(const Tree& t) {
    mcd::AstNode n{std::string(1, t.label)};
    for (const auto& k : t.kids) n.children.push_back(to_ast(k));
    return n;
}

// Random ordered tree with exactly `size` nodes (each new node attaches to a
// uniformly chosen existing node, appended as its last child).
inline mcd::AstNode random_tree(std::size_t size, const std::string& alphabet, std::mt19937_64& rng) {
    struct Flat {
        char label;
        std::vector<std::size_t> kids;
    };
    std::vector<Flat> nodes{{alphabet[rng() % alphabet.size()], {}}};
    for (std::size_t i = 1; i < size; ++i) {
        const std::size_t parent = rng() % nodes.size();
        nodes.push_back({alphabet[rng() % alphabet.size()], {}});
        nodes[parent].kids.push_back(i);
    }
    std::function<mcd::AstNode(std::size_t)> build = [&](std::size_t i) {
        mcd::AstNode n{std::string(1, nodes[i].label)};
        for (auto k : nodes[i].kids) n.children.push_back(build(k));
        return n;
    };
    return build(0);
}

// ---------------------------------------------------------------------------
// DBSCAN reference: neighbourhoods by exhaustive distance checks, core
// components by label propagation to a fixpoint, border points attached to the
// adjacent component whose smallest core index is lowest.

inline std::vector<int> dbscan_reference(const std::vector<std::array<double, 2>>& pts, double eps, std::size_t minpts) {
    const std::size_t n = pts.size();
    auto within = [&](std::size_t i, std::size_t j) {
        const double dx = pts[i][0] - pts[j][0], dy = pts[i][1] - pts[j][1];
        return dx * dx + dy * dy <= eps * eps;
    };
    std::vector<bool> core(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t c = 0;
        for (std::size_t j = 0; j < n; ++j) c += within(i, j);
        core[i] = c >= minpts;
    }
    // comp[i] = smallest core index in i's core component
    std::vector<std::size_t> comp(n);
    for (std::size_t i = 0; i < n; ++i) comp[i] = i;
    for (bool changed = true; changed;) {
        changed = false;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (core[i] && core[j] && within(i, j) && comp[j] < comp[i]) {
                    comp[i] = comp[j];
                    changed = true;
                }
    }
    std::vector<int> labels(n, -1);
    std::map<std::size_t, int> rename;
    for (std::size_t i = 0; i < n; ++i)
        if (core[i] && !rename.count(comp[i])) rename.emplace(comp[i], static_cast<int>(rename.size()));
    for (std::size_t i = 0; i < n; ++i) {
        if (core[i]) {
            labels[i] = rename[comp[i]];
            continue;
        }
        std::size_t best = n;
        for (std::size_t j = 0; j < n; ++j)
            if (core[j] && within(i, j)) best = std::min(best, comp[j]);
        if (best < n) labels[i] = rename[best];
    }
    return labels;
}

// Same partition up to renaming of cluster ids, with noise matching noise.
inline bool same_partition(const std::vector<int>& a, const std::vector<int>& b) {
    if (a.size() != b.size()) return false;
    std::map<int, int> ab, ba;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if ((a[i] < 0) != (b[i] < 0)) return false;
        if (a[i] < 0) continue;
        auto [x, fx] = ab.emplace(a[i], b[i]);
        auto [y, fy] = ba.emplace(b[i], a[i]);
        if (x->second != b[i] || y->second != a[i]) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// AUC by counting every positive/negative pair.

inline double auc_pairs(const std::vector<double>& s, const std::vector<int>& y) {
    double credit = 0.0, pairs = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i)
        for (std::size_t j = 0; j < s.size(); ++j)
            if (y[i] == 1 && y[j] == 0) {
                pairs += 1.0;
                credit += s[i] > s[j] ? 1.0 : (s[i] == s[j] ? 0.5 : 0.0);
            }
    return credit / pairs;
}

// ---------------------------------------------------------------------------
// Central finite differences over every entry of every parameter group.
// Returns the worst relative error |a - n| / max(|a|, |n|), counting entries
// where both are below `floor` as agreeing.

struct GradCheck {
    double worst = 0.0;
    std::vector<double> per_group;
};

inline double micro_loss(const mcd::Code2VecParams& p, const std::vector<mcd::EncodedSubmission>& batch,
                         const std::vector<int>& labels) {
    // Independent scalar forward pass.
    const std::size_t de = p.d_emb(), dh = p.d_hidden();
    double loss = 0.0;
    for (std::size_t b = 0; b < batch.size(); ++b) {
        std::vector<std::vector<double>> cs;
        std::vector<double> sc;
        for (std::size_t i = 0; i < batch[b].contexts.size(); ++i) {
            if (!batch[b].mask[i]) continue;
            const auto& t = batch[b].contexts[i];
            std::vector<double> c(dh);
            for (std::size_t r = 0; r < dh; ++r) {
                double z = 0.0;
                for (std::size_t j = 0; j < de; ++j)
                    z += p.combine(r, j) * p.terminal_emb(t[0], j) + p.combine(r, de + j) * p.path_emb(t[1], j) +
                         p.combine(r, 2 * de + j) * p.terminal_emb(t[2], j);
                c[r] = std::tanh(z);
            }
            double s = 0.0;
            for (std::size_t r = 0; r < dh; ++r) s += c[r] * p.attention(0, r);
            cs.push_back(c);
            sc.push_back(s);
        }
        const double mx = *std::max_element(sc.begin(), sc.end());
        double z = 0.0;
        for (double& s : sc) z += (s = std::exp(s - mx));
        std::vector<double> v(dh, 0.0);
        for (std::size_t k = 0; k < cs.size(); ++k)
            for (std::size_t r = 0; r < dh; ++r) v[r] += sc[k] / z * cs[k][r];
        double l0 = 0.0, l1 = 0.0;
        for (std::size_t r = 0; r < dh; ++r) {
            l0 += p.output(0, r) * v[r];
            l1 += p.output(1, r) * v[r];
        }
        const double m = std::max(l0, l1);
        const double lse = m + std::log(std::exp(l0 - m) + std::exp(l1 - m));
        loss += lse - (labels[b] ? l1 : l0);
    }
    return loss / static_cast<double>(batch.size());
}

inline GradCheck check_gradients(mcd::Code2VecParams params, const mcd::Code2VecParams& analytic,
                                 const std::vector<mcd::EncodedSubmission>& batch, const std::vector<int>& labels,
                                 double h = 1e-5, double floor = 1e-6) {
    GradCheck out;
    auto values = params.tensors();
    const auto grads = analytic.tensors();
    for (std::size_t g = 0; g < values.size(); ++g) {
        double worst = 0.0;
        for (std::size_t i = 0; i < values[g].size(); ++i) {
            const double keep = values[g][i];
            values[g][i] = keep + h;
            const double up = micro_loss(params, batch, labels);
            values[g][i] = keep - h;
            const double down = micro_loss(params, batch, labels);
            values[g][i] = keep;
            const double num = (up - down) / (2.0 * h);
            const double a = grads[g][i];
            const double scale = std::max(std::abs(a), std::abs(num));
            if (scale < floor) continue;
            worst = std::max(worst, std::abs(a - num) / scale);
        }
        out.per_group.push_back(worst);
        out.worst = std::max(out.worst, worst);
    }
    return out;
}

// ---------------------------------------------------------------------------

inline double jaccard(const std::set<std::string>& a, const std::set<std::string>& b) {
    std::size_t inter = 0;
    for (const auto& x : a) inter += b.count(x);
    const std::size_t uni = a.size() + b.size() - inter;
    return uni ? static_cast<double>(inter) / static_cast<double>(uni) : 0.0;
}

}  // namespace oracle
