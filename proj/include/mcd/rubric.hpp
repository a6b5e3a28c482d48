#pragma once
// Structural grading of the spiral assignment. Each item is a predicate over
// the Ast; nothing is executed.
//
//   R0 procedure-with-1-param: a ProcDef with exactly one parameter whose value
//      flows into the count of a Repeat inside it (directly, or through
//      variables assigned from it within the procedure).
//   R1 pen-down: a PenDown inside a procedure body.
//   R2 variable-init: a `set` of a variable that is read by some Move length.
//   R3 repeat-rotations: any Repeat.
//   R4 forward+turn: a Repeat whose block contains both a Move and a Turn.
//   R5 variable-increment: a `change` inside a Repeat block on a variable read
//      by some Move length.

#include <array>
#include <cstddef>
#include <set>
#include <string>
#include <string_view>

#include "mcd/ast.hpp"
#include "mcd/turtle.hpp"

namespace mcd {

inline constexpr std::size_t kRubricItems = 6;

inline constexpr std::array<std::string_view, kRubricItems> kRubricNames = {
    "procedure-with-1-param", "pen-down", "variable-init", "repeat-rotations", "forward+turn", "variable-increment"};

struct RubricScore {
    std::array<bool, kRubricItems> items{};
    bool overall = false;

    friend bool operator==(const RubricScore&, const RubricScore&) = default;
};

namespace detail {

inline bool contains_kind(const AstNode& n, std::string_view k) {
    if (n.label == k) return true;
    for (const auto& c : n.children)
        if (contains_kind(c, k)) return true;
    return false;
}

// Names referenced by `kind` nodes (ParamRef/VarRef) anywhere under n.
inline void collect_refs(const AstNode& n, std::string_view ref_kind, std::set<std::string>& out) {
    if (n.label == ref_kind && n.children.size() == 1) out.insert(n.children[0].label);
    for (const auto& c : n.children) collect_refs(c, ref_kind, out);
}

inline void collect_nodes(const AstNode& n, std::string_view k, std::vector<const AstNode*>& out) {
    if (n.label == k) out.push_back(&n);
    for (const auto& c : n.children) collect_nodes(c, k, out);
}

inline std::string assigned_var(const AstNode& stmt) {
    // Set/Change: Var(name) expr; Ask: Str(...) Var(name)
    const AstNode& var = stmt.label == kind::Ask ? stmt.children.at(1) : stmt.children.at(0);
    return var.children.at(0).label;
}

inline bool proc_param_drives_repeat(const AstNode& def) {
    std::size_t params = 0;
    std::string param;
    for (const auto& c : def.children)
        if (c.label == kind::Param) {
            ++params;
            param = c.children.at(0).label;
        }
    if (params != 1) return false;
    const AstNode& body = def.children.back();

    // Variables whose value derives from the parameter, to a fixpoint.
    std::vector<const AstNode*> assigns;
    collect_nodes(body, kind::Set, assigns);
    collect_nodes(body, kind::Change, assigns);
    std::set<std::string> tainted;
    for (bool grew = true; grew;) {
        grew = false;
        for (const AstNode* a : assigns) {
            std::set<std::string> prefs, vrefs;
            collect_refs(a->children.at(1), kind::ParamRef, prefs);
            collect_refs(a->children.at(1), kind::VarRef, vrefs);
            bool from_param = prefs.count(param) > 0;
            for (const auto& v : vrefs) from_param = from_param || tainted.count(v) > 0;
            if (from_param && tainted.insert(assigned_var(*a)).second) grew = true;
        }
    }

    std::vector<const AstNode*> repeats;
    collect_nodes(body, kind::Repeat, repeats);
    for (const AstNode* r : repeats) {
        std::set<std::string> prefs, vrefs;
        collect_refs(r->children.at(0), kind::ParamRef, prefs);
        collect_refs(r->children.at(0), kind::VarRef, vrefs);
        if (prefs.count(param)) return true;
        for (const auto& v : vrefs)
            if (tainted.count(v)) return true;
    }
    return false;
}

inline std::set<std::string> move_length_vars(const AstNode& root) {
    std::vector<const AstNode*> moves;
    collect_nodes(root, kind::Move, moves);
    std::set<std::string> vars;
    for (const AstNode* m : moves) collect_refs(*m, kind::VarRef, vars);
    return vars;
}

}  // namespace detail

inline RubricScore grade_rubric(const Ast& ast) {
    using namespace detail;
    const AstNode& root = ast.root;
    RubricScore score;

    std::vector<const AstNode*> defs;
    collect_nodes(root, kind::ProcDef, defs);
    for (const AstNode* d : defs) {
        if (proc_param_drives_repeat(*d)) score.items[0] = true;
        if (contains_kind(d->children.back(), kind::PenDown)) score.items[1] = true;
    }

    const std::set<std::string> length_vars = move_length_vars(root);
    std::vector<const AstNode*> sets;
    collect_nodes(root, kind::Set, sets);
    for (const AstNode* s : sets)
        if (length_vars.count(assigned_var(*s))) score.items[2] = true;

    std::vector<const AstNode*> repeats;
    collect_nodes(root, kind::Repeat, repeats);
    score.items[3] = !repeats.empty();
    for (const AstNode* r : repeats) {
        const AstNode& block = r->children.at(1);
        if (contains_kind(block, kind::Move) && contains_kind(block, kind::Turn)) score.items[4] = true;
        std::vector<const AstNode*> changes;
        collect_nodes(block, kind::Change, changes);
        for (const AstNode* c : changes)
            if (length_vars.count(assigned_var(*c))) score.items[5] = true;
    }

    score.overall = true;
    for (bool b : score.items) score.overall = score.overall && b;
    return score;
}

}  // namespace mcd
