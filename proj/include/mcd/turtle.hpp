#pragma once
// Recursive-descent parser for the turtle language and the matching printer.
//
//   program  := (procdef | stmt)*
//   procdef  := 'to' NAME (':'param)* stmt* 'end'
//   stmt     := 'pendown' | 'move' expr | 'turn' expr | 'repeat' expr '[' stmt* ']'
//             | 'set' NAME expr | 'change' NAME expr | 'ask' STRING NAME | 'call' NAME expr*
//   expr     := term ('+' term)*
//   term     := primary ('*' primary)*
//   primary  := INT | ':'param | NAME
//
// Tokens are whitespace separated ('[' and ']' also split on their own), '#'
// starts a line comment and strings are double quoted without escapes.

#include <cctype>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mcd/ast.hpp"
#include "mcd/errors.hpp"

namespace mcd {

namespace kind {
inline constexpr std::string_view Program = "Program";
inline constexpr std::string_view ProcDef = "ProcDef";
inline constexpr std::string_view Name = "Name";
inline constexpr std::string_view Param = "Param";
inline constexpr std::string_view Body = "Body";
inline constexpr std::string_view PenDown = "PenDown";
inline constexpr std::string_view Move = "Move";
inline constexpr std::string_view Turn = "Turn";
inline constexpr std::string_view Repeat = "Repeat";
inline constexpr std::string_view Block = "Block";
inline constexpr std::string_view Set = "Set";
inline constexpr std::string_view Change = "Change";
inline constexpr std::string_view Ask = "Ask";
inline constexpr std::string_view Call = "Call";
inline constexpr std::string_view Var = "Var";
inline constexpr std::string_view Str = "Str";
inline constexpr std::string_view Lit = "Lit";
inline constexpr std::string_view ParamRef = "ParamRef";
inline constexpr std::string_view VarRef = "VarRef";
inline constexpr std::string_view Add = "Add";
inline constexpr std::string_view Mul = "Mul";
}  // namespace kind

namespace detail {

enum class TokenType { Word, Integer, ParamName, String, LBracket, RBracket, Plus, Star, Eof };

struct Token {
    TokenType type;
    std::string text;  // for ParamName, without the leading ':'; for String, with quotes
    std::size_t line;
    std::size_t column;
};

inline bool is_ident(std::string_view s) {
    if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
    for (char ch : s)
        if (!(std::isalnum(static_cast<unsigned char>(ch)) || ch == '_')) return false;
    return true;
}

inline bool is_integer(std::string_view s) {
    std::size_t i = (!s.empty() && s[0] == '-') ? 1 : 0;
    if (i == s.size()) return false;
    for (; i < s.size(); ++i)
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    return true;
}

inline std::vector<Token> tokenize(std::string_view src) {
    std::vector<Token> out;
    std::size_t line = 1, col = 1, i = 0;
    auto advance = [&](std::size_t n) {
        for (std::size_t k = 0; k < n && i < src.size(); ++k, ++i) {
            if (src[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
    };
    while (i < src.size()) {
        char ch = src[i];
        if (std::isspace(static_cast<unsigned char>(ch))) {
            advance(1);
            continue;
        }
        if (ch == '#') {
            while (i < src.size() && src[i] != '\n') advance(1);
            continue;
        }
        const std::size_t tl = line, tc = col;
        if (ch == '[' || ch == ']') {
            out.push_back({ch == '[' ? TokenType::LBracket : TokenType::RBracket, std::string(1, ch), tl, tc});
            advance(1);
            continue;
        }
        if (ch == '"') {
            std::size_t end = src.find('"', i + 1);
            std::size_t nl = src.find('\n', i + 1);
            if (end == std::string_view::npos || (nl != std::string_view::npos && nl < end))
                throw SyntaxError("unterminated string", tl, tc);
            out.push_back({TokenType::String, std::string(src.substr(i, end - i + 1)), tl, tc});
            advance(end - i + 1);
            continue;
        }
        std::size_t j = i;
        while (j < src.size() && !std::isspace(static_cast<unsigned char>(src[j])) && src[j] != '[' &&
               src[j] != ']' && src[j] != '#' && src[j] != '"')
            ++j;
        std::string word(src.substr(i, j - i));
        if (word == "+") {
            out.push_back({TokenType::Plus, word, tl, tc});
        } else if (word == "*") {
            out.push_back({TokenType::Star, word, tl, tc});
        } else if (is_integer(word)) {
            out.push_back({TokenType::Integer, word, tl, tc});
        } else if (word.size() > 1 && word[0] == ':' && is_ident(std::string_view(word).substr(1))) {
            out.push_back({TokenType::ParamName, word.substr(1), tl, tc});
        } else if (is_ident(word)) {
            out.push_back({TokenType::Word, word, tl, tc});
        } else {
            throw SyntaxError("invalid token '" + word + "'", tl, tc);
        }
        advance(j - i);
    }
    out.push_back({TokenType::Eof, "", line, col});
    return out;
}

inline bool is_keyword(std::string_view w) {
    static constexpr std::string_view kws[] = {"to",  "end", "pendown", "move", "turn",
                                               "repeat", "set", "change", "ask", "call"};
    for (auto k : kws)
        if (w == k) return true;
    return false;
}

class Parser {
public:
    explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

    Ast parse_program() {
        AstNode program{std::string(kind::Program)};
        while (peek().type != TokenType::Eof) {
            if (peek().type == TokenType::Word && peek().text == "to") {
                program.children.push_back(parse_procdef());
            } else {
                program.children.push_back(parse_stmt(/*in_proc=*/false));
            }
        }
        return Ast{std::move(program)};
    }

private:
    const Token& peek() const { return toks_[pos_]; }
    const Token& next() { return toks_[pos_++]; }

    [[noreturn]] void fail(const std::string& msg, const Token& at) const {
        throw SyntaxError(msg, at.line, at.column);
    }

    std::string expect_name(const char* what) {
        const Token& t = peek();
        if (t.type != TokenType::Word || is_keyword(t.text))
            fail(std::string("expected ") + what + (t.type == TokenType::Eof ? ", found end of input"
                                                                              : ", found '" + t.text + "'"),
                 t);
        return next().text;
    }

    AstNode parse_procdef() {
        const Token start = next();  // 'to'
        AstNode def{std::string(kind::ProcDef)};
        def.children.push_back(AstNode{std::string(kind::Name), {AstNode{expect_name("procedure name")}}});
        while (peek().type == TokenType::ParamName)
            def.children.push_back(AstNode{std::string(kind::Param), {AstNode{next().text}}});
        AstNode body{std::string(kind::Body)};
        for (;;) {
            const Token& t = peek();
            if (t.type == TokenType::Eof) fail("missing 'end' for procedure started", start);
            if (t.type == TokenType::Word && t.text == "end") {
                next();
                break;
            }
            if (t.type == TokenType::Word && t.text == "to") fail("procedure definitions must be top-level", t);
            body.children.push_back(parse_stmt(/*in_proc=*/true));
        }
        def.children.push_back(std::move(body));
        return def;
    }

    AstNode parse_stmt(bool in_proc) {
        const Token& t = peek();
        if (t.type == TokenType::RBracket) fail("unexpected ']'", t);
        if (t.type != TokenType::Word) fail("expected a statement, found '" + t.text + "'", t);
        const std::string& w = t.text;
        if (w == "end") fail(in_proc ? "unexpected 'end'" : "'end' outside of a procedure", t);
        if (w == "to") fail("procedure definitions must be top-level", t);
        if (w == "pendown") {
            next();
            return AstNode{std::string(kind::PenDown)};
        }
        if (w == "move" || w == "turn") {
            next();
            return AstNode{std::string(w == "move" ? kind::Move : kind::Turn), {parse_expr()}};
        }
        if (w == "repeat") {
            next();
            AstNode count = parse_expr();
            const Token& open = peek();
            if (open.type != TokenType::LBracket) fail("expected '[' after repeat count", open);
            const Token open_tok = next();
            AstNode block{std::string(kind::Block)};
            for (;;) {
                const Token& b = peek();
                if (b.type == TokenType::Eof) fail("unclosed '['", open_tok);
                if (b.type == TokenType::RBracket) {
                    next();
                    break;
                }
                block.children.push_back(parse_stmt(in_proc));
            }
            return AstNode{std::string(kind::Repeat), {std::move(count), std::move(block)}};
        }
        if (w == "set" || w == "change") {
            next();
            AstNode var{std::string(kind::Var), {AstNode{expect_name("variable name")}}};
            return AstNode{std::string(w == "set" ? kind::Set : kind::Change), {std::move(var), parse_expr()}};
        }
        if (w == "ask") {
            next();
            const Token& s = peek();
            if (s.type != TokenType::String) fail("expected a quoted prompt after 'ask'", s);
            AstNode prompt{std::string(kind::Str), {AstNode{next().text}}};
            AstNode var{std::string(kind::Var), {AstNode{expect_name("variable name")}}};
            return AstNode{std::string(kind::Ask), {std::move(prompt), std::move(var)}};
        }
        if (w == "call") {
            next();
            AstNode call{std::string(kind::Call)};
            call.children.push_back(AstNode{std::string(kind::Name), {AstNode{expect_name("procedure name")}}});
            while (starts_expr(peek())) call.children.push_back(parse_expr());
            return call;
        }
        fail("unknown keyword '" + w + "'", t);
    }

    static bool starts_expr(const Token& t) {
        return t.type == TokenType::Integer || t.type == TokenType::ParamName ||
               (t.type == TokenType::Word && !is_keyword(t.text));
    }

    AstNode parse_expr() {
        AstNode lhs = parse_term();
        while (peek().type == TokenType::Plus) {
            next();
            lhs = AstNode{std::string(kind::Add), {std::move(lhs), parse_term()}};
        }
        return lhs;
    }

    AstNode parse_term() {
        AstNode lhs = parse_primary();
        while (peek().type == TokenType::Star) {
            next();
            lhs = AstNode{std::string(kind::Mul), {std::move(lhs), parse_primary()}};
        }
        return lhs;
    }

    AstNode parse_primary() {
        const Token& t = peek();
        switch (t.type) {
            case TokenType::Integer:
                return AstNode{std::string(kind::Lit), {AstNode{next().text}}};
            case TokenType::ParamName:
                return AstNode{std::string(kind::ParamRef), {AstNode{next().text}}};
            case TokenType::Word:
                if (!is_keyword(t.text)) return AstNode{std::string(kind::VarRef), {AstNode{next().text}}};
                break;
            default:
                break;
        }
        fail(t.type == TokenType::Eof ? "expected an expression, found end of input"
                                      : "expected an expression, found '" + t.text + "'",
             t);
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
};

inline void format_expr(const AstNode& e, std::string& out) {
    if (e.label == kind::Add || e.label == kind::Mul) {
        // Left-assoc with '*' binding tighter: parenthesis-free output re-parses
        // identically because the tree was produced by this grammar.
        format_expr(e.children.at(0), out);
        out += e.label == kind::Add ? " + " : " * ";
        format_expr(e.children.at(1), out);
        return;
    }
    if (e.label == kind::ParamRef) out += ':';
    out += e.children.at(0).label;
}

inline void format_stmt(const AstNode& s, std::size_t indent, std::string& out) {
    std::string pad(indent * 2, ' ');
    const std::string& k = s.label;
    if (k == kind::ProcDef) {
        out += pad + "to " + s.children.at(0).children.at(0).label;
        for (std::size_t i = 1; i + 1 < s.children.size(); ++i) out += " :" + s.children[i].children.at(0).label;
        out += '\n';
        for (const auto& c : s.children.back().children) format_stmt(c, indent + 1, out);
        out += pad + "end\n";
    } else if (k == kind::PenDown) {
        out += pad + "pendown\n";
    } else if (k == kind::Move || k == kind::Turn) {
        out += pad + (k == kind::Move ? "move " : "turn ");
        format_expr(s.children.at(0), out);
        out += '\n';
    } else if (k == kind::Repeat) {
        out += pad + "repeat ";
        format_expr(s.children.at(0), out);
        out += " [\n";
        for (const auto& c : s.children.at(1).children) format_stmt(c, indent + 1, out);
        out += pad + "]\n";
    } else if (k == kind::Set || k == kind::Change) {
        out += pad + (k == kind::Set ? "set " : "change ") + s.children.at(0).children.at(0).label + ' ';
        format_expr(s.children.at(1), out);
        out += '\n';
    } else if (k == kind::Ask) {
        out += pad + "ask " + s.children.at(0).children.at(0).label + ' ' + s.children.at(1).children.at(0).label +
               '\n';
    } else if (k == kind::Call) {
        out += pad + "call " + s.children.at(0).children.at(0).label;
        for (std::size_t i = 1; i < s.children.size(); ++i) {
            out += ' ';
            format_expr(s.children[i], out);
        }
        out += '\n';
    } else {
        throw SchemaError("cannot format node '" + k + "' as a statement");
    }
}

}  // namespace detail

/// Parses turtle source into an Ast. Throws SyntaxError with the position of
/// the offending token.
inline Ast parse(std::string_view source) { return detail::Parser(detail::tokenize(source)).parse_program(); }

/// Pretty-prints an Ast produced by parse() back to indented source text.
inline std::string format_program(const Ast& ast) {
    std::string out;
    for (const auto& s : ast.root.children) detail::format_stmt(s, 0, out);
    return out;
}

}  // namespace mcd
