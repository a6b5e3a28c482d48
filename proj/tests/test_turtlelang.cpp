#include <random>
#include <string>

#include <gtest/gtest.h>

#include "mcd/corpus.hpp"
#include "mcd/generator.hpp"
#include "mcd/rubric.hpp"
#include "mcd/ted.hpp"
#include "mcd/turtle.hpp"
#include "oracles.hpp"

using namespace mcd;

namespace {

const char* kReference = R"(to spiral :n
  pendown
  set len 10
  repeat :n [
    move len
    turn 90
    change len 5
  ]
end
call spiral 20
)";

AstNode leaf(const std::string& s) { return AstNode{s}; }
AstNode node(const std::string& s, std::vector<AstNode> kids) { return AstNode{s, std::move(kids)}; }

}  // namespace

TEST(Parse, SingleToken) { EXPECT_EQ(to_sexpr(parse("pendown")), "Program(PenDown)"); }

TEST(Parse, SpiralProcedure) {
    EXPECT_EQ(to_sexpr(parse("to spiral :n pendown repeat :n [ move 10 turn 90 ] end")),
              "Program(ProcDef(Name(spiral), Param(n), Body(PenDown, Repeat(ParamRef(n), Block(Move(Lit(10)), "
              "Turn(Lit(90)))))))");
}

TEST(Parse, ExpressionPrecedence) {
    EXPECT_EQ(to_sexpr(parse("move 1 + 2 * 3")), "Program(Move(Add(Lit(1), Mul(Lit(2), Lit(3)))))");
    EXPECT_EQ(to_sexpr(parse("move 1 * x + :p")), "Program(Move(Add(Mul(Lit(1), VarRef(x)), ParamRef(p))))");
    EXPECT_EQ(to_sexpr(parse("turn 1 + 2 + 3")), "Program(Turn(Add(Add(Lit(1), Lit(2)), Lit(3))))");
}

TEST(Parse, StatementsAndComments) {
    const Ast a = parse("# header\nset x 3 # trailing\nchange x -1\nask \"how big?\" s\ncall f 1 x\n");
    EXPECT_EQ(to_sexpr(a), "Program(Set(Var(x), Lit(3)), Change(Var(x), Lit(-1)), Ask(Str(\"how big?\"), Var(s)), "
                           "Call(Name(f), Lit(1), VarRef(x)))");
}

TEST(Parse, EmptyProgram) { EXPECT_EQ(to_sexpr(parse("  # nothing\n")), "Program"); }

TEST(Parse, UnclosedBlock) {
    try {
        parse("repeat 4 [ move 10");
        FAIL() << "expected SyntaxError";
    } catch (const SyntaxError& e) {
        EXPECT_NE(std::string(e.what()).find("unclosed"), std::string::npos) << e.what();
        EXPECT_EQ(e.line(), 1u);
    }
}

TEST(Parse, MissingEnd) { EXPECT_THROW(parse("to f :a\n  pendown\n"), SyntaxError); }

TEST(Parse, UnknownKeywordReportsPosition) {
    try {
        parse("pendown\n  jump 5\n");
        FAIL() << "expected SyntaxError";
    } catch (const SyntaxError& e) {
        EXPECT_EQ(e.line(), 2u);
        EXPECT_EQ(e.column(), 3u);
        EXPECT_NE(std::string(e.what()).find("jump"), std::string::npos);
    }
}

TEST(Parse, MalformedInputs) {
    EXPECT_THROW(parse("move"), SyntaxError);
    EXPECT_THROW(parse("]"), SyntaxError);
    EXPECT_THROW(parse("to f pendown to g end end"), SyntaxError);
    EXPECT_THROW(parse("repeat 3 [ to g end ]"), SyntaxError);
    EXPECT_THROW(parse("ask size x"), SyntaxError);
    EXPECT_THROW(parse("move 1 +"), SyntaxError);
    EXPECT_THROW(parse("ask \"unterminated x"), SyntaxError);
}

TEST(Parse, FormatRoundTrip) {
    GeneratorSpec spec{20, 10, 10, 10, 3, 5};
    for (const auto& s : generate_corpus(spec).corpus.submissions) {
        const std::string text = format_program(s.ast);
        EXPECT_EQ(parse(text), s.ast) << text;
    }
    const Ast a = parse("set x 1 + 2 * :p\ncall f\n");
    EXPECT_EQ(parse(format_program(a)), a);
}

// ---------------------------------------------------------------------------

TEST(Rubric, ReferenceSolutionPassesEverything) {
    const RubricScore r = grade_rubric(parse(kReference));
    for (std::size_t i = 0; i < kRubricItems; ++i) EXPECT_TRUE(r.items[i]) << "item " << i;
    EXPECT_TRUE(r.overall);
}

TEST(Rubric, BarePendownFailsEverything) {
    const RubricScore r = grade_rubric(parse("pendown"));
    for (std::size_t i = 0; i < kRubricItems; ++i) EXPECT_FALSE(r.items[i]) << "item " << i;
    EXPECT_FALSE(r.overall);
}

TEST(Rubric, FixedRepeatCount) {
    const RubricScore r = grade_rubric(parse("to s :n pendown set l 1 repeat 5 [ move l turn 90 change l 2 ] end"));
    EXPECT_FALSE(r.items[0]);
    EXPECT_TRUE(r.items[3]);
    EXPECT_TRUE(r.items[1] && r.items[2] && r.items[4] && r.items[5]);
    EXPECT_FALSE(r.overall);
}

TEST(Rubric, ParameterFlowsThroughVariables) {
    // the parameter reaches the repeat count through two assignments
    const RubricScore r =
        grade_rubric(parse("to s :n set a :n * 2 set b a + 1 repeat b [ move 1 turn 90 ] end"));
    EXPECT_TRUE(r.items[0]);
    const RubricScore local = grade_rubric(parse("to s :n set b 12 repeat b [ move 1 turn 90 ] end"));
    EXPECT_FALSE(local.items[0]);
    const RubricScore two = grade_rubric(parse("to s :n :m repeat :n [ move 1 ] end"));
    EXPECT_FALSE(two.items[0]);
}

TEST(Rubric, PenDownOnlyCountsInsideProcedure) {
    EXPECT_FALSE(grade_rubric(parse("pendown to s :n repeat :n [ move 1 ] end")).items[1]);
    EXPECT_TRUE(grade_rubric(parse("to s :n pendown end")).items[1]);
}

TEST(Rubric, MoveAndTurnMustShareARepeat) {
    EXPECT_FALSE(grade_rubric(parse("repeat 3 [ move 1 ] turn 90")).items[4]);
    EXPECT_TRUE(grade_rubric(parse("repeat 3 [ repeat 2 [ move 1 ] turn 90 ]")).items[4]);
}

TEST(Rubric, IncrementMustTargetLengthVariable) {
    EXPECT_TRUE(grade_rubric(parse("set l 1 repeat 3 [ move l change l 1 ]")).items[5]);
    EXPECT_FALSE(grade_rubric(parse("set l 1 set k 0 repeat 3 [ move l change k 1 ]")).items[5]);
    EXPECT_FALSE(grade_rubric(parse("set l 1 repeat 3 [ move l ] change l 1")).items[5]);
    EXPECT_TRUE(grade_rubric(parse("set l 1 move l")).items[2]);
    EXPECT_FALSE(grade_rubric(parse("set l 1 move 5")).items[2]);
}

TEST(Rubric, OverallIsConjunction) {
    GeneratorSpec spec{15, 15, 15, 15, 3, 11};
    for (const auto& s : generate_corpus(spec).corpus.submissions) {
        bool all = true;
        for (bool b : s.rubric.items) all = all && b;
        EXPECT_EQ(all, s.rubric.overall);
    }
}

// ---------------------------------------------------------------------------

TEST(TreeEditDistance, IdentityAndSingleRelabel) {
    const Ast a = parse(kReference);
    EXPECT_EQ(tree_edit_distance(a, a), 0u);
    Ast b = a;
    b.root.children.back().children.at(1).children.at(0).label = "21";  // call argument
    EXPECT_EQ(tree_edit_distance(a, b), 1u);
}

TEST(TreeEditDistance, HandCases) {
    const AstNode x = node("a", {leaf("b"), leaf("c")});
    EXPECT_EQ(tree_edit_distance(x, leaf("a")), 2u);
    EXPECT_EQ(tree_edit_distance(x, node("a", {node("b", {leaf("c")})})), 2u);
    EXPECT_EQ(tree_edit_distance(x, node("x", {node("a", {leaf("b"), leaf("c")})})), 1u);
    // deleting an inner node promotes its children
    EXPECT_EQ(tree_edit_distance(node("a", {node("d", {leaf("b"), leaf("c")})}), x), 1u);
}

TEST(TreeEditDistance, MatchesExhaustiveSearchUpToFourNodes) {
    const auto u = oracle::enumerate_trees("abc", 4);
    ASSERT_EQ(u.trees.size(), 471u);  // sum over n<=4 of Catalan(n-1) * 3^n
    const auto d = oracle::all_pairs_bfs(u);
    std::vector<TedTree> trees;
    for (const auto& t : u.trees) trees.emplace_back(oracle::to_ast(t));
    const std::size_t n = trees.size();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            ASSERT_EQ(tree_edit_distance(trees[i], trees[j]), d[i * n + j])
                << oracle::encode(u.trees[i]) << " vs " << oracle::encode(u.trees[j]);
}

TEST(TreeEditDistance, MetricProperties) {
    std::mt19937_64 rng(99);
    for (int it = 0; it < 300; ++it) {
        const AstNode a = oracle::random_tree(1 + rng() % 12, "abc", rng);
        const AstNode b = oracle::random_tree(1 + rng() % 12, "abc", rng);
        const AstNode c = oracle::random_tree(1 + rng() % 12, "abc", rng);
        const auto ab = tree_edit_distance(a, b), ba = tree_edit_distance(b, a);
        EXPECT_EQ(ab, ba);
        EXPECT_LE(tree_edit_distance(a, c), ab + tree_edit_distance(b, c));
        EXPECT_EQ(ab == 0, a == b);
        EXPECT_LE(ab, tree_size(a) + tree_size(b));
    }
}

// ---------------------------------------------------------------------------

TEST(Portable, RoundTrip) {
    const Ast a = parse(kReference);
    EXPECT_EQ(from_portable(to_portable(a)), a);
    GeneratorSpec spec{5, 5, 5, 5, 3, 2};
    for (const auto& s : generate_corpus(spec).corpus.submissions) {
        const Ast back = from_portable(to_portable(s.ast));
        EXPECT_EQ(back, s.ast);
        EXPECT_EQ(parse(format_program(back)), s.ast);
    }
}

TEST(Portable, EmptyProgram) {
    const Ast a = from_portable(R"({"label":"Program","children":[]})");
    EXPECT_EQ(a.root.label, "Program");
    EXPECT_TRUE(a.root.children.empty());
}

TEST(Portable, MalformedTrees) {
    EXPECT_THROW(from_portable(R"({"children":[]})"), SchemaError);
    EXPECT_THROW(from_portable(R"({"label":""})"), SchemaError);
    EXPECT_THROW(from_portable(R"({"label":"A","children":{}})"), SchemaError);
    EXPECT_THROW(from_portable(R"({"label":"A","children":[{"label":7}]})"), SchemaError);
    EXPECT_THROW(from_portable(R"({"label":"A","kids":[]})"), SchemaError);
    EXPECT_THROW(from_portable("[1, 2"), SchemaError);
}

TEST(CorpusFile, RoundTripAndValidation) {
    GeneratorSpec spec{4, 2, 2, 2, 3, 9};
    Corpus c = generate_corpus(spec).corpus;
    c.submissions[0].source.reset();  // stored as a portable tree instead
    const Corpus back = corpus_from_json(corpus_to_json(c));
    ASSERT_EQ(back.size(), c.size());
    for (std::size_t i = 0; i < c.size(); ++i) {
        EXPECT_EQ(back.submissions[i].id, c.submissions[i].id);
        EXPECT_EQ(back.submissions[i].ast, c.submissions[i].ast);
        EXPECT_EQ(back.submissions[i].rubric.items, c.submissions[i].rubric.items);
    }

    auto j = corpus_to_json(c);
    auto both = j;
    both["submissions"][1]["ast"] = ast_to_json(c.submissions[1].ast.root);
    EXPECT_THROW(corpus_from_json(both), SchemaError);
    auto dup = j;
    dup["submissions"][1]["id"] = c.submissions[0].id;
    EXPECT_THROW(corpus_from_json(dup), SchemaError);
    auto bad_overall = j;
    bad_overall["submissions"][0]["overall"] = !bad_overall["submissions"][0]["overall"].get<bool>();
    EXPECT_THROW(corpus_from_json(bad_overall), SchemaError);
    auto short_rubric = j;
    short_rubric["submissions"][0]["rubric"].erase(0);
    EXPECT_THROW(corpus_from_json(short_rubric), SchemaError);
    auto bad_source = j;
    bad_source["submissions"][2]["source"] = "repeat 3 [";
    EXPECT_THROW(corpus_from_json(bad_source), SyntaxError);
    EXPECT_THROW(load_corpus("/nonexistent/corpus.json"), IoError);
}
