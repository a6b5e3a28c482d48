// Walk two hand-written spiral programs through the library: parse, grade,
// extract path contexts, compare trees, then score them with a small model
// trained on a generated corpus.

#include <cstdio>
#include <string>
#include <vector>

#include "mcd/mcd.hpp"

using namespace mcd;

namespace {

const char* kCorrect = R"(to spiral :n
  pendown
  set len 5
  repeat :n [
    move len
    turn 90
    change len 3
  ]
end
call spiral 12
)";

// repeat count is a literal, so the parameter does nothing
const char* kFixedRepeat = R"(to spiral :n
  pendown
  set len 5
  repeat 12 [
    move len
    turn 90
    change len 3
  ]
end
call spiral 12
)";

void show(const char* title, const Ast& ast) {
    const RubricScore r = grade_rubric(ast);
    std::printf("%s: overall %s\n", title, r.overall ? "pass" : "fail");
    for (std::size_t i = 0; i < kRubricItems; ++i)
        std::printf("  R%zu %-24s %s\n", i, std::string(kRubricNames[i]).c_str(), r.items[i] ? "pass" : "FAIL");
    const auto ctx = extract_paths(ast);
    std::printf("  %zu path contexts, first three:\n", ctx.size());
    for (std::size_t i = 0; i < ctx.size() && i < 3; ++i)
        std::printf("    %s  %s  %s\n", ctx[i].start.c_str(), ctx[i].path_key().c_str(), ctx[i].end.c_str());
}

}  // namespace

int main() {
    const Ast good = parse(kCorrect), bad = parse(kFixedRepeat);
    show("correct", good);
    show("fixed repeat", bad);
    std::printf("tree edit distance: %zu\n\n", tree_edit_distance(good, bad));

    const auto g = generate_corpus(GeneratorSpec{40, 8, 8, 4, 3, 1});
    std::vector<std::vector<PathContext>> ctx;
    for (const auto& s : g.corpus.submissions) ctx.push_back(extract_paths(s.ast));
    const Vocab vocab = build_vocab(ctx);
    std::vector<EncodedSubmission> enc;
    for (const auto& c : ctx) enc.push_back(encode(c, vocab, 100));
    TrainConfig tc;
    tc.d_emb = tc.d_hidden = 16;
    tc.learning_rate = 0.01;
    tc.max_epochs = 300;
    tc.patience = 60;
    const auto model = train_code2vec(enc, g.corpus.labels(), vocab.terminal_count(), vocab.path_count(), tc);
    std::printf("trained on %zu generated submissions, best epoch %zu\n", g.corpus.size(),
                model.history.epochs[model.history.best_epoch].epoch);
    for (const auto& [name, ast] : {std::pair{"correct", &good}, std::pair{"fixed repeat", &bad}}) {
        const auto p = predict(model.params, encode(extract_paths(*ast), vocab, 100));
        std::printf("  %-13s P(all correct) = %.3f\n", name, p.probs[1]);
    }
    return 0;
}
