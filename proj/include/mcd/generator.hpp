#pragma once
// Synthetic spiral-assignment corpus: correct solutions plus three planted
// misconception templates, each with bounded structural jitter.

#include <array>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <map>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "mcd/corpus.hpp"
#include "mcd/errors.hpp"
#include "mcd/matrix.hpp"
#include "mcd/rubric.hpp"
#include "mcd/turtle.hpp"

namespace mcd {

enum class Template { Correct, DuplicatedMoves, FixedRepeat, LocalVariable };

inline constexpr std::array<const char*, 4> kTemplateNames = {"correct", "A", "B", "C"};

struct GeneratorSpec {
    std::size_t correct = 80;
    std::size_t dup_move_turn = 10;  // A: move/turn copied out by hand, no loop
    std::size_t fixed_repeat = 8;    // B: repeat count is a literal
    std::size_t local_variable = 3;  // C: repeat count comes from a local variable
    std::size_t max_jitter = 3;      // extra statements per program
    std::uint64_t seed = 0;

    std::size_t total() const noexcept { return correct + dup_move_turn + fixed_repeat + local_variable; }
    void validate() const {
        if (max_jitter > 3) throw ConfigError("gen max_jitter must be at most 3");
    }
};

struct GeneratedCorpus {
    Corpus corpus;
    std::map<std::string, std::string> groups;  // id -> template name; never fed to the pipeline

    nlohmann::json ground_truth_json() const { return nlohmann::json{{"groups", groups}}; }
};

/// Expected rubric outcome per template (true = item passes).
inline std::array<bool, kRubricItems> template_rubric(Template t) {
    switch (t) {
        case Template::Correct: return {true, true, true, true, true, true};
        case Template::DuplicatedMoves: return {false, true, true, false, false, false};
        case Template::FixedRepeat: return {false, true, true, true, true, true};
        case Template::LocalVariable: return {false, true, true, true, true, true};
    }
    return {};
}

namespace detail {

inline std::size_t pick(std::mt19937_64& rng, std::size_t n) { return static_cast<std::size_t>(rng() % n); }

inline int pick_int(std::mt19937_64& rng, int lo, int hi) {
    return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
}

// Statements that never change any rubric outcome.
inline std::string jitter_statement(std::mt19937_64& rng, const std::string& pad) {
    switch (pick(rng, 5)) {
        case 0: return pad + "turn " + std::to_string(pick_int(rng, 10, 180)) + "\n";
        case 1: return pad + "move " + std::to_string(pick_int(rng, 1, 20)) + "\n";
        case 2: return pad + "set color " + std::to_string(pick_int(rng, 1, 9)) + "\n";
        case 3: return pad + "ask \"size?\" answer\n";
        default: return pad + "set width " + std::to_string(pick_int(rng, 1, 5)) + "\n";
    }
}

inline std::string generate_program(Template t, std::mt19937_64& rng, std::size_t max_jitter) {
    const int len = pick_int(rng, 5, 15);
    const int step = pick_int(rng, 2, 10);
    const int angle = pick(rng, 3) == 0 ? 91 : 90;
    const int turns = pick_int(rng, 8, 20);
    const std::string pad = "  ", inner = "    ";
    const std::string var = pick(rng, 4) == 0 ? "side" : "len";

    std::string body;
    body += pad + "pendown\n";
    body += pad + "set " + var + " " + std::to_string(len) + "\n";
    const std::string loop_body = inner + "move " + var + "\n" + inner + "turn " + std::to_string(angle) + "\n" + inner +
                                  "change " + var + " " + std::to_string(step) + "\n";
    switch (t) {
        case Template::Correct:
            body += pad + "repeat :n [\n" + loop_body + pad + "]\n";
            break;
        case Template::FixedRepeat:
            body += pad + "repeat " + std::to_string(turns) + " [\n" + loop_body + pad + "]\n";
            break;
        case Template::LocalVariable:
            body += pad + "set turns " + std::to_string(turns) + "\n";
            body += pad + "repeat turns [\n" + loop_body + pad + "]\n";
            break;
        case Template::DuplicatedMoves: {
            const std::size_t copies = 3 + pick(rng, 4);
            for (std::size_t i = 0; i < copies; ++i)
                body += pad + "move " + var + "\n" + pad + "turn " + std::to_string(angle) + "\n" + pad + "change " + var +
                        " " + std::to_string(step) + "\n";
            break;
        }
    }
    const std::size_t extra = max_jitter ? pick(rng, max_jitter + 1) : 0;
    for (std::size_t i = 0; i < extra; ++i) body += jitter_statement(rng, pad);
    return "to spiral :n\n" + body + "end\ncall spiral " + std::to_string(turns) + "\n";
}

}  // namespace detail

/// Deterministic per seed. Ids are assigned after shuffling so they carry no
/// group information; the groups live only in the returned map.
inline GeneratedCorpus generate_corpus(const GeneratorSpec& spec) {
    spec.validate();
    auto rng = make_rng(spec.seed, 0x67656eULL);
    std::vector<Template> plan;
    plan.insert(plan.end(), spec.correct, Template::Correct);
    plan.insert(plan.end(), spec.dup_move_turn, Template::DuplicatedMoves);
    plan.insert(plan.end(), spec.fixed_repeat, Template::FixedRepeat);
    plan.insert(plan.end(), spec.local_variable, Template::LocalVariable);
    shuffle_deterministic(plan, rng);

    GeneratedCorpus out;
    char id[32];
    for (std::size_t i = 0; i < plan.size(); ++i) {
        std::snprintf(id, sizeof id, "s%04zu", i);
        Submission sub;
        sub.id = id;
        sub.source = detail::generate_program(plan[i], rng, spec.max_jitter);
        sub.ast = parse(*sub.source);
        sub.rubric = grade_rubric(sub.ast);
        if (sub.rubric.items != template_rubric(plan[i]))
            throw std::logic_error("generator template '" + std::string(kTemplateNames[static_cast<int>(plan[i])]) +
                                   "' produced an unexpected rubric outcome");
        out.groups[sub.id] = kTemplateNames[static_cast<int>(plan[i])];
        out.corpus.submissions.push_back(std::move(sub));
    }
    return out;
}

}  // namespace mcd
