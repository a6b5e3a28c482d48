// Drives the mcd binary end to end through the shell.

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <regex>
#include <set>
#include <sstream>
#include <string>

#include <gtest/gtest.h>
#include <json.hpp>

#include "mcd/corpus.hpp"
#include "mcd/rubric.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

class Cli : public ::testing::Test {
protected:
    fs::path dir;

    void SetUp() override {
        const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
        dir = fs::temp_directory_path() / ("mcd_cli_" + std::string(info->name()) + "_" + std::to_string(::getpid()));
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    void TearDown() override { fs::remove_all(dir); }

    // Exit status of `mcd args`; stderr lands in dir/stderr.txt.
    int run(const std::string& args) {
        const std::string cmd = "MCD_LOG_LEVEL=quiet '" + std::string(MCD_CLI_PATH) + "' " + args + " 2> '" +
                                (dir / "stderr.txt").string() + "' > /dev/null";
        const int st = std::system(cmd.c_str());
        return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
    }
    std::string err() { return slurp(dir / "stderr.txt"); }
    std::string p(const std::string& name) { return (dir / name).string(); }

    void gen(const std::string& out, const std::string& sets, int seed = 7) {
        ASSERT_EQ(run("gen-corpus --out '" + p(out) + "' --seed " + std::to_string(seed) + " " + sets), 0) << err();
    }
};

const std::string kSmallTrain =
    "--set d_emb=8 --set d_hidden=8 --set learning_rate=0.01 --set max_epochs=60 --set patience=20";

}  // namespace

TEST_F(Cli, GenCorpusCountsAndGroups) {
    gen("g", "--set gen_correct=80 --set gen_a=10 --set gen_b=8 --set gen_c=3");
    const mcd::Corpus c = mcd::load_corpus(p("g/corpus.json"));
    EXPECT_EQ(c.size(), 101u);
    const json gt = json::parse(slurp(dir / "g/ground_truth.json"));
    std::map<std::string, int> counts;
    for (const auto& [id, g] : gt["groups"].items()) ++counts[g.get<std::string>()];
    EXPECT_EQ(counts["correct"], 80);
    EXPECT_EQ(counts["A"], 10);
    EXPECT_EQ(counts["B"], 8);
    EXPECT_EQ(counts["C"], 3);
    for (const auto& s : c.submissions) {
        if (gt["groups"][s.id] != "B") continue;
        EXPECT_FALSE(s.rubric.items[0]) << s.id;
        EXPECT_TRUE(s.rubric.items[3]) << s.id;
    }
    EXPECT_TRUE(fs::exists(dir / "g/config.resolved.txt"));
}

TEST_F(Cli, GenCorpusIsByteIdenticalPerSeed) {
    gen("a", "--set gen_correct=20", 5);
    gen("b", "--set gen_correct=20", 5);
    gen("c", "--set gen_correct=20", 6);
    EXPECT_EQ(slurp(dir / "a/corpus.json"), slurp(dir / "b/corpus.json"));
    EXPECT_EQ(slurp(dir / "a/ground_truth.json"), slurp(dir / "b/ground_truth.json"));
    EXPECT_NE(slurp(dir / "a/corpus.json"), slurp(dir / "c/corpus.json"));
}

TEST_F(Cli, TrainWritesCheckpointAndHistory) {
    gen("g", "--set gen_correct=20 --set gen_a=4 --set gen_b=4 --set gen_c=2");
    ASSERT_EQ(run("train --corpus '" + p("g/corpus.json") + "' --out '" + p("t") + "' " + kSmallTrain), 0) << err();
    EXPECT_TRUE(fs::exists(dir / "t/checkpoint.json"));
    const std::string hist = slurp(dir / "t/history.csv");
    EXPECT_GT(std::count(hist.begin(), hist.end(), '\n'), 1);
}

TEST_F(Cli, TrainMissingCorpusFails) {
    EXPECT_NE(run("train --corpus '" + p("nope.json") + "' --out '" + p("t") + "'"), 0);
    EXPECT_EQ(run("train --out '" + p("t") + "'"), 1);  // no corpus configured at all
    EXPECT_NE(err().find("corpus"), std::string::npos);
}

TEST_F(Cli, SingleClassCorpusNamesDegenerateLabels) {
    gen("g", "--set gen_correct=15 --set gen_a=0 --set gen_b=0 --set gen_c=0");
    EXPECT_EQ(run("train --corpus '" + p("g/corpus.json") + "' --out '" + p("t") + "' " + kSmallTrain), 2);
    EXPECT_NE(err().find("DegenerateLabels"), std::string::npos) << err();
}

TEST_F(Cli, UnknownSetKeyIsUsageError) {
    EXPECT_EQ(run("gen-corpus --out '" + p("g") + "' --set no_such_key=1"), 1);
    EXPECT_EQ(run("gen-corpus --out '" + p("g") + "' --set gen_correct"), 1);
    EXPECT_EQ(run("frobnicate"), 1);
}

TEST_F(Cli, EvaluateShapesAndSplitReuse) {
    gen("g", "--set gen_correct=20 --set gen_a=4 --set gen_b=4 --set gen_c=2");
    const std::string args = "evaluate --corpus '" + p("g/corpus.json") + "' --out '" + p("e") + "' " + kSmallTrain +
                             " --set n_runs=3 --set max_contexts=40";
    ASSERT_EQ(run(args), 0) << err();
    const std::string summary = slurp(dir / "e/summary.csv");
    std::istringstream ss(summary);
    std::string line;
    std::getline(ss, line);
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 5) << line;  // model + 5 metrics
    int rows = 0;
    while (std::getline(ss, line))
        if (!line.empty()) ++rows;
    EXPECT_EQ(rows, 4);
    const std::string metrics = slurp(dir / "e/metrics.csv");
    EXPECT_EQ(std::count(metrics.begin(), metrics.end(), '\n'), 1 + 3 * 4);
    const std::string splits = slurp(dir / "e/splits.csv");

    const std::string quiet_off = "MCD_LOG_LEVEL=info '" + std::string(MCD_CLI_PATH) + "' " + args + " 2> '" +
                                  p("again.txt") + "' > /dev/null";
    ASSERT_EQ(std::system(quiet_off.c_str()), 0);
    EXPECT_NE(slurp(dir / "again.txt").find("reused cached splits"), std::string::npos);
    EXPECT_EQ(slurp(dir / "e/splits.csv"), splits);
    EXPECT_EQ(slurp(dir / "e/metrics.csv"), metrics);
}

TEST_F(Cli, DiscoverAndPlot) {
    gen("g", "--set gen_correct=20 --set gen_a=8 --set gen_b=8 --set gen_c=1");
    ASSERT_EQ(run("train --corpus '" + p("g/corpus.json") + "' --out '" + p("t") + "' " + kSmallTrain), 0) << err();
    ASSERT_EQ(run("discover --corpus '" + p("g/corpus.json") + "' --checkpoint '" + p("t/checkpoint.json") +
                  "' --out '" + p("d") + "' --set tsne_iterations=300 --set perplexity=5"),
              0)
        << err();
    const json cl = json::parse(slurp(dir / "d/clusters.json"));
    ASSERT_EQ(cl["items"].size(), mcd::kRubricItems);
    bool saw_note = false;
    for (const auto& item : cl["items"]) {
        int selected = 0;
        for (const auto& c : item["clusters"]) selected += c["selected"].get<bool>();
        EXPECT_LE(selected, 4);
        if (item["clusters"].empty()) {
            EXPECT_FALSE(item["note"].get<std::string>().empty());
            saw_note = true;
        }
    }
    EXPECT_TRUE(saw_note);  // some rubric items have at most minpts failures
    EXPECT_FALSE(slurp(dir / "d/report.txt").empty());

    const std::string plot_args = "plot --projection '" + p("d/projection.csv") + "' --clusters '" +
                                  p("d/clusters.json") + "' --out ";
    ASSERT_EQ(run(plot_args + "'" + p("p1") + "'"), 0) << err();
    ASSERT_EQ(run(plot_args + "'" + p("p2") + "'"), 0) << err();

    const std::string proj = slurp(dir / "d/projection.csv");
    const std::regex circle_re("<circle[^>]* r=\"(\\d)\" fill=\"(#[0-9a-f]{6})\"");
    for (const auto& item : cl["items"]) {
        const std::size_t r = item["rubric_item"];
        const std::string name = "plot_R" + std::to_string(r) + ".svg";
        const std::string svg = slurp(dir / "p1" / name);
        EXPECT_EQ(svg, slurp(dir / "p2" / name));

        std::size_t failing = 0;
        std::istringstream ps(proj);
        std::string line;
        std::getline(ps, line);
        while (std::getline(ps, line)) {
            const unsigned mask = static_cast<unsigned>(std::stoul(line.substr(line.rfind(',') + 1)));
            failing += (mask >> r) & 1u;
        }
        EXPECT_EQ(failing, item["failing"].get<std::size_t>());

        std::size_t marks = 0, legend = 0;
        std::set<std::string> colors;
        for (std::sregex_iterator it(svg.begin(), svg.end(), circle_re), end; it != end; ++it) {
            if ((*it)[1] == "4") {
                ++marks;
                colors.insert((*it)[2]);
            } else {
                ++legend;
            }
        }
        EXPECT_EQ(marks, failing) << name;
        EXPECT_EQ(legend, item["clusters"].size() + 1) << name;
        const bool any_noise = !item["noise"].empty() || item["clusters"].empty();
        if (failing > 0) {
            EXPECT_EQ(colors.size(), item["clusters"].size() + (any_noise ? 1 : 0)) << name;
        }
        if (item["clusters"].empty()) {
            EXPECT_NE(svg.find("no clusters"), std::string::npos);
        }
    }
}
