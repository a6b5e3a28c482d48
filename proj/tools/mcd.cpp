// mcd: command-line driver for corpus generation, training, evaluation,
// misconception discovery and plotting.
//
// Exit codes: 0 success, 1 usage or configuration error, 2 pipeline error.
// MCD_LOG_LEVEL=quiet|info|debug controls stderr chatter (default info).

#include <cstdio>
#include <cstdlib>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mcd/pipeline.hpp"

namespace {

enum class LogLevel { Quiet, Info, Debug };

LogLevel log_level() {
    const char* v = std::getenv("MCD_LOG_LEVEL");
    if (!v) return LogLevel::Info;
    const std::string s(v);
    if (s == "quiet" || s == "error" || s == "0") return LogLevel::Quiet;
    if (s == "debug" || s == "2") return LogLevel::Debug;
    return LogLevel::Info;
}

void log(LogLevel level, const std::string& msg) {
    if (level <= log_level()) std::fprintf(stderr, "mcd: %s\n", msg.c_str());
}

struct Options {
    std::string config;
    std::string out = "out";
    std::vector<std::string> overrides;  // key=value
    std::string seed, corpus, checkpoint, projection, clusters;
};

mcd::PipelineConfig resolve(const Options& o) {
    mcd::PipelineConfig cfg = o.config.empty() ? mcd::PipelineConfig{} : mcd::PipelineConfig::load(o.config);
    for (const auto& kv : o.overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw mcd::ConfigError("--set expects key=value, got '" + kv + "'");
        cfg.set(kv.substr(0, eq), kv.substr(eq + 1), "--set");
    }
    if (!o.seed.empty()) cfg.set("seed", o.seed, "--seed");
    if (!o.corpus.empty()) cfg.set("corpus", o.corpus, "--corpus");
    if (!o.checkpoint.empty()) cfg.set("checkpoint", o.checkpoint, "--checkpoint");
    if (!o.projection.empty()) cfg.set("projection", o.projection, "--projection");
    if (!o.clusters.empty()) cfg.set("clusters", o.clusters, "--clusters");
    cfg.integer("seed");  // validate early
    return cfg;
}

CLI::App* add_command(CLI::App& app, const std::string& name, const std::string& help, Options& o) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", o.config, "flat key = value config file")->check(CLI::ExistingFile);
    sub->add_option("--seed", o.seed, "seed for every random choice (overrides the config)");
    sub->add_option("--out", o.out, "output directory")->capture_default_str();
    sub->add_option("--set", o.overrides, "override a config key (key=value, repeatable)");
    return sub;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Misconception discovery over turtle-program submissions"};
    app.require_subcommand(1);
    Options o;

    auto* gen = add_command(app, "gen-corpus", "generate a synthetic corpus and its ground truth", o);
    auto* train = add_command(app, "train", "train the code2vec classifier and write a checkpoint", o);
    train->add_option("--corpus", o.corpus, "corpus JSON");
    auto* evaluate = add_command(app, "evaluate", "compare majority, SVM, NN and code2vec over resampled splits", o);
    evaluate->add_option("--corpus", o.corpus, "corpus JSON");
    auto* disc = add_command(app, "discover", "cluster failing submissions per rubric item", o);
    disc->add_option("--corpus", o.corpus, "corpus JSON");
    disc->add_option("--checkpoint", o.checkpoint, "checkpoint written by train");
    auto* plot = add_command(app, "plot", "render one SVG scatter per rubric item", o);
    plot->add_option("--projection", o.projection, "projection.csv written by discover");
    plot->add_option("--clusters", o.clusters, "clusters.json written by discover");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        const mcd::PipelineConfig cfg = resolve(o);
        if (*gen) {
            mcd::cmd_gen_corpus(cfg, o.out);
            log(LogLevel::Info, "wrote corpus.json and ground_truth.json to " + o.out);
        } else if (*train) {
            const auto h = mcd::cmd_train(cfg, o.out);
            log(LogLevel::Info, "trained " + std::to_string(h.epochs.size()) + " epochs, best epoch " +
                                    std::to_string(h.epochs.empty() ? 0 : h.epochs[h.best_epoch].epoch) + "; wrote " +
                                    o.out + "/checkpoint.json");
        } else if (*evaluate) {
            const auto r = mcd::cmd_evaluate(cfg, o.out);
            if (r.reused_splits) log(LogLevel::Info, "reused cached splits from " + o.out + "/splits.csv");
            log(LogLevel::Info, "summary:\n" + mcd::summary_csv(r.result));
        } else if (*disc) {
            const auto r = mcd::cmd_discover(cfg, o.out);
            for (const auto& rep : r.reports)
                log(LogLevel::Debug, "R" + std::to_string(rep.rubric_item) + ": " + std::to_string(rep.failing) +
                                         " failing, " + std::to_string(rep.clusters.size()) + " clusters");
            log(LogLevel::Info, "wrote clusters.json, projection.csv and report.txt to " + o.out);
        } else if (*plot) {
            const auto files = mcd::cmd_plot(cfg, o.out);
            log(LogLevel::Info, "wrote " + std::to_string(files.size()) + " plots to " + o.out);
        }
    } catch (const mcd::ConfigError& e) {
        std::fprintf(stderr, "mcd: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "mcd: %s\n", e.what());
        return 2;
    }
    return 0;
}
