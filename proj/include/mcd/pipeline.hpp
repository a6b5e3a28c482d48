#pragma once
// The five pipeline commands as library calls. Each writes its outputs plus
// the resolved config into an output directory.

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "mcd/checkpoint.hpp"
#include "mcd/code2vec.hpp"
#include "mcd/config.hpp"
#include "mcd/corpus.hpp"
#include "mcd/discover.hpp"
#include "mcd/eval.hpp"
#include "mcd/generator.hpp"
#include "mcd/paths.hpp"
#include "mcd/svg.hpp"
#include "mcd/vocab.hpp"

namespace mcd {

inline constexpr const char* kResolvedConfigFile = "config.resolved.txt";

inline std::vector<EncodedSubmission> encode_corpus(const Corpus& corpus, const Vocab& vocab, const PathConfig& paths,
                                                    std::size_t max_contexts) {
    std::vector<EncodedSubmission> out;
    out.reserve(corpus.size());
    for (const auto& s : corpus.submissions) out.push_back(encode(extract_paths(s.ast, paths), vocab, max_contexts));
    return out;
}

namespace detail {

inline std::filesystem::path prepare_out(const std::string& dir) {
    std::filesystem::path p(dir);
    std::error_code ec;
    std::filesystem::create_directories(p, ec);
    if (ec) throw IoError("cannot create output directory '" + dir + "': " + ec.message());
    return p;
}

inline const std::string& required_path(const PipelineConfig& cfg, const std::string& key) {
    const std::string& v = cfg.str(key);
    if (v.empty()) throw ConfigError("missing input: set '" + key + "' in the config or pass --" + key);
    return v;
}

inline void write_resolved(const std::filesystem::path& out, const PipelineConfig& cfg) {
    write_text_file((out / kResolvedConfigFile).string(), cfg.resolved());
}

}  // namespace detail

/// corpus.json + ground_truth.json (kept apart from everything the pipeline reads).
inline void cmd_gen_corpus(const PipelineConfig& cfg, const std::string& out_dir) {
    const auto out = detail::prepare_out(out_dir);
    const GeneratedCorpus g = generate_corpus(cfg.generator());
    save_corpus((out / "corpus.json").string(), g.corpus);
    write_text_file((out / "ground_truth.json").string(), g.ground_truth_json().dump(1) + "\n");
    detail::write_resolved(out, cfg);
}

/// Trains code2vec on the whole corpus (minus the early-stopping carve-out);
/// writes checkpoint.json and history.csv.
inline TrainingHistory cmd_train(const PipelineConfig& cfg, const std::string& out_dir) {
    const Corpus corpus = load_corpus(detail::required_path(cfg, "corpus"));
    if (corpus.size() == 0) throw EmptyCorpus("corpus has no submissions");
    const TrainConfig tc = cfg.code2vec_train();
    const PathConfig paths = cfg.paths();
    const std::size_t max_contexts = cfg.size("max_contexts");
    if (max_contexts == 0) throw ConfigError("max_contexts must be positive");
    const auto out = detail::prepare_out(out_dir);

    std::vector<std::vector<PathContext>> contexts;
    for (const auto& s : corpus.submissions) contexts.push_back(extract_paths(s.ast, paths));
    Checkpoint ck;
    ck.vocab = build_vocab(contexts, cfg.size("min_count"));
    ck.paths = paths;
    ck.max_contexts = max_contexts;
    ck.config = cfg.values();
    std::vector<EncodedSubmission> enc;
    for (const auto& c : contexts) enc.push_back(encode(c, ck.vocab, max_contexts));
    const std::vector<int> labels = corpus.labels();
    auto model = train_code2vec(enc, labels, ck.vocab.terminal_count(), ck.vocab.path_count(), tc);
    ck.params = std::move(model.params);
    save_checkpoint((out / "checkpoint.json").string(), ck);
    write_text_file((out / "history.csv").string(), model.history.to_csv());
    detail::write_resolved(out, cfg);
    return model.history;
}

// splits.csv: a '#' line recording what the splits depend on, then one row
// per run with space-separated submission ids.
inline std::string splits_csv(const Corpus& corpus, const SplitSpec& spec, const std::vector<Split>& splits) {
    std::string out = "# base_seed=" + std::to_string(spec.base_seed) + " train_fraction=" + format_double(spec.train_fraction) +
                      " stratified=" + (spec.stratified ? "true" : "false") + " size=" + std::to_string(corpus.size()) +
                      "\nrun,train,test\n";
    for (std::size_t r = 0; r < splits.size(); ++r) {
        out += std::to_string(r) + ',';
        for (std::size_t k = 0; k < splits[r].train.size(); ++k)
            out += (k ? " " : "") + corpus.submissions[splits[r].train[k]].id;
        out += ',';
        for (std::size_t k = 0; k < splits[r].test.size(); ++k)
            out += (k ? " " : "") + corpus.submissions[splits[r].test[k]].id;
        out += '\n';
    }
    return out;
}

/// Reads splits.csv written for the same corpus and split settings; returns
/// nothing when the file is absent or was produced under other settings.
inline std::optional<std::vector<Split>> read_cached_splits(const std::string& path, const Corpus& corpus,
                                                            const SplitSpec& spec) {
    if (!std::filesystem::exists(path)) return std::nullopt;
    const std::string text = read_text_file(path);
    const std::string header = splits_csv(corpus, spec, {});
    if (text.compare(0, header.size(), header) != 0) return std::nullopt;
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < corpus.size(); ++i) index[corpus.submissions[i].id] = i;
    std::vector<Split> out;
    std::size_t pos = header.size();
    auto ids = [&](const std::string& field, std::vector<std::size_t>& into) {
        std::size_t s = 0;
        while (s < field.size()) {
            std::size_t e = field.find(' ', s);
            if (e == std::string::npos) e = field.size();
            auto it = index.find(field.substr(s, e - s));
            if (it == index.end()) return false;
            into.push_back(it->second);
            s = e + 1;
        }
        return true;
    };
    while (pos < text.size()) {
        std::size_t nl = text.find('\n', pos);
        if (nl == std::string::npos) nl = text.size();
        const std::string line = text.substr(pos, nl - pos);
        pos = nl + 1;
        const auto c1 = line.find(','), c2 = line.find(',', c1 + 1);
        if (c1 == std::string::npos || c2 == std::string::npos) return std::nullopt;
        Split s;
        if (!ids(line.substr(c1 + 1, c2 - c1 - 1), s.train) || !ids(line.substr(c2 + 1), s.test)) return std::nullopt;
        std::sort(s.train.begin(), s.train.end());
        std::sort(s.test.begin(), s.test.end());
        out.push_back(std::move(s));
    }
    return out;
}

struct EvaluateOutcome {
    ComparisonResult result;
    bool reused_splits = false;
};

/// metrics.csv, summary.csv and splits.csv. Splits recorded by an earlier run
/// with the same base seed and split settings are reused.
inline EvaluateOutcome cmd_evaluate(const PipelineConfig& cfg, const std::string& out_dir) {
    const Corpus corpus = load_corpus(detail::required_path(cfg, "corpus"));
    const ComparisonConfig cc = cfg.comparison();
    const auto out = detail::prepare_out(out_dir);
    const std::string splits_path = (out / "splits.csv").string();
    EvaluateOutcome res;
    const auto cached = read_cached_splits(splits_path, corpus, cc.split);
    res.reused_splits = cached && !cached->empty();
    res.result = run_comparison(corpus, cc, res.reused_splits ? &*cached : nullptr);
    write_text_file((out / "metrics.csv").string(), metrics_csv(res.result));
    write_text_file((out / "summary.csv").string(), summary_csv(res.result));
    // Keep the longest split log so a shorter rerun never discards runs.
    if (!res.reused_splits || cached->size() < res.result.splits.size())
        write_text_file(splits_path, splits_csv(corpus, cc.split, res.result.splits));
    detail::write_resolved(out, cfg);
    return res;
}

/// clusters.json, projection.csv and report.txt.
inline DiscoveryResult cmd_discover(const PipelineConfig& cfg, const std::string& out_dir) {
    const Corpus corpus = load_corpus(detail::required_path(cfg, "corpus"));
    const Checkpoint ck = load_checkpoint(detail::required_path(cfg, "checkpoint"));
    const DiscoveryConfig dc = cfg.discovery();
    const auto out = detail::prepare_out(out_dir);
    const auto enc = encode_corpus(corpus, ck.vocab, ck.paths, ck.max_contexts);
    DiscoveryResult res = discover(corpus, enc, ck.params, dc);
    write_text_file((out / "clusters.json").string(), clusters_to_json(res.reports).dump(1) + "\n");
    write_text_file((out / "projection.csv").string(), projection_csv(res.input));
    std::map<std::string, const Submission*> by_id;
    for (const auto& s : corpus.submissions) by_id[s.id] = &s;
    write_text_file((out / "report.txt").string(), discovery_report(res, by_id));
    detail::write_resolved(out, cfg);
    return res;
}

/// plot_R0.svg .. plot_R5.svg (one per rubric item present in clusters.json).
inline std::vector<std::string> cmd_plot(const PipelineConfig& cfg, const std::string& out_dir) {
    const auto rows = parse_projection_csv(read_text_file(detail::required_path(cfg, "projection")));
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_text_file(detail::required_path(cfg, "clusters")));
    } catch (const nlohmann::json::parse_error& e) {
        throw SchemaError(std::string("clusters file: ") + e.what());
    }
    const auto reports = clusters_from_json(j);
    const auto out = detail::prepare_out(out_dir);
    std::vector<std::string> written;
    for (const auto& r : reports) {
        const std::string name = "plot_R" + std::to_string(r.rubric_item) + ".svg";
        write_text_file((out / name).string(), render_svg(rows, r));
        written.push_back(name);
    }
    detail::write_resolved(out, cfg);
    return written;
}

}  // namespace mcd
