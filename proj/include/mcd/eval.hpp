#pragma once
// Resampled train/test comparison of the majority, SVM, NN and code2vec
// models on one corpus.

#include <array>
#include <atomic>
#include <exception>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <string>
#include <thread>
#include <vector>

#include "mcd/baselines.hpp"
#include "mcd/code2vec.hpp"
#include "mcd/corpus.hpp"
#include "mcd/errors.hpp"
#include "mcd/metrics.hpp"
#include "mcd/paths.hpp"
#include "mcd/tfidf.hpp"
#include "mcd/vocab.hpp"

namespace mcd {

struct SplitSpec {
    double train_fraction = 0.8;
    std::size_t n_runs = 50;
    std::uint64_t base_seed = 0;
    bool stratified = false;

    void validate() const {
        if (!(train_fraction > 0.0 && train_fraction < 1.0)) throw ConfigError("train_fraction must lie in (0, 1)");
        if (n_runs == 0) throw ConfigError("n_runs must be positive");
    }
};

struct Split {
    std::vector<std::size_t> train;  // sorted corpus indices
    std::vector<std::size_t> test;

    friend bool operator==(const Split&, const Split&) = default;
};

/// Uniform random split seeded by (base_seed, run_index); floor(N * fraction)
/// examples go to training. With `stratified`, each class is split separately.
inline Split resample_split(std::span<const int> labels, const SplitSpec& spec, std::size_t run_index) {
    spec.validate();
    const std::size_t n = labels.size();
    if (n < 10) throw CorpusTooSmall("need at least 10 submissions, got " + std::to_string(n));
    auto rng = make_rng(spec.base_seed, 0x73706c6974ULL + run_index);
    Split s;
    auto take = [&](std::vector<std::size_t> idx) {
        shuffle_deterministic(idx, rng);
        const auto k = static_cast<std::size_t>(static_cast<double>(idx.size()) * spec.train_fraction);
        s.train.insert(s.train.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k));
        s.test.insert(s.test.end(), idx.begin() + static_cast<std::ptrdiff_t>(k), idx.end());
    };
    if (spec.stratified) {
        std::vector<std::size_t> pos, neg;
        for (std::size_t i = 0; i < n; ++i) (labels[i] ? pos : neg).push_back(i);
        take(std::move(neg));
        take(std::move(pos));
    } else {
        std::vector<std::size_t> all(n);
        for (std::size_t i = 0; i < n; ++i) all[i] = i;
        take(std::move(all));
    }
    std::sort(s.train.begin(), s.train.end());
    std::sort(s.test.begin(), s.test.end());
    return s;
}

inline std::size_t split_train_size(std::size_t n, double fraction) {
    return static_cast<std::size_t>(static_cast<double>(n) * fraction);
}

struct ComparisonConfig {
    SplitSpec split;
    TrainConfig code2vec;
    TrainConfig nn;
    TrainConfig svm;
    double svm_lambda = 1e-3;
    PathConfig paths;
    std::size_t max_contexts = 100;
    std::size_t min_count = 1;
    std::size_t threads = 1;
};

inline constexpr std::array<const char*, 4> kModelNames = {"majority", "svm", "nn", "code2vec"};

struct MetricReport {
    std::vector<MetricRow> runs;  // per-run values
    MetricRow mean;

    void finalize() {
        mean = {};
        mean.auc = 0.0;
        const double n = static_cast<double>(runs.size());
        for (const auto& r : runs) {
            mean.accuracy += r.accuracy / n;
            mean.precision += r.precision / n;
            mean.recall += r.recall / n;
            mean.auc += r.auc / n;
            mean.f1 += r.f1 / n;
            mean.auc_undefined = mean.auc_undefined || r.auc_undefined;
        }
    }
};

struct ComparisonResult {
    std::array<MetricReport, 4> models;  // indexed like kModelNames
    std::vector<Split> splits;
    std::vector<std::uint64_t> seeds;  // per-run training seed
};

inline std::uint64_t run_seed(std::uint64_t base_seed, std::size_t run) {
    auto rng = make_rng(base_seed, 0x72756eULL + run);
    return rng() >> 1;
}

namespace detail {

struct RunOutcome {
    std::array<MetricRow, 4> rows;
};

inline RunOutcome evaluate_split(const Corpus& corpus, const std::vector<std::vector<PathContext>>& contexts,
                                 const Split& split, std::uint64_t seed, const ComparisonConfig& cfg) {
    const std::vector<int> y_all = corpus.labels();
    std::vector<int> y_train, y_test;
    for (auto i : split.train) y_train.push_back(y_all[i]);
    for (auto i : split.test) y_test.push_back(y_all[i]);
    require_both_classes(y_train);

    RunOutcome out;
    auto metrics = [&](const std::vector<double>& scores, double threshold) {
        return binary_metrics(scores, y_test, threshold);
    };

    const MajorityPredictor maj = majority_baseline(y_train);
    out.rows[0] = metrics(std::vector<double>(y_test.size(), maj.score()), 0.5);

    std::vector<const Ast*> train_docs, test_docs;
    for (auto i : split.train) train_docs.push_back(&corpus.submissions[i].ast);
    for (auto i : split.test) test_docs.push_back(&corpus.submissions[i].ast);
    const TfidfModel tfidf = TfidfModel::fit(train_docs);
    const Matrix x_train = tfidf.transform(train_docs), x_test = tfidf.transform(test_docs);

    TrainConfig svm_cfg = cfg.svm;
    svm_cfg.seed = seed;
    const auto svm = train_linear_svm(x_train, y_train, svm_cfg, cfg.svm_lambda);
    std::vector<double> scores;
    for (std::size_t i = 0; i < x_test.rows(); ++i) scores.push_back(svm.params.score(x_test.row(i)));
    out.rows[1] = metrics(scores, 0.0);

    TrainConfig nn_cfg = cfg.nn;
    nn_cfg.seed = seed;
    const auto nn = train_fc_nn(x_train, y_train, nn_cfg);
    scores.clear();
    for (std::size_t i = 0; i < x_test.rows(); ++i) scores.push_back(nn.params.predict(x_test.row(i)));
    out.rows[2] = metrics(scores, 0.5);

    std::vector<std::vector<PathContext>> train_ctx;
    for (auto i : split.train) train_ctx.push_back(contexts[i]);
    const Vocab vocab = build_vocab(train_ctx, cfg.min_count);
    std::vector<EncodedSubmission> enc_train, enc_test;
    for (auto i : split.train) enc_train.push_back(encode(contexts[i], vocab, cfg.max_contexts));
    for (auto i : split.test) enc_test.push_back(encode(contexts[i], vocab, cfg.max_contexts));
    TrainConfig c2v_cfg = cfg.code2vec;
    c2v_cfg.seed = seed;
    const auto model = train_code2vec(enc_train, y_train, vocab.terminal_count(), vocab.path_count(), c2v_cfg);
    out.rows[3] = metrics(predict_positive(model.params, enc_test), 0.5);
    return out;
}

}  // namespace detail

/// Trains and scores all four models on n_runs resampled splits. Runs may be
/// spread over cfg.threads workers; results are folded in run order.
inline ComparisonResult run_comparison(const Corpus& corpus, const ComparisonConfig& cfg,
                                       const std::vector<Split>* cached_splits = nullptr) {
    cfg.split.validate();
    const std::vector<int> labels = corpus.labels();
    std::vector<std::vector<PathContext>> contexts;
    contexts.reserve(corpus.size());
    for (const auto& s : corpus.submissions) contexts.push_back(extract_paths(s.ast, cfg.paths));

    ComparisonResult res;
    const std::size_t runs = cfg.split.n_runs;
    for (std::size_t r = 0; r < runs; ++r) {
        res.splits.push_back(cached_splits && r < cached_splits->size() ? (*cached_splits)[r]
                                                                        : resample_split(labels, cfg.split, r));
        res.seeds.push_back(run_seed(cfg.split.base_seed, r));
    }

    std::vector<detail::RunOutcome> outcomes(runs);
    std::vector<std::exception_ptr> errors(runs);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t r; (r = next++) < runs;) {
            try {
                outcomes[r] = detail::evaluate_split(corpus, contexts, res.splits[r], res.seeds[r], cfg);
            } catch (...) {
                errors[r] = std::current_exception();
            }
        }
    };
    const std::size_t nthreads = std::max<std::size_t>(1, std::min(cfg.threads, runs));
    if (nthreads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < nthreads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    for (std::size_t r = 0; r < runs; ++r) {
        if (!errors[r]) continue;
        try {
            std::rethrow_exception(errors[r]);
        } catch (const Error& e) {
            rethrow_with_context(e, "in run " + std::to_string(r));
        }
    }
    for (std::size_t r = 0; r < runs; ++r)
        for (std::size_t m = 0; m < 4; ++m) res.models[m].runs.push_back(outcomes[r].rows[m]);
    for (auto& m : res.models) m.finalize();
    return res;
}

inline std::string format_metric(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

inline std::string metrics_csv(const ComparisonResult& res) {
    std::string out = "model,run,accuracy,precision,recall,auc,f1\n";
    for (std::size_t m = 0; m < 4; ++m)
        for (std::size_t r = 0; r < res.models[m].runs.size(); ++r) {
            const auto& x = res.models[m].runs[r];
            out += std::string(kModelNames[m]) + ',' + std::to_string(r) + ',' + format_metric(x.accuracy) + ',' +
                   format_metric(x.precision) + ',' + format_metric(x.recall) + ',' + format_metric(x.auc) + ',' +
                   format_metric(x.f1) + '\n';
        }
    return out;
}

inline std::string summary_csv(const ComparisonResult& res) {
    std::string out = "model,accuracy,precision,recall,auc,f1\n";
    for (std::size_t m = 0; m < 4; ++m) {
        const auto& x = res.models[m].mean;
        out += std::string(kModelNames[m]) + ',' + format_metric(x.accuracy) + ',' + format_metric(x.precision) + ',' +
               format_metric(x.recall) + ',' + format_metric(x.auc) + ',' + format_metric(x.f1) + '\n';
    }
    return out;
}

}  // namespace mcd
