#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <vector>

#include <gtest/gtest.h>

#include "mcd/eval.hpp"
#include "mcd/generator.hpp"
#include "mcd/metrics.hpp"
#include "oracles.hpp"

using namespace mcd;

namespace {

TrainConfig quick(double lr = 0.01) {
    TrainConfig c;
    c.d_emb = 8;
    c.d_hidden = 8;
    c.learning_rate = lr;
    c.max_epochs = 300;
    c.patience = 60;
    return c;
}

ComparisonConfig quick_comparison(std::size_t runs) {
    ComparisonConfig cfg;
    cfg.split.n_runs = runs;
    cfg.split.base_seed = 17;
    cfg.code2vec = quick();
    cfg.nn = quick();
    cfg.svm = quick();
    cfg.max_contexts = 60;
    return cfg;
}

}  // namespace

TEST(ResampleSplit, SizesForPaperCorpus) {
    const std::vector<int> labels(207, 0);
    const Split s = resample_split(labels, SplitSpec{}, 0);
    EXPECT_EQ(s.train.size(), 165u);
    EXPECT_EQ(s.test.size(), 42u);
}

TEST(ResampleSplit, RepeatableDisjointExhaustive) {
    std::vector<int> labels(57);
    for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = i % 3 == 0;
    SplitSpec spec;
    spec.base_seed = 9;
    std::set<std::vector<std::size_t>> distinct;
    for (std::size_t run = 0; run < 10; ++run) {
        const Split s = resample_split(labels, spec, run);
        EXPECT_EQ(s, resample_split(labels, spec, run));
        std::vector<std::size_t> all = s.train;
        all.insert(all.end(), s.test.begin(), s.test.end());
        std::sort(all.begin(), all.end());
        std::vector<std::size_t> expect(labels.size());
        std::iota(expect.begin(), expect.end(), std::size_t{0});
        EXPECT_EQ(all, expect);
        distinct.insert(s.train);
    }
    EXPECT_GT(distinct.size(), 5u);
}

TEST(ResampleSplit, StratifiedKeepsClassProportions) {
    std::vector<int> labels(50, 0);
    std::fill(labels.begin(), labels.begin() + 20, 1);
    SplitSpec spec;
    spec.stratified = true;
    const Split s = resample_split(labels, spec, 3);
    std::size_t pos = 0;
    for (auto i : s.train) pos += labels[i];
    EXPECT_EQ(pos, 16u);
    EXPECT_EQ(s.train.size(), 40u);
}

TEST(ResampleSplit, Errors) {
    EXPECT_THROW(resample_split(std::vector<int>(9, 0), SplitSpec{}, 0), CorpusTooSmall);
    SplitSpec bad;
    bad.train_fraction = 1.0;
    EXPECT_THROW(resample_split(std::vector<int>(20, 0), bad, 0), ConfigError);
}

// ---------------------------------------------------------------------------

TEST(Metrics, PerfectRanking) {
    const std::vector<int> y{1, 0, 1, 0};
    const auto m = binary_metrics(std::vector<double>{0.9, 0.1, 0.8, 0.2}, y, 0.5);
    EXPECT_EQ(m.auc, 1.0);
    EXPECT_EQ(m.accuracy, 1.0);
    EXPECT_EQ(m.f1, 1.0);
}

TEST(Metrics, HalfThePairsOrdered) {
    const std::vector<int> y{1, 0, 1, 0};
    const std::vector<double> s{0.9, 0.8, 0.1, 0.2};
    EXPECT_EQ(roc_auc(s, y).value, 0.5);
    EXPECT_EQ(oracle::auc_pairs(s, y), 0.5);
}

TEST(Metrics, MajorityRow) {
    std::vector<int> y(50, 0);
    std::fill(y.begin(), y.begin() + 19, 1);
    const auto m = binary_metrics(std::vector<double>(50, 0.0), y, 0.5);
    EXPECT_EQ(m.precision, 0.0);
    EXPECT_EQ(m.recall, 0.0);
    EXPECT_EQ(m.f1, 0.0);
    EXPECT_EQ(m.auc, 0.5);
    EXPECT_DOUBLE_EQ(m.accuracy, 0.62);
}

TEST(Metrics, SingleClassAucIsFlagged) {
    const auto m = binary_metrics(std::vector<double>{0.1, 0.7}, std::vector<int>{1, 1}, 0.5);
    EXPECT_TRUE(m.auc_undefined);
    EXPECT_EQ(m.auc, 0.5);
    EXPECT_EQ(m.recall, 0.5);
}

TEST(Metrics, HandCountedThresholdMetrics) {
    // tp = 2, fp = 1, fn = 1, tn = 1
    const std::vector<int> y{1, 1, 1, 0, 0};
    const auto m = binary_metrics(std::vector<double>{0.9, 0.6, 0.4, 0.7, 0.1}, y, 0.5);
    EXPECT_DOUBLE_EQ(m.accuracy, 0.6);
    EXPECT_DOUBLE_EQ(m.precision, 2.0 / 3.0);
    EXPECT_DOUBLE_EQ(m.recall, 2.0 / 3.0);
    EXPECT_DOUBLE_EQ(m.f1, 2.0 / 3.0);
    const auto svm_style = binary_metrics(std::vector<double>{1.2, 0.1, -0.3, 0.4, -2.0}, y, 0.0);
    EXPECT_DOUBLE_EQ(svm_style.accuracy, 0.6);
}

TEST(Metrics, AucMatchesPairCountingOnRandomScores) {
    std::mt19937_64 rng(21);
    for (int it = 0; it < 500; ++it) {
        const std::size_t n = 2 + rng() % 49;
        std::vector<double> s(n);
        std::vector<int> y(n);
        for (std::size_t i = 0; i < n; ++i) {
            s[i] = static_cast<double>(rng() % 7) / 7.0;  // frequent ties
            y[i] = static_cast<int>(rng() % 2);
        }
        const auto r = roc_auc(s, y);
        if (r.undefined) continue;
        EXPECT_EQ(r.value, oracle::auc_pairs(s, y));
    }
}

TEST(Metrics, PermutationAndMonotoneInvariance) {
    std::mt19937_64 rng(4);
    for (int it = 0; it < 100; ++it) {
        const std::size_t n = 5 + rng() % 30;
        std::vector<double> s(n);
        std::vector<int> y(n);
        for (std::size_t i = 0; i < n; ++i) {
            s[i] = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
            y[i] = static_cast<int>(rng() % 2);
        }
        const auto base = binary_metrics(s, y, 0.5);
        std::vector<std::size_t> perm(n);
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        std::shuffle(perm.begin(), perm.end(), rng);
        std::vector<double> ps(n), ms(n);
        std::vector<int> py(n);
        for (std::size_t i = 0; i < n; ++i) {
            ps[i] = s[perm[i]];
            py[i] = y[perm[i]];
            ms[i] = std::exp(3.0 * s[i]) - 5.0;
        }
        const auto p = binary_metrics(ps, py, 0.5);
        EXPECT_EQ(p.accuracy, base.accuracy);
        EXPECT_EQ(p.precision, base.precision);
        EXPECT_EQ(p.recall, base.recall);
        EXPECT_EQ(p.auc, base.auc);
        EXPECT_EQ(roc_auc(ms, y).value, base.auc);
    }
}

// ---------------------------------------------------------------------------

TEST(Comparison, MeanEqualsMeanOfRunsAndCsvShape) {
    const auto g = generate_corpus(GeneratorSpec{20, 4, 4, 4, 3, 2});
    const auto res = run_comparison(g.corpus, quick_comparison(3));
    for (const auto& m : res.models) {
        ASSERT_EQ(m.runs.size(), 3u);
        double acc = 0.0, auc = 0.0, f1 = 0.0;
        for (const auto& r : m.runs) {
            acc += r.accuracy;
            auc += r.auc;
            f1 += r.f1;
            for (double v : {r.accuracy, r.precision, r.recall, r.auc, r.f1}) {
                EXPECT_GE(v, 0.0);
                EXPECT_LE(v, 1.0);
            }
        }
        EXPECT_NEAR(m.mean.accuracy, acc / 3.0, 1e-12);
        EXPECT_NEAR(m.mean.auc, auc / 3.0, 1e-12);
        EXPECT_NEAR(m.mean.f1, f1 / 3.0, 1e-12);
    }
    for (const auto& r : res.models[0].runs) EXPECT_TRUE(r.recall == 0.0 || r.recall == 1.0);  // constant predictor
    const std::string csv = metrics_csv(res);
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1 + 4 * 3);
    const std::string summary = summary_csv(res);
    EXPECT_EQ(std::count(summary.begin(), summary.end(), '\n'), 5);
}

TEST(Comparison, SingleRunEqualsManualPipeline) {
    const auto g = generate_corpus(GeneratorSpec{14, 3, 3, 2, 3, 5});
    const auto cfg = quick_comparison(1);
    const auto res = run_comparison(g.corpus, cfg);

    const auto labels = g.corpus.labels();
    const Split split = resample_split(labels, cfg.split, 0);
    EXPECT_EQ(res.splits[0], split);
    std::vector<std::vector<PathContext>> ctx_train;
    std::vector<int> y_train, y_test;
    for (auto i : split.train) {
        ctx_train.push_back(extract_paths(g.corpus.submissions[i].ast));
        y_train.push_back(labels[i]);
    }
    for (auto i : split.test) y_test.push_back(labels[i]);
    const Vocab vocab = build_vocab(ctx_train);
    std::vector<EncodedSubmission> tr, te;
    for (auto i : split.train) tr.push_back(encode(extract_paths(g.corpus.submissions[i].ast), vocab, cfg.max_contexts));
    for (auto i : split.test) te.push_back(encode(extract_paths(g.corpus.submissions[i].ast), vocab, cfg.max_contexts));
    TrainConfig c = cfg.code2vec;
    c.seed = run_seed(cfg.split.base_seed, 0);
    const auto model = train_code2vec(tr, y_train, vocab.terminal_count(), vocab.path_count(), c);
    const auto m = binary_metrics(predict_positive(model.params, te), y_test, 0.5);
    EXPECT_EQ(res.models[3].runs[0].accuracy, m.accuracy);
    EXPECT_EQ(res.models[3].runs[0].auc, m.auc);
    EXPECT_EQ(res.models[3].mean.f1, m.f1);
}

TEST(Comparison, ThreadsDoNotChangeResults) {
    const auto g = generate_corpus(GeneratorSpec{14, 3, 3, 2, 3, 6});
    auto cfg = quick_comparison(3);
    const auto a = run_comparison(g.corpus, cfg);
    cfg.threads = 3;
    const auto b = run_comparison(g.corpus, cfg);
    EXPECT_EQ(metrics_csv(a), metrics_csv(b));
}

TEST(Comparison, SingleClassCorpusIsDegenerate) {
    const auto g = generate_corpus(GeneratorSpec{12, 0, 0, 0, 3, 1});
    try {
        run_comparison(g.corpus, quick_comparison(2));
        FAIL() << "expected DegenerateLabels";
    } catch (const DegenerateLabels& e) {
        EXPECT_NE(std::string(e.what()).find("run 0"), std::string::npos);
    }
}

TEST(Comparison, SeparableCorpusCode2VecAccuracy) {
    // No jitter statements: the label is the only structural signal.
    const auto g = generate_corpus(GeneratorSpec{30, 10, 10, 10, 0, 11});
    auto cfg = quick_comparison(5);
    cfg.code2vec.d_emb = cfg.code2vec.d_hidden = 16;
    cfg.code2vec.max_epochs = 1500;
    cfg.code2vec.patience = 200;
    cfg.max_contexts = 100;
    const auto res = run_comparison(g.corpus, cfg);
    EXPECT_GE(res.models[3].mean.accuracy, 0.9);
}
