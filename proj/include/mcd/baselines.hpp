#pragma once
// Baselines over TF-IDF features: a one-hidden-layer network, a linear SVM
// trained with hinge loss + Adam, and the constant majority predictor.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <cstddef>
#include <span>
#include <vector>

#include "mcd/errors.hpp"
#include "mcd/matrix.hpp"
#include "mcd/training.hpp"

namespace mcd {

// ---------------------------------------------------------------------------
// Fully connected network: h = tanh(W1 x + b1), p = softmax(W2 h + b2)

struct MlpParams {
    Matrix w1;  // hidden x input
    Matrix b1;  // 1 x hidden
    Matrix w2;  // 2 x hidden
    Matrix b2;  // 1 x 2

    static MlpParams zeros(std::size_t input, std::size_t hidden) {
        return {Matrix(hidden, input), Matrix(1, hidden), Matrix(2, hidden), Matrix(1, 2)};
    }
    static MlpParams init(std::size_t input, std::size_t hidden, std::uint64_t seed) {
        auto p = zeros(input, hidden);
        auto rng = make_rng(seed, 0x6d6c70ULL);
        fill_uniform(p.w1.data(), std::sqrt(6.0 / static_cast<double>(input + hidden)), rng);
        fill_uniform(p.w2.data(), std::sqrt(6.0 / static_cast<double>(hidden + 2)), rng);
        return p;
    }
    MlpParams zeros_like() const { return zeros(w1.cols(), w1.rows()); }
    std::vector<std::span<double>> tensors() { return {w1.data(), b1.data(), w2.data(), b2.data()}; }
    std::vector<std::size_t> frozen_prefixes() const { return {0, 0, 0, 0}; }

    // Probability of the positive class.
    double predict(std::span<const double> x) const {
        std::vector<double> h(w1.rows());
        for (std::size_t r = 0; r < h.size(); ++r) h[r] = std::tanh(dot(w1.row(r), x) + b1(0, r));
        std::array<double, 2> o{dot(w2.row(0), h) + b2(0, 0), dot(w2.row(1), h) + b2(0, 1)};
        softmax_inplace(o);
        return o[1];
    }
};

namespace detail {

inline double mlp_loss_grad(const MlpParams& p, const Matrix& x, std::span<const int> y,
                            std::span<const std::size_t> batch, MlpParams* grad) {
    if (grad)
        for (auto t : grad->tensors()) std::fill(t.begin(), t.end(), 0.0);
    const std::size_t H = p.w1.rows(), D = p.w1.cols();
    const double inv_n = 1.0 / static_cast<double>(batch.size());
    std::vector<double> h(H), dh(H);
    double loss = 0.0;
    for (std::size_t b : batch) {
        auto xi = x.row(b);
        for (std::size_t r = 0; r < H; ++r) h[r] = std::tanh(dot(p.w1.row(r), xi) + p.b1(0, r));
        std::array<double, 2> o{dot(p.w2.row(0), h) + p.b2(0, 0), dot(p.w2.row(1), h) + p.b2(0, 1)};
        softmax_inplace(o);
        loss -= std::log(std::max(o[y[b]], 1e-300));
        if (!grad) continue;
        const std::array<double, 2> dout{(o[0] - (y[b] == 0)) * inv_n, (o[1] - (y[b] == 1)) * inv_n};
        for (std::size_t k = 0; k < 2; ++k) {
            grad->b2(0, k) += dout[k];
            for (std::size_t r = 0; r < H; ++r) grad->w2(k, r) += dout[k] * h[r];
        }
        for (std::size_t r = 0; r < H; ++r) {
            dh[r] = (dout[0] * p.w2(0, r) + dout[1] * p.w2(1, r)) * (1.0 - h[r] * h[r]);
            grad->b1(0, r) += dh[r];
            if (dh[r] == 0.0) continue;
            auto gw = grad->w1.row(r);
            for (std::size_t j = 0; j < D; ++j) gw[j] += dh[r] * xi[j];
        }
    }
    return loss * inv_n;
}

}  // namespace detail

inline TrainedModel<MlpParams> train_fc_nn(const Matrix& features, std::span<const int> labels, const TrainConfig& cfg) {
    cfg.validate();
    if (features.rows() != labels.size()) throw std::invalid_argument("train_fc_nn: features/labels size mismatch");
    require_both_classes(labels);
    const ValidationSplit split = split_validation(features.rows(), cfg.validation_fraction, cfg.seed);
    return train_with_early_stopping(
        MlpParams::init(features.cols(), cfg.d_hidden, cfg.seed), cfg, split.train, split.val,
        [&](const MlpParams& p, std::span<const std::size_t> batch, MlpParams& g) {
            return detail::mlp_loss_grad(p, features, labels, batch, &g);
        },
        [&](const MlpParams& p, std::span<const std::size_t> idx) {
            std::size_t correct = 0;
            for (std::size_t i : idx) correct += (p.predict(features.row(i)) > 0.5 ? 1 : 0) == labels[i];
            return LossAcc{detail::mlp_loss_grad(p, features, labels, idx, nullptr),
                           static_cast<double>(correct) / static_cast<double>(idx.size())};
        });
}

// ---------------------------------------------------------------------------
// Linear SVM: score = w.x + b; objective = mean hinge(1 - t score) + lambda/2 |w|^2
// with t = +1 for the positive class.

struct SvmParams {
    Matrix w;  // 1 x input
    Matrix b;  // 1 x 1
    double lambda = 1e-3;

    SvmParams zeros_like() const { return {Matrix(1, w.cols()), Matrix(1, 1), lambda}; }
    std::vector<std::span<double>> tensors() { return {w.data(), b.data()}; }
    std::vector<std::size_t> frozen_prefixes() const { return {0, 0}; }

    double score(std::span<const double> x) const { return dot(w.row(0), x) + b(0, 0); }
};

namespace detail {

inline double svm_objective(const SvmParams& p, const Matrix& x, std::span<const int> y,
                            std::span<const std::size_t> batch, SvmParams* grad) {
    if (grad) {
        grad->w.fill(0.0);
        grad->b.fill(0.0);
    }
    const double inv_n = 1.0 / static_cast<double>(batch.size());
    double hinge = 0.0;
    for (std::size_t i : batch) {
        const double t = y[i] ? 1.0 : -1.0;
        const double margin = 1.0 - t * p.score(x.row(i));
        if (margin <= 0.0) continue;
        hinge += margin;
        if (!grad) continue;
        auto gw = grad->w.row(0);
        auto xi = x.row(i);
        for (std::size_t j = 0; j < gw.size(); ++j) gw[j] -= t * xi[j] * inv_n;
        grad->b(0, 0) -= t * inv_n;
    }
    double wn = 0.0;
    for (double v : p.w.data()) wn += v * v;
    if (grad)
        for (std::size_t j = 0; j < p.w.cols(); ++j) grad->w(0, j) += p.lambda * p.w(0, j);
    return hinge * inv_n + 0.5 * p.lambda * wn;
}

}  // namespace detail

inline TrainedModel<SvmParams> train_linear_svm(const Matrix& features, std::span<const int> labels,
                                                const TrainConfig& cfg, double lambda = 1e-3) {
    cfg.validate();
    if (features.rows() != labels.size()) throw std::invalid_argument("train_linear_svm: features/labels size mismatch");
    if (!(lambda >= 0)) throw ConfigError("svm lambda must be non-negative");
    require_both_classes(labels);
    const ValidationSplit split = split_validation(features.rows(), cfg.validation_fraction, cfg.seed);
    SvmParams init{Matrix(1, features.cols()), Matrix(1, 1), lambda};
    return train_with_early_stopping(
        std::move(init), cfg, split.train, split.val,
        [&](const SvmParams& p, std::span<const std::size_t> batch, SvmParams& g) {
            return detail::svm_objective(p, features, labels, batch, &g);
        },
        [&](const SvmParams& p, std::span<const std::size_t> idx) {
            std::size_t correct = 0;
            for (std::size_t i : idx) correct += (p.score(features.row(i)) > 0.0 ? 1 : 0) == labels[i];
            return LossAcc{detail::svm_objective(p, features, labels, idx, nullptr),
                           static_cast<double>(correct) / static_cast<double>(idx.size())};
        });
}

// ---------------------------------------------------------------------------

struct MajorityPredictor {
    int label = 0;

    double score() const noexcept { return static_cast<double>(label); }
};

/// Most frequent training label; ties go to class 0 (fail).
inline MajorityPredictor majority_baseline(std::span<const int> labels) {
    if (labels.empty()) throw EmptyCorpus("majority baseline needs at least one label");
    std::size_t pos = 0;
    for (int y : labels) pos += y != 0;
    return {pos * 2 > labels.size() ? 1 : 0};
}

}  // namespace mcd
