#pragma once
// Attention classifier over path contexts.
//
// For each real context i:
//   c_i = tanh(W [e_t(start_i); e_p(path_i); e_t(end_i)])
//   alpha = softmax_i(c_i . a)              (masked slots excluded)
//   v = sum_i alpha_i c_i
//   p = softmax(W_out v)                    p = (P(fail), P(all-correct))
//
// There are no bias terms and row 0 of both embedding tables (PAD) stays zero,
// so PAD slots of the context matrix are exactly zero.

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <cmath>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "mcd/errors.hpp"
#include "mcd/matrix.hpp"
#include "mcd/training.hpp"
#include "mcd/vocab.hpp"

namespace mcd {

struct Prediction {
    std::array<double, 2> probs{0.5, 0.5};

    double positive() const noexcept { return probs[1]; }
    int label() const noexcept { return probs[1] > 0.5 ? 1 : 0; }
};

struct Code2VecParams {
    Matrix terminal_emb;  // |terminals| x d_emb
    Matrix path_emb;      // |paths| x d_emb
    Matrix combine;       // d_hidden x 3 d_emb
    Matrix attention;     // 1 x d_hidden
    Matrix output;        // 2 x d_hidden

    std::size_t d_emb() const noexcept { return terminal_emb.cols(); }
    std::size_t d_hidden() const noexcept { return combine.rows(); }

    static Code2VecParams zeros(std::size_t terminals, std::size_t paths, std::size_t d_emb, std::size_t d_hidden) {
        return {Matrix(terminals, d_emb), Matrix(paths, d_emb), Matrix(d_hidden, 3 * d_emb), Matrix(1, d_hidden),
                Matrix(2, d_hidden)};
    }

    // Embeddings ~ U(-0.05, 0.05); dense layers ~ U(-r, r) with the Glorot
    // limit r = sqrt(6 / (fan_in + fan_out)). PAD rows are zero.
    static Code2VecParams init(std::size_t terminals, std::size_t paths, std::size_t d_emb, std::size_t d_hidden,
                               std::uint64_t seed) {
        auto p = zeros(terminals, paths, d_emb, d_hidden);
        auto rng = make_rng(seed, 0x633276ULL);
        fill_uniform(p.terminal_emb.data(), 0.05, rng);
        fill_uniform(p.path_emb.data(), 0.05, rng);
        fill_uniform(p.combine.data(), std::sqrt(6.0 / static_cast<double>(3 * d_emb + d_hidden)), rng);
        fill_uniform(p.attention.data(), std::sqrt(6.0 / static_cast<double>(d_hidden + 1)), rng);
        fill_uniform(p.output.data(), std::sqrt(6.0 / static_cast<double>(d_hidden + 2)), rng);
        for (double& x : p.terminal_emb.row(kPad)) x = 0.0;
        for (double& x : p.path_emb.row(kPad)) x = 0.0;
        return p;
    }

    Code2VecParams zeros_like() const {
        return zeros(terminal_emb.rows(), path_emb.rows(), d_emb(), d_hidden());
    }

    std::vector<std::span<double>> tensors() {
        return {terminal_emb.data(), path_emb.data(), combine.data(), attention.data(), output.data()};
    }
    std::vector<std::span<const double>> tensors() const {
        return {terminal_emb.data(), path_emb.data(), combine.data(), attention.data(), output.data()};
    }
    std::vector<std::size_t> frozen_prefixes() const { return {d_emb(), d_emb(), 0, 0, 0}; }

    friend bool operator==(const Code2VecParams&, const Code2VecParams&) = default;
};

struct Code2VecForward {
    Matrix contexts;                 // C x d_hidden, PAD rows zero
    std::vector<double> attention;   // C, zero on PAD slots
    std::vector<double> code_vector; // d_hidden
    Prediction pred;
};

inline void check_indices(const Code2VecParams& params, const EncodedSubmission& enc) {
    for (std::size_t i = 0; i < enc.contexts.size(); ++i) {
        const auto& t = enc.contexts[i];
        if (t[0] < 0 || t[2] < 0 || t[1] < 0 || static_cast<std::size_t>(t[0]) >= params.terminal_emb.rows() ||
            static_cast<std::size_t>(t[2]) >= params.terminal_emb.rows() ||
            static_cast<std::size_t>(t[1]) >= params.path_emb.rows())
            throw VocabMismatch("context index outside the model's embedding tables");
    }
}

/// Direct forward pass. An all-PAD encoding yields a zero code vector and the
/// uniform prediction (0.5, 0.5).
inline Code2VecForward forward(const Code2VecParams& params, const EncodedSubmission& enc) {
    check_indices(params, enc);
    const std::size_t C = enc.contexts.size(), de = params.d_emb(), dh = params.d_hidden();
    Code2VecForward out{Matrix(C, dh), std::vector<double>(C, 0.0), std::vector<double>(dh, 0.0), {}};
    std::vector<double> x(3 * de);
    std::vector<double> scores;
    std::vector<std::size_t> real;
    for (std::size_t i = 0; i < C; ++i) {
        if (!enc.mask[i]) continue;
        const auto& t = enc.contexts[i];
        auto s = params.terminal_emb.row(t[0]);
        auto p = params.path_emb.row(t[1]);
        auto e = params.terminal_emb.row(t[2]);
        std::copy(s.begin(), s.end(), x.begin());
        std::copy(p.begin(), p.end(), x.begin() + static_cast<std::ptrdiff_t>(de));
        std::copy(e.begin(), e.end(), x.begin() + static_cast<std::ptrdiff_t>(2 * de));
        auto c = out.contexts.row(i);
        gemv_add(params.combine, x, c);
        for (double& v : c) v = std::tanh(v);
        scores.push_back(dot(c, params.attention.row(0)));
        real.push_back(i);
    }
    if (real.empty()) return out;
    softmax_inplace(scores);
    for (std::size_t k = 0; k < real.size(); ++k) {
        out.attention[real[k]] = scores[k];
        auto c = out.contexts.row(real[k]);
        for (std::size_t j = 0; j < dh; ++j) out.code_vector[j] += scores[k] * c[j];
    }
    std::array<double, 2> logits{dot(params.output.row(0), out.code_vector), dot(params.output.row(1), out.code_vector)};
    softmax_inplace(logits);
    out.pred.probs = logits;
    return out;
}

inline Prediction predict(const Code2VecParams& params, const EncodedSubmission& enc) {
    return forward(params, enc).pred;
}

namespace detail {

// Per-vocabulary-row products with the three blocks of the combine matrix,
// computed only for rows referenced by the given examples:
//   start[t] = W_s e_t, end[t] = W_e e_t, path[p] = W_p e_p
struct Projections {
    Matrix start, end, path;
    std::vector<std::uint8_t> used_t, used_p;
};

inline Projections project(const Code2VecParams& params, std::span<const EncodedSubmission> data,
                           std::span<const std::size_t> idx) {
    const std::size_t de = params.d_emb(), dh = params.d_hidden();
    const std::size_t T = params.terminal_emb.rows(), P = params.path_emb.rows();
    Projections pr{Matrix(T, dh), Matrix(T, dh), Matrix(P, dh), std::vector<std::uint8_t>(T, 0),
                   std::vector<std::uint8_t>(P, 0)};
    for (std::size_t b : idx) {
        const auto& enc = data[b];
        for (std::size_t i = 0; i < enc.contexts.size(); ++i) {
            if (!enc.mask[i]) continue;
            pr.used_t[enc.contexts[i][0]] = pr.used_t[enc.contexts[i][2]] = 1;
            pr.used_p[enc.contexts[i][1]] = 1;
        }
    }
    for (std::size_t t = 0; t < T; ++t) {
        if (!pr.used_t[t]) continue;
        auto e = params.terminal_emb.row(t);
        for (std::size_t r = 0; r < dh; ++r) {
            auto w = params.combine.row(r);
            pr.start(t, r) = dot(w.subspan(0, de), e);
            pr.end(t, r) = dot(w.subspan(2 * de, de), e);
        }
    }
    for (std::size_t p = 0; p < P; ++p) {
        if (!pr.used_p[p]) continue;
        auto e = params.path_emb.row(p);
        for (std::size_t r = 0; r < dh; ++r) pr.path(p, r) = dot(params.combine.row(r).subspan(de, de), e);
    }
    return pr;
}

// Context vectors (rows of c, real slots only), attention weights and code
// vector for one example; returns the class probabilities.
inline std::array<double, 2> fast_forward(const Code2VecParams& params, const Projections& pr,
                                          const EncodedSubmission& enc, std::vector<std::size_t>& real,
                                          std::vector<double>& c, std::vector<double>& alpha, std::vector<double>& v) {
    const std::size_t dh = params.d_hidden();
    real.clear();
    for (std::size_t i = 0; i < enc.contexts.size(); ++i)
        if (enc.mask[i]) real.push_back(i);
    const std::size_t R = real.size();
    c.assign(R * dh, 0.0);
    alpha.assign(R, 0.0);
    v.assign(dh, 0.0);
    if (R == 0) return {0.5, 0.5};
    for (std::size_t k = 0; k < R; ++k) {
        const auto& t = enc.contexts[real[k]];
        for (std::size_t r = 0; r < dh; ++r)
            c[k * dh + r] = std::tanh(pr.start(t[0], r) + pr.path(t[1], r) + pr.end(t[2], r));
        alpha[k] = dot(std::span<const double>(c.data() + k * dh, dh), params.attention.row(0));
    }
    softmax_inplace(alpha);
    for (std::size_t k = 0; k < R; ++k)
        for (std::size_t r = 0; r < dh; ++r) v[r] += alpha[k] * c[k * dh + r];
    std::array<double, 2> prob{dot(params.output.row(0), v), dot(params.output.row(1), v)};
    softmax_inplace(prob);
    return prob;
}

// Mean cross-entropy and its gradient over `batch`. A context vector depends
// only on its (start, path, end) triple, so each distinct triple in the batch
// is evaluated once; gradients of the combine matrix and embeddings are then
// accumulated per vocabulary row.
inline double code2vec_loss_grad(const Code2VecParams& params, std::span<const EncodedSubmission> data,
                                 std::span<const int> labels, std::span<const std::size_t> batch,
                                 Code2VecParams& grad) {
    const std::size_t de = params.d_emb(), dh = params.d_hidden();
    const std::size_t T = params.terminal_emb.rows(), P = params.path_emb.rows();
    for (auto t : grad.tensors()) std::fill(t.begin(), t.end(), 0.0);
    const Projections pr = project(params, data, batch);
    const auto& used_t = pr.used_t;
    const auto& used_p = pr.used_p;

    // Distinct triples in first-seen order and, per example, the triple of each real slot.
    std::map<ContextTriple, std::size_t> ids;
    std::vector<ContextTriple> uniq;
    std::vector<std::vector<std::size_t>> slots(batch.size());
    for (std::size_t n = 0; n < batch.size(); ++n) {
        const auto& enc = data[batch[n]];
        for (std::size_t i = 0; i < enc.contexts.size(); ++i) {
            if (!enc.mask[i]) continue;
            auto [it, fresh] = ids.emplace(enc.contexts[i], uniq.size());
            if (fresh) uniq.push_back(enc.contexts[i]);
            slots[n].push_back(it->second);
        }
    }
    const std::size_t U = uniq.size();
    Matrix cu(U, dh), dcu(U, dh);
    std::vector<double> su(U), dsu(U, 0.0);
    for (std::size_t u = 0; u < U; ++u) {
        const auto& t = uniq[u];
        auto c = cu.row(u);
        for (std::size_t r = 0; r < dh; ++r) c[r] = std::tanh(pr.start(t[0], r) + pr.path(t[1], r) + pr.end(t[2], r));
        su[u] = dot(c, params.attention.row(0));
    }

    const double inv_n = 1.0 / static_cast<double>(batch.size());
    double loss = 0.0;
    std::vector<double> alpha, v(dh), dv(dh), dalpha;
    for (std::size_t n = 0; n < batch.size(); ++n) {
        const auto& sl = slots[n];
        const std::size_t R = sl.size();
        std::fill(v.begin(), v.end(), 0.0);
        alpha.resize(R);
        for (std::size_t k = 0; k < R; ++k) alpha[k] = su[sl[k]];
        if (R) softmax_inplace(alpha);
        for (std::size_t k = 0; k < R; ++k) {
            auto c = cu.row(sl[k]);
            for (std::size_t r = 0; r < dh; ++r) v[r] += alpha[k] * c[r];
        }
        std::array<double, 2> prob{0.5, 0.5};
        if (R) {
            prob = {dot(params.output.row(0), v), dot(params.output.row(1), v)};
            softmax_inplace(prob);
        }
        const int y = labels[batch[n]];
        loss -= std::log(std::max(prob[y], 1e-300));

        const std::array<double, 2> dlogit{(prob[0] - (y == 0 ? 1.0 : 0.0)) * inv_n,
                                           (prob[1] - (y == 1 ? 1.0 : 0.0)) * inv_n};
        for (std::size_t o = 0; o < 2; ++o)
            for (std::size_t r = 0; r < dh; ++r) grad.output(o, r) += dlogit[o] * v[r];
        if (R == 0) continue;
        for (std::size_t r = 0; r < dh; ++r) dv[r] = dlogit[0] * params.output(0, r) + dlogit[1] * params.output(1, r);

        // d alpha_k = dv . c_k ; d score_k = alpha_k (d alpha_k - sum_j alpha_j d alpha_j)
        double weighted = 0.0;
        dalpha.resize(R);
        for (std::size_t k = 0; k < R; ++k) {
            dalpha[k] = dot(dv, cu.row(sl[k]));
            weighted += alpha[k] * dalpha[k];
        }
        // dc_k = alpha_k dv + dscore_k a; the second term is collected as a scalar per triple.
        for (std::size_t k = 0; k < R; ++k) {
            dsu[sl[k]] += alpha[k] * (dalpha[k] - weighted);
            auto d = dcu.row(sl[k]);
            for (std::size_t r = 0; r < dh; ++r) d[r] += alpha[k] * dv[r];
        }
    }

    Matrix g_s(T, dh), g_e(T, dh), g_p(P, dh);  // accumulated dL/dz per vocabulary row
    for (std::size_t u = 0; u < U; ++u) {
        const auto& t = uniq[u];
        auto c = cu.row(u);
        auto d = dcu.row(u);
        for (std::size_t r = 0; r < dh; ++r) {
            grad.attention(0, r) += dsu[u] * c[r];
            const double dz = (d[r] + dsu[u] * params.attention(0, r)) * (1.0 - c[r] * c[r]);
            g_s(t[0], r) += dz;
            g_p(t[1], r) += dz;
            g_e(t[2], r) += dz;
        }
    }

    // dW = sum over rows of g (x) e ; de = W^T g
    for (std::size_t t = 0; t < T; ++t) {
        if (!used_t[t]) continue;
        auto e = params.terminal_emb.row(t);
        auto de_row = grad.terminal_emb.row(t);
        for (std::size_t r = 0; r < dh; ++r) {
            const double gs = g_s(t, r), ge = g_e(t, r);
            if (gs == 0.0 && ge == 0.0) continue;
            auto w = params.combine.row(r);
            auto dw = grad.combine.row(r);
            for (std::size_t j = 0; j < de; ++j) {
                dw[j] += gs * e[j];
                dw[2 * de + j] += ge * e[j];
                de_row[j] += gs * w[j] + ge * w[2 * de + j];
            }
        }
    }
    for (std::size_t p = 0; p < P; ++p) {
        if (!used_p[p]) continue;
        auto e = params.path_emb.row(p);
        auto de_row = grad.path_emb.row(p);
        for (std::size_t r = 0; r < dh; ++r) {
            const double gp = g_p(p, r);
            if (gp == 0.0) continue;
            auto w = params.combine.row(r);
            auto dw = grad.combine.row(r);
            for (std::size_t j = 0; j < de; ++j) {
                dw[de + j] += gp * e[j];
                de_row[j] += gp * w[de + j];
            }
        }
    }
    for (double& x : grad.terminal_emb.row(kPad)) x = 0.0;
    for (double& x : grad.path_emb.row(kPad)) x = 0.0;
    return loss * inv_n;
}

}  // namespace detail

struct LossAndGradients {
    double loss;
    Code2VecParams gradients;
};

/// Mean cross-entropy over the batch with gradients for every parameter group.
inline LossAndGradients loss_and_gradients(const Code2VecParams& params, std::span<const EncodedSubmission> batch,
                                           std::span<const int> labels) {
    if (batch.empty()) throw std::invalid_argument("loss_and_gradients: empty batch");
    for (const auto& enc : batch) check_indices(params, enc);
    std::vector<std::size_t> idx(batch.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    LossAndGradients out{0.0, params.zeros_like()};
    out.loss = detail::code2vec_loss_grad(params, batch, labels, idx, out.gradients);
    return out;
}

inline LossAcc evaluate_code2vec(const Code2VecParams& params, std::span<const EncodedSubmission> data,
                                 std::span<const int> labels, std::span<const std::size_t> idx) {
    const detail::Projections pr = detail::project(params, data, idx);
    std::vector<std::size_t> real;
    std::vector<double> c, alpha, v;
    double loss = 0.0;
    std::size_t correct = 0;
    for (std::size_t i : idx) {
        const auto prob = detail::fast_forward(params, pr, data[i], real, c, alpha, v);
        loss -= std::log(std::max(prob[labels[i]], 1e-300));
        correct += (prob[1] > 0.5 ? 1 : 0) == labels[i];
    }
    const double n = static_cast<double>(idx.size());
    return {loss / n, static_cast<double>(correct) / n};
}

/// Positive-class probabilities for a set of encodings (batched fast path).
inline std::vector<double> predict_positive(const Code2VecParams& params, std::span<const EncodedSubmission> data) {
    for (const auto& enc : data) check_indices(params, enc);
    std::vector<std::size_t> idx(data.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    const detail::Projections pr = detail::project(params, data, idx);
    std::vector<std::size_t> real;
    std::vector<double> c, alpha, v, out;
    out.reserve(data.size());
    for (std::size_t i : idx) out.push_back(detail::fast_forward(params, pr, data[i], real, c, alpha, v)[1]);
    return out;
}

/// Trains on `data` (the training split). A validation subset of
/// cfg.validation_fraction is carved out for early stopping.
inline TrainedModel<Code2VecParams> train_code2vec(std::span<const EncodedSubmission> data, std::span<const int> labels,
                                                   std::size_t terminal_count, std::size_t path_count,
                                                   const TrainConfig& cfg) {
    cfg.validate();
    if (data.size() != labels.size()) throw std::invalid_argument("train_code2vec: data/labels size mismatch");
    require_both_classes(labels);
    for (const auto& enc : data)
        for (const auto& t : enc.contexts)
            if (static_cast<std::size_t>(t[0]) >= terminal_count || static_cast<std::size_t>(t[2]) >= terminal_count ||
                static_cast<std::size_t>(t[1]) >= path_count)
                throw VocabMismatch("encoded context index outside the vocabulary");
    const ValidationSplit split = split_validation(data.size(), cfg.validation_fraction, cfg.seed);
    auto init = Code2VecParams::init(terminal_count, path_count, cfg.d_emb, cfg.d_hidden, cfg.seed);
    return train_with_early_stopping(
        std::move(init), cfg, split.train, split.val,
        [&](const Code2VecParams& p, std::span<const std::size_t> batch, Code2VecParams& g) {
            return detail::code2vec_loss_grad(p, data, labels, batch, g);
        },
        [&](const Code2VecParams& p, std::span<const std::size_t> idx) {
            return evaluate_code2vec(p, data, labels, idx);
        });
}

}  // namespace mcd
