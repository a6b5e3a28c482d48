#pragma once
// Exact O(N^2) t-SNE to two dimensions.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>
#include <utility>
#include <vector>

#include "mcd/errors.hpp"
#include "mcd/matrix.hpp"

namespace mcd {

struct TsneConfig {
    double perplexity = 30.0;  // clipped to (N - 1) / 3
    std::size_t iterations = 1000;
    std::size_t stop_lying_iter = 250;
    std::size_t momentum_switch_iter = 250;
    double exaggeration = 12.0;
    double initial_momentum = 0.5;
    double final_momentum = 0.8;
    double learning_rate = 200.0;
    double init_sigma = 1e-4;
    std::size_t kl_every = 50;
    std::uint64_t seed = 0;
};

struct Projection2D {
    Matrix coords;                                        // N x 2
    double kl = 0.0;                                      // at the last iteration
    double kl_after_exaggeration = 0.0;                   // right after the exaggeration phase
    std::vector<std::pair<std::size_t, double>> kl_trace; // (iteration, KL)
    double perplexity = 0.0;                              // after clipping
    std::uint64_t seed = 0;
};

namespace detail {

// Row-wise Gaussian conditionals p_{j|i} whose entropy matches log(perplexity),
// found by bisection on the precision beta.
inline Matrix conditional_affinities(const Matrix& sq_dist, double perplexity) {
    const std::size_t n = sq_dist.rows();
    Matrix p(n, n);
    const double target = std::log(perplexity);
    std::vector<double> row(n);
    for (std::size_t i = 0; i < n; ++i) {
        double dmin = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < n; ++j)
            if (j != i) dmin = std::min(dmin, sq_dist(i, j));
        double beta = 1.0, lo = 0.0, hi = std::numeric_limits<double>::infinity();
        // Scale-aware start: beta ~ 1 / typical squared distance.
        double mean = 0.0;
        for (std::size_t j = 0; j < n; ++j)
            if (j != i) mean += sq_dist(i, j) - dmin;
        mean /= static_cast<double>(n - 1);
        if (mean > 0.0) beta = 1.0 / mean;
        for (int iter = 0; iter < 200; ++iter) {
            double sum = 0.0, weighted = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                if (j == i) {
                    row[j] = 0.0;
                    continue;
                }
                const double d = sq_dist(i, j) - dmin;
                row[j] = std::exp(-beta * d);
                sum += row[j];
                weighted += d * row[j];
            }
            const double entropy = std::log(sum) + beta * weighted / sum;
            const double diff = entropy - target;
            if (std::abs(diff) < 1e-10) break;
            if (diff > 0) {  // too flat: sharpen
                lo = beta;
                beta = std::isinf(hi) ? beta * 2.0 : 0.5 * (beta + hi);
            } else {
                hi = beta;
                beta = 0.5 * (beta + lo);
            }
        }
        double sum = 0.0;
        for (std::size_t j = 0; j < n; ++j) sum += row[j];
        for (std::size_t j = 0; j < n; ++j) p(i, j) = row[j] / sum;
    }
    return p;
}

inline double kl_divergence(const Matrix& p, const Matrix& y) {
    const std::size_t n = p.rows();
    double z = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j) z += 1.0 / (1.0 + squared_distance(y.row(i), y.row(j)));
    double kl = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j || p(i, j) <= 0.0) continue;
            const double q = 1.0 / (1.0 + squared_distance(y.row(i), y.row(j))) / z;
            kl += p(i, j) * std::log(p(i, j) / std::max(q, std::numeric_limits<double>::min()));
        }
    return std::max(kl, 0.0);
}

}  // namespace detail

/// Embeds the rows of `data` in the plane. Deterministic for a given seed.
inline Projection2D tsne(const Matrix& data, const TsneConfig& cfg) {
    const std::size_t n = data.rows();
    if (n < 4) throw TooFewPoints("t-SNE needs at least 4 points, got " + std::to_string(n));
    Projection2D out;
    out.seed = cfg.seed;
    out.perplexity = std::min(cfg.perplexity, static_cast<double>(n - 1) / 3.0);

    Matrix sq(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) sq(i, j) = sq(j, i) = squared_distance(data.row(i), data.row(j));

    const Matrix cond = detail::conditional_affinities(sq, out.perplexity);
    Matrix p(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) p(i, j) = (cond(i, j) + cond(j, i)) / (2.0 * static_cast<double>(n));

    Matrix y(n, 2), update(n, 2), gains(n, 2, 1.0), grad(n, 2), num(n, n);
    auto rng = make_rng(cfg.seed, 0x74736e65ULL);
    std::normal_distribution<double> normal(0.0, cfg.init_sigma);
    for (double& v : y.data()) v = normal(rng);

    double exaggeration = cfg.exaggeration;
    for (std::size_t iter = 0; iter < cfg.iterations; ++iter) {
        if (iter == cfg.stop_lying_iter) exaggeration = 1.0;
        const double momentum = iter < cfg.momentum_switch_iter ? cfg.initial_momentum : cfg.final_momentum;

        double z = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            num(i, i) = 0.0;
            for (std::size_t j = i + 1; j < n; ++j) {
                const double q = 1.0 / (1.0 + squared_distance(y.row(i), y.row(j)));
                num(i, j) = num(j, i) = q;
                z += 2.0 * q;
            }
        }
        grad.fill(0.0);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                if (i == j) continue;
                const double mult = (exaggeration * p(i, j) - num(i, j) / z) * num(i, j);
                grad(i, 0) += 4.0 * mult * (y(i, 0) - y(j, 0));
                grad(i, 1) += 4.0 * mult * (y(i, 1) - y(j, 1));
            }
        }
        for (std::size_t k = 0; k < y.size(); ++k) {
            double& g = gains.data()[k];
            const double dy = grad.data()[k];
            double& u = update.data()[k];
            g = (std::signbit(dy) != std::signbit(u)) ? g + 0.2 : g * 0.8;
            g = std::max(g, 0.01);
            u = momentum * u - cfg.learning_rate * g * dy;
            y.data()[k] += u;
        }
        for (std::size_t d = 0; d < 2; ++d) {
            double mean = 0.0;
            for (std::size_t i = 0; i < n; ++i) mean += y(i, d);
            mean /= static_cast<double>(n);
            for (std::size_t i = 0; i < n; ++i) y(i, d) -= mean;
        }

        const bool end_of_lying = iter + 1 == cfg.stop_lying_iter;
        const bool last = iter + 1 == cfg.iterations;
        if (end_of_lying || last || (cfg.kl_every && (iter + 1) % cfg.kl_every == 0)) {
            const double kl = detail::kl_divergence(p, y);
            out.kl_trace.emplace_back(iter + 1, kl);
            if (end_of_lying) out.kl_after_exaggeration = kl;
            if (last) out.kl = kl;
        }
    }
    if (cfg.iterations < cfg.stop_lying_iter || cfg.iterations == 0) {
        out.kl = detail::kl_divergence(p, y);
        out.kl_after_exaggeration = out.kl;
    }
    out.coords = std::move(y);
    return out;
}

}  // namespace mcd
