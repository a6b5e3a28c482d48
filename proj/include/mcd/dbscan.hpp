#pragma once
// DBSCAN over 2-D points and knee-based epsilon selection from the sorted
// k-distance curve.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <deque>
#include <vector>

#include "mcd/errors.hpp"
#include "mcd/matrix.hpp"

namespace mcd {

inline constexpr int kNoise = -1;

struct DbscanResult {
    std::vector<int> labels;  // cluster id (0-based, in discovery order) or kNoise
    std::vector<bool> core;
    std::size_t cluster_count = 0;
};

/// Classic DBSCAN. A point is core when at least `minpts` points (itself
/// included) lie within `epsilon`. Points are visited in index order, so
/// border points shared by two clusters join the one discovered first.
inline DbscanResult dbscan(const Matrix& points, double epsilon, std::size_t minpts) {
    if (!(epsilon > 0.0)) throw ConfigError("dbscan: epsilon must be positive");
    const std::size_t n = points.rows();
    const double eps2 = epsilon * epsilon;
    std::vector<std::vector<std::size_t>> nbrs(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (squared_distance(points.row(i), points.row(j)) <= eps2) nbrs[i].push_back(j);

    DbscanResult res;
    res.labels.assign(n, kNoise);
    res.core.assign(n, false);
    for (std::size_t i = 0; i < n; ++i) res.core[i] = nbrs[i].size() >= minpts;

    std::vector<bool> assigned(n, false);
    for (std::size_t i = 0; i < n; ++i) {
        if (assigned[i] || !res.core[i]) continue;
        const int id = static_cast<int>(res.cluster_count++);
        std::deque<std::size_t> frontier{i};
        assigned[i] = true;
        res.labels[i] = id;
        while (!frontier.empty()) {
            const std::size_t p = frontier.front();
            frontier.pop_front();
            if (!res.core[p]) continue;
            for (std::size_t q : nbrs[p]) {
                if (assigned[q]) continue;
                assigned[q] = true;
                res.labels[q] = id;
                frontier.push_back(q);
            }
        }
    }
    return res;
}

struct EpsilonChoice {
    double epsilon = 0.0;
    bool degenerate = false;       // all k-distances equal
    std::vector<double> k_dist;    // sorted ascending
    std::size_t knee = 0;          // index into k_dist
};

/// Distance of each point to its minpts-th nearest neighbour (self excluded),
/// sorted ascending; epsilon is the value at the knee, the point farthest from
/// the chord joining the curve's endpoints with both axes scaled to [0, 1].
inline EpsilonChoice select_epsilon(const Matrix& points, std::size_t minpts) {
    const std::size_t n = points.rows();
    if (minpts == 0 || n <= minpts)
        throw TooFewPoints("select_epsilon needs more than minpts=" + std::to_string(minpts) + " points, got " +
                           std::to_string(n));
    EpsilonChoice out;
    std::vector<double> d(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t k = 0;
        for (std::size_t j = 0; j < n; ++j)
            if (j != i) d[k++] = euclidean(points.row(i), points.row(j));
        std::nth_element(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(minpts - 1), d.end());
        out.k_dist.push_back(d[minpts - 1]);
    }
    std::sort(out.k_dist.begin(), out.k_dist.end());
    const double lo = out.k_dist.front(), hi = out.k_dist.back();
    if (!(hi > lo)) {
        out.degenerate = true;
        out.epsilon = hi;
        out.knee = n - 1;
        return out;
    }
    // Chord from (0, 0) to (1, 1) in normalized coordinates; perpendicular
    // distance is |x - y| / sqrt(2), so maximize |x - y|.
    double best = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = n > 1 ? static_cast<double>(i) / static_cast<double>(n - 1) : 0.0;
        const double y = (out.k_dist[i] - lo) / (hi - lo);
        const double dist = std::abs(x - y);
        if (dist > best) {
            best = dist;
            out.knee = i;
        }
    }
    out.epsilon = out.k_dist[out.knee];
    return out;
}

}  // namespace mcd
