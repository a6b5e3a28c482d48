#pragma once
// Misconception discovery: embed failing submissions with a trained model,
// project them with t-SNE, cluster the failures of each rubric item with
// DBSCAN and score clusters by normalized embedding / tree edit distance.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "mcd/code2vec.hpp"
#include "mcd/corpus.hpp"
#include "mcd/dbscan.hpp"
#include "mcd/errors.hpp"
#include "mcd/matrix.hpp"
#include "mcd/rubric.hpp"
#include "mcd/ted.hpp"
#include "mcd/tsne.hpp"
#include "mcd/turtle.hpp"

namespace mcd {

enum class EmbeddingKind {
    Flattened,  // row-major C x d_hidden context matrix (attention-layer input)
    Pooled,     // attention-pooled code vector
};

/// One row per encoding. Flattened rows have exactly d_hidden entries per
/// real context slot that can be non-zero; PAD slots are zero.
inline Matrix extract_embeddings(const Code2VecParams& params, std::span<const EncodedSubmission> encoded,
                                 EmbeddingKind kind = EmbeddingKind::Flattened) {
    if (encoded.empty()) return {};
    const std::size_t C = encoded.front().contexts.size(), dh = params.d_hidden();
    const std::size_t width = kind == EmbeddingKind::Flattened ? C * dh : dh;
    Matrix out(encoded.size(), width);
    for (std::size_t i = 0; i < encoded.size(); ++i) {
        if (encoded[i].contexts.size() != C) throw VocabMismatch("encodings have differing context counts");
        const Code2VecForward f = forward(params, encoded[i]);
        const auto& src = kind == EmbeddingKind::Flattened ? f.contexts.data() : f.code_vector;
        std::copy(src.begin(), src.end(), out.row(i).begin());
    }
    return out;
}

struct ClusterConfig {
    std::size_t minpts = 3;
    std::optional<double> epsilon;  // fixed value; auto-selected when empty
    std::size_t top_k = 4;          // densest clusters selected for inspection
    double duplicate_jaccard = 0.8;
};

struct ClusterMetrics {
    double ed = 0.0;
    double ted = 0.0;
    bool zero_normalizer = false;
};

struct Cluster {
    std::size_t id = 0;
    std::vector<std::string> members;  // submission ids
    double ed = 0.0;                   // normalized, embedding space
    double ted = 0.0;                  // normalized, tree edit distance
    double ed_2d = 0.0;                // normalized, projected plane
    double mean_2d = 0.0;              // mean pairwise distance in the plane
    std::size_t density_rank = 0;      // 1 = densest
    bool selected = false;
    std::optional<std::pair<std::size_t, std::size_t>> duplicate_of;  // (rubric item, cluster id)
};

struct ClusterReport {
    std::size_t rubric_item = 0;
    std::size_t failing = 0;
    double epsilon = 0.0;
    std::vector<Cluster> clusters;
    std::vector<std::string> noise;
    bool zero_normalizer = false;
    std::string note;
};

// Everything discovery needs about the corpus, aligned by row.
struct DiscoveryInput {
    std::vector<std::string> ids;
    std::vector<const Ast*> asts;
    std::vector<RubricScore> rubric;
    Matrix embeddings;  // N x dim
    Matrix coords;      // N x 2
};

namespace detail {

inline double mean_pairwise(const std::vector<std::size_t>& rows, const Matrix& m) {
    if (rows.size() < 2) return 0.0;
    double sum = 0.0;
    std::size_t pairs = 0;
    for (std::size_t a = 0; a < rows.size(); ++a)
        for (std::size_t b = a + 1; b < rows.size(); ++b, ++pairs) sum += euclidean(m.row(rows[a]), m.row(rows[b]));
    return sum / static_cast<double>(pairs);
}

inline double mean_to_centroid(const std::vector<std::size_t>& rows, const Matrix& m) {
    std::vector<double> c(m.cols(), 0.0);
    for (auto r : rows)
        for (std::size_t j = 0; j < m.cols(); ++j) c[j] += m(r, j);
    for (double& v : c) v /= static_cast<double>(rows.size());
    double sum = 0.0;
    for (auto r : rows) sum += euclidean(m.row(r), c);
    return sum / static_cast<double>(rows.size());
}

}  // namespace detail

// Pairwise tree edit distances over a fixed population, cached.
class TedTable {
public:
    explicit TedTable(const std::vector<const Ast*>& asts) : n_(asts.size()), d_(n_ * n_, 0) {
        std::vector<TedTree> trees;
        trees.reserve(n_);
        for (const Ast* a : asts) trees.emplace_back(*a);
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = i + 1; j < n_; ++j) d_[i * n_ + j] = d_[j * n_ + i] = tree_edit_distance(trees[i], trees[j]);
    }
    std::size_t operator()(std::size_t i, std::size_t j) const { return d_[i * n_ + j]; }
    std::size_t size() const noexcept { return n_; }

    // Index minimizing total distance to all others (lowest index on ties).
    std::size_t medoid() const {
        std::size_t best = 0;
        std::size_t best_sum = std::numeric_limits<std::size_t>::max();
        for (std::size_t i = 0; i < n_; ++i) {
            std::size_t s = 0;
            for (std::size_t j = 0; j < n_; ++j) s += d_[i * n_ + j];
            if (s < best_sum) {
                best_sum = s;
                best = i;
            }
        }
        return best;
    }

private:
    std::size_t n_;
    std::vector<std::size_t> d_;
};

/// ED = mean pairwise embedding distance within the cluster / mean distance of
/// the population to its centroid. TED = mean pairwise tree edit distance
/// within the cluster / mean TED of the population to its medoid tree.
/// `members` and `population` index rows of `embeddings` and of `teds`.
inline ClusterMetrics cluster_metrics(const std::vector<std::size_t>& members, const std::vector<std::size_t>& population,
                                      const Matrix& embeddings, const TedTable& teds) {
    if (members.size() < 2) throw std::invalid_argument("cluster_metrics: cluster needs at least 2 members");
    ClusterMetrics m;
    const double ed_norm = detail::mean_to_centroid(population, embeddings);
    double ted_sum = 0.0;
    std::size_t pairs = 0;
    for (std::size_t a = 0; a < members.size(); ++a)
        for (std::size_t b = a + 1; b < members.size(); ++b, ++pairs)
            ted_sum += static_cast<double>(teds(members[a], members[b]));
    const double ted_mean = ted_sum / static_cast<double>(pairs);

    // medoid within the population
    std::size_t medoid = population.front();
    std::size_t best = std::numeric_limits<std::size_t>::max();
    for (auto i : population) {
        std::size_t s = 0;
        for (auto j : population) s += teds(i, j);
        if (s < best) {
            best = s;
            medoid = i;
        }
    }
    double ted_norm = 0.0;
    for (auto i : population) ted_norm += static_cast<double>(teds(i, medoid));
    ted_norm /= static_cast<double>(population.size());

    const double ed_mean = detail::mean_pairwise(members, embeddings);
    if (ed_norm > 0.0) m.ed = ed_mean / ed_norm;
    else m.zero_normalizer = true;
    if (ted_norm > 0.0) m.ted = ted_mean / ted_norm;
    else m.zero_normalizer = true;
    return m;
}

/// Clusters the submissions failing `item`. `input` rows must cover every
/// such submission (typically all overall-incorrect submissions).
inline ClusterReport discover_per_rubric(const DiscoveryInput& input, std::size_t item, const ClusterConfig& cfg) {
    ClusterReport rep;
    rep.rubric_item = item;
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < input.ids.size(); ++i)
        if (!input.rubric[i].items[item]) rows.push_back(i);
    rep.failing = rows.size();
    if (rows.size() <= cfg.minpts) {
        rep.note = rows.empty() ? "no clusters: no submission fails this item"
                                : "no clusters: TooFewFailures (" + std::to_string(rows.size()) +
                                      " failing submissions, minpts=" + std::to_string(cfg.minpts) + ")";
        for (auto r : rows) rep.noise.push_back(input.ids[r]);
        return rep;
    }

    Matrix pts(rows.size(), 2);
    Matrix emb(rows.size(), input.embeddings.cols());
    std::vector<const Ast*> asts;
    for (std::size_t k = 0; k < rows.size(); ++k) {
        pts(k, 0) = input.coords(rows[k], 0);
        pts(k, 1) = input.coords(rows[k], 1);
        std::copy(input.embeddings.row(rows[k]).begin(), input.embeddings.row(rows[k]).end(), emb.row(k).begin());
        asts.push_back(input.asts[rows[k]]);
    }
    rep.epsilon = cfg.epsilon ? *cfg.epsilon : select_epsilon(pts, cfg.minpts).epsilon;
    // Coincident points give a zero knee; any positive radius groups them.
    const double eps = rep.epsilon > 0.0 ? rep.epsilon : 1e-12;
    const DbscanResult db = dbscan(pts, eps, cfg.minpts);

    const TedTable teds(asts);
    std::vector<std::size_t> population(rows.size());
    for (std::size_t k = 0; k < rows.size(); ++k) population[k] = k;
    const double ed2d_norm = detail::mean_to_centroid(population, pts);

    std::vector<std::vector<std::size_t>> members(db.cluster_count);
    for (std::size_t k = 0; k < rows.size(); ++k) {
        if (db.labels[k] == kNoise)
            rep.noise.push_back(input.ids[rows[k]]);
        else
            members[static_cast<std::size_t>(db.labels[k])].push_back(k);
    }
    for (std::size_t c = 0; c < db.cluster_count; ++c) {
        Cluster cl;
        cl.id = c;
        for (auto k : members[c]) cl.members.push_back(input.ids[rows[k]]);
        const ClusterMetrics m = cluster_metrics(members[c], population, emb, teds);
        cl.ed = m.ed;
        cl.ted = m.ted;
        rep.zero_normalizer = rep.zero_normalizer || m.zero_normalizer;
        cl.mean_2d = detail::mean_pairwise(members[c], pts);
        cl.ed_2d = ed2d_norm > 0.0 ? cl.mean_2d / ed2d_norm : 0.0;
        rep.clusters.push_back(std::move(cl));
    }
    std::vector<std::size_t> order(rep.clusters.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return rep.clusters[a].mean_2d < rep.clusters[b].mean_2d; });
    for (std::size_t r = 0; r < order.size(); ++r) {
        rep.clusters[order[r]].density_rank = r + 1;
        rep.clusters[order[r]].selected = r < cfg.top_k;
    }
    if (rep.clusters.empty()) rep.note = "no clusters: every failing submission is noise";
    if (rep.zero_normalizer) rep.note += (rep.note.empty() ? "" : "; ") + std::string("ZeroNormalizer: metrics reported as 0");
    return rep;
}

inline double jaccard(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    std::set<std::string> sa(a.begin(), a.end()), sb(b.begin(), b.end());
    std::size_t inter = 0;
    for (const auto& x : sa) inter += sb.count(x);
    const std::size_t uni = sa.size() + sb.size() - inter;
    return uni ? static_cast<double>(inter) / static_cast<double>(uni) : 0.0;
}

/// Marks clusters that overlap (Jaccard > threshold) a cluster of an earlier
/// rubric item. Clusters are only annotated, never removed.
inline void annotate_duplicates(std::vector<ClusterReport>& reports, double threshold = 0.8) {
    for (std::size_t r = 0; r < reports.size(); ++r)
        for (auto& cl : reports[r].clusters)
            for (std::size_t q = 0; q < r && !cl.duplicate_of; ++q)
                for (const auto& other : reports[q].clusters)
                    if (jaccard(cl.members, other.members) > threshold) {
                        cl.duplicate_of = std::make_pair(reports[q].rubric_item, other.id);
                        break;
                    }
}

// ---------------------------------------------------------------------------
// Whole-corpus discovery

struct DiscoveryConfig {
    ClusterConfig cluster;
    TsneConfig tsne;
    EmbeddingKind embedding = EmbeddingKind::Flattened;
};

struct DiscoveryResult {
    DiscoveryInput input;             // overall-incorrect submissions only
    Projection2D projection;
    std::vector<ClusterReport> reports;  // one per rubric item
};

/// Projects every overall-incorrect submission, then clusters per rubric item.
inline DiscoveryResult discover(const Corpus& corpus, std::span<const EncodedSubmission> encoded,
                                const Code2VecParams& params, const DiscoveryConfig& cfg) {
    if (encoded.size() != corpus.size()) throw std::invalid_argument("discover: one encoding per submission required");
    DiscoveryResult res;
    std::vector<EncodedSubmission> failing;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        const auto& s = corpus.submissions[i];
        if (s.rubric.overall) continue;
        res.input.ids.push_back(s.id);
        res.input.asts.push_back(&s.ast);
        res.input.rubric.push_back(s.rubric);
        failing.push_back(encoded[i]);
    }
    res.input.embeddings = extract_embeddings(params, failing, cfg.embedding);
    if (failing.size() >= 4) {
        res.projection = tsne(res.input.embeddings, cfg.tsne);
    } else {
        res.projection.coords = Matrix(failing.size(), 2);
        res.projection.seed = cfg.tsne.seed;
    }
    res.input.coords = res.projection.coords;
    for (std::size_t item = 0; item < kRubricItems; ++item)
        res.reports.push_back(discover_per_rubric(res.input, item, cfg.cluster));
    annotate_duplicates(res.reports, cfg.cluster.duplicate_jaccard);
    return res;
}

// ---------------------------------------------------------------------------
// Output formats

inline nlohmann::json clusters_to_json(const std::vector<ClusterReport>& reports) {
    using nlohmann::json;
    json items = json::array();
    for (const auto& r : reports) {
        json clusters = json::array();
        for (const auto& c : r.clusters) {
            json dup = nullptr;
            if (c.duplicate_of) dup = json{{"rubric_item", c.duplicate_of->first}, {"cluster", c.duplicate_of->second}};
            clusters.push_back(json{{"id", c.id},
                                    {"members", c.members},
                                    {"ed", c.ed},
                                    {"ted", c.ted},
                                    {"ed_2d", c.ed_2d},
                                    {"density_rank", c.density_rank},
                                    {"selected", c.selected},
                                    {"duplicate_of", dup}});
        }
        items.push_back(json{{"rubric_item", r.rubric_item},
                             {"name", std::string(kRubricNames[r.rubric_item])},
                             {"failing", r.failing},
                             {"epsilon", r.epsilon},
                             {"clusters", std::move(clusters)},
                             {"noise", r.noise},
                             {"zero_normalizer", r.zero_normalizer},
                             {"note", r.note}});
    }
    return json{{"items", std::move(items)}};
}

inline std::vector<ClusterReport> clusters_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("items") || !j["items"].is_array())
        throw SchemaError("clusters file must contain an \"items\" array");
    std::vector<ClusterReport> out;
    try {
        for (const auto& it : j["items"]) {
            ClusterReport r;
            r.rubric_item = it.at("rubric_item").get<std::size_t>();
            if (r.rubric_item >= kRubricItems) throw SchemaError("rubric_item out of range");
            r.failing = it.value("failing", std::size_t{0});
            r.epsilon = it.value("epsilon", 0.0);
            r.noise = it.at("noise").get<std::vector<std::string>>();
            r.zero_normalizer = it.value("zero_normalizer", false);
            r.note = it.value("note", std::string());
            for (const auto& c : it.at("clusters")) {
                Cluster cl;
                cl.id = c.at("id").get<std::size_t>();
                cl.members = c.at("members").get<std::vector<std::string>>();
                cl.ed = c.at("ed").get<double>();
                cl.ted = c.at("ted").get<double>();
                cl.ed_2d = c.value("ed_2d", 0.0);
                cl.density_rank = c.at("density_rank").get<std::size_t>();
                cl.selected = c.value("selected", cl.density_rank <= 4);
                if (c.contains("duplicate_of") && !c["duplicate_of"].is_null())
                    cl.duplicate_of = std::make_pair(c["duplicate_of"].at("rubric_item").get<std::size_t>(),
                                                     c["duplicate_of"].at("cluster").get<std::size_t>());
                r.clusters.push_back(std::move(cl));
            }
            out.push_back(std::move(r));
        }
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("clusters file: ") + e.what());
    }
    return out;
}

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct ProjectionRow {
    std::string id;
    double x = 0.0, y = 0.0;
    unsigned failed_items = 0;  // bit r set when rubric item r failed
};

inline std::string projection_csv(const DiscoveryInput& input) {
    std::string out = "id,x,y,failed_items\n";
    for (std::size_t i = 0; i < input.ids.size(); ++i) {
        unsigned mask = 0;
        for (std::size_t r = 0; r < kRubricItems; ++r)
            if (!input.rubric[i].items[r]) mask |= 1u << r;
        out += input.ids[i] + ',' + format_double(input.coords(i, 0)) + ',' + format_double(input.coords(i, 1)) + ',' +
               std::to_string(mask) + '\n';
    }
    return out;
}

inline std::vector<ProjectionRow> parse_projection_csv(const std::string& text) {
    std::vector<ProjectionRow> rows;
    std::size_t pos = 0, line_no = 0;
    while (pos < text.size()) {
        std::size_t nl = text.find('\n', pos);
        if (nl == std::string::npos) nl = text.size();
        std::string line = text.substr(pos, nl - pos);
        pos = nl + 1;
        if (line_no++ == 0) {
            if (line != "id,x,y,failed_items") throw SchemaError("projection.csv: unexpected header '" + line + "'");
            continue;
        }
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::size_t s = 0;
        for (std::size_t c; (c = line.find(',', s)) != std::string::npos; s = c + 1) f.push_back(line.substr(s, c - s));
        f.push_back(line.substr(s));
        if (f.size() != 4) throw SchemaError("projection.csv line " + std::to_string(line_no) + ": expected 4 fields");
        try {
            rows.push_back({f[0], std::stod(f[1]), std::stod(f[2]), static_cast<unsigned>(std::stoul(f[3]))});
        } catch (const std::exception&) {
            throw SchemaError("projection.csv line " + std::to_string(line_no) + ": malformed number");
        }
    }
    return rows;
}

/// Plain-text report of the selected clusters with their member programs.
inline std::string discovery_report(const DiscoveryResult& res, const std::map<std::string, const Submission*>& by_id) {
    std::string out;
    char buf[256];
    out += "Misconception discovery report\n";
    out += "==============================\n";
    std::snprintf(buf, sizeof buf, "incorrect submissions projected: %zu (perplexity %.3g, final KL %.6f)\n",
                  res.input.ids.size(), res.projection.perplexity, res.projection.kl);
    out += buf;
    out += "ED: mean pairwise embedding distance / mean distance to the centroid of the item's failures.\n";
    out += "TED: mean pairwise tree edit distance / mean distance to the medoid tree of the item's failures\n";
    out += "     (trees have no centroid, the medoid stands in for it).\n\n";
    for (const auto& r : res.reports) {
        std::snprintf(buf, sizeof buf, "R%zu %s: %zu failing, epsilon %.6g, %zu clusters, %zu noise\n", r.rubric_item,
                      std::string(kRubricNames[r.rubric_item]).c_str(), r.failing, r.epsilon, r.clusters.size(),
                      r.noise.size());
        out += buf;
        if (!r.note.empty()) out += "  note: " + r.note + "\n";
        std::vector<const Cluster*> sel;
        for (const auto& c : r.clusters)
            if (c.selected) sel.push_back(&c);
        std::sort(sel.begin(), sel.end(), [](auto* a, auto* b) { return a->density_rank < b->density_rank; });
        for (const Cluster* c : sel) {
            std::snprintf(buf, sizeof buf, "  cluster %zu  rank %zu  size %zu  ED %.4f  TED %.4f\n", c->id,
                          c->density_rank, c->members.size(), c->ed, c->ted);
            out += buf;
            if (c->duplicate_of) {
                std::snprintf(buf, sizeof buf, "    duplicate of R%zu cluster %zu\n", c->duplicate_of->first,
                              c->duplicate_of->second);
                out += buf;
            }
            for (const auto& id : c->members) {
                out += "    --- " + id + "\n";
                auto it = by_id.find(id);
                if (it == by_id.end()) continue;
                std::string prog = format_program(it->second->ast);
                std::size_t p = 0;
                while (p < prog.size()) {
                    std::size_t nl = prog.find('\n', p);
                    out += "      " + prog.substr(p, nl - p) + "\n";
                    p = nl == std::string::npos ? prog.size() : nl + 1;
                }
            }
        }
        out += "\n";
    }
    return out;
}

}  // namespace mcd
