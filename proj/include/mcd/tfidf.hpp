#pragma once
// Bag-of-node-labels TF-IDF features for the baseline classifiers.
// tf = raw count, idf = ln((1 + N) / (1 + df)) + 1, rows L2-normalized.

#include <cmath>
#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "mcd/ast.hpp"
#include "mcd/errors.hpp"
#include "mcd/matrix.hpp"

namespace mcd {

inline std::map<std::string, std::size_t> label_counts(const Ast& ast) {
    std::map<std::string, std::size_t> counts;
    visit_preorder(ast.root, [&](const AstNode& n, std::size_t) { ++counts[n.label]; });
    return counts;
}

class TfidfModel {
public:
    static TfidfModel fit(const std::vector<const Ast*>& docs) {
        if (docs.empty()) throw EmptyCorpus("TF-IDF needs at least one document");
        std::map<std::string, std::size_t> df;
        for (const Ast* d : docs)
            for (const auto& [tok, _] : label_counts(*d)) ++df[tok];
        TfidfModel m;
        const double n = static_cast<double>(docs.size());
        for (const auto& [tok, count] : df) {
            m.index_.emplace(tok, m.idf_.size());
            m.tokens_.push_back(tok);
            m.idf_.push_back(std::log((1.0 + n) / (1.0 + static_cast<double>(count))) + 1.0);
        }
        return m;
    }

    std::size_t dim() const noexcept { return idf_.size(); }
    const std::vector<std::string>& tokens() const noexcept { return tokens_; }
    const std::vector<double>& idf() const noexcept { return idf_; }

    // Tokens unseen at fit time are dropped.
    std::vector<double> transform(const Ast& doc) const {
        std::vector<double> row(idf_.size(), 0.0);
        for (const auto& [tok, count] : label_counts(doc)) {
            auto it = index_.find(tok);
            if (it != index_.end()) row[it->second] = static_cast<double>(count) * idf_[it->second];
        }
        double norm = 0.0;
        for (double v : row) norm += v * v;
        if (norm > 0.0) {
            norm = std::sqrt(norm);
            for (double& v : row) v /= norm;
        }
        return row;
    }

    Matrix transform(const std::vector<const Ast*>& docs) const {
        Matrix out(docs.size(), dim());
        for (std::size_t i = 0; i < docs.size(); ++i) {
            auto row = transform(*docs[i]);
            std::copy(row.begin(), row.end(), out.row(i).begin());
        }
        return out;
    }

private:
    std::map<std::string, std::size_t> index_;
    std::vector<std::string> tokens_;
    std::vector<double> idf_;
};

/// Fits on the corpus and returns its own feature matrix.
inline Matrix tfidf_features(const std::vector<const Ast*>& docs) { return TfidfModel::fit(docs).transform(docs); }

}  // namespace mcd
