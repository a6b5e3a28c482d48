#pragma once
// Flat key=value pipeline configuration. Unknown keys are rejected and the
// fully resolved set (defaults included) can be written back out.

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mcd/corpus.hpp"
#include "mcd/discover.hpp"
#include "mcd/errors.hpp"
#include "mcd/eval.hpp"
#include "mcd/generator.hpp"
#include "mcd/training.hpp"

namespace mcd {

class PipelineConfig {
public:
    PipelineConfig() : values_(defaults()) {}

    static const std::map<std::string, std::string>& defaults() {
        static const std::map<std::string, std::string> d = {
            {"seed", "0"},
            // code2vec training
            {"learning_rate", "0.0002"},
            {"max_epochs", "10000"},
            {"patience", "400"},
            {"batch_size", "0"},
            {"d_emb", "100"},
            {"d_hidden", "100"},
            {"adam_beta1", "0.9"},
            {"adam_beta2", "0.999"},
            {"adam_epsilon", "1e-08"},
            {"validation_fraction", "0.125"},
            // baselines
            {"nn_hidden", "100"},
            {"svm_lambda", "0.001"},
            // path extraction / encoding
            {"max_length", "8"},
            {"max_width", "2"},
            {"max_contexts", "100"},
            {"min_count", "1"},
            // evaluation
            {"train_fraction", "0.8"},
            {"n_runs", "50"},
            {"stratified", "false"},
            {"threads", "1"},
            // discovery
            {"minpts", "3"},
            {"epsilon", "auto"},
            {"top_k", "4"},
            {"embedding", "flattened"},
            {"perplexity", "30"},
            {"tsne_iterations", "1000"},
            {"tsne_learning_rate", "200"},
            // corpus generation
            {"gen_correct", "80"},
            {"gen_a", "10"},
            {"gen_b", "8"},
            {"gen_c", "3"},
            {"gen_max_jitter", "3"},
            // inputs
            {"corpus", ""},
            {"checkpoint", ""},
            {"projection", ""},
            {"clusters", ""},
        };
        return d;
    }

    static PipelineConfig parse(const std::string& text, const std::string& origin = "config") {
        PipelineConfig cfg;
        std::size_t pos = 0, line_no = 0;
        while (pos <= text.size()) {
            std::size_t nl = text.find('\n', pos);
            if (nl == std::string::npos) nl = text.size();
            std::string line = text.substr(pos, nl - pos);
            pos = nl + 1;
            ++line_no;
            if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
            line = trim(line);
            if (line.empty()) continue;
            const auto eq = line.find('=');
            if (eq == std::string::npos)
                throw ConfigError(origin + ":" + std::to_string(line_no) + ": expected key = value");
            cfg.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)), origin + ":" + std::to_string(line_no));
        }
        return cfg;
    }

    static PipelineConfig load(const std::string& path) { return parse(read_text_file(path), path); }

    void set(const std::string& key, const std::string& value, const std::string& where = "config") {
        if (!defaults().count(key)) throw ConfigError(where + ": unknown key '" + key + "'");
        values_[key] = value;
    }

    const std::string& str(const std::string& key) const {
        auto it = values_.find(key);
        if (it == values_.end()) throw ConfigError("unknown key '" + key + "'");
        return it->second;
    }

    double real(const std::string& key) const {
        const std::string& v = str(key);
        try {
            std::size_t used = 0;
            double d = std::stod(v, &used);
            if (used == v.size()) return d;
        } catch (const std::exception&) {
        }
        throw ConfigError("'" + key + "' must be a number, got '" + v + "'");
    }

    std::uint64_t integer(const std::string& key) const {
        const std::string& v = str(key);
        try {
            std::size_t used = 0;
            if (!v.empty() && v[0] != '-') {
                unsigned long long n = std::stoull(v, &used);
                if (used == v.size()) return n;
            }
        } catch (const std::exception&) {
        }
        throw ConfigError("'" + key + "' must be a non-negative integer, got '" + v + "'");
    }

    std::size_t size(const std::string& key) const { return static_cast<std::size_t>(integer(key)); }

    bool boolean(const std::string& key) const {
        const std::string& v = str(key);
        if (v == "true" || v == "1") return true;
        if (v == "false" || v == "0") return false;
        throw ConfigError("'" + key + "' must be true or false, got '" + v + "'");
    }

    /// Sorted key = value lines covering every key.
    std::string resolved() const {
        std::string out;
        for (const auto& [k, v] : values_) out += k + " = " + v + "\n";
        return out;
    }

    const std::map<std::string, std::string>& values() const noexcept { return values_; }

    // Typed views ----------------------------------------------------------

    TrainConfig code2vec_train() const {
        TrainConfig t;
        t.learning_rate = real("learning_rate");
        t.max_epochs = size("max_epochs");
        t.patience = size("patience");
        t.batch_size = size("batch_size");
        t.seed = integer("seed");
        t.d_emb = size("d_emb");
        t.d_hidden = size("d_hidden");
        t.beta1 = real("adam_beta1");
        t.beta2 = real("adam_beta2");
        t.adam_epsilon = real("adam_epsilon");
        t.validation_fraction = real("validation_fraction");
        t.validate();
        return t;
    }

    PathConfig paths() const { return {size("max_length"), size("max_width")}; }

    ComparisonConfig comparison() const {
        ComparisonConfig c;
        c.split.train_fraction = real("train_fraction");
        c.split.n_runs = size("n_runs");
        c.split.base_seed = integer("seed");
        c.split.stratified = boolean("stratified");
        c.split.validate();
        c.code2vec = code2vec_train();
        c.nn = c.code2vec;
        c.nn.d_hidden = size("nn_hidden");
        c.svm = c.code2vec;
        c.svm_lambda = real("svm_lambda");
        c.paths = paths();
        c.max_contexts = size("max_contexts");
        c.min_count = size("min_count");
        c.threads = size("threads");
        if (c.max_contexts == 0) throw ConfigError("max_contexts must be positive");
        return c;
    }

    DiscoveryConfig discovery() const {
        DiscoveryConfig d;
        d.cluster.minpts = size("minpts");
        if (d.cluster.minpts < 2) throw ConfigError("minpts must be at least 2");
        if (str("epsilon") != "auto") {
            d.cluster.epsilon = real("epsilon");
            if (!(*d.cluster.epsilon > 0.0)) throw ConfigError("epsilon must be positive or 'auto'");
        }
        d.cluster.top_k = size("top_k");
        const std::string& e = str("embedding");
        if (e == "flattened") d.embedding = EmbeddingKind::Flattened;
        else if (e == "pooled") d.embedding = EmbeddingKind::Pooled;
        else throw ConfigError("embedding must be 'flattened' or 'pooled', got '" + e + "'");
        d.tsne.perplexity = real("perplexity");
        d.tsne.iterations = size("tsne_iterations");
        d.tsne.learning_rate = real("tsne_learning_rate");
        d.tsne.seed = integer("seed");
        if (!(d.tsne.perplexity > 0.0)) throw ConfigError("perplexity must be positive");
        return d;
    }

    GeneratorSpec generator() const {
        GeneratorSpec g;
        g.correct = size("gen_correct");
        g.dup_move_turn = size("gen_a");
        g.fixed_repeat = size("gen_b");
        g.local_variable = size("gen_c");
        g.max_jitter = size("gen_max_jitter");
        g.seed = integer("seed");
        g.validate();
        return g;
    }

private:
    static std::string trim(const std::string& s) {
        const auto b = s.find_first_not_of(" \t\r");
        if (b == std::string::npos) return {};
        return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
    }

    std::map<std::string, std::string> values_;
};

}  // namespace mcd
