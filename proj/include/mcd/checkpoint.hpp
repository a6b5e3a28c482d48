#pragma once
// Versioned JSON checkpoint: model matrices, vocabulary (plus its hash), the
// path-extraction settings used for encoding and the resolved config.

#include <cstdint>
#include <cstdio>
#include <map>
#include <string>

#include <json.hpp>

#include "mcd/code2vec.hpp"
#include "mcd/corpus.hpp"
#include "mcd/errors.hpp"
#include "mcd/paths.hpp"
#include "mcd/vocab.hpp"

namespace mcd {

inline constexpr const char* kCheckpointFormat = "mcd-code2vec";
inline constexpr int kCheckpointVersion = 1;

struct Checkpoint {
    Code2VecParams params;
    Vocab vocab;
    PathConfig paths;
    std::size_t max_contexts = 100;
    std::map<std::string, std::string> config;
};

namespace detail {

inline nlohmann::json matrix_to_json(const Matrix& m) {
    return nlohmann::json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", m.data()}};
}

inline Matrix matrix_from_json(const nlohmann::json& j, const char* name) {
    try {
        Matrix m(j.at("rows").get<std::size_t>(), j.at("cols").get<std::size_t>());
        const auto data = j.at("data").get<std::vector<double>>();
        if (data.size() != m.size()) throw SchemaError(std::string("checkpoint matrix '") + name + "' has wrong size");
        m.data() = data;
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("checkpoint matrix '") + name + "': " + e.what());
    }
}

inline std::string hex64(std::uint64_t v) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

}  // namespace detail

inline nlohmann::json checkpoint_to_json(const Checkpoint& c) {
    using nlohmann::json;
    return json{{"format", kCheckpointFormat},
                {"version", kCheckpointVersion},
                {"config", c.config},
                {"vocab", c.vocab.to_json()},
                {"vocab_hash", detail::hex64(c.vocab.hash())},
                {"max_length", c.paths.max_length},
                {"max_width", c.paths.max_width},
                {"max_contexts", c.max_contexts},
                {"params",
                 {{"terminal_emb", detail::matrix_to_json(c.params.terminal_emb)},
                  {"path_emb", detail::matrix_to_json(c.params.path_emb)},
                  {"combine", detail::matrix_to_json(c.params.combine)},
                  {"attention", detail::matrix_to_json(c.params.attention)},
                  {"output", detail::matrix_to_json(c.params.output)}}}};
}

inline Checkpoint checkpoint_from_json(const nlohmann::json& j) {
    if (!j.is_object() || j.value("format", std::string()) != kCheckpointFormat)
        throw SchemaError("not a code2vec checkpoint");
    if (j.value("version", 0) != kCheckpointVersion)
        throw SchemaError("unsupported checkpoint version " + j.value("version", nlohmann::json()).dump());
    Checkpoint c;
    try {
        c.vocab = Vocab::from_json(j.at("vocab"));
        if (j.at("vocab_hash").get<std::string>() != detail::hex64(c.vocab.hash()))
            throw VocabMismatch("checkpoint vocabulary does not match its recorded hash");
        c.paths.max_length = j.at("max_length").get<std::size_t>();
        c.paths.max_width = j.at("max_width").get<std::size_t>();
        c.max_contexts = j.at("max_contexts").get<std::size_t>();
        c.config = j.at("config").get<std::map<std::string, std::string>>();
        const auto& p = j.at("params");
        c.params.terminal_emb = detail::matrix_from_json(p.at("terminal_emb"), "terminal_emb");
        c.params.path_emb = detail::matrix_from_json(p.at("path_emb"), "path_emb");
        c.params.combine = detail::matrix_from_json(p.at("combine"), "combine");
        c.params.attention = detail::matrix_from_json(p.at("attention"), "attention");
        c.params.output = detail::matrix_from_json(p.at("output"), "output");
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("checkpoint: ") + e.what());
    }
    const auto& pr = c.params;
    const std::size_t de = pr.d_emb(), dh = pr.d_hidden();
    if (pr.terminal_emb.rows() != c.vocab.terminal_count() || pr.path_emb.rows() != c.vocab.path_count())
        throw VocabMismatch("checkpoint embedding tables do not match the vocabulary size");
    if (pr.path_emb.cols() != de || pr.combine.cols() != 3 * de || pr.attention.rows() != 1 ||
        pr.attention.cols() != dh || pr.output.rows() != 2 || pr.output.cols() != dh)
        throw SchemaError("checkpoint matrix shapes are inconsistent");
    return c;
}

inline void save_checkpoint(const std::string& path, const Checkpoint& c) {
    write_text_file(path, checkpoint_to_json(c).dump() + "\n");
}

inline Checkpoint load_checkpoint(const std::string& path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_text_file(path));
    } catch (const nlohmann::json::parse_error& e) {
        throw SchemaError("'" + path + "': " + e.what());
    }
    return checkpoint_from_json(j);
}

}  // namespace mcd
