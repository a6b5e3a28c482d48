#pragma once
// Terminal/path vocabularies and fixed-length context encoding.

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "mcd/errors.hpp"
#include "mcd/paths.hpp"

namespace mcd {

inline constexpr std::int32_t kPad = 0;
inline constexpr std::int32_t kUnk = 1;

// Index 0 is PAD and 1 is UNK in both tables; real tokens start at 2 in
// lexicographic order so indices depend only on the retained token set.
class Vocab {
public:
    Vocab() = default;

    static Vocab from_tokens(const std::vector<std::string>& terminals, const std::vector<std::string>& paths) {
        Vocab v;
        for (const auto& t : terminals) v.terminals_.emplace(t, static_cast<std::int32_t>(v.terminals_.size() + 2));
        for (const auto& p : paths) v.paths_.emplace(p, static_cast<std::int32_t>(v.paths_.size() + 2));
        return v;
    }

    std::int32_t terminal(const std::string& t) const {
        auto it = terminals_.find(t);
        return it == terminals_.end() ? kUnk : it->second;
    }
    std::int32_t path(const std::string& p) const {
        auto it = paths_.find(p);
        return it == paths_.end() ? kUnk : it->second;
    }

    // Table sizes including PAD and UNK.
    std::size_t terminal_count() const noexcept { return terminals_.size() + 2; }
    std::size_t path_count() const noexcept { return paths_.size() + 2; }

    const std::map<std::string, std::int32_t>& terminals() const noexcept { return terminals_; }
    const std::map<std::string, std::int32_t>& paths() const noexcept { return paths_; }

    nlohmann::json to_json() const { return nlohmann::json{{"terminals", terminals_}, {"paths", paths_}}; }

    static Vocab from_json(const nlohmann::json& j) {
        Vocab v;
        if (!j.is_object() || !j.contains("terminals") || !j.contains("paths"))
            throw SchemaError("vocab must have \"terminals\" and \"paths\"");
        auto load = [](const nlohmann::json& table, std::map<std::string, std::int32_t>& out) {
            for (const auto& [k, idx] : table.items()) {
                if (!idx.is_number_integer() || idx.get<std::int64_t>() < 2)
                    throw SchemaError("vocab index for '" + k + "' must be an integer >= 2");
                out.emplace(k, idx.get<std::int32_t>());
            }
            std::vector<bool> seen(out.size() + 2, false);
            for (const auto& [k, idx] : out) {
                if (static_cast<std::size_t>(idx) >= seen.size() || seen[idx])
                    throw SchemaError("vocab indices must be dense and unique");
                seen[idx] = true;
            }
        };
        load(j["terminals"], v.terminals_);
        load(j["paths"], v.paths_);
        return v;
    }

    // FNV-1a over the canonical JSON dump; used to pair checkpoints with encodings.
    std::uint64_t hash() const {
        std::uint64_t h = 1469598103934665603ULL;
        for (unsigned char ch : to_json().dump()) {
            h ^= ch;
            h *= 1099511628211ULL;
        }
        return h;
    }

    friend bool operator==(const Vocab&, const Vocab&) = default;

private:
    std::map<std::string, std::int32_t> terminals_;
    std::map<std::string, std::int32_t> paths_;
};

/// Builds a vocabulary from per-submission context sets. Tokens and paths
/// seen fewer than min_count times map to UNK.
inline Vocab build_vocab(const std::vector<std::vector<PathContext>>& corpus, std::size_t min_count = 1) {
    if (corpus.empty()) throw EmptyCorpus("cannot build a vocabulary from an empty corpus");
    std::map<std::string, std::size_t> tcount, pcount;
    for (const auto& ctxs : corpus) {
        for (const auto& c : ctxs) {
            ++tcount[c.start];
            ++tcount[c.end];
            ++pcount[c.path_key()];
        }
    }
    std::vector<std::string> terms, paths;
    for (const auto& [t, n] : tcount)
        if (n >= min_count) terms.push_back(t);
    for (const auto& [p, n] : pcount)
        if (n >= min_count) paths.push_back(p);
    return Vocab::from_tokens(terms, paths);
}

using ContextTriple = std::array<std::int32_t, 3>;  // start, path, end

struct EncodedSubmission {
    std::vector<ContextTriple> contexts;  // exactly max_contexts, PAD-filled
    std::vector<std::uint8_t> mask;       // 1 = real context
    bool truncated = false;

    std::size_t real_count() const {
        std::size_t n = 0;
        for (auto m : mask) n += m;
        return n;
    }

    friend bool operator==(const EncodedSubmission&, const EncodedSubmission&) = default;
};

inline EncodedSubmission encode(const std::vector<PathContext>& paths, const Vocab& vocab,
                                std::size_t max_contexts = 100) {
    EncodedSubmission enc;
    enc.contexts.assign(max_contexts, ContextTriple{kPad, kPad, kPad});
    enc.mask.assign(max_contexts, 0);
    const std::size_t n = std::min(paths.size(), max_contexts);
    enc.truncated = paths.size() > max_contexts;
    for (std::size_t i = 0; i < n; ++i) {
        enc.contexts[i] = {vocab.terminal(paths[i].start), vocab.path(paths[i].path_key()),
                           vocab.terminal(paths[i].end)};
        enc.mask[i] = 1;
    }
    return enc;
}

}  // namespace mcd
