#pragma once

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "tamlec/error.hpp"
#include "tamlec/taxonomy.hpp"

namespace tamlec {

struct Document {
    std::string doc_id;
    std::string text;
    std::vector<std::string> labels;
};

/// Parsed JSONL corpus: one object per line with doc_id / text / labels.
/// Label resolution against a taxonomy is a separate step so the loader can
/// be reused for unlabeled completion inputs.
inline std::vector<Document> load_corpus(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, "data-io: cannot open " + path);
    std::vector<Document> docs;
    std::set<std::string> ids;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorCode::MalformedJson,
                        "data-io: line " + std::to_string(lineno) + ": " +
                            e.what());
        }
        if (!j.contains("doc_id") || !j.contains("text") || !j.contains("labels"))
            throw Error(ErrorCode::MalformedJson,
                        "data-io: line " + std::to_string(lineno) +
                            ": missing doc_id/text/labels");
        Document d;
        d.doc_id = j["doc_id"].get<std::string>();
        d.text = j["text"].get<std::string>();
        for (const auto& l : j["labels"]) d.labels.push_back(l.get<std::string>());
        if (!ids.insert(d.doc_id).second)
            throw Error(ErrorCode::DuplicateDocId,
                        "data-io: duplicate doc_id '" + d.doc_id + "'");
        docs.push_back(std::move(d));
    }
    return docs;
}

inline std::vector<LabelId> resolve_labels(const Taxonomy& t,
                                           const Document& d) {
    std::vector<LabelId> out;
    for (const std::string& name : d.labels) {
        if (!t.has_label(name))
            throw Error(ErrorCode::UnknownLabel,
                        "data-io: document '" + d.doc_id +
                            "' has unknown label '" + name + "'");
        out.push_back(t.id_of(name));
    }
    return out;
}

/// Lowercase, split on non-alphanumeric runs.
inline std::vector<std::string> split_tokens(const std::string& text) {
    std::vector<std::string> toks;
    std::string cur;
    for (unsigned char ch : text) {
        if (std::isalnum(ch)) {
            cur.push_back(static_cast<char>(std::tolower(ch)));
        } else if (!cur.empty()) {
            toks.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) toks.push_back(std::move(cur));
    return toks;
}

/// Training-corpus vocabulary: tokens with frequency >= min_freq plus the
/// PAD and OOV sentinels at ids 0 and 1.
class Vocabulary {
public:
    static constexpr std::size_t kPad = 0;
    static constexpr std::size_t kOov = 1;

    Vocabulary() {
        id_to_token_ = {"<pad>", "<oov>"};
        token_to_id_ = {{"<pad>", kPad}, {"<oov>", kOov}};
    }

    static Vocabulary build(const std::vector<Document>& docs,
                            std::size_t min_freq = 2) {
        std::map<std::string, std::size_t> freq;
        for (const auto& d : docs)
            for (const auto& tok : split_tokens(d.text)) freq[tok]++;
        Vocabulary v;
        for (const auto& [tok, n] : freq)
            if (n >= min_freq) {
                v.token_to_id_[tok] = v.id_to_token_.size();
                v.id_to_token_.push_back(tok);
            }
        return v;
    }

    std::size_t size() const { return id_to_token_.size(); }

    std::size_t id_of(const std::string& tok) const {
        auto it = token_to_id_.find(tok);
        return it == token_to_id_.end() ? kOov : it->second;
    }

    const std::string& token(std::size_t id) const { return id_to_token_.at(id); }

    /// Tokenize to ids, truncated at max_len; empty text maps to [PAD].
    std::vector<std::size_t> tokenize(const std::string& text,
                                      std::size_t max_len = SIZE_MAX) const {
        std::vector<std::size_t> ids;
        for (const auto& tok : split_tokens(text)) {
            if (ids.size() >= max_len) break;
            ids.push_back(id_of(tok));
        }
        if (ids.empty()) ids.push_back(kPad);
        return ids;
    }

    std::vector<std::string> tokens() const { return id_to_token_; }

    /// Rebuild from a stored token list (checkpoint sidecars); ids follow the
    /// list order, which must start with the PAD and OOV sentinels.
    static Vocabulary from_tokens(const std::vector<std::string>& toks) {
        if (toks.size() < 2 || toks[0] != "<pad>" || toks[1] != "<oov>")
            throw Error(ErrorCode::InvalidArgument,
                        "data-io: token list must start with <pad>, <oov>");
        Vocabulary v;
        for (std::size_t i = 2; i < toks.size(); ++i) {
            v.token_to_id_[toks[i]] = v.id_to_token_.size();
            v.id_to_token_.push_back(toks[i]);
        }
        return v;
    }

private:
    std::vector<std::string> id_to_token_;
    std::map<std::string, std::size_t> token_to_id_;
};

struct EmbeddingTable {
    std::size_t dim = 0;
    std::map<std::string, std::vector<double>> vectors;
    std::size_t duplicate_words = 0;

    double coverage(const Vocabulary& v) const {
        if (v.size() == 0) return 0.0;
        std::size_t hit = 0;
        for (const auto& tok : v.tokens())
            if (vectors.count(tok)) ++hit;
        return static_cast<double>(hit) / static_cast<double>(v.size());
    }
};

/// GloVe-style text format: `word v1 ... vd` per line. A duplicate word is
/// overwritten by its last occurrence (counted in duplicate_words).
inline EmbeddingTable load_embeddings(const std::string& path,
                                      std::size_t expected_dim) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, "data-io: cannot open " + path);
    EmbeddingTable table;
    table.dim = expected_dim;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string word;
        ss >> word;
        std::vector<double> vec;
        double v;
        while (ss >> v) vec.push_back(v);
        if (vec.size() != expected_dim)
            throw Error(ErrorCode::DimMismatch,
                        "data-io: line " + std::to_string(lineno) + ": got " +
                            std::to_string(vec.size()) + " floats, expected " +
                            std::to_string(expected_dim));
        if (table.vectors.count(word)) ++table.duplicate_words;
        table.vectors[word] = std::move(vec);
    }
    return table;
}

/// Plain key = value config with optional [section] headers; a sectioned key
/// is addressed as "section.key". '#' and ';' start comments.
class Config {
public:
    static Config parse(std::istream& in) {
        Config cfg;
        std::string line, section;
        while (std::getline(in, line)) {
            auto hash = line.find_first_of("#;");
            if (hash != std::string::npos) line.erase(hash);
            auto trim = [](std::string s) {
                auto b = s.find_first_not_of(" \t\r");
                auto e = s.find_last_not_of(" \t\r");
                return b == std::string::npos ? std::string{}
                                              : s.substr(b, e - b + 1);
            };
            line = trim(line);
            if (line.empty()) continue;
            if (line.front() == '[' && line.back() == ']') {
                section = trim(line.substr(1, line.size() - 2));
                continue;
            }
            auto eq = line.find('=');
            if (eq == std::string::npos)
                throw Error(ErrorCode::InvalidArgument,
                            "data-io: config line without '=': " + line);
            std::string key = trim(line.substr(0, eq));
            std::string val = trim(line.substr(eq + 1));
            if (!section.empty()) key = section + "." + key;
            cfg.values_[key] = val;
        }
        return cfg;
    }

    static Config parse_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw Error(ErrorCode::IoError, "data-io: cannot open " + path);
        return parse(in);
    }

    bool has(const std::string& key) const { return values_.count(key) > 0; }

    std::string get(const std::string& key, const std::string& fallback) const {
        auto it = values_.find(key);
        return it == values_.end() ? fallback : it->second;
    }
    double get(const std::string& key, double fallback) const {
        auto it = values_.find(key);
        return it == values_.end() ? fallback : std::stod(it->second);
    }
    long get(const std::string& key, long fallback) const {
        auto it = values_.find(key);
        return it == values_.end() ? fallback : std::stol(it->second);
    }
    bool get(const std::string& key, bool fallback) const {
        auto it = values_.find(key);
        if (it == values_.end()) return fallback;
        return it->second == "true" || it->second == "on" || it->second == "1";
    }

    const std::map<std::string, std::string>& values() const { return values_; }

private:
    std::map<std::string, std::string> values_;
};

}  // namespace tamlec
