#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "triad/kb/store.hpp"

namespace triad::index {

enum class UriKind { Entity, Relation };

enum class CandidateSource { TextFilter, Traversal, LlmSelected };

/// A KB URI proposed for a mention, with its retrieval score and provenance.
struct UriCandidate {
    std::string uri;
    std::string label;
    double score = 0.0;
    int rank = 0;  // 1-based, unique and consecutive within one list
    CandidateSource source = CandidateSource::TextFilter;

    bool operator==(const UriCandidate&) const = default;
};

/// Lowercase, ASCII-fold, split on non-alphanumerics.
std::vector<std::string> normalize_tokens(std::string_view text);
/// Normalized tokens joined with single spaces (the label equality key).
std::string normalize_label(std::string_view text);

/// BM25 (k1 = 1.2, b = 0.75) over normalized label tokens, one sub-corpus
/// per URI kind, with an exact-normalized-label bonus that dominates any
/// BM25 score. Immutable after build; concurrent searches are safe.
class MentionIndex {
public:
    static constexpr double kBm25K1 = 1.2;
    static constexpr double kBm25B = 0.75;
    static constexpr double kExactMatchBonus = 1e9;

    MentionIndex() = default;

    /// Index every labeled URI in the store. A URI is a relation when it
    /// occurs in predicate position, an entity when it occurs as subject or
    /// object; it may be both.
    static MentionIndex build(const kb::KbStore& store);

    /// Top-`limit` candidates by score, ties broken lexicographically by
    /// URI; ranks are 1-based and consecutive, source is TextFilter.
    std::vector<UriCandidate> search(const std::string& mention, UriKind kind,
                                     std::size_t limit) const;

    std::size_t doc_count() const;
    std::size_t doc_count(UriKind kind) const;

    /// Line-oriented snapshot (JSONL docs) to skip a rebuild.
    void save(const std::filesystem::path& path) const;
    static MentionIndex load(const std::filesystem::path& path);

private:
    struct Doc {
        std::string uri;
        std::string label;
        std::vector<std::string> tokens;
        std::string normalized;  // join(tokens, " ")
    };
    struct SubIndex {
        std::vector<Doc> docs;
        std::map<std::string, std::vector<std::size_t>> postings;  // token -> doc ids
        double total_tokens = 0.0;

        void add(std::string uri, std::string label);
        void finish();
    };

    const SubIndex& sub(UriKind kind) const {
        return kind == UriKind::Entity ? entities_ : relations_;
    }

    SubIndex entities_;
    SubIndex relations_;
};

}  // namespace triad::index
