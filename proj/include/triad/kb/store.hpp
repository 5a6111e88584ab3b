#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "triad/kb/term.hpp"

namespace triad::kb {

enum class Direction { Outgoing, Incoming };

/// Which permutation index drives a match() scan. Auto picks the cheapest
/// one for the pattern's constant positions.
enum class DriverIndex { Auto, Spo, Pos, Osp };

struct LoadOptions {
    /// Strict: a malformed line aborts the load. Lenient: skip and count.
    bool strict = true;
    std::vector<std::string> label_predicates = {
        "http://www.w3.org/2000/01/rdf-schema#label"};
};

struct LoadStats {
    std::size_t lines = 0;
    std::size_t triples = 0;
    std::size_t skipped = 0;
};

/// Immutable in-memory triple store with three permutation indexes and a
/// label map. Construction is single-threaded; reads are freely concurrent.
class KbStore {
public:
    KbStore() = default;

    static KbStore load_ntriples(const std::filesystem::path& path,
                                 const LoadOptions& opts = {},
                                 LoadStats* stats = nullptr);
    static KbStore parse_ntriples(std::istream& in, const LoadOptions& opts = {},
                                  LoadStats* stats = nullptr);
    static KbStore from_triples(std::vector<Triple> triples,
                                const LoadOptions& opts = {});

    std::size_t size() const { return triples_.size(); }
    const std::vector<Triple>& triples() const { return triples_; }
    bool contains(const Triple& t) const;

    /// uri -> sorted unique labels. Every URI seen in the data has at least
    /// its local-name fallback label.
    const std::map<std::string, std::vector<std::string>>& labels() const {
        return labels_;
    }
    const std::vector<std::string>* labels_of(const std::string& iri) const;
    std::size_t label_count() const;

    /// All bindings under which the pattern occurs, sorted lexicographically
    /// by bound values. A fully-constant pattern acts as a membership test
    /// and yields one empty binding on a hit.
    std::vector<Binding> match(const TriplePattern& pattern,
                               DriverIndex driver = DriverIndex::Auto) const;

    /// Every predicate on an edge incident to `iri`, tagged with direction.
    std::set<std::pair<std::string, Direction>> neighbors(const std::string& iri) const;

    void serialize_ntriples(std::ostream& out) const;
    void save_ntriples(const std::filesystem::path& path) const;

private:
    void finish_build(const LoadOptions& opts);
    void add_label(const std::string& iri, std::string label);

    std::vector<Triple> triples_;       // sorted (s,p,o), unique
    std::vector<std::uint32_t> pos_;    // permutation sorted by (p,o,s)
    std::vector<std::uint32_t> osp_;    // permutation sorted by (o,s,p)
    std::map<std::string, std::vector<std::string>> labels_;
};

}  // namespace triad::kb
