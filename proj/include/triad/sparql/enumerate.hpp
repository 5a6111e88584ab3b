#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "triad/sparql/ast.hpp"

namespace triad::sparql {

/// URIs in rank order (best first), one list per slot text.
using SlotUris = std::map<std::string, std::vector<std::string>>;

/// Ground a template with a slot -> URI assignment. Throws MissingSlotError
/// listing every uncovered slot. Extra assignment entries are ignored; only
/// the used ones are recorded on the query.
SparqlQuery instantiate(const SparqlTemplate& t,
                        const std::map<std::string, std::string>& assignment);

/// Cartesian product of per-slot candidates, best-rank-first (sum of 1-based
/// ranks, ties by the lexicographic URI tuple in slot order), truncated to
/// `cap`. Relation-position slots draw from `relation_uris`, all others from
/// `entity_uris`. Throws StarvedSlotError on a slot with no candidates.
std::vector<SparqlQuery> enumerate_candidates(const SparqlTemplate& t,
                                              const SlotUris& entity_uris,
                                              const SlotUris& relation_uris,
                                              std::size_t cap);

}  // namespace triad::sparql
