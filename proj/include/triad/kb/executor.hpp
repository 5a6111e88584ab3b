#pragma once

#include "triad/kb/result_set.hpp"
#include "triad/kb/store.hpp"
#include "triad/sparql/ast.hpp"

namespace triad::kb {

/// Evaluate a grounded query's basic graph pattern by successive pattern
/// joins. SELECT yields projected bindings, ASK a boolean, COUNT the number
/// of (optionally DISTINCT) solutions. Throws UnsupportedFeatureError for
/// flagged constructs and UnboundProjectionError for projected variables
/// that no pattern binds.
ResultSet execute(const KbStore& store, const sparql::SparqlTemplate& body);
ResultSet execute(const KbStore& store, const sparql::SparqlQuery& query);

}  // namespace triad::kb
