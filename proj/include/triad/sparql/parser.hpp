#pragma once

#include <string_view>

#include "triad/sparql/ast.hpp"

namespace triad::sparql {

/// Parse query text into a template. Angle-bracketed tokens without a URI
/// scheme separator ("://") become mention slots; absolute URIs stay
/// constants. FILTER / OPTIONAL / GROUP BY / HAVING are accepted and flagged
/// as unsupported. Throws SparqlParseError with the byte offset on bad input.
SparqlTemplate parse(std::string_view text);

}  // namespace triad::sparql
