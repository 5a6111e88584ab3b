#pragma once

#include <map>
#include <string>
#include <variant>
#include <vector>

#include "triad/kb/term.hpp"

namespace triad::sparql {

enum class QueryForm { Select, Ask, Count };

/// A construct we parse and keep but refuse to execute (FILTER, OPTIONAL,
/// GROUP BY, HAVING). `raw` is the whitespace-collapsed source slice.
struct UnsupportedClause {
    std::string keyword;
    std::string raw;

    bool operator==(const UnsupportedClause&) const = default;
};

using PatternItem = std::variant<kb::TriplePattern, UnsupportedClause>;

/// Parsed query skeleton. Constant positions may be mention slots; a
/// template with no slots doubles as a grounded query body.
struct SparqlTemplate {
    QueryForm form = QueryForm::Select;
    bool distinct = false;
    /// SELECT: projected variables. COUNT: the counted variable (empty = *).
    /// ASK: empty.
    std::vector<std::string> projection;
    std::vector<PatternItem> items;
    std::vector<UnsupportedClause> trailing;  // GROUP BY / HAVING
    std::string raw;                          // original text, not part of equality

    std::vector<const kb::TriplePattern*> patterns() const;
    /// Unique slot texts in first-appearance order.
    std::vector<std::string> slots() const;
    /// Slot texts that occur in predicate position (relation slots).
    std::vector<std::string> relation_slots() const;
    std::vector<std::string> unsupported_features() const;
    bool grounded() const { return slots().empty(); }
    /// All variable names in first-appearance order.
    std::vector<std::string> variables() const;

    bool operator==(const SparqlTemplate& other) const {
        return form == other.form && distinct == other.distinct &&
               projection == other.projection && items == other.items &&
               trailing == other.trailing;
    }
};

/// A fully grounded query plus the slot assignment that produced it.
struct SparqlQuery {
    SparqlTemplate body;
    std::map<std::string, std::string> assignment;  // slot text -> URI

    bool operator==(const SparqlQuery& other) const {
        return body == other.body && assignment == other.assignment;
    }
};

/// Canonical single-line serialization. parse(render(x)) is structurally
/// equal to x.
std::string render(const SparqlTemplate& t);
std::string render(const SparqlQuery& q);

}  // namespace triad::sparql
