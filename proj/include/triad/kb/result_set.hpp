#pragma once

#include <vector>

#include "triad/kb/term.hpp"

namespace triad::kb {

enum class ResultKind { Bindings, Boolean, Count };

/// Outcome of executing a query. `kind` selects the populated payload.
struct ResultSet {
    ResultKind kind = ResultKind::Bindings;
    std::vector<Binding> rows;  // Bindings
    bool boolean = false;       // Boolean
    long long count = 0;        // Count

    bool operator==(const ResultSet&) const = default;
};

}  // namespace triad::kb
