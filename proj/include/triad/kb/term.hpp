#pragma once

#include <compare>
#include <map>
#include <string>
#include <string_view>

namespace triad::kb {

enum class TermKind { Iri, Literal };

/// One RDF term: an absolute IRI, or a literal whose language/datatype tag is
/// kept verbatim as an opaque suffix and never interpreted.
struct Term {
    TermKind kind = TermKind::Iri;
    std::string lexical;  // IRI text, or the unescaped literal value
    std::string tag;      // literals only: "", "@lang" or "^^<datatype>"

    static Term iri(std::string value) {
        return Term{TermKind::Iri, std::move(value), ""};
    }
    static Term literal(std::string value, std::string tag = "") {
        return Term{TermKind::Literal, std::move(value), std::move(tag)};
    }

    bool is_iri() const { return kind == TermKind::Iri; }

    /// Canonical N-Triples spelling: <iri> or "escaped"tag.
    std::string to_ntriples() const;

    auto operator<=>(const Term&) const = default;
};

struct Triple {
    Term subject;
    Term predicate;
    Term object;

    auto operator<=>(const Triple&) const = default;
};

/// One position of a triple pattern: a variable, a constant term, or a
/// mention slot awaiting a URI.
struct PatternTerm {
    enum class Kind { Variable, Constant, Slot };

    Kind kind = Kind::Variable;
    Term constant;     // Kind::Constant only
    std::string text;  // variable name (without '?') or slot text

    static PatternTerm variable(std::string name) {
        return PatternTerm{Kind::Variable, {}, std::move(name)};
    }
    static PatternTerm constant_term(Term t) {
        return PatternTerm{Kind::Constant, std::move(t), ""};
    }
    static PatternTerm slot(std::string text) {
        return PatternTerm{Kind::Slot, {}, std::move(text)};
    }

    bool is_variable() const { return kind == Kind::Variable; }
    bool is_constant() const { return kind == Kind::Constant; }
    bool is_slot() const { return kind == Kind::Slot; }

    auto operator<=>(const PatternTerm&) const = default;
};

struct TriplePattern {
    PatternTerm subject;
    PatternTerm predicate;
    PatternTerm object;

    auto operator<=>(const TriplePattern&) const = default;
};

/// Variable name -> bound term. Ordered so that binding lists sort stably.
using Binding = std::map<std::string, Term>;

/// Backslash-escape a literal value for N-Triples / query text.
std::string escape_literal(std::string_view s);

/// Local-name fallback label: substring after the last '/' or '#', with
/// '_' mapped to ' '. Falls back to the full IRI when the local name is empty.
std::string local_name_label(std::string_view iri);

}  // namespace triad::kb
