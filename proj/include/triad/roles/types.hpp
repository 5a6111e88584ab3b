#pragma once

#include <set>
#include <string>
#include <vector>

#include "triad/errors.hpp"

namespace triad::roles {

/// One surface mention in a question: explicit text or an implicit
/// '?variable'.
struct Mention {
    bool is_variable = false;
    std::string text;  // variable name without '?', or the explicit text

    static Mention explicit_text(std::string t) { return Mention{false, std::move(t)}; }
    static Mention variable(std::string name) { return Mention{true, std::move(name)}; }

    bool operator==(const Mention&) const = default;
};

/// A parsed <entity, relation, entity> mention from the question.
struct TripleMention {
    Mention subject;
    Mention relation;
    Mention object;

    bool operator==(const TripleMention&) const = default;
};

enum class AnswerKind { Select, Count, Boolean };

const char* answer_kind_name(AnswerKind k);
AnswerKind answer_kind_from_name(const std::string& name);

enum class Provenance { Kb, LlmFallback, Abstain };

const char* provenance_name(Provenance p);

/// Typed final answer. The payload matching `kind` is populated; abstain
/// carries an empty payload.
struct Answer {
    AnswerKind kind = AnswerKind::Select;
    Provenance provenance = Provenance::Abstain;
    std::set<std::string> values;  // Select: URIs or literal values
    bool boolean = false;          // Boolean
    long long count = 0;           // Count

    bool is_abstain() const { return provenance == Provenance::Abstain; }
    /// Machine-parseable payload for stdout: values one per line, "true" /
    /// "false", the count, or "abstain".
    std::string printable() const;

    static Answer abstain(AnswerKind kind) {
        Answer a;
        a.kind = kind;
        return a;
    }
};

/// Role hyperparameters. The first four default to the tuned values
/// (3 shots, 2 entity candidates, 2 relation candidates, 3 retries).
struct RoleConfig {
    int n_shots = 3;
    int k_entity = 2;
    int k_relation = 2;
    int retries = 3;
    int filter_pool = 10;      // text-filter pool size per mention
    int enumeration_cap = 50;  // grounded-query enumeration bound

    int relation_pool_cap = 30;  // options offered per relation prompt
    bool connect_boost = true;   // rank predicates connecting both endpoints first

    void validate() const {
        if (n_shots < 0) throw ConfigError("roles.n_shots", "must be >= 0");
        if (k_entity < 1) throw ConfigError("roles.k_entity", "must be >= 1");
        if (k_relation < 1) throw ConfigError("roles.k_relation", "must be >= 1");
        if (retries < 0) throw ConfigError("roles.retries", "must be >= 0");
        if (filter_pool < 1) throw ConfigError("roles.filter_pool", "must be >= 1");
        if (enumeration_cap < 1) throw ConfigError("roles.enumeration_cap", "must be >= 1");
        if (relation_pool_cap < 1) throw ConfigError("roles.relation_pool_cap", "must be >= 1");
    }
};

}  // namespace triad::roles
