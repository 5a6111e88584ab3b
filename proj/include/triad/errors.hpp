#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace triad {

/// Root of the project exception hierarchy.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Bad user input: malformed data files, invalid config, unknown flags.
/// The CLI maps these to exit code 1.
struct UserError : Error {
    using Error::Error;
};

/// Environment problems: unreachable backend, missing transcript, I/O on a
/// sink. The CLI maps these to exit code 2.
struct InfraError : Error {
    using Error::Error;
};

struct NtriplesError : UserError {
    NtriplesError(std::size_t line, const std::string& text, const std::string& what)
        : UserError("line " + std::to_string(line) + ": " + what + " [" + text + "]"),
          line_number(line),
          line_text(text) {}
    std::size_t line_number;
    std::string line_text;
};

struct ConfigError : UserError {
    ConfigError(const std::string& field, const std::string& what)
        : UserError(field + ": " + what), field_path(field) {}
    std::string field_path;
};

struct BenchmarkError : UserError {
    using UserError::UserError;
};

/// SPARQL text rejected by the parser. Carries the byte offset of the
/// offending token.
struct SparqlParseError : Error {
    SparqlParseError(std::size_t offset, const std::string& what)
        : Error("syntax error at offset " + std::to_string(offset) + ": " + what),
          position(offset) {}
    std::size_t position;
};

/// Query parsed fine but uses constructs outside the executable subset.
struct UnsupportedFeatureError : Error {
    explicit UnsupportedFeatureError(std::vector<std::string> feats)
        : Error("unsupported feature(s): " + join(feats)), features(std::move(feats)) {}
    std::vector<std::string> features;

private:
    static std::string join(const std::vector<std::string>& v) {
        std::string out;
        for (const auto& s : v) {
            if (!out.empty()) out += ", ";
            out += s;
        }
        return out;
    }
};

struct UnboundProjectionError : Error {
    explicit UnboundProjectionError(const std::string& var)
        : Error("projected variable ?" + var + " is not bound by any pattern"), variable(var) {}
    std::string variable;
};

/// instantiate() called with an assignment that misses one or more slots.
struct MissingSlotError : Error {
    explicit MissingSlotError(std::vector<std::string> missing)
        : Error(message(missing)), slots(std::move(missing)) {}
    std::vector<std::string> slots;

private:
    static std::string message(const std::vector<std::string>& v) {
        std::string out = "assignment misses slot(s):";
        for (const auto& s : v) out += " <" + s + ">";
        return out;
    }
};

/// A slot with no candidates at enumeration time.
struct StarvedSlotError : Error {
    explicit StarvedSlotError(const std::string& s)
        : Error("no candidates for slot <" + s + ">"), slot(s) {}
    std::string slot;
};

/// Prompt rendering hit a declared variable with no value.
struct MissingVariableError : Error {
    explicit MissingVariableError(const std::string& name)
        : Error("prompt variable <" + name + "> has no value"), variable(name) {}
    std::string variable;
};

// --- pipeline-level failures -----------------------------------------------

/// The text filter produced an empty pool for an entity mention.
struct StarvedMentionError : Error {
    explicit StarvedMentionError(const std::string& m)
        : Error("no entity candidates for mention \"" + m + "\""), mention(m) {}
    std::string mention;
};

/// Traversal and label fallback both produced an empty relation pool.
struct StarvedRelationError : Error {
    explicit StarvedRelationError(const std::string& m)
        : Error("no relation candidates for mention \"" + m + "\""), mention(m) {}
    std::string mention;
};

/// Every enumerated query was eliminated by the executability filter.
struct NoFeasibleQueryError : Error {
    using Error::Error;
};

/// LLM output for triplet extraction stayed unparseable after the re-ask.
struct ExtractionFailureError : Error {
    using Error::Error;
};

/// LLM output for template generation stayed invalid after the re-ask.
struct TemplateFailureError : Error {
    using Error::Error;
};

// --- backend failures -------------------------------------------------------

struct TransportError : InfraError {
    TransportError(const std::string& what, double retry_after_s = 0.0)
        : InfraError(what), retry_after_seconds(retry_after_s) {}
    double retry_after_seconds;
};

/// Replay backend found no usable record. This is a fixture-authoring bug,
/// not a runtime condition.
struct ReplayMissError : InfraError {
    using InfraError::InfraError;
};

}  // namespace triad
