#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "triad/index/mention_index.hpp"
#include "triad/kb/executor.hpp"
#include "triad/kb/store.hpp"
#include "triad/llm/gateway.hpp"
#include "triad/roles/types.hpp"
#include "triad/sparql/ast.hpp"

namespace triad::roles {

/// Shared dependencies for one pipeline run. Operations are stateless given
/// these; `temperature` is the attempt-scoped sampling temperature.
struct AgentContext {
    llm::Gateway& gateway;
    const kb::KbStore& store;
    const index::MentionIndex& index;
    RoleConfig cfg;
    double temperature = 0.0;
};

/// mention text -> ranked candidates
using CandidateMap = std::map<std::string, std::vector<index::UriCandidate>>;

/// Verdict of the executability filter on one enumerated query.
struct CandidateVerdict {
    std::string query;  // canonical render
    sparql::QueryForm form;
    bool survived = false;
};

struct QuerySelection {
    sparql::SparqlQuery query;
    std::vector<CandidateVerdict> verdicts;
    bool used_llm = false;  // false when a single survivor short-circuited
};

// --- G-Agent ----------------------------------------------------------------

/// Parse the question into triple mentions. Lines of <a, b, c>; '?'-prefixed
/// fields are variables. One in-band re-ask on unparseable output, then
/// ExtractionFailureError.
std::vector<TripleMention> extract_triplets(AgentContext& ctx, const std::string& question);

/// Generate a SPARQL template whose slots come from the mention texts.
/// Validates: parseable, at least one pattern, slots are a subset of the
/// explicit mention texts, projected variables are bound. One re-ask, then
/// TemplateFailureError.
sparql::SparqlTemplate generate_template(AgentContext& ctx, const std::string& question,
                                         const std::vector<TripleMention>& mentions);

/// Classify the expected answer type. Unrecognized output after a re-ask
/// defaults to Select (a warning is returned through `defaulted`).
AnswerKind classify_answer_type(AgentContext& ctx, const std::string& question,
                                bool* defaulted = nullptr);

// --- D-Agent ----------------------------------------------------------------

/// For each distinct explicit entity mention: pool from the text filter,
/// LLM selection of at most k_entity pool members. Off-pool selections are
/// discarded; if none survive, the top of the pool by filter rank is used.
/// `prior_pools` (from an earlier attempt) are unioned in so pools only
/// widen. Outputs both the offered pool and the selection per mention.
struct SelectionResult {
    CandidateMap pools;
    CandidateMap selected;
};

SelectionResult select_entities(AgentContext& ctx, const std::string& question,
                                const std::vector<TripleMention>& mentions,
                                const CandidateMap* prior_pools = nullptr);

/// For each distinct explicit relation mention: pool from one-hop traversal
/// around the endpoints' candidate entities (label-filter fallback when no
/// endpoint is explicit or traversal yields nothing), then LLM selection of
/// at most k_relation. Predicates connecting both explicit endpoints rank
/// first when connect_boost is on.
SelectionResult select_relations(AgentContext& ctx, const std::string& question,
                                 const std::vector<TripleMention>& mentions,
                                 const CandidateMap& entity_selected,
                                 const CandidateMap* prior_pools = nullptr);

/// Enumerate grounded candidates, keep the executable ones (SELECT non-empty,
/// COUNT positive, ASK always), and pick one: a single survivor returns
/// without an LLM call, otherwise the LLM chooses from the survivor list
/// (off-list reply falls back to the top-ranked survivor). Throws
/// NoFeasibleQueryError when nothing survives; `verdicts_out`, when given,
/// receives the executability verdicts even on that path.
QuerySelection select_query(AgentContext& ctx, const std::string& question,
                            const sparql::SparqlTemplate& tmpl,
                            const CandidateMap& entity_selected,
                            const CandidateMap& relation_selected,
                            std::vector<CandidateVerdict>* verdicts_out = nullptr);

// --- A-Agent ----------------------------------------------------------------

/// With a query: execute it and shape the result to `kind`. Without one:
/// boolean questions get the yes/no fallback prompt, select questions the
/// single-fact prompt, count questions abstain. LLM fallback output that
/// does not parse yields abstain.
Answer answer(AgentContext& ctx, const std::string& question,
              const std::optional<sparql::SparqlQuery>& query, AnswerKind kind);

// --- shared helpers (exposed for tests) --------------------------------------

/// Parse "<a, b, c>" groups out of LLM text.
std::vector<TripleMention> parse_triple_mentions(const std::string& text);

/// Distinct explicit entity mention texts (subjects/objects) in
/// first-appearance order.
std::vector<std::string> explicit_entity_mentions(const std::vector<TripleMention>& mentions);

/// Distinct explicit relation mention texts in first-appearance order.
std::vector<std::string> explicit_relation_mentions(const std::vector<TripleMention>& mentions);

/// Render mentions the way the extraction shots spell them:
/// "<a, b, c> <d, e, f>".
std::string render_mentions(const std::vector<TripleMention>& mentions);

}  // namespace triad::roles
