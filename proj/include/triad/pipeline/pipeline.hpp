#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "triad/index/mention_index.hpp"
#include "triad/kb/store.hpp"
#include "triad/llm/backend.hpp"
#include "triad/llm/gateway.hpp"
#include "triad/pipeline/config.hpp"
#include "triad/roles/agents.hpp"

namespace triad::pipeline {

/// What one attempt did: offered pools, selections, template, candidate
/// verdicts, chosen query, and which gateway calls it made.
struct AttemptTrace {
    int index = 0;
    std::string error;  // empty on success
    roles::CandidateMap entity_pools;
    roles::CandidateMap entity_selected;
    roles::CandidateMap relation_pools;
    roles::CandidateMap relation_selected;
    std::string template_text;
    std::vector<roles::CandidateVerdict> candidates;
    std::string final_query;
    std::vector<std::size_t> call_indices;  // into PipelineResult::llm_calls
};

/// Full per-question trace: every intermediate subtask output, the final
/// answer, per-phase latency, and token/cost totals.
struct PipelineResult {
    std::string question;
    std::vector<roles::TripleMention> mentions;
    roles::AnswerKind answer_type = roles::AnswerKind::Select;
    bool type_defaulted = false;
    std::vector<AttemptTrace> attempts;
    std::vector<llm::CallRecord> llm_calls;
    roles::Answer answer;
    std::map<std::string, double> phase_ms;  // "QP" / "UL" / "QC" / "AG"
    double total_ms = 0.0;
    long long prompt_tokens = 0;
    long long completion_tokens = 0;
    double cost = 0.0;
    /// Union across attempts of offered / LLM-kept URIs (entities and
    /// relations), for linking-recall instrumentation.
    std::set<std::string> offered_uris;
    std::set<std::string> selected_uris;

    nlohmann::json to_json() const;
};

struct PipelineDeps {
    const kb::KbStore& store;
    const index::MentionIndex& index;
    llm::Backend& backend;
    const llm::PromptLibrary& prompts;
};

/// Run the four-phase pipeline for one question. Method-level failures retry
/// with widened pools and finally degrade to the typed LLM fallback; only
/// infrastructure errors escape.
PipelineResult run(const std::string& question, const PipelineDeps& deps,
                   const EngineConfig& cfg);

}  // namespace triad::pipeline
