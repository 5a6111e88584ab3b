#pragma once

#include <map>
#include <string>
#include <vector>

#include "triad/llm/backend.hpp"
#include "triad/llm/prompt.hpp"

namespace triad::llm {

/// Pipeline phase a call belongs to: question parsing, URI linking, query
/// construction, answer generation.
enum class Phase { QP, UL, QC, AG };

const char* phase_name(Phase p);

struct CallRecord {
    std::string subtask;
    std::string prompt_sha256;
    long long prompt_tokens = 0;
    long long completion_tokens = 0;
    double latency_ms = 0.0;
    int attempt = 0;
    Phase phase = Phase::QP;
};

struct PriceEntry {
    double prompt_per_1k = 0.0;
    double completion_per_1k = 0.0;
};

/// Per-model token prices. cost = (pt * prompt_per_1k + ct * completion_per_1k) / 1000.
class PriceTable {
public:
    void put(const std::string& model, PriceEntry entry) { models_[model] = entry; }
    PriceEntry get(const std::string& model) const {
        auto it = models_.find(model);
        return it == models_.end() ? PriceEntry{} : it->second;
    }
    double cost(const std::string& model, long long prompt_tokens,
                long long completion_tokens) const {
        PriceEntry e = get(model);
        return (static_cast<double>(prompt_tokens) * e.prompt_per_1k +
                static_cast<double>(completion_tokens) * e.completion_per_1k) /
               1000.0;
    }
    const std::map<std::string, PriceEntry>& entries() const { return models_; }

private:
    std::map<std::string, PriceEntry> models_;
};

/// Per-run front door to the backend: renders a template, issues the call,
/// and logs it under the current (attempt, phase) context. One gateway per
/// pipeline run; not shared across threads.
class Gateway {
public:
    Gateway(Backend& backend, const PromptLibrary& prompts, std::string model,
            int max_tokens = 512);

    /// n_shots is clamped to the template's available shots.
    LlmResponse call(const std::string& template_id,
                     const std::map<std::string, std::string>& vars, std::size_t n_shots,
                     double temperature);

    void set_context(int attempt, Phase phase) {
        attempt_ = attempt;
        phase_ = phase;
    }

    const std::vector<CallRecord>& calls() const { return calls_; }
    std::size_t call_count() const { return calls_.size(); }
    long long total_prompt_tokens() const;
    long long total_completion_tokens() const;
    const std::string& model() const { return model_; }
    const PromptLibrary& prompts() const { return prompts_; }

private:
    Backend& backend_;
    const PromptLibrary& prompts_;
    std::string model_;
    int max_tokens_;
    int attempt_ = 0;
    Phase phase_ = Phase::QP;
    std::vector<CallRecord> calls_;
};

}  // namespace triad::llm
