#include "triad/llm/gateway.hpp"

#include <algorithm>

namespace triad::llm {

const char* phase_name(Phase p) {
    switch (p) {
        case Phase::QP: return "QP";
        case Phase::UL: return "UL";
        case Phase::QC: return "QC";
        case Phase::AG: return "AG";
    }
    return "?";
}

Gateway::Gateway(Backend& backend, const PromptLibrary& prompts, std::string model,
                 int max_tokens)
    : backend_(backend), prompts_(prompts), model_(std::move(model)), max_tokens_(max_tokens) {}

LlmResponse Gateway::call(const std::string& template_id,
                          const std::map<std::string, std::string>& vars, std::size_t n_shots,
                          double temperature) {
    const PromptTemplate& t = prompts_.get(template_id);
    const std::size_t effective_shots = std::min(n_shots, t.shots.size());
    LlmRequest req;
    req.subtask = template_id;
    req.prompt = render_prompt(t, vars, effective_shots);
    req.model = model_;
    req.temperature = temperature;
    req.max_tokens = max_tokens_;

    LlmResponse resp = backend_.complete(req);
    calls_.push_back(CallRecord{template_id, sha256_hex(req.prompt), resp.prompt_tokens,
                                resp.completion_tokens, resp.latency_ms, attempt_, phase_});
    return resp;
}

long long Gateway::total_prompt_tokens() const {
    long long n = 0;
    for (const auto& c : calls_) n += c.prompt_tokens;
    return n;
}

long long Gateway::total_completion_tokens() const {
    long long n = 0;
    for (const auto& c : calls_) n += c.completion_tokens;
    return n;
}

}  // namespace triad::llm
