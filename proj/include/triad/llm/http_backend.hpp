#pragma once

#include <string>

#include "triad/llm/backend.hpp"

namespace triad::llm {

/// Chat-completion HTTP backend: POST {base_url}/v1/chat/completions with
/// {model, messages, temperature, max_tokens}; reads
/// choices[0].message.content and usage token counts.
struct HttpBackendConfig {
    std::string base_url;  // e.g. "https://api.openai.com" or "http://127.0.0.1:8089/proxy"
    std::string api_key;   // sent as "Authorization: Bearer ..." when non-empty
    int timeout_seconds = 60;
    int max_attempts = 3;          // 429/5xx and transport errors are retried
    int backoff_base_ms = 500;     // doubled per attempt, Retry-After wins
    int backoff_cap_ms = 8000;
};

class HttpBackend : public Backend {
public:
    explicit HttpBackend(HttpBackendConfig config);

    LlmResponse complete(const LlmRequest& request) override;
    std::string kind() const override { return "http"; }

    /// Reads TRIAD_LLM_BASE_URL / TRIAD_LLM_API_KEY, with `base_url_fallback`
    /// used when the environment does not set one.
    static HttpBackendConfig config_from_env(const std::string& base_url_fallback = "");

private:
    HttpBackendConfig config_;
    std::string host_;         // scheme://host[:port]
    std::string path_prefix_;  // path part of base_url, no trailing '/'
};

}  // namespace triad::llm
