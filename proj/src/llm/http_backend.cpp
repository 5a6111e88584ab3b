#include "triad/llm/http_backend.hpp"

#include <chrono>
#include <cstdlib>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "triad/errors.hpp"

namespace triad::llm {

namespace {

bool retryable_status(int status) {
    return status == 429 || status == 500 || status == 502 || status == 503 || status == 504;
}

}  // namespace

HttpBackend::HttpBackend(HttpBackendConfig config) : config_(std::move(config)) {
    const std::string& url = config_.base_url;
    auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos)
        throw UserError("backend base_url must include a scheme: " + url);
    auto path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) {
        host_ = url;
    } else {
        host_ = url.substr(0, path_start);
        path_prefix_ = url.substr(path_start);
        while (!path_prefix_.empty() && path_prefix_.back() == '/') path_prefix_.pop_back();
    }
}

HttpBackendConfig HttpBackend::config_from_env(const std::string& base_url_fallback) {
    HttpBackendConfig cfg;
    const char* base = std::getenv("TRIAD_LLM_BASE_URL");
    cfg.base_url = base && *base ? base : base_url_fallback;
    const char* key = std::getenv("TRIAD_LLM_API_KEY");
    cfg.api_key = key ? key : "";
    return cfg;
}

LlmResponse HttpBackend::complete(const LlmRequest& request) {
    nlohmann::json body{
        {"model", request.model},
        {"messages", nlohmann::json::array({{{"role", "user"}, {"content", request.prompt}}})},
        {"temperature", request.temperature},
        {"max_tokens", request.max_tokens},
    };
    const std::string payload = body.dump();
    const std::string path = path_prefix_ + "/v1/chat/completions";

    httplib::Headers headers;
    if (!config_.api_key.empty())
        headers.emplace("Authorization", "Bearer " + config_.api_key);

    std::string last_error = "no attempt made";
    for (int attempt = 1; attempt <= config_.max_attempts; ++attempt) {
        httplib::Client client(host_);
        client.set_connection_timeout(config_.timeout_seconds, 0);
        client.set_read_timeout(config_.timeout_seconds, 0);

        auto t0 = std::chrono::steady_clock::now();
        auto res = client.Post(path, headers, payload, "application/json");
        auto elapsed_ms = std::chrono::duration<double, std::milli>(
                              std::chrono::steady_clock::now() - t0)
                              .count();

        double retry_after_s = 0.0;
        if (!res) {
            last_error = "transport failure: " + httplib::to_string(res.error());
        } else if (res->status == 200) {
            auto j = nlohmann::json::parse(res->body, nullptr, false);
            if (j.is_discarded())
                throw TransportError("backend returned unparseable JSON");
            LlmResponse out;
            try {
                out.text = j.at("choices").at(0).at("message").at("content").get<std::string>();
            } catch (const nlohmann::json::exception&) {
                throw TransportError("backend response misses choices[0].message.content");
            }
            if (j.contains("usage")) {
                out.prompt_tokens = j["usage"].value("prompt_tokens", 0LL);
                out.completion_tokens = j["usage"].value("completion_tokens", 0LL);
            } else {
                out.prompt_tokens = approx_tokens(request.prompt);
                out.completion_tokens = approx_tokens(out.text);
            }
            out.latency_ms = elapsed_ms;
            return out;
        } else if (retryable_status(res->status)) {
            last_error = "HTTP " + std::to_string(res->status);
            if (res->has_header("Retry-After"))
                retry_after_s = std::atof(res->get_header_value("Retry-After").c_str());
        } else {
            throw TransportError("HTTP " + std::to_string(res->status) + ": " + res->body);
        }

        if (attempt < config_.max_attempts) {
            long long wait_ms = config_.backoff_base_ms * (1LL << (attempt - 1));
            if (wait_ms > config_.backoff_cap_ms) wait_ms = config_.backoff_cap_ms;
            if (retry_after_s > 0.0)
                wait_ms = static_cast<long long>(retry_after_s * 1000.0);
            std::this_thread::sleep_for(std::chrono::milliseconds(wait_ms));
        }
    }
    throw TransportError("backend unavailable after " + std::to_string(config_.max_attempts) +
                         " attempts (" + last_error + ")");
}

}  // namespace triad::llm
