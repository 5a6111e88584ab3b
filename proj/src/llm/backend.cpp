#include "triad/llm/backend.hpp"

#include <openssl/evp.h>

#include <nlohmann/json.hpp>

#include "triad/errors.hpp"

namespace triad::llm {

std::string sha256_hex(std::string_view data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw Error("sha256 digest failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 0xF];
    }
    return out;
}

long long approx_tokens(std::string_view text) {
    if (text.empty()) return 0;
    return static_cast<long long>((text.size() + 3) / 4);
}

std::string TranscriptRecord::to_jsonl() const {
    nlohmann::json j{{"subtask", subtask},
                     {"prompt_sha256", prompt_sha256},
                     {"prompt", prompt},
                     {"response", response},
                     {"prompt_tokens", prompt_tokens},
                     {"completion_tokens", completion_tokens},
                     {"latency_ms", latency_ms}};
    return j.dump();
}

TranscriptRecord TranscriptRecord::from_jsonl(const std::string& line) {
    auto j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw UserError("malformed transcript record");
    for (const char* field :
         {"subtask", "prompt_sha256", "prompt", "response", "prompt_tokens",
          "completion_tokens", "latency_ms"}) {
        if (!j.contains(field))
            throw UserError(std::string("transcript record misses field '") + field + "'");
    }
    TranscriptRecord rec;
    rec.subtask = j["subtask"].get<std::string>();
    rec.prompt_sha256 = j["prompt_sha256"].get<std::string>();
    rec.prompt = j["prompt"].get<std::string>();
    rec.response = j["response"].get<std::string>();
    rec.prompt_tokens = j["prompt_tokens"].get<long long>();
    rec.completion_tokens = j["completion_tokens"].get<long long>();
    rec.latency_ms = j["latency_ms"].get<double>();
    return rec;
}

Transcript Transcript::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InfraError("cannot open transcript: " + path.string());
    Transcript t;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            t.append(TranscriptRecord::from_jsonl(line));
        } catch (const UserError& e) {
            throw UserError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return t;
}

void Transcript::save(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) throw InfraError("cannot write transcript: " + path.string());
    for (const auto& rec : records_) out << rec.to_jsonl() << '\n';
}

ReplayBackend::ReplayBackend(Transcript transcript, bool strict)
    : transcript_(std::move(transcript)), consumed_(transcript_.size(), false), strict_(strict) {}

ReplayBackend ReplayBackend::from_file(const std::filesystem::path& path, bool strict) {
    return ReplayBackend(Transcript::load(path), strict);
}

LlmResponse ReplayBackend::complete(const LlmRequest& request) {
    const std::string hash = sha256_hex(request.prompt);
    std::lock_guard<std::mutex> lock(mutex_);
    const auto& records = transcript_.records();

    auto take = [&](std::size_t i) {
        consumed_[i] = true;
        const auto& rec = records[i];
        return LlmResponse{rec.response, rec.prompt_tokens, rec.completion_tokens,
                           rec.latency_ms};
    };

    for (std::size_t i = 0; i < records.size(); ++i)
        if (!consumed_[i] && records[i].prompt_sha256 == hash) return take(i);
    if (!strict_) {
        for (std::size_t i = 0; i < records.size(); ++i)
            if (!consumed_[i] && records[i].subtask == request.subtask) return take(i);
    }
    throw ReplayMissError("no transcript record for subtask '" + request.subtask +
                          "' (prompt sha256 " + hash.substr(0, 12) + "...)");
}

std::size_t ReplayBackend::remaining() const {
    std::lock_guard<std::mutex> lock(mutex_);
    std::size_t n = 0;
    for (bool c : consumed_)
        if (!c) ++n;
    return n;
}

RecordingBackend::RecordingBackend(Backend& inner, const std::filesystem::path& sink)
    : inner_(inner), sink_path_(sink), sink_(sink, std::ios::out | std::ios::trunc) {
    if (!sink_) throw InfraError("cannot open transcript sink: " + sink.string());
    sink_.flush();
}

LlmResponse RecordingBackend::complete(const LlmRequest& request) {
    LlmResponse resp = inner_.complete(request);
    TranscriptRecord rec{request.subtask,  sha256_hex(request.prompt),
                         request.prompt,   resp.text,
                         resp.prompt_tokens, resp.completion_tokens,
                         resp.latency_ms};
    {
        std::lock_guard<std::mutex> lock(mutex_);
        sink_ << rec.to_jsonl() << '\n';
        sink_.flush();
        if (!sink_) throw InfraError("transcript sink write failed: " + sink_path_.string());
    }
    return resp;
}

void ScriptedBackend::push(const std::string& subtask, std::string reply) {
    std::lock_guard<std::mutex> lock(mutex_);
    queues_[subtask].push_back(std::move(reply));
}

void ScriptedBackend::set_fallback(const std::string& subtask, std::string reply) {
    std::lock_guard<std::mutex> lock(mutex_);
    fallback_[subtask] = std::move(reply);
}

LlmResponse ScriptedBackend::complete(const LlmRequest& request) {
    std::string reply;
    {
        std::lock_guard<std::mutex> lock(mutex_);
        auto it = queues_.find(request.subtask);
        if (it != queues_.end() && !it->second.empty()) {
            reply = std::move(it->second.front());
            it->second.pop_front();
        } else if (auto fb = fallback_.find(request.subtask); fb != fallback_.end()) {
            reply = fb->second;
        } else {
            throw Error("scripted backend has no reply for subtask '" + request.subtask + "'");
        }
    }
    LlmResponse resp;
    resp.text = std::move(reply);
    resp.prompt_tokens = approx_tokens(request.prompt);
    resp.completion_tokens = approx_tokens(resp.text);
    resp.latency_ms = 5.0;
    return resp;
}

}  // namespace triad::llm
