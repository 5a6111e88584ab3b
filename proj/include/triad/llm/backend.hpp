#pragma once

#include <cstdint>
#include <deque>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

namespace triad::llm {

struct LlmRequest {
    std::string subtask;  // prompt template id
    std::string prompt;
    std::string model;
    double temperature = 0.0;
    int max_tokens = 512;
};

struct LlmResponse {
    std::string text;  // may be empty; callers must cope
    long long prompt_tokens = 0;
    long long completion_tokens = 0;
    double latency_ms = 0.0;
};

class Backend {
public:
    virtual ~Backend() = default;
    virtual LlmResponse complete(const LlmRequest& request) = 0;
    virtual std::string kind() const = 0;
};

std::string sha256_hex(std::string_view data);

/// Rough token estimate (~4 bytes per token) for fixtures authored offline.
long long approx_tokens(std::string_view text);

/// One persisted LLM call. JSONL fields: subtask, prompt_sha256, prompt,
/// response, prompt_tokens, completion_tokens, latency_ms.
struct TranscriptRecord {
    std::string subtask;
    std::string prompt_sha256;
    std::string prompt;
    std::string response;
    long long prompt_tokens = 0;
    long long completion_tokens = 0;
    double latency_ms = 0.0;

    std::string to_jsonl() const;
    static TranscriptRecord from_jsonl(const std::string& line);
};

class Transcript {
public:
    Transcript() = default;

    /// Missing file is an infrastructure error; malformed content a user error.
    static Transcript load(const std::filesystem::path& path);

    void append(TranscriptRecord rec) { records_.push_back(std::move(rec)); }
    const std::vector<TranscriptRecord>& records() const { return records_; }
    std::size_t size() const { return records_.size(); }
    void save(const std::filesystem::path& path) const;

private:
    std::vector<TranscriptRecord> records_;
};

/// Deterministic offline backend: answers from a loaded transcript. Primary
/// key is the rendered prompt's sha256; unless strict, an unconsumed record
/// with the same subtask id serves as fallback. Each record is consumed once.
class ReplayBackend : public Backend {
public:
    explicit ReplayBackend(Transcript transcript, bool strict = false);
    static ReplayBackend from_file(const std::filesystem::path& path, bool strict = false);

    LlmResponse complete(const LlmRequest& request) override;
    std::string kind() const override { return "replay"; }

    std::size_t remaining() const;

private:
    mutable std::mutex mutex_;
    Transcript transcript_;
    std::vector<bool> consumed_;
    bool strict_;
};

/// Wraps any backend and persists every call to a JSONL sink before
/// returning. Appends are serialized and flushed per call.
class RecordingBackend : public Backend {
public:
    RecordingBackend(Backend& inner, const std::filesystem::path& sink);

    LlmResponse complete(const LlmRequest& request) override;
    std::string kind() const override { return "record(" + inner_.kind() + ")"; }

private:
    Backend& inner_;
    std::filesystem::path sink_path_;
    std::ofstream sink_;
    std::mutex mutex_;
};

/// Fixture-authoring backend: canned replies per subtask, consumed in order,
/// with an optional per-subtask fallback reply. Token counts are filled with
/// plausible estimates so cost accounting is exercised offline.
class ScriptedBackend : public Backend {
public:
    void push(const std::string& subtask, std::string reply);
    /// Reply used whenever the subtask's queue is empty.
    void set_fallback(const std::string& subtask, std::string reply);

    LlmResponse complete(const LlmRequest& request) override;
    std::string kind() const override { return "scripted"; }

private:
    std::mutex mutex_;
    std::map<std::string, std::deque<std::string>> queues_;
    std::map<std::string, std::string> fallback_;
};

}  // namespace triad::llm
