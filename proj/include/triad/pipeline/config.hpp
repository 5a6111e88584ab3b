#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "triad/llm/gateway.hpp"
#include "triad/roles/types.hpp"

namespace triad::pipeline {

struct BackendSpec {
    std::string kind = "http";  // "http" or "replay"
    std::string model = "gpt-4";
    std::string base_url;        // http; TRIAD_LLM_BASE_URL overrides
    std::string transcript;      // replay: transcript file
    bool strict_replay = false;  // replay: require exact prompt-hash matches
};

/// Main configuration: KB location, backend wiring, prices, role
/// hyperparameters, and pipeline policy knobs. Absent fields keep their
/// defaults; malformed fields raise ConfigError with the field path.
struct EngineConfig {
    std::string kb_path;
    std::string index_snapshot;
    BackendSpec backend;
    llm::PriceTable prices;
    roles::RoleConfig roles;
    std::vector<std::string> label_predicates = {
        "http://www.w3.org/2000/01/rdf-schema#label"};
    double budget_ms = 120000.0;
    bool re_extract_on_final_retry = true;
    double retry_temperature = 0.7;
    int max_tokens = 512;
    int eval_jobs = 1;

    void validate() const;
};

EngineConfig config_from_json(const nlohmann::json& j);
EngineConfig load_config(const std::filesystem::path& path);

/// Deterministic snapshot of the effective configuration for reports.
nlohmann::json config_snapshot(const EngineConfig& cfg);

}  // namespace triad::pipeline
