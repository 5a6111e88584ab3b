#include "triad/pipeline/config.hpp"

#include <fstream>
#include <set>

#include "triad/errors.hpp"

namespace triad::pipeline {

namespace {

using nlohmann::json;

void expect_keys(const json& j, const std::string& path, const std::set<std::string>& known) {
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (!known.count(key)) throw ConfigError(path.empty() ? key : path + "." + key,
                                                 "unknown field");
    }
}

int get_int(const json& j, const std::string& path, const std::string& key, int def) {
    if (!j.contains(key)) return def;
    if (!j[key].is_number_integer()) throw ConfigError(path + key, "expected an integer");
    return j[key].get<int>();
}

double get_number(const json& j, const std::string& path, const std::string& key, double def) {
    if (!j.contains(key)) return def;
    if (!j[key].is_number()) throw ConfigError(path + key, "expected a number");
    return j[key].get<double>();
}

bool get_bool(const json& j, const std::string& path, const std::string& key, bool def) {
    if (!j.contains(key)) return def;
    if (!j[key].is_boolean()) throw ConfigError(path + key, "expected a boolean");
    return j[key].get<bool>();
}

std::string get_string(const json& j, const std::string& path, const std::string& key,
                       const std::string& def) {
    if (!j.contains(key)) return def;
    if (!j[key].is_string()) throw ConfigError(path + key, "expected a string");
    return j[key].get<std::string>();
}

}  // namespace

void EngineConfig::validate() const {
    roles.validate();
    if (backend.kind != "http" && backend.kind != "replay")
        throw ConfigError("backend.kind", "must be \"http\" or \"replay\"");
    if (budget_ms <= 0) throw ConfigError("budget_ms", "must be positive");
    if (max_tokens < 1) throw ConfigError("max_tokens", "must be >= 1");
    if (eval_jobs < 1) throw ConfigError("eval_jobs", "must be >= 1");
    if (retry_temperature < 0) throw ConfigError("retry_temperature", "must be >= 0");
}

EngineConfig config_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigError("<root>", "config must be a JSON object");
    expect_keys(j, "",
                {"kb", "index_snapshot", "backend", "prices", "roles", "label_predicates",
                 "budget_ms", "re_extract_on_final_retry", "retry_temperature", "max_tokens",
                 "eval_jobs"});

    EngineConfig cfg;
    cfg.kb_path = get_string(j, "", "kb", "");
    cfg.index_snapshot = get_string(j, "", "index_snapshot", "");

    if (j.contains("backend")) {
        const auto& b = j["backend"];
        if (!b.is_object()) throw ConfigError("backend", "expected an object");
        expect_keys(b, "backend", {"kind", "model", "base_url", "transcript", "strict_replay"});
        cfg.backend.kind = get_string(b, "backend.", "kind", cfg.backend.kind);
        cfg.backend.model = get_string(b, "backend.", "model", cfg.backend.model);
        cfg.backend.base_url = get_string(b, "backend.", "base_url", "");
        cfg.backend.transcript = get_string(b, "backend.", "transcript", "");
        cfg.backend.strict_replay = get_bool(b, "backend.", "strict_replay", false);
    }

    if (j.contains("prices")) {
        const auto& p = j["prices"];
        if (!p.is_object()) throw ConfigError("prices", "expected an object");
        for (const auto& [model, entry] : p.items()) {
            if (!entry.is_object())
                throw ConfigError("prices." + model, "expected an object");
            expect_keys(entry, "prices." + model,
                        {"prompt_price_per_1k", "completion_price_per_1k"});
            llm::PriceEntry pe;
            pe.prompt_per_1k =
                get_number(entry, "prices." + model + ".", "prompt_price_per_1k", 0.0);
            pe.completion_per_1k =
                get_number(entry, "prices." + model + ".", "completion_price_per_1k", 0.0);
            if (pe.prompt_per_1k < 0 || pe.completion_per_1k < 0)
                throw ConfigError("prices." + model, "prices must be >= 0");
            cfg.prices.put(model, pe);
        }
    }

    if (j.contains("roles")) {
        const auto& r = j["roles"];
        if (!r.is_object()) throw ConfigError("roles", "expected an object");
        expect_keys(r, "roles",
                    {"n_shots", "k_entity", "k_relation", "retries", "filter_pool",
                     "enumeration_cap", "relation_pool_cap", "connect_boost"});
        cfg.roles.n_shots = get_int(r, "roles.", "n_shots", cfg.roles.n_shots);
        cfg.roles.k_entity = get_int(r, "roles.", "k_entity", cfg.roles.k_entity);
        cfg.roles.k_relation = get_int(r, "roles.", "k_relation", cfg.roles.k_relation);
        cfg.roles.retries = get_int(r, "roles.", "retries", cfg.roles.retries);
        cfg.roles.filter_pool = get_int(r, "roles.", "filter_pool", cfg.roles.filter_pool);
        cfg.roles.enumeration_cap =
            get_int(r, "roles.", "enumeration_cap", cfg.roles.enumeration_cap);
        cfg.roles.relation_pool_cap =
            get_int(r, "roles.", "relation_pool_cap", cfg.roles.relation_pool_cap);
        cfg.roles.connect_boost = get_bool(r, "roles.", "connect_boost", cfg.roles.connect_boost);
    }

    if (j.contains("label_predicates")) {
        const auto& l = j["label_predicates"];
        if (!l.is_array()) throw ConfigError("label_predicates", "expected an array of strings");
        cfg.label_predicates.clear();
        for (std::size_t i = 0; i < l.size(); ++i) {
            if (!l[i].is_string())
                throw ConfigError("label_predicates[" + std::to_string(i) + "]",
                                  "expected a string");
            cfg.label_predicates.push_back(l[i].get<std::string>());
        }
    }

    cfg.budget_ms = get_number(j, "", "budget_ms", cfg.budget_ms);
    cfg.re_extract_on_final_retry =
        get_bool(j, "", "re_extract_on_final_retry", cfg.re_extract_on_final_retry);
    cfg.retry_temperature = get_number(j, "", "retry_temperature", cfg.retry_temperature);
    cfg.max_tokens = get_int(j, "", "max_tokens", cfg.max_tokens);
    cfg.eval_jobs = get_int(j, "", "eval_jobs", cfg.eval_jobs);

    cfg.validate();
    return cfg;
}

EngineConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw UserError("cannot open config file: " + path.string());
    auto j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded()) throw ConfigError("<root>", "config is not valid JSON");
    return config_from_json(j);
}

nlohmann::json config_snapshot(const EngineConfig& cfg) {
    nlohmann::json prices = nlohmann::json::object();
    for (const auto& [model, entry] : cfg.prices.entries())
        prices[model] = {{"prompt_price_per_1k", entry.prompt_per_1k},
                         {"completion_price_per_1k", entry.completion_per_1k}};
    return nlohmann::json{
        {"kb", cfg.kb_path},
        {"index_snapshot", cfg.index_snapshot},
        {"backend",
         {{"kind", cfg.backend.kind},
          {"model", cfg.backend.model},
          {"base_url", cfg.backend.base_url},
          {"transcript", cfg.backend.transcript},
          {"strict_replay", cfg.backend.strict_replay}}},
        {"prices", prices},
        {"roles",
         {{"n_shots", cfg.roles.n_shots},
          {"k_entity", cfg.roles.k_entity},
          {"k_relation", cfg.roles.k_relation},
          {"retries", cfg.roles.retries},
          {"filter_pool", cfg.roles.filter_pool},
          {"enumeration_cap", cfg.roles.enumeration_cap},
          {"relation_pool_cap", cfg.roles.relation_pool_cap},
          {"connect_boost", cfg.roles.connect_boost}}},
        {"label_predicates", cfg.label_predicates},
        {"budget_ms", cfg.budget_ms},
        {"re_extract_on_final_retry", cfg.re_extract_on_final_retry},
        {"retry_temperature", cfg.retry_temperature},
        {"max_tokens", cfg.max_tokens},
        {"eval_jobs", cfg.eval_jobs},
    };
}

}  // namespace triad::pipeline
