#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "triad/pipeline/pipeline.hpp"

namespace triad::eval {

/// One benchmark question with its gold payload. `gold_kind` mirrors the
/// JSON type of gold_answers (array / boolean / number).
struct BenchmarkItem {
    enum class GoldKind { Set, Boolean, Number };

    std::string id;
    std::string question;
    std::optional<roles::AnswerKind> answer_type;
    GoldKind gold_kind = GoldKind::Set;
    std::set<std::string> gold_values;
    bool gold_boolean = false;
    double gold_number = 0.0;
    std::optional<std::string> gold_sparql;
    std::optional<std::set<std::string>> gold_uris;  // for linking recall
};

/// JSON schema: array of {id, question, answer_type?, gold_answers,
/// gold_sparql?, gold_uris?}. Duplicate ids and type disagreements are
/// rejected with the item index in the message.
std::vector<BenchmarkItem> load_benchmark(const std::filesystem::path& path);
std::vector<BenchmarkItem> benchmark_from_json(const nlohmann::json& j);

struct Score {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

/// Case-insensitive comparison for plain strings, verbatim for URIs, by
/// value for numbers; a literal matches a URI when it equals one of the
/// URI's KB labels.
std::string normalize_answer(const std::string& s);
bool answers_match(const std::string& a, const std::string& b, const kb::KbStore* store);

/// Set answers: P = |pred n gold| / |pred|, R = |pred n gold| / |gold|.
/// Boolean / count: exact match. Abstain counts as an empty prediction;
/// empty vs non-empty scores zero, empty vs empty scores one.
Score score(const roles::Answer& predicted, const BenchmarkItem& gold,
            const kb::KbStore* store = nullptr);

struct ItemReport {
    std::string id;
    Score s;
    double matched = 0.0;  // raw match counts, pooled by micro averaging
    double n_pred = 0.0;
    double n_gold = 0.0;
    double cost = 0.0;
    long long prompt_tokens = 0;
    long long completion_tokens = 0;
    int attempts = 0;
    std::map<std::string, double> phase_ms;
    std::optional<double> recall_after_filter;
    std::optional<double> recall_after_selection;
    std::string answer_text;
    std::string provenance;
    std::string error;  // infrastructure failure note; item scored zero
};

struct RunReport {
    std::vector<ItemReport> items;
    Score macro;
    std::optional<Score> micro;
    double cost_total = 0.0;
    long long prompt_tokens = 0;
    long long completion_tokens = 0;
    std::map<std::string, double> phase_ms_mean;
    std::optional<double> linking_recall_after_filter;
    std::optional<double> linking_recall_after_selection;
    std::size_t linking_items = 0;
};

struct EvalReport {
    nlohmann::json config;
    std::vector<RunReport> runs;
    Score macro_mean_of_runs;

    nlohmann::json to_json() const;
    std::string to_table() const;
};

struct EvalOptions {
    int repeat = 1;
    int jobs = 1;
    bool micro = false;
};

/// Per-item backend factory (replay directories hand every item its own
/// transcript). Throwing factories mark the item as errored.
using BackendFactory =
    std::function<std::unique_ptr<llm::Backend>(const BenchmarkItem&, int run)>;

struct EvalDeps {
    const kb::KbStore& store;
    const index::MentionIndex& index;
    const llm::PromptLibrary& prompts;
    BackendFactory backend_factory;
};

/// Run every item through the pipeline and aggregate macro scores, cost,
/// latency, and linking recall. Per-item failures never abort the batch.
EvalReport evaluate(const std::vector<BenchmarkItem>& benchmark, const EvalDeps& deps,
                    const pipeline::EngineConfig& cfg, const EvalOptions& opts = {});

}  // namespace triad::eval
