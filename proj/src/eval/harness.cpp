#include "triad/eval/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <thread>

#include "triad/detail/text.hpp"
#include "triad/errors.hpp"

namespace triad::eval {

namespace {

using nlohmann::json;

roles::AnswerKind kind_from_benchmark_string(const std::string& s, const std::string& where) {
    try {
        return roles::answer_kind_from_name(s);
    } catch (const Error&) {
        throw BenchmarkError(where + ": answer_type must be \"select\", \"count\" or "
                             "\"yes or no\"");
    }
}

}  // namespace

std::vector<BenchmarkItem> benchmark_from_json(const json& j) {
    if (!j.is_array()) throw BenchmarkError("benchmark must be a JSON array");
    std::vector<BenchmarkItem> out;
    std::set<std::string> ids;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const std::string where = "item[" + std::to_string(i) + "]";
        const auto& e = j[i];
        if (!e.is_object()) throw BenchmarkError(where + ": expected an object");
        BenchmarkItem item;
        if (!e.contains("id") || !e["id"].is_string())
            throw BenchmarkError(where + ": missing string field 'id'");
        item.id = e["id"].get<std::string>();
        if (!ids.insert(item.id).second)
            throw BenchmarkError(where + ": duplicate id '" + item.id + "'");
        if (!e.contains("question") || !e["question"].is_string())
            throw BenchmarkError(where + ": missing string field 'question'");
        item.question = e["question"].get<std::string>();

        if (e.contains("answer_type")) {
            if (!e["answer_type"].is_string())
                throw BenchmarkError(where + ": answer_type must be a string");
            item.answer_type =
                kind_from_benchmark_string(e["answer_type"].get<std::string>(), where);
        }

        if (!e.contains("gold_answers"))
            throw BenchmarkError(where + ": missing field 'gold_answers'");
        const auto& gold = e["gold_answers"];
        if (gold.is_array()) {
            item.gold_kind = BenchmarkItem::GoldKind::Set;
            for (const auto& v : gold) {
                if (v.is_string())
                    item.gold_values.insert(v.get<std::string>());
                else if (v.is_number())
                    item.gold_values.insert(v.dump());
                else
                    throw BenchmarkError(where + ": gold_answers entries must be strings");
            }
        } else if (gold.is_boolean()) {
            item.gold_kind = BenchmarkItem::GoldKind::Boolean;
            item.gold_boolean = gold.get<bool>();
        } else if (gold.is_number()) {
            item.gold_kind = BenchmarkItem::GoldKind::Number;
            item.gold_number = gold.get<double>();
        } else {
            throw BenchmarkError(where + ": gold_answers must be an array, boolean or number");
        }

        // declared type must agree with the gold payload
        if (item.answer_type) {
            const bool ok =
                (*item.answer_type == roles::AnswerKind::Select &&
                 item.gold_kind == BenchmarkItem::GoldKind::Set) ||
                (*item.answer_type == roles::AnswerKind::Boolean &&
                 item.gold_kind == BenchmarkItem::GoldKind::Boolean) ||
                (*item.answer_type == roles::AnswerKind::Count &&
                 item.gold_kind == BenchmarkItem::GoldKind::Number);
            if (!ok)
                throw BenchmarkError(where + ": gold_answers type disagrees with answer_type");
        }

        if (e.contains("gold_sparql")) {
            if (!e["gold_sparql"].is_string())
                throw BenchmarkError(where + ": gold_sparql must be a string");
            item.gold_sparql = e["gold_sparql"].get<std::string>();
        }
        if (e.contains("gold_uris")) {
            if (!e["gold_uris"].is_array())
                throw BenchmarkError(where + ": gold_uris must be an array");
            std::set<std::string> uris;
            for (const auto& v : e["gold_uris"]) {
                if (!v.is_string())
                    throw BenchmarkError(where + ": gold_uris entries must be strings");
                uris.insert(v.get<std::string>());
            }
            item.gold_uris = std::move(uris);
        }
        out.push_back(std::move(item));
    }
    return out;
}

std::vector<BenchmarkItem> load_benchmark(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw UserError("cannot open benchmark file: " + path.string());
    auto j = json::parse(in, nullptr, false);
    if (j.is_discarded()) throw BenchmarkError("benchmark is not valid JSON: " + path.string());
    return benchmark_from_json(j);
}

std::string normalize_answer(const std::string& s) {
    if (s.find("://") != std::string::npos) return s;  // URIs compared verbatim
    // trim + lowercase
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return detail::to_lower(s.substr(b, e - b));
}

namespace {

std::optional<double> as_number(const std::string& s) {
    if (s.empty()) return std::nullopt;
    char* end = nullptr;
    double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size()) return std::nullopt;
    return v;
}

bool label_matches(const std::string& uri, const std::string& text, const kb::KbStore* store) {
    if (!store) return false;
    const auto* labels = store->labels_of(uri);
    if (!labels) return false;
    const std::string norm_text = normalize_answer(text);
    for (const auto& label : *labels)
        if (normalize_answer(label) == norm_text) return true;
    return false;
}

}  // namespace

bool answers_match(const std::string& a, const std::string& b, const kb::KbStore* store) {
    const std::string na = normalize_answer(a);
    const std::string nb = normalize_answer(b);
    if (na == nb) return true;
    auto va = as_number(na), vb = as_number(nb);
    if (va && vb && *va == *vb) return true;
    const bool a_uri = a.find("://") != std::string::npos;
    const bool b_uri = b.find("://") != std::string::npos;
    if (a_uri && !b_uri && label_matches(a, b, store)) return true;
    if (b_uri && !a_uri && label_matches(b, a, store)) return true;
    return false;
}

namespace {

Score from_counts(double matched, double n_pred, double n_gold) {
    Score s;
    if (n_pred == 0.0 && n_gold == 0.0) return Score{1.0, 1.0, 1.0};
    if (n_pred == 0.0 || n_gold == 0.0) return Score{0.0, 0.0, 0.0};
    s.precision = matched / n_pred;
    s.recall = matched / n_gold;
    s.f1 = (s.precision + s.recall) > 0.0
               ? 2.0 * s.precision * s.recall / (s.precision + s.recall)
               : 0.0;
    return s;
}

std::set<std::string> predicted_as_set(const roles::Answer& a) {
    if (a.is_abstain()) return {};
    switch (a.kind) {
        case roles::AnswerKind::Select: return a.values;
        case roles::AnswerKind::Count: return {std::to_string(a.count)};
        case roles::AnswerKind::Boolean: return {a.boolean ? "true" : "false"};
    }
    return {};
}

/// (matched, |pred|, |gold|) under the match relation; greedy one-to-one.
std::tuple<double, double, double> set_counts(const std::set<std::string>& pred,
                                              const std::set<std::string>& gold,
                                              const kb::KbStore* store) {
    std::vector<const std::string*> unused;
    for (const auto& p : pred) unused.push_back(&p);
    double matched = 0.0;
    for (const auto& g : gold) {
        for (auto it = unused.begin(); it != unused.end(); ++it) {
            if (answers_match(**it, g, store)) {
                matched += 1.0;
                unused.erase(it);
                break;
            }
        }
    }
    return {matched, static_cast<double>(pred.size()), static_cast<double>(gold.size())};
}

std::tuple<double, double, double> item_counts(const roles::Answer& predicted,
                                               const BenchmarkItem& gold,
                                               const kb::KbStore* store) {
    switch (gold.gold_kind) {
        case BenchmarkItem::GoldKind::Set:
            return set_counts(predicted_as_set(predicted), gold.gold_values, store);
        case BenchmarkItem::GoldKind::Boolean: {
            const bool hit = !predicted.is_abstain() &&
                             predicted.kind == roles::AnswerKind::Boolean &&
                             predicted.boolean == gold.gold_boolean;
            return {hit ? 1.0 : 0.0, predicted.is_abstain() ? 0.0 : 1.0, 1.0};
        }
        case BenchmarkItem::GoldKind::Number: {
            bool hit = false;
            if (!predicted.is_abstain()) {
                if (predicted.kind == roles::AnswerKind::Count) {
                    hit = static_cast<double>(predicted.count) == gold.gold_number;
                } else if (predicted.kind == roles::AnswerKind::Select &&
                           predicted.values.size() == 1) {
                    auto v = as_number(normalize_answer(*predicted.values.begin()));
                    hit = v && *v == gold.gold_number;
                }
            }
            return {hit ? 1.0 : 0.0, predicted.is_abstain() ? 0.0 : 1.0, 1.0};
        }
    }
    return {0.0, 0.0, 0.0};
}

}  // namespace

Score score(const roles::Answer& predicted, const BenchmarkItem& gold, const kb::KbStore* store) {
    auto [matched, n_pred, n_gold] = item_counts(predicted, gold, store);
    // boolean/count misses score zero even though a prediction was made
    if (gold.gold_kind != BenchmarkItem::GoldKind::Set && n_pred > 0.0 && matched == 0.0)
        return Score{0.0, 0.0, 0.0};
    return from_counts(matched, n_pred, n_gold);
}

namespace {

ItemReport run_item(const BenchmarkItem& item, const EvalDeps& deps,
                    const pipeline::EngineConfig& cfg, int run) {
    ItemReport rep;
    rep.id = item.id;
    try {
        auto backend = deps.backend_factory(item, run);
        if (!backend) throw InfraError("backend factory returned null");
        pipeline::PipelineDeps pd{deps.store, deps.index, *backend, deps.prompts};
        auto result = pipeline::run(item.question, pd, cfg);
        rep.s = score(result.answer, item, &deps.store);
        std::tie(rep.matched, rep.n_pred, rep.n_gold) =
            item_counts(result.answer, item, &deps.store);
        rep.cost = result.cost;
        rep.prompt_tokens = result.prompt_tokens;
        rep.completion_tokens = result.completion_tokens;
        rep.attempts = static_cast<int>(result.attempts.size());
        rep.phase_ms = result.phase_ms;
        rep.answer_text = result.answer.printable();
        rep.provenance = roles::provenance_name(result.answer.provenance);
        if (item.gold_uris && !item.gold_uris->empty()) {
            auto fraction = [&](const std::set<std::string>& kept) {
                double hit = 0.0;
                for (const auto& g : *item.gold_uris)
                    if (kept.count(g)) hit += 1.0;
                return hit / static_cast<double>(item.gold_uris->size());
            };
            rep.recall_after_filter = fraction(result.offered_uris);
            rep.recall_after_selection = fraction(result.selected_uris);
        }
    } catch (const std::exception& e) {
        rep.error = e.what();
        rep.s = Score{0.0, 0.0, 0.0};
    }
    return rep;
}

RunReport aggregate(std::vector<ItemReport> items, bool micro_mode) {
    RunReport run;
    run.items = std::move(items);
    const double n = static_cast<double>(run.items.size());
    double rf_sum = 0.0, rs_sum = 0.0;
    for (const auto& it : run.items) {
        run.macro.precision += it.s.precision;
        run.macro.recall += it.s.recall;
        run.macro.f1 += it.s.f1;
        run.cost_total += it.cost;
        run.prompt_tokens += it.prompt_tokens;
        run.completion_tokens += it.completion_tokens;
        for (const auto& [phase, ms] : it.phase_ms) run.phase_ms_mean[phase] += ms;
        if (it.recall_after_filter) {
            rf_sum += *it.recall_after_filter;
            rs_sum += *it.recall_after_selection;
            ++run.linking_items;
        }
    }
    if (n > 0) {
        run.macro.precision /= n;
        run.macro.recall /= n;
        run.macro.f1 /= n;
        for (auto& [phase, ms] : run.phase_ms_mean) ms /= n;
    }
    if (run.linking_items > 0) {
        run.linking_recall_after_filter = rf_sum / static_cast<double>(run.linking_items);
        run.linking_recall_after_selection = rs_sum / static_cast<double>(run.linking_items);
    }
    if (micro_mode) {
        // pooled match counts instead of per-question means
        double m = 0, p = 0, g = 0;
        for (const auto& it : run.items) {
            m += it.matched;
            p += it.n_pred;
            g += it.n_gold;
        }
        run.micro = from_counts(m, p, g);
    }
    return run;
}

}  // namespace

EvalReport evaluate(const std::vector<BenchmarkItem>& benchmark, const EvalDeps& deps,
                    const pipeline::EngineConfig& cfg, const EvalOptions& opts) {
    EvalReport report;
    report.config = pipeline::config_snapshot(cfg);

    for (int run_ix = 0; run_ix < std::max(1, opts.repeat); ++run_ix) {
        std::vector<ItemReport> items(benchmark.size());
        const int jobs = std::max(1, std::min<int>(opts.jobs, static_cast<int>(benchmark.size())));
        if (jobs <= 1) {
            for (std::size_t i = 0; i < benchmark.size(); ++i)
                items[i] = run_item(benchmark[i], deps, cfg, run_ix);
        } else {
            std::atomic<std::size_t> next{0};
            std::vector<std::thread> workers;
            workers.reserve(static_cast<std::size_t>(jobs));
            for (int w = 0; w < jobs; ++w) {
                workers.emplace_back([&] {
                    for (std::size_t i = next.fetch_add(1); i < benchmark.size();
                         i = next.fetch_add(1))
                        items[i] = run_item(benchmark[i], deps, cfg, run_ix);
                });
            }
            for (auto& t : workers) t.join();
        }
        report.runs.push_back(aggregate(std::move(items), opts.micro));
    }

    const double n_runs = static_cast<double>(report.runs.size());
    for (const auto& run : report.runs) {
        report.macro_mean_of_runs.precision += run.macro.precision / n_runs;
        report.macro_mean_of_runs.recall += run.macro.recall / n_runs;
        report.macro_mean_of_runs.f1 += run.macro.f1 / n_runs;
    }
    return report;
}

nlohmann::json EvalReport::to_json() const {
    json run_list = json::array();
    for (const auto& run : runs) {
        json item_list = json::array();
        for (const auto& it : run.items) {
            json ij{{"id", it.id},
                    {"precision", it.s.precision},
                    {"recall", it.s.recall},
                    {"f1", it.s.f1},
                    {"cost", it.cost},
                    {"prompt_tokens", it.prompt_tokens},
                    {"completion_tokens", it.completion_tokens},
                    {"attempts", it.attempts},
                    {"phase_ms", it.phase_ms},
                    {"answer", it.answer_text},
                    {"provenance", it.provenance}};
            if (it.recall_after_filter) {
                ij["recall_after_filter"] = *it.recall_after_filter;
                ij["recall_after_selection"] = *it.recall_after_selection;
            }
            if (!it.error.empty()) ij["error"] = it.error;
            item_list.push_back(std::move(ij));
        }
        json rj{{"items", std::move(item_list)},
                {"macro",
                 {{"precision", run.macro.precision},
                  {"recall", run.macro.recall},
                  {"f1", run.macro.f1}}},
                {"cost_total", run.cost_total},
                {"tokens",
                 {{"prompt", run.prompt_tokens}, {"completion", run.completion_tokens}}},
                {"phase_ms_mean", run.phase_ms_mean}};
        if (run.micro)
            rj["micro"] = {{"precision", run.micro->precision},
                           {"recall", run.micro->recall},
                           {"f1", run.micro->f1}};
        if (run.linking_recall_after_filter) {
            rj["linking_recall"] = {{"after_filter", *run.linking_recall_after_filter},
                                    {"after_selection", *run.linking_recall_after_selection},
                                    {"items", run.linking_items}};
        }
        run_list.push_back(std::move(rj));
    }
    return json{{"config", config},
                {"runs", std::move(run_list)},
                {"macro_mean_of_runs",
                 {{"precision", macro_mean_of_runs.precision},
                  {"recall", macro_mean_of_runs.recall},
                  {"f1", macro_mean_of_runs.f1}}}};
}

std::string EvalReport::to_table() const {
    std::string out;
    char buf[256];
    for (std::size_t r = 0; r < runs.size(); ++r) {
        const auto& run = runs[r];
        if (runs.size() > 1) {
            std::snprintf(buf, sizeof(buf), "run %zu\n", r + 1);
            out += buf;
        }
        std::snprintf(buf, sizeof(buf), "%-12s %7s %7s %7s %10s %9s  %s\n", "id", "P", "R", "F1",
                      "cost", "attempts", "answer");
        out += buf;
        for (const auto& it : run.items) {
            std::snprintf(buf, sizeof(buf), "%-12s %7.3f %7.3f %7.3f %10.6f %9d  %s\n",
                          it.id.c_str(), it.s.precision, it.s.recall, it.s.f1, it.cost,
                          it.attempts,
                          it.error.empty() ? it.answer_text.substr(0, 48).c_str()
                                           : ("ERROR: " + it.error).substr(0, 48).c_str());
            out += buf;
        }
        std::snprintf(buf, sizeof(buf), "%-12s %7.3f %7.3f %7.3f %10.6f\n", "macro",
                      run.macro.precision, run.macro.recall, run.macro.f1, run.cost_total);
        out += buf;
    }
    return out;
}

}  // namespace triad::eval
