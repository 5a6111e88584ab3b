#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "triad/errors.hpp"
#include "triad/eval/harness.hpp"
#include "triad/index/mention_index.hpp"
#include "triad/kb/store.hpp"
#include "triad/llm/backend.hpp"
#include "triad/llm/http_backend.hpp"
#include "triad/pipeline/pipeline.hpp"

namespace {

using namespace triad;

struct LoadedDeps {
    kb::KbStore store;
    index::MentionIndex index;
    llm::PromptLibrary prompts = llm::PromptLibrary::builtin();
};

LoadedDeps load_deps(const pipeline::EngineConfig& cfg) {
    if (cfg.kb_path.empty()) throw UserError("config: 'kb' is not set");
    kb::LoadOptions opts;
    opts.label_predicates = cfg.label_predicates;
    LoadedDeps deps;
    deps.store = kb::KbStore::load_ntriples(cfg.kb_path, opts);
    if (!cfg.index_snapshot.empty() && std::filesystem::exists(cfg.index_snapshot))
        deps.index = index::MentionIndex::load(cfg.index_snapshot);
    else
        deps.index = index::MentionIndex::build(deps.store);
    return deps;
}

std::unique_ptr<llm::Backend> make_base_backend(const pipeline::EngineConfig& cfg,
                                                const std::string& replay_override) {
    if (!replay_override.empty())
        return std::make_unique<llm::ReplayBackend>(llm::Transcript::load(replay_override),
                                                    cfg.backend.strict_replay);
    if (cfg.backend.kind == "replay") {
        if (cfg.backend.transcript.empty())
            throw UserError("backend.kind is \"replay\" but backend.transcript is not set");
        return std::make_unique<llm::ReplayBackend>(llm::Transcript::load(cfg.backend.transcript),
                                                    cfg.backend.strict_replay);
    }
    auto hc = llm::HttpBackend::config_from_env(cfg.backend.base_url);
    if (hc.base_url.empty())
        throw UserError("no backend.base_url configured and TRIAD_LLM_BASE_URL is unset");
    return std::make_unique<llm::HttpBackend>(hc);
}

/// Keeps an owned inner backend alive under a recording wrapper.
class RecordedBackend : public llm::Backend {
public:
    RecordedBackend(std::unique_ptr<llm::Backend> inner, const std::filesystem::path& sink)
        : inner_(std::move(inner)), recorder_(*inner_, sink) {}
    llm::LlmResponse complete(const llm::LlmRequest& request) override {
        return recorder_.complete(request);
    }
    std::string kind() const override { return recorder_.kind(); }

private:
    std::unique_ptr<llm::Backend> inner_;
    llm::RecordingBackend recorder_;
};

int cmd_load(const std::string& kb_path, const std::string& snapshot,
             const std::vector<std::string>& label_preds, bool lenient) {
    kb::LoadOptions opts;
    opts.strict = !lenient;
    if (!label_preds.empty()) opts.label_predicates = label_preds;
    kb::LoadStats stats;
    auto store = kb::KbStore::load_ntriples(kb_path, opts, &stats);
    if (stats.skipped > 0)
        std::cerr << stats.skipped << " malformed line(s) skipped\n";
    std::cout << store.size() << " triples\n" << store.label_count() << " labels\n";
    auto ix = index::MentionIndex::build(store);
    std::cerr << "mention index: " << ix.doc_count(index::UriKind::Entity) << " entity docs, "
              << ix.doc_count(index::UriKind::Relation) << " relation docs\n";
    if (!snapshot.empty()) {
        ix.save(snapshot);
        std::cerr << "index snapshot written to " << snapshot << "\n";
    }
    return 0;
}

int cmd_ask(const std::string& question, const std::string& config_path,
            const std::string& record_path, const std::string& replay_path,
            const std::string& trace_path) {
    auto cfg = pipeline::load_config(config_path);
    auto deps = load_deps(cfg);

    std::unique_ptr<llm::Backend> backend = make_base_backend(cfg, replay_path);
    if (!record_path.empty())
        backend = std::make_unique<RecordedBackend>(std::move(backend), record_path);

    pipeline::PipelineDeps pd{deps.store, deps.index, *backend, deps.prompts};
    auto result = pipeline::run(question, pd, cfg);

    if (!trace_path.empty()) {
        std::ofstream out(trace_path);
        if (!out) throw InfraError("cannot write trace file: " + trace_path);
        out << result.to_json().dump(2) << "\n";
    }
    std::cout << result.answer.printable() << "\n";
    return 0;
}

int cmd_eval(const std::string& benchmark_path, const std::string& config_path,
             const std::string& replay_dir, const std::string& record_dir,
             const std::string& report_path, const std::string& table_path, int repeat, int jobs,
             bool micro) {
    auto cfg = pipeline::load_config(config_path);
    auto benchmark = eval::load_benchmark(benchmark_path);
    auto deps = load_deps(cfg);

    std::string effective_replay = replay_dir;
    if (effective_replay.empty() && cfg.backend.kind == "replay" &&
        !cfg.backend.transcript.empty())
        effective_replay = cfg.backend.transcript;  // directory of per-item transcripts
    if (!effective_replay.empty() && !std::filesystem::is_directory(effective_replay))
        throw InfraError("replay directory not found: " + effective_replay);
    if (!record_dir.empty()) std::filesystem::create_directories(record_dir);

    eval::EvalDeps ed{deps.store, deps.index, deps.prompts,
                      [&](const eval::BenchmarkItem& item, int) {
                          std::unique_ptr<llm::Backend> base;
                          if (!effective_replay.empty()) {
                              auto path = std::filesystem::path(effective_replay) /
                                          (item.id + ".jsonl");
                              base = std::make_unique<llm::ReplayBackend>(
                                  llm::Transcript::load(path), cfg.backend.strict_replay);
                          } else {
                              base = make_base_backend(cfg, "");
                          }
                          if (!record_dir.empty())
                              base = std::make_unique<RecordedBackend>(
                                  std::move(base),
                                  std::filesystem::path(record_dir) / (item.id + ".jsonl"));
                          return base;
                      }};

    eval::EvalOptions opts;
    opts.repeat = repeat;
    opts.jobs = jobs > 0 ? jobs : cfg.eval_jobs;
    opts.micro = micro;
    auto report = eval::evaluate(benchmark, ed, cfg, opts);

    if (!report_path.empty()) {
        std::ofstream out(report_path);
        if (!out) throw InfraError("cannot write report file: " + report_path);
        out << report.to_json().dump(2) << "\n";
    }
    if (!table_path.empty()) {
        std::ofstream out(table_path);
        if (!out) throw InfraError("cannot write table file: " + table_path);
        out << report.to_table();
    } else {
        std::cerr << report.to_table();
    }
    std::printf("macro P=%.3f R=%.3f F1=%.3f\n", report.macro_mean_of_runs.precision,
                report.macro_mean_of_runs.recall, report.macro_mean_of_runs.f1);
    return 0;
}

int cmd_replay_check(const std::string& transcript_path) {
    auto transcript = llm::Transcript::load(transcript_path);
    std::map<std::string, std::size_t> per_subtask;
    std::size_t bad_hashes = 0;
    for (const auto& rec : transcript.records()) {
        ++per_subtask[rec.subtask];
        if (llm::sha256_hex(rec.prompt) != rec.prompt_sha256) {
            ++bad_hashes;
            std::cerr << "hash mismatch on a '" << rec.subtask << "' record\n";
        }
    }
    for (const auto& [subtask, count] : per_subtask)
        std::cout << subtask << " " << count << "\n";
    std::cout << "total " << transcript.size() << "\n";
    if (bad_hashes > 0) {
        std::cerr << bad_hashes << " record(s) with inconsistent prompt hashes\n";
        return 1;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"triad - knowledge-base question answering"};
    app.require_subcommand(1);

    auto* load = app.add_subcommand("load", "load a KB and build the mention index");
    std::string load_kb, load_snapshot;
    std::vector<std::string> load_labels;
    bool load_lenient = false;
    load->add_option("--kb", load_kb, "N-Triples file")->required();
    load->add_option("--snapshot", load_snapshot, "mention-index snapshot to write");
    load->add_option("--labels", load_labels, "label predicate URIs (default rdfs:label)");
    load->add_flag("--lenient", load_lenient, "skip malformed lines instead of failing");

    auto* ask = app.add_subcommand("ask", "answer a single question");
    std::string ask_question, ask_config, ask_record, ask_replay, ask_trace;
    ask->add_option("--question", ask_question, "question text")->required();
    ask->add_option("--config", ask_config, "config file")->required();
    auto* ask_record_opt = ask->add_option("--record", ask_record, "transcript sink");
    auto* ask_replay_opt = ask->add_option("--replay", ask_replay, "transcript to replay");
    ask_record_opt->excludes(ask_replay_opt);
    ask->add_option("--trace", ask_trace, "write the full pipeline trace JSON here");

    auto* evalc = app.add_subcommand("eval", "run a benchmark");
    std::string eval_benchmark, eval_config, eval_replay, eval_record, eval_report, eval_table;
    int eval_repeat = 1, eval_jobs = 0;
    bool eval_micro = false;
    evalc->add_option("--benchmark", eval_benchmark, "benchmark JSON")->required();
    evalc->add_option("--config", eval_config, "config file")->required();
    evalc->add_option("--replay", eval_replay, "directory of per-item transcripts");
    evalc->add_option("--record", eval_record, "directory for per-item transcript sinks");
    evalc->add_option("--report", eval_report, "report JSON output path");
    evalc->add_option("--table", eval_table, "plain-text table output path");
    evalc->add_option("--repeat", eval_repeat, "number of evaluation runs")
        ->check(CLI::PositiveNumber);
    evalc->add_option("--jobs", eval_jobs, "concurrent items (default from config)");
    evalc->add_flag("--micro", eval_micro, "also report micro-averaged scores");

    auto* check = app.add_subcommand("replay-check", "validate a transcript file");
    std::string check_transcript;
    check->add_option("--transcript", check_transcript, "transcript JSONL")->required();

    try {
        app.parse(argc, argv);
        if (load->parsed()) return cmd_load(load_kb, load_snapshot, load_labels, load_lenient);
        if (ask->parsed()) return cmd_ask(ask_question, ask_config, ask_record, ask_replay,
                                          ask_trace);
        if (evalc->parsed())
            return cmd_eval(eval_benchmark, eval_config, eval_replay, eval_record, eval_report,
                            eval_table, eval_repeat, eval_jobs, eval_micro);
        if (check->parsed()) return cmd_replay_check(check_transcript);
        return 1;
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return 1;
    } catch (const triad::InfraError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const triad::UserError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const triad::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 2;
    }
}
