#include "triad/pipeline/pipeline.hpp"

#include <algorithm>
#include <chrono>

#include "triad/errors.hpp"

namespace triad::pipeline {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

/// Accumulates wall time into one phase bucket, exceptions included.
class PhaseTimer {
public:
    PhaseTimer(llm::Gateway& gw, std::map<std::string, double>& acc, int attempt, llm::Phase phase)
        : acc_(acc), key_(llm::phase_name(phase)), t0_(Clock::now()) {
        gw.set_context(attempt, phase);
    }
    ~PhaseTimer() { acc_[key_] += ms_since(t0_); }

private:
    std::map<std::string, double>& acc_;
    std::string key_;
    Clock::time_point t0_;
};

void collect_uris(const roles::CandidateMap& m, std::set<std::string>& into) {
    for (const auto& [text, cands] : m)
        for (const auto& c : cands) into.insert(c.uri);
}

nlohmann::json candidate_json(const index::UriCandidate& c) {
    const char* source = c.source == index::CandidateSource::TextFilter  ? "text-filter"
                         : c.source == index::CandidateSource::Traversal ? "traversal"
                                                                         : "llm-selected";
    return {{"uri", c.uri}, {"label", c.label}, {"score", c.score}, {"rank", c.rank},
            {"source", source}};
}

nlohmann::json candidate_map_json(const roles::CandidateMap& m) {
    nlohmann::json out = nlohmann::json::object();
    for (const auto& [text, cands] : m) {
        nlohmann::json list = nlohmann::json::array();
        for (const auto& c : cands) list.push_back(candidate_json(c));
        out[text] = std::move(list);
    }
    return out;
}

std::string mention_field(const roles::Mention& m) {
    return m.is_variable ? "?" + m.text : m.text;
}

}  // namespace

nlohmann::json PipelineResult::to_json() const {
    nlohmann::json mention_list = nlohmann::json::array();
    for (const auto& m : mentions)
        mention_list.push_back({{"subject", mention_field(m.subject)},
                                {"relation", mention_field(m.relation)},
                                {"object", mention_field(m.object)}});

    nlohmann::json attempt_list = nlohmann::json::array();
    for (const auto& a : attempts) {
        nlohmann::json cands = nlohmann::json::array();
        for (const auto& v : a.candidates) {
            const char* form = v.form == sparql::QueryForm::Select  ? "select"
                               : v.form == sparql::QueryForm::Count ? "count"
                                                                    : "ask";
            cands.push_back({{"query", v.query}, {"form", form}, {"survived", v.survived}});
        }
        attempt_list.push_back({{"index", a.index},
                                {"error", a.error},
                                {"entity_pools", candidate_map_json(a.entity_pools)},
                                {"entity_selected", candidate_map_json(a.entity_selected)},
                                {"relation_pools", candidate_map_json(a.relation_pools)},
                                {"relation_selected", candidate_map_json(a.relation_selected)},
                                {"template", a.template_text},
                                {"candidates", std::move(cands)},
                                {"final_query", a.final_query},
                                {"calls", a.call_indices}});
    }

    nlohmann::json call_list = nlohmann::json::array();
    for (const auto& c : llm_calls)
        call_list.push_back({{"subtask", c.subtask},
                             {"prompt_sha256", c.prompt_sha256},
                             {"prompt_tokens", c.prompt_tokens},
                             {"completion_tokens", c.completion_tokens},
                             {"latency_ms", c.latency_ms},
                             {"attempt", c.attempt},
                             {"phase", llm::phase_name(c.phase)}});

    nlohmann::json ans{{"kind", roles::answer_kind_name(answer.kind)},
                       {"provenance", roles::provenance_name(answer.provenance)}};
    switch (answer.kind) {
        case roles::AnswerKind::Select: ans["values"] = answer.values; break;
        case roles::AnswerKind::Boolean: ans["boolean"] = answer.boolean; break;
        case roles::AnswerKind::Count: ans["count"] = answer.count; break;
    }
    if (answer.is_abstain()) ans["abstain"] = true;

    return nlohmann::json{{"question", question},
                          {"mentions", std::move(mention_list)},
                          {"answer_type", roles::answer_kind_name(answer_type)},
                          {"type_defaulted", type_defaulted},
                          {"attempts", std::move(attempt_list)},
                          {"llm_calls", std::move(call_list)},
                          {"answer", std::move(ans)},
                          {"phase_ms", phase_ms},
                          {"total_ms", total_ms},
                          {"tokens",
                           {{"prompt", prompt_tokens}, {"completion", completion_tokens}}},
                          {"cost", cost},
                          {"linking",
                           {{"offered", offered_uris}, {"selected", selected_uris}}}};
}

PipelineResult run(const std::string& question, const PipelineDeps& deps,
                   const EngineConfig& cfg) {
    const auto t_start = Clock::now();

    PipelineResult res;
    res.question = question;
    for (const char* key : {"QP", "UL", "QC", "AG"}) res.phase_ms[key] = 0.0;

    llm::Gateway gw(deps.backend, deps.prompts, cfg.backend.model, cfg.max_tokens);
    roles::AgentContext base_ctx{gw, deps.store, deps.index, cfg.roles, 0.0};

    // -- question parsing + answer-type classification (attempt 0 only) -----
    std::vector<roles::TripleMention> mentions;
    bool extraction_failed = false;
    try {
        PhaseTimer t(gw, res.phase_ms, 0, llm::Phase::QP);
        mentions = roles::extract_triplets(base_ctx, question);
    } catch (const InfraError&) {
        throw;
    } catch (const Error&) {
        extraction_failed = true;
    }
    res.mentions = mentions;

    {
        PhaseTimer t(gw, res.phase_ms, 0, llm::Phase::AG);
        res.answer_type = roles::classify_answer_type(base_ctx, question, &res.type_defaulted);
    }

    std::optional<sparql::SparqlTemplate> tmpl;
    roles::CandidateMap prior_entity_pools;
    roles::CandidateMap prior_relation_pools;
    std::optional<roles::Answer> final_answer;

    const int total_attempts = extraction_failed ? 1 : cfg.roles.retries + 1;
    for (int attempt = 0; attempt < total_attempts && !final_answer; ++attempt) {
        AttemptTrace trace;
        trace.index = attempt;
        // attempt 0 also owns the preamble calls (extraction, classification)
        const std::size_t call_start = attempt == 0 ? 0 : gw.call_count();
        const bool final_attempt = attempt == total_attempts - 1;

        roles::AgentContext ctx = base_ctx;
        // escalation: doubled filter pool and diversified sampling per retry
        ctx.cfg.filter_pool = cfg.roles.filter_pool << std::min(attempt, 20);
        ctx.temperature = attempt == 0 ? 0.0 : cfg.retry_temperature;

        try {
            if (extraction_failed) throw ExtractionFailureError("question parsing failed");

            if (final_attempt && attempt > 0 && cfg.re_extract_on_final_retry) {
                PhaseTimer t(gw, res.phase_ms, attempt, llm::Phase::QP);
                try {
                    mentions = roles::extract_triplets(ctx, question);
                    res.mentions = mentions;
                } catch (const ExtractionFailureError&) {
                    // keep the previous parse
                }
            }

            roles::SelectionResult ents;
            {
                PhaseTimer t(gw, res.phase_ms, attempt, llm::Phase::UL);
                ents = roles::select_entities(ctx, question, mentions, &prior_entity_pools);
            }
            trace.entity_pools = ents.pools;
            trace.entity_selected = ents.selected;
            prior_entity_pools = ents.pools;

            roles::SelectionResult rels;
            {
                PhaseTimer t(gw, res.phase_ms, attempt, llm::Phase::UL);
                rels = roles::select_relations(ctx, question, mentions, ents.selected,
                                               &prior_relation_pools);
            }
            trace.relation_pools = rels.pools;
            trace.relation_selected = rels.selected;
            prior_relation_pools = rels.pools;

            if (!tmpl || (final_attempt && attempt > 0)) {
                PhaseTimer t(gw, res.phase_ms, attempt, llm::Phase::QC);
                tmpl = roles::generate_template(ctx, question, mentions);
            }
            trace.template_text = sparql::render(*tmpl);

            roles::QuerySelection sel;
            {
                PhaseTimer t(gw, res.phase_ms, attempt, llm::Phase::QC);
                sel = roles::select_query(ctx, question, *tmpl, ents.selected, rels.selected,
                                          &trace.candidates);
            }
            trace.final_query = sparql::render(sel.query);

            {
                PhaseTimer t(gw, res.phase_ms, attempt, llm::Phase::AG);
                final_answer = roles::answer(ctx, question, sel.query, res.answer_type);
            }
        } catch (const InfraError&) {
            throw;
        } catch (const TemplateFailureError& e) {
            trace.error = e.what();
            tmpl.reset();  // force regeneration next attempt
        } catch (const Error& e) {
            trace.error = e.what();
        }

        trace.call_indices.clear();
        for (std::size_t i = call_start; i < gw.call_count(); ++i) trace.call_indices.push_back(i);
        res.attempts.push_back(std::move(trace));

        if (!final_answer && ms_since(t_start) > cfg.budget_ms) break;
    }

    if (!final_answer) {
        // retries exhausted (or never viable): typed LLM fallback / abstain
        AttemptTrace& last = res.attempts.back();
        const std::size_t call_start = gw.call_count();
        {
            PhaseTimer t(gw, res.phase_ms, last.index, llm::Phase::AG);
            final_answer = roles::answer(base_ctx, question, std::nullopt, res.answer_type);
        }
        for (std::size_t i = call_start; i < gw.call_count(); ++i)
            last.call_indices.push_back(i);
    }
    res.answer = *final_answer;

    for (const auto& a : res.attempts) {
        collect_uris(a.entity_pools, res.offered_uris);
        collect_uris(a.relation_pools, res.offered_uris);
        collect_uris(a.entity_selected, res.selected_uris);
        collect_uris(a.relation_selected, res.selected_uris);
    }

    res.llm_calls = gw.calls();
    res.prompt_tokens = gw.total_prompt_tokens();
    res.completion_tokens = gw.total_completion_tokens();
    res.cost = cfg.prices.cost(cfg.backend.model, res.prompt_tokens, res.completion_tokens);
    res.total_ms = ms_since(t_start);
    return res;
}

}  // namespace triad::pipeline
