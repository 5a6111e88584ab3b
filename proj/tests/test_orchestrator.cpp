#include <doctest.h>

#include <set>

#include "support/paths.hpp"
#include "support/scripts.hpp"
#include "support/toy.hpp"
#include "triad/errors.hpp"
#include "triad/pipeline/config.hpp"
#include "triad/pipeline/pipeline.hpp"

using namespace triad;
using test::ItemScript;
using test::kb_e;
using test::kb_p;

namespace {

pipeline::PipelineResult run_scripted(const ItemScript& script, const std::string& question,
                                      const pipeline::EngineConfig& cfg) {
    llm::ScriptedBackend scripted;
    script.apply(scripted);
    llm::PromptLibrary prompts = llm::PromptLibrary::builtin();
    pipeline::PipelineDeps deps{test::toy_store(), test::toy_index(), scripted, prompts};
    return pipeline::run(question, deps, cfg);
}

/// Worst-case LLM calls: extraction and classification re-ask once, each
/// attempt selects per mention, regenerates the template twice and picks one
/// query, and the final fallback answers once.
std::size_t call_bound(const pipeline::PipelineResult& res, const roles::RoleConfig& cfg) {
    const std::size_t entities = roles::explicit_entity_mentions(res.mentions).size();
    const std::size_t relations = roles::explicit_relation_mentions(res.mentions).size();
    const std::size_t attempts = static_cast<std::size_t>(cfg.retries) + 1;
    return 2 + 2 + 2 /* final re-extract */ +
           attempts * (entities + relations + 2 /* template re-ask */ + 1 /* query pick */) +
           1 /* fallback answer */;
}

void check_call_accounting(const pipeline::PipelineResult& res,
                           const roles::RoleConfig& cfg) {
    CHECK(res.llm_calls.size() <= call_bound(res, cfg));
    // every gateway call belongs to exactly one attempt trace
    std::set<std::size_t> seen;
    for (const auto& a : res.attempts)
        for (std::size_t ix : a.call_indices) CHECK(seen.insert(ix).second);
    CHECK(seen.size() == res.llm_calls.size());
}

void check_pool_monotonicity(const pipeline::PipelineResult& res) {
    auto contains_all = [](const std::vector<index::UriCandidate>& small,
                           const std::vector<index::UriCandidate>& big) {
        for (const auto& c : small) {
            bool found = false;
            for (const auto& d : big) found |= d.uri == c.uri;
            CHECK(found);
        }
    };
    auto check_maps = [&](const roles::CandidateMap& before, const roles::CandidateMap& after) {
        for (const auto& [mention, pool] : before) {
            auto it = after.find(mention);
            if (it == after.end()) continue;  // attempt failed before this stage
            contains_all(pool, it->second);
        }
    };
    for (std::size_t i = 1; i < res.attempts.size(); ++i) {
        check_maps(res.attempts[i - 1].entity_pools, res.attempts[i].entity_pools);
        check_maps(res.attempts[i - 1].relation_pools, res.attempts[i].relation_pools);
    }
}

}  // namespace

TEST_SUITE_BEGIN("orchestrator");

TEST_CASE("first attempt succeeds: one attempt, kb answer") {
    auto cfg = test::toy_config();
    auto res = run_scripted(test::toy_scripts().at("q01"), "Which cities are located in Germany?",
                            cfg);
    CHECK(res.attempts.size() == 1);
    CHECK(res.attempts[0].error.empty());
    CHECK(res.answer.provenance == roles::Provenance::Kb);
    CHECK(res.answer.kind == roles::AnswerKind::Select);
    CHECK(res.answer.values ==
          std::set<std::string>{kb_e("Berlin"), kb_e("Bonn"), kb_e("Hamburg")});
    CHECK(res.llm_calls.size() == 5);
    check_call_accounting(res, cfg.roles);
}

TEST_CASE("no feasible query on attempt 1, success on attempt 2") {
    auto cfg = test::toy_config();
    auto res =
        run_scripted(test::toy_scripts().at("q09"), "Which river flows through Hamburg?", cfg);
    REQUIRE(res.attempts.size() == 2);
    CHECK_FALSE(res.attempts[0].error.empty());
    CHECK(res.attempts[1].error.empty());
    CHECK(res.answer.provenance == roles::Provenance::Kb);
    CHECK(res.answer.values == std::set<std::string>{kb_e("Elbe")});
    check_pool_monotonicity(res);
    check_call_accounting(res, cfg.roles);
    // executability verdicts recorded for the failed attempt
    REQUIRE(res.attempts[0].candidates.size() == 1);
    CHECK_FALSE(res.attempts[0].candidates[0].survived);
}

TEST_CASE("retries=0 with no feasible query degrades to the boolean LLM fallback") {
    auto cfg = test::toy_config();
    cfg.roles.retries = 0;
    ItemScript script;
    script.pushes = {
        {"triplet", {"<Berlin, flows through, Germany>"}},
        {"classify", {"<yes or no>"}},
        {"entity-select", {kb_e("Berlin"), kb_e("Germany")}},
        // the chosen predicate never links Berlin to Germany, so the SELECT
        // form dies; an ASK would always survive
        {"relation-select", {kb_p("flows_through")}},
        {"template", {"SELECT ?x WHERE { ?x <flows through> <Berlin> }"}},
        {"answer-boolean", {"True"}},
    };
    auto res = run_scripted(script, "Does anything flow through Berlin?", cfg);
    CHECK(res.attempts.size() == 1);
    CHECK(res.answer.provenance == roles::Provenance::LlmFallback);
    CHECK(res.answer.kind == roles::AnswerKind::Boolean);
    CHECK(res.answer.boolean);
    check_call_accounting(res, cfg.roles);
}

TEST_CASE("extraction failure aborts straight to the typed fallback") {
    auto cfg = test::toy_config();
    ItemScript script;
    script.pushes = {{"triplet", {"nothing", "still nothing"}},
                     {"classify", {"<select>"}},
                     {"answer-fact", {"Berlin"}}};
    auto res = run_scripted(script, "What is the capital of Germany?", cfg);
    CHECK(res.mentions.empty());
    CHECK(res.attempts.size() == 1);
    CHECK_FALSE(res.attempts[0].error.empty());
    CHECK(res.answer.provenance == roles::Provenance::LlmFallback);
    CHECK(res.answer.values == std::set<std::string>{"Berlin"});
}

TEST_CASE("retry bound honored for T in {0,1,3} and pools only widen") {
    for (int retries : {0, 1, 3}) {
        auto cfg = test::toy_config();
        cfg.roles.retries = retries;

        ItemScript script;
        script.pushes = {{"triplet", {"<?river, flows through, Hamburg>"}},
                         {"classify", {"<select>"}}};
        if (retries == 0) {
            script.pushes["entity-select"] = {kb_e("Hamburg")};
            script.pushes["relation-select"] = {kb_p("located_in")};
            script.pushes["template"] = {
                "SELECT ?river WHERE { ?river <flows through> <Hamburg> }"};
            script.fallbacks["answer-fact"] = "The Elbe";
        } else if (retries == 1) {
            // final attempt re-extracts and regenerates the template
            script.pushes["triplet"].push_back("<?river, flows through, Hamburg>");
            script.pushes["entity-select"] = {kb_e("Hamburg"), kb_e("Hamburg")};
            script.pushes["relation-select"] = {kb_p("located_in"), kb_p("flows_through")};
            script.pushes["template"] = {
                "SELECT ?river WHERE { ?river <flows through> <Hamburg> }",
                "SELECT ?river WHERE { ?river <flows through> <Hamburg> }"};
        } else {
            // every attempt picks a dead predicate; exhaustion then fallback
            script.fallbacks["triplet"] = "<?river, flows through, Hamburg>";
            script.fallbacks["entity-select"] = kb_e("Hamburg");
            script.fallbacks["relation-select"] = kb_p("located_in");
            script.fallbacks["template"] =
                "SELECT ?river WHERE { ?river <flows through> <Hamburg> }";
            script.fallbacks["answer-fact"] = "The Elbe";
        }

        auto res = run_scripted(script, "Which river flows through Hamburg?", cfg);
        CHECK(res.attempts.size() <= static_cast<std::size_t>(retries) + 1);
        if (retries == 1) {
            CHECK(res.answer.provenance == roles::Provenance::Kb);
            CHECK(res.attempts.size() == 2);
        } else {
            CHECK(res.answer.provenance == roles::Provenance::LlmFallback);
            CHECK(res.attempts.size() == static_cast<std::size_t>(retries) + 1);
        }
        check_pool_monotonicity(res);
        check_call_accounting(res, cfg.roles);
    }
}

TEST_CASE("phase attribution: four buckets, sums bounded by total") {
    auto cfg = test::toy_config();
    auto res = run_scripted(test::toy_scripts().at("q05"), "Is Berlin located in Germany?", cfg);
    REQUIRE(res.phase_ms.size() == 4);
    double sum = 0;
    for (const auto& key : {"QP", "UL", "QC", "AG"}) {
        REQUIRE(res.phase_ms.count(key) == 1);
        CHECK(res.phase_ms.at(key) >= 0.0);
        sum += res.phase_ms.at(key);
    }
    CHECK(sum <= res.total_ms);
    for (const auto& call : res.llm_calls) {
        CHECK((call.phase == llm::Phase::QP || call.phase == llm::Phase::UL ||
               call.phase == llm::Phase::QC || call.phase == llm::Phase::AG));
    }
}

TEST_CASE("token totals and cost follow the price table") {
    auto cfg = test::toy_config();  // prices: prompt 1.0, completion 2.0 per 1k
    auto res = run_scripted(test::toy_scripts().at("q01"), "Which cities are located in Germany?",
                            cfg);
    long long pt = 0, ct = 0;
    for (const auto& c : res.llm_calls) {
        pt += c.prompt_tokens;
        ct += c.completion_tokens;
    }
    CHECK(res.prompt_tokens == pt);
    CHECK(res.completion_tokens == ct);
    CHECK(res.cost ==
          (static_cast<double>(pt) * 1.0 + static_cast<double>(ct) * 2.0) / 1000.0);
}

TEST_CASE("trace JSON carries the documented sections") {
    auto cfg = test::toy_config();
    auto res = run_scripted(test::toy_scripts().at("q04"),
                            "Is the spider of the chordate phylum?", cfg);
    auto j = res.to_json();
    for (const char* key : {"question", "mentions", "answer_type", "attempts", "llm_calls",
                            "answer", "phase_ms", "total_ms", "tokens", "cost", "linking"})
        CHECK(j.contains(key));
    CHECK(j["answer"]["kind"] == "yes or no");
    CHECK(j["answer"]["boolean"] == false);
    CHECK(j["answer"]["provenance"] == "kb");
}

TEST_CASE("load_config: empty object keeps the tuned defaults") {
    auto cfg = pipeline::config_from_json(nlohmann::json::object());
    CHECK(cfg.roles.n_shots == 3);
    CHECK(cfg.roles.k_entity == 2);
    CHECK(cfg.roles.k_relation == 2);
    CHECK(cfg.roles.retries == 3);
    CHECK(cfg.roles.filter_pool == 10);
    CHECK(cfg.roles.enumeration_cap == 50);
    CHECK(cfg.budget_ms == 120000.0);
}

TEST_CASE("load_config: violations carry the field path") {
    try {
        pipeline::config_from_json({{"roles", {{"retries", -1}}}});
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.field_path == "roles.retries");
    }
    try {
        pipeline::config_from_json({{"roles", {{"n_shots", "three"}}}});
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.field_path == "roles.n_shots");
    }
    CHECK_THROWS_AS(pipeline::config_from_json({{"unknown_key", 1}}), ConfigError);
    CHECK_THROWS_AS(pipeline::config_from_json({{"backend", {{"kind", "carrier-pigeon"}}}}),
                    ConfigError);
}

TEST_CASE("load_config: one-shot variant parses and applies") {
    auto cfg = pipeline::config_from_json({{"roles", {{"n_shots", 1}}}});
    CHECK(cfg.roles.n_shots == 1);
    CHECK(cfg.roles.k_entity == 2);  // untouched fields keep defaults
}

TEST_CASE("load_config: prices and backend spec round out") {
    auto cfg = pipeline::config_from_json(
        {{"backend",
          {{"kind", "replay"}, {"model", "m1"}, {"transcript", "t.jsonl"}}},
         {"prices", {{"m1", {{"prompt_price_per_1k", 0.5}, {"completion_price_per_1k", 1.5}}}}}});
    CHECK(cfg.backend.kind == "replay");
    CHECK(cfg.prices.cost("m1", 1000, 1000) == doctest::Approx(2.0));
}

TEST_SUITE_END();
