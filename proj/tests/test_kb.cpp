#include <doctest.h>

#include <fstream>
#include <sstream>

#include "support/oracles.hpp"
#include "support/paths.hpp"
#include "triad/errors.hpp"
#include "triad/kb/executor.hpp"
#include "triad/kb/store.hpp"
#include "triad/sparql/parser.hpp"

using namespace triad;
using kb::DriverIndex;
using kb::KbStore;
using kb::PatternTerm;
using kb::Term;
using kb::Triple;
using kb::TriplePattern;

namespace {

KbStore store_from_text(const std::string& text, const kb::LoadOptions& opts = {},
                        kb::LoadStats* stats = nullptr) {
    std::istringstream in(text);
    return KbStore::parse_ntriples(in, opts, stats);
}

const std::string kThreeLines =
    "<http://x/a> <http://x/p> <http://x/b> .\n"
    "<http://x/a> <http://x/q> \"hello world\" .\n"
    "<http://x/b> <http://x/p> \"bonjour\"@fr .\n";

TriplePattern pat(PatternTerm s, PatternTerm p, PatternTerm o) { return {s, p, o}; }

}  // namespace

TEST_SUITE_BEGIN("kb");

TEST_CASE("empty file loads an empty store") {
    auto store = store_from_text("");
    CHECK(store.size() == 0);
    CHECK(store.match(pat(PatternTerm::variable("s"), PatternTerm::variable("p"),
                          PatternTerm::variable("o")))
              .empty());
}

TEST_CASE("three well-formed lines load three triples, indexes agree") {
    kb::LoadStats stats;
    auto store = store_from_text(kThreeLines, {}, &stats);
    CHECK(store.size() == 3);
    CHECK(stats.triples == 3);

    // membership per line
    CHECK(store.contains({Term::iri("http://x/a"), Term::iri("http://x/p"),
                          Term::iri("http://x/b")}));
    CHECK(store.contains({Term::iri("http://x/a"), Term::iri("http://x/q"),
                          Term::literal("hello world")}));
    CHECK(store.contains({Term::iri("http://x/b"), Term::iri("http://x/p"),
                          Term::literal("bonjour", "@fr")}));

    auto all = store.match(pat(PatternTerm::variable("s"), PatternTerm::variable("p"),
                               PatternTerm::variable("o")));
    CHECK(all.size() == 3);
}

TEST_CASE("line missing terminal dot fails in strict mode with the line number") {
    const std::string bad = "<http://x/a> <http://x/p> <http://x/b> .\n<http://x/a> <http://x/p> <http://x/c>\n";
    CHECK_THROWS_AS(store_from_text(bad), NtriplesError);
    try {
        store_from_text(bad);
    } catch (const NtriplesError& e) {
        CHECK(e.line_number == 2);
        CHECK(std::string(e.what()).find("terminal") != std::string::npos);
    }
}

TEST_CASE("lenient mode skips malformed lines and counts them") {
    const std::string bad = "not a triple\n" + kThreeLines;
    kb::LoadOptions opts;
    opts.strict = false;
    kb::LoadStats stats;
    auto store = store_from_text(bad, opts, &stats);
    CHECK(store.size() == 3);
    CHECK(stats.skipped == 1);
}

TEST_CASE("comments and blank lines are ignored") {
    auto store = store_from_text("# comment\n\n" + kThreeLines + "  # indented comment\n");
    CHECK(store.size() == 3);
}

TEST_CASE("relative IRIs are rejected") {
    CHECK_THROWS_AS(store_from_text("<a> <http://x/p> <http://x/b> .\n"), NtriplesError);
}

TEST_CASE("duplicate lines collapse into one triple") {
    auto store = store_from_text(kThreeLines + kThreeLines);
    CHECK(store.size() == 3);
}

TEST_CASE("literal escapes round-trip through load and serialize") {
    const std::string line =
        "<http://x/a> <http://x/q> \"tab\\there \\\"quoted\\\" and\\nnewline\" .\n";
    auto store = store_from_text(line);
    REQUIRE(store.size() == 1);
    CHECK(store.triples()[0].object.lexical == "tab\there \"quoted\" and\nnewline");

    std::ostringstream out;
    store.serialize_ntriples(out);
    auto reloaded = store_from_text(out.str());
    CHECK(reloaded.triples() == store.triples());
}

TEST_CASE("unicode escapes decode to UTF-8") {
    auto store = store_from_text("<http://x/a> <http://x/q> \"caf\\u00E9\" .\n");
    REQUIRE(store.size() == 1);
    CHECK(store.triples()[0].object.lexical == "caf\xC3\xA9");
}

TEST_CASE("match: full wildcard pattern returns every triple") {
    auto store = store_from_text(kThreeLines);
    auto rows = store.match(pat(PatternTerm::variable("s"), PatternTerm::variable("p"),
                                PatternTerm::variable("o")));
    CHECK(rows.size() == 3);
    // deterministic lexicographic order by bound values
    CHECK(rows.front().at("s") == Term::iri("http://x/a"));
}

TEST_CASE("match: fully-constant pattern acts as a membership test") {
    auto store = store_from_text(kThreeLines);
    auto hit = store.match(pat(PatternTerm::constant_term(Term::iri("http://x/a")),
                               PatternTerm::constant_term(Term::iri("http://x/p")),
                               PatternTerm::constant_term(Term::iri("http://x/b"))));
    REQUIRE(hit.size() == 1);
    CHECK(hit[0].empty());
}

TEST_CASE("match: unknown predicate constant yields an empty list") {
    auto store = store_from_text(kThreeLines);
    CHECK(store.match(pat(PatternTerm::variable("s"),
                          PatternTerm::constant_term(Term::iri("http://x/absent")),
                          PatternTerm::variable("o")))
              .empty());
}

TEST_CASE("match: repeated variable must bind consistently") {
    auto store = store_from_text("<http://x/a> <http://x/p> <http://x/a> .\n" + kThreeLines);
    auto rows = store.match(pat(PatternTerm::variable("x"), PatternTerm::variable("p"),
                                PatternTerm::variable("x")));
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].at("x") == Term::iri("http://x/a"));
}

TEST_CASE("index coherence: every driver index yields identical match results") {
    std::mt19937 rng(7);
    for (int trial = 0; trial < 60; ++trial) {
        auto store = test::random_store(rng, {40, 6, 4, 6});
        auto q = test::random_query(rng, store);
        for (const auto* p : q.patterns()) {
            auto via_spo = store.match(*p, DriverIndex::Spo);
            auto via_pos = store.match(*p, DriverIndex::Pos);
            auto via_osp = store.match(*p, DriverIndex::Osp);
            auto via_auto = store.match(*p);
            CHECK(via_spo == via_pos);
            CHECK(via_spo == via_osp);
            CHECK(via_spo == via_auto);
        }
    }
}

TEST_CASE("neighbors: unknown URI is isolated") {
    auto store = store_from_text(kThreeLines);
    CHECK(store.neighbors("http://x/nothing").empty());
}

TEST_CASE("neighbors: single outgoing edge") {
    auto store = store_from_text("<http://x/a> <http://x/p> <http://x/b> .\n");
    auto n = store.neighbors("http://x/a");
    REQUIRE(n.size() == 1);
    CHECK(n.begin()->first == "http://x/p");
    CHECK(n.begin()->second == kb::Direction::Outgoing);
}

TEST_CASE("neighbors equals the full-scan definition on random stores") {
    std::mt19937 rng(11);
    for (int trial = 0; trial < 40; ++trial) {
        auto store = test::random_store(rng, {60, 8, 5, 8});
        for (int s = 0; s < 8; ++s) {
            std::string uri = "http://t/s" + std::to_string(s);
            std::set<std::pair<std::string, kb::Direction>> expected;
            for (const auto& t : store.triples()) {
                if (t.subject.lexical == uri)
                    expected.emplace(t.predicate.lexical, kb::Direction::Outgoing);
                if (t.object.is_iri() && t.object.lexical == uri)
                    expected.emplace(t.predicate.lexical, kb::Direction::Incoming);
            }
            CHECK(store.neighbors(uri) == expected);
        }
    }
}

TEST_CASE("labels: explicit label plus local-name fallback") {
    auto store = store_from_text(
        "<http://x/Big_City> <http://www.w3.org/2000/01/rdf-schema#label> \"Metropolis\" .\n"
        "<http://x/Big_City> <http://x/in> <http://x/Some_Country> .\n");
    const auto* labels = store.labels_of("http://x/Big_City");
    REQUIRE(labels != nullptr);
    CHECK(std::count(labels->begin(), labels->end(), "Metropolis") == 1);
    CHECK(std::count(labels->begin(), labels->end(), "Big City") == 1);
    // objects and predicates get fallback labels too
    REQUIRE(store.labels_of("http://x/Some_Country") != nullptr);
    CHECK(store.labels_of("http://x/in")->front() == "in");
}

TEST_CASE("load then serialize then load is a fixpoint on the triple set") {
    std::mt19937 rng(23);
    for (int trial = 0; trial < 20; ++trial) {
        auto store = test::random_store(rng);
        std::ostringstream first;
        store.serialize_ntriples(first);
        auto reloaded = store_from_text(first.str());
        CHECK(reloaded.triples() == store.triples());
        std::ostringstream second;
        reloaded.serialize_ntriples(second);
        CHECK(first.str() == second.str());
    }
    auto toy = KbStore::load_ntriples(test::testdata("toy.nt"));
    std::ostringstream out;
    toy.serialize_ntriples(out);
    CHECK(store_from_text(out.str()).triples() == toy.triples());
}

TEST_CASE("execute: ASK over an existing triple is true") {
    auto store = store_from_text(kThreeLines);
    auto q = sparql::parse("ASK WHERE { <http://x/a> <http://x/p> <http://x/b> }");
    auto rs = kb::execute(store, q);
    CHECK(rs.kind == kb::ResultKind::Boolean);
    CHECK(rs.boolean);
}

TEST_CASE("execute: SELECT DISTINCT removes duplicate rows") {
    auto store = store_from_text(
        "<http://x/a> <http://x/p> <http://x/b> .\n"
        "<http://x/a> <http://x/q> <http://x/b> .\n");
    auto q = sparql::parse("SELECT DISTINCT ?s WHERE { ?s ?p <http://x/b> }");
    auto rs = kb::execute(store, q);
    REQUIRE(rs.rows.size() == 1);
    CHECK(rs.rows[0].at("s") == Term::iri("http://x/a"));

    auto dup = sparql::parse("SELECT ?s WHERE { ?s ?p <http://x/b> }");
    CHECK(kb::execute(store, dup).rows.size() == 2);
}

TEST_CASE("execute: COUNT over a two-pattern join matches brute force") {
    auto store = store_from_text(
        "<http://x/a> <http://x/p> <http://x/b> .\n"
        "<http://x/b> <http://x/p> <http://x/c> .\n"
        "<http://x/c> <http://x/p> <http://x/d> .\n"
        "<http://x/a> <http://x/p> <http://x/c> .\n");
    auto q = sparql::parse(
        "SELECT COUNT(?y) WHERE { ?x <http://x/p> ?y . ?y <http://x/p> ?z }");
    auto rs = kb::execute(store, q);
    auto expected = test::oracle_execute(store, q);
    CHECK(rs.count == expected.count);
    CHECK(rs.count == 3);  // (a,b,c),(b,c,d),(a,c,d)
}

TEST_CASE("execute: unsupported constructs are rejected, not silently dropped") {
    auto store = store_from_text(kThreeLines);
    auto q = sparql::parse(
        "SELECT ?s WHERE { ?s <http://x/p> ?o . FILTER(?o > 3) }");
    CHECK_THROWS_AS(kb::execute(store, q), UnsupportedFeatureError);
}

TEST_CASE("execute: unbound projected variable is an error") {
    auto store = store_from_text(kThreeLines);
    auto q = sparql::parse("SELECT ?nope WHERE { ?s <http://x/p> ?o }");
    CHECK_THROWS_AS(kb::execute(store, q), UnboundProjectionError);
}

TEST_CASE("execute: ungrounded template (slots) is a precondition violation") {
    auto store = store_from_text(kThreeLines);
    auto q = sparql::parse("SELECT ?s WHERE { ?s <slot text> ?o }");
    CHECK_THROWS_AS(kb::execute(store, q), Error);
}

TEST_CASE("executor equals the brute-force oracle on randomized cases") {
    std::mt19937 rng(99);
    int executed = 0;
    for (int trial = 0; trial < 300; ++trial) {
        auto store = test::random_store(rng);
        auto q = test::random_query(rng, store);
        auto got = kb::execute(store, q);
        auto want = test::oracle_execute(store, q);
        CHECK(got == want);
        ++executed;
    }
    CHECK(executed == 300);
}

TEST_SUITE_END();
