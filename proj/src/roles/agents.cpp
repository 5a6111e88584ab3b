#include "triad/roles/agents.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "triad/detail/text.hpp"
#include "triad/sparql/enumerate.hpp"
#include "triad/sparql/parser.hpp"

namespace triad::roles {

namespace {

std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) out.push_back(line);
    return out;
}

Mention parse_mention_field(std::string field) {
    field = trim(field);
    if (!field.empty() && field.front() == '?')
        return Mention::variable(trim(field.substr(1)));
    return Mention::explicit_text(field);
}

std::string mention_text(const Mention& m) {
    return m.is_variable ? "?" + m.text : m.text;
}

std::string uri_lines(const std::vector<index::UriCandidate>& pool) {
    std::string out;
    for (const auto& c : pool) {
        if (!out.empty()) out += '\n';
        out += c.uri;
    }
    return out;
}

/// LLM selection parsing: per reply line, the earliest pool URI occurring as
/// a substring (ties to the longer URI) is the pick. Order preserved,
/// off-pool text discarded, duplicates dropped.
std::vector<index::UriCandidate> parse_selection(const std::string& reply,
                                                 const std::vector<index::UriCandidate>& pool,
                                                 std::size_t limit) {
    std::vector<index::UriCandidate> out;
    std::set<std::string> taken;
    for (const auto& line : split_lines(reply)) {
        if (out.size() >= limit) break;
        const index::UriCandidate* best = nullptr;
        std::size_t best_pos = std::string::npos;
        for (const auto& c : pool) {
            std::size_t pos = line.find(c.uri);
            if (pos == std::string::npos) continue;
            if (pos < best_pos || (pos == best_pos && best && c.uri.size() > best->uri.size())) {
                best = &c;
                best_pos = pos;
            }
        }
        if (best && taken.insert(best->uri).second) out.push_back(*best);
    }
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i].rank = static_cast<int>(i) + 1;
        out[i].score = 1.0 / static_cast<double>(i + 1);
        out[i].source = index::CandidateSource::LlmSelected;
    }
    return out;
}

/// Fallback when every LLM pick was off-pool: top of the pool by filter rank.
std::vector<index::UriCandidate> top_of_pool(const std::vector<index::UriCandidate>& pool,
                                             std::size_t limit) {
    std::vector<index::UriCandidate> out(pool.begin(),
                                         pool.begin() + std::min(limit, pool.size()));
    for (std::size_t i = 0; i < out.size(); ++i) out[i].rank = static_cast<int>(i) + 1;
    return out;
}

/// Union of a prior attempt's pool and a fresh one, deduplicated by URI
/// (max score wins), re-ranked. Retry pools only ever widen.
std::vector<index::UriCandidate> union_pools(const std::vector<index::UriCandidate>* prior,
                                             std::vector<index::UriCandidate> fresh) {
    if (!prior || prior->empty()) {
        for (std::size_t i = 0; i < fresh.size(); ++i) fresh[i].rank = static_cast<int>(i) + 1;
        return fresh;
    }
    std::map<std::string, index::UriCandidate> merged;
    for (const auto& c : fresh) merged.emplace(c.uri, c);
    for (const auto& c : *prior) {
        auto [it, inserted] = merged.emplace(c.uri, c);
        if (!inserted && c.score > it->second.score) it->second = c;
    }
    std::vector<index::UriCandidate> out;
    out.reserve(merged.size());
    for (auto& [uri, c] : merged) out.push_back(std::move(c));
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.uri < b.uri;
    });
    for (std::size_t i = 0; i < out.size(); ++i) out[i].rank = static_cast<int>(i) + 1;
    return out;
}

}  // namespace

const char* answer_kind_name(AnswerKind k) {
    switch (k) {
        case AnswerKind::Select: return "select";
        case AnswerKind::Count: return "count";
        case AnswerKind::Boolean: return "yes or no";
    }
    return "?";
}

AnswerKind answer_kind_from_name(const std::string& name) {
    const std::string n = detail::to_lower(trim(name));
    if (n == "count") return AnswerKind::Count;
    if (n == "select") return AnswerKind::Select;
    if (n == "yes or no" || n == "boolean") return AnswerKind::Boolean;
    throw Error("unknown answer type: " + name);
}

const char* provenance_name(Provenance p) {
    switch (p) {
        case Provenance::Kb: return "kb";
        case Provenance::LlmFallback: return "llm-fallback";
        case Provenance::Abstain: return "abstain";
    }
    return "?";
}

std::string Answer::printable() const {
    if (is_abstain()) return "abstain";
    switch (kind) {
        case AnswerKind::Boolean: return boolean ? "true" : "false";
        case AnswerKind::Count: return std::to_string(count);
        case AnswerKind::Select: {
            std::string out;
            for (const auto& v : values) {
                if (!out.empty()) out += '\n';
                out += v;
            }
            return out;
        }
    }
    return {};
}

std::vector<TripleMention> parse_triple_mentions(const std::string& text) {
    std::vector<TripleMention> out;
    std::size_t pos = 0;
    while ((pos = text.find('<', pos)) != std::string::npos) {
        std::size_t close = text.find('>', pos + 1);
        if (close == std::string::npos) break;
        std::string body = text.substr(pos + 1, close - pos - 1);
        pos = close + 1;

        std::vector<std::string> fields;
        std::size_t start = 0;
        for (std::size_t i = 0; i <= body.size(); ++i) {
            if (i == body.size() || body[i] == ',') {
                fields.push_back(body.substr(start, i - start));
                start = i + 1;
            }
        }
        if (fields.size() != 3) continue;
        TripleMention m{parse_mention_field(fields[0]), parse_mention_field(fields[1]),
                        parse_mention_field(fields[2])};
        if (m.subject.text.empty() || m.relation.text.empty() || m.object.text.empty()) continue;
        out.push_back(std::move(m));
    }
    return out;
}

std::vector<std::string> explicit_entity_mentions(const std::vector<TripleMention>& mentions) {
    std::vector<std::string> out;
    std::set<std::string> seen;
    for (const auto& m : mentions) {
        for (const Mention* e : {&m.subject, &m.object})
            if (!e->is_variable && seen.insert(e->text).second) out.push_back(e->text);
    }
    return out;
}

std::vector<std::string> explicit_relation_mentions(const std::vector<TripleMention>& mentions) {
    std::vector<std::string> out;
    std::set<std::string> seen;
    for (const auto& m : mentions)
        if (!m.relation.is_variable && seen.insert(m.relation.text).second)
            out.push_back(m.relation.text);
    return out;
}

std::string render_mentions(const std::vector<TripleMention>& mentions) {
    std::string out;
    for (const auto& m : mentions) {
        if (!out.empty()) out += ' ';
        out += "<" + mention_text(m.subject) + ", " + mention_text(m.relation) + ", " +
               mention_text(m.object) + ">";
    }
    return out;
}

// --- G-Agent -----------------------------------------------------------------

std::vector<TripleMention> extract_triplets(AgentContext& ctx, const std::string& question) {
    if (question.empty()) throw Error("question is empty");
    const std::map<std::string, std::string> vars{{"Question Sentence", question}};
    for (int ask = 0; ask < 2; ++ask) {
        auto resp = ctx.gateway.call("triplet", vars, static_cast<std::size_t>(ctx.cfg.n_shots),
                                     ctx.temperature);
        auto mentions = parse_triple_mentions(resp.text);
        if (!mentions.empty()) return mentions;
    }
    throw ExtractionFailureError("no parseable triple mention for: " + question);
}

sparql::SparqlTemplate generate_template(AgentContext& ctx, const std::string& question,
                                         const std::vector<TripleMention>& mentions) {
    if (mentions.empty()) throw Error("no mentions to generate a template from");
    const std::map<std::string, std::string> vars{{"question sentence", question},
                                                  {"extracted triplets", render_mentions(mentions)}};

    std::set<std::string> mention_texts;
    for (const auto& m : mentions)
        for (const Mention* f : {&m.subject, &m.relation, &m.object})
            if (!f->is_variable) mention_texts.insert(f->text);

    std::string last_error;
    for (int ask = 0; ask < 2; ++ask) {
        auto resp = ctx.gateway.call("template", vars, static_cast<std::size_t>(ctx.cfg.n_shots),
                                     ctx.temperature);
        std::string text = trim(resp.text);
        // tolerate markdown fences around the query
        if (text.rfind("```", 0) == 0) {
            std::size_t nl = text.find('\n');
            std::size_t end = text.rfind("```");
            if (nl != std::string::npos && end > nl)
                text = trim(text.substr(nl + 1, end - nl - 1));
        }
        try {
            auto tmpl = sparql::parse(text);
            if (tmpl.patterns().empty()) throw Error("template has no triple patterns");
            for (const auto& slot : tmpl.slots())
                if (!mention_texts.count(slot))
                    throw Error("slot <" + slot + "> does not match any mention");
            const auto vars_in_patterns = tmpl.variables();
            const std::set<std::string> bound(vars_in_patterns.begin(), vars_in_patterns.end());
            for (const auto& v : tmpl.projection)
                if (!bound.count(v)) throw Error("projected ?" + v + " unbound");
            return tmpl;
        } catch (const Error& e) {
            last_error = e.what();
        }
    }
    throw TemplateFailureError("template generation failed: " + last_error);
}

AnswerKind classify_answer_type(AgentContext& ctx, const std::string& question, bool* defaulted) {
    if (defaulted) *defaulted = false;
    const std::map<std::string, std::string> vars{{"question sentence", question}};

    auto scan = [](const std::string& text) -> std::optional<AnswerKind> {
        struct Probe {
            const char* needle;
            AnswerKind kind;
        };
        static const Probe bracketed[] = {{"<count>", AnswerKind::Count},
                                          {"<select>", AnswerKind::Select},
                                          {"<yes or no>", AnswerKind::Boolean}};
        static const Probe bare[] = {{"yes or no", AnswerKind::Boolean},
                                     {"count", AnswerKind::Count},
                                     {"select", AnswerKind::Select}};
        for (const auto* probes : {bracketed, bare}) {
            std::size_t best_pos = std::string::npos;
            std::optional<AnswerKind> best;
            for (int i = 0; i < 3; ++i) {
                std::size_t pos = detail::find_ci(text, probes[i].needle);
                if (pos < best_pos) {
                    best_pos = pos;
                    best = probes[i].kind;
                }
            }
            if (best) return best;
        }
        return std::nullopt;
    };

    for (int ask = 0; ask < 2; ++ask) {
        auto resp = ctx.gateway.call("classify", vars, static_cast<std::size_t>(ctx.cfg.n_shots),
                                     ctx.temperature);
        if (auto kind = scan(resp.text)) return *kind;
    }
    if (defaulted) *defaulted = true;
    return AnswerKind::Select;  // most permissive downstream
}

// --- D-Agent -----------------------------------------------------------------

SelectionResult select_entities(AgentContext& ctx, const std::string& question,
                                const std::vector<TripleMention>& mentions,
                                const CandidateMap* prior_pools) {
    SelectionResult out;
    for (const auto& text : explicit_entity_mentions(mentions)) {
        auto fresh = ctx.index.search(text, index::UriKind::Entity,
                                      static_cast<std::size_t>(ctx.cfg.filter_pool));
        const std::vector<index::UriCandidate>* prior = nullptr;
        if (prior_pools) {
            auto it = prior_pools->find(text);
            if (it != prior_pools->end()) prior = &it->second;
        }
        auto pool = union_pools(prior, std::move(fresh));
        if (pool.empty()) throw StarvedMentionError(text);
        out.pools[text] = pool;

        auto resp = ctx.gateway.call("entity-select",
                                     {{"K", std::to_string(ctx.cfg.k_entity)},
                                      {"question sentence", question},
                                      {"entity mention", text},
                                      {"Entity URI list", uri_lines(pool)}},
                                     static_cast<std::size_t>(ctx.cfg.n_shots), ctx.temperature);
        auto selected =
            parse_selection(resp.text, pool, static_cast<std::size_t>(ctx.cfg.k_entity));
        if (selected.empty())
            selected = top_of_pool(pool, static_cast<std::size_t>(ctx.cfg.k_entity));
        out.selected[text] = std::move(selected);
    }
    return out;
}

namespace {

std::string endpoint_descriptor(const Mention& m, const kb::KbStore& store,
                                const CandidateMap& entity_selected) {
    if (m.is_variable) return "?" + m.text;
    std::string out = m.text;
    auto it = entity_selected.find(m.text);
    if (it != entity_selected.end() && !it->second.empty()) {
        std::string labels;
        for (const auto& c : it->second) {
            const auto* ls = store.labels_of(c.uri);
            std::string label = ls && !ls->empty() ? ls->front() : c.label;
            if (!labels.empty()) labels += ", ";
            labels += label;
        }
        out += " (" + labels + ")";
    }
    return out;
}

}  // namespace

SelectionResult select_relations(AgentContext& ctx, const std::string& question,
                                 const std::vector<TripleMention>& mentions,
                                 const CandidateMap& entity_selected,
                                 const CandidateMap* prior_pools) {
    SelectionResult out;
    for (const auto& text : explicit_relation_mentions(mentions)) {
        // endpoints of every mention using this relation text
        std::vector<const TripleMention*> uses;
        for (const auto& m : mentions)
            if (!m.relation.is_variable && m.relation.text == text) uses.push_back(&m);

        auto candidates_of = [&](const Mention& m) -> const std::vector<index::UriCandidate>* {
            if (m.is_variable) return nullptr;
            auto it = entity_selected.find(m.text);
            return it == entity_selected.end() ? nullptr : &it->second;
        };

        // one-hop traversal pool around the endpoint candidates
        std::set<std::string> traversal;
        std::set<std::string> connecting;
        for (const auto* use : uses) {
            const auto* subj = candidates_of(use->subject);
            const auto* obj = candidates_of(use->object);
            for (const auto* side : {subj, obj}) {
                if (!side) continue;
                for (const auto& c : *side)
                    for (const auto& [pred, dir] : ctx.store.neighbors(c.uri)) {
                        (void)dir;
                        traversal.insert(pred);
                    }
            }
            if (subj && obj) {
                for (const auto& cs : *subj)
                    for (const auto& co : *obj) {
                        kb::TriplePattern fwd{
                            kb::PatternTerm::constant_term(kb::Term::iri(cs.uri)),
                            kb::PatternTerm::variable("p"),
                            kb::PatternTerm::constant_term(kb::Term::iri(co.uri))};
                        kb::TriplePattern rev{
                            kb::PatternTerm::constant_term(kb::Term::iri(co.uri)),
                            kb::PatternTerm::variable("p"),
                            kb::PatternTerm::constant_term(kb::Term::iri(cs.uri))};
                        for (const auto& pattern : {fwd, rev})
                            for (const auto& row : ctx.store.match(pattern))
                                connecting.insert(row.at("p").lexical);
                    }
            }
        }

        std::vector<index::UriCandidate> fresh;
        if (!traversal.empty()) {
            for (const auto& uri : traversal) {
                const auto* ls = ctx.store.labels_of(uri);
                double score =
                    (ctx.cfg.connect_boost && connecting.count(uri)) ? 2.0 : 1.0;
                fresh.push_back(index::UriCandidate{
                    uri, ls && !ls->empty() ? ls->front() : kb::local_name_label(uri), score, 0,
                    index::CandidateSource::Traversal});
            }
            std::sort(fresh.begin(), fresh.end(), [](const auto& a, const auto& b) {
                if (a.score != b.score) return a.score > b.score;
                return a.uri < b.uri;
            });
            if (fresh.size() > static_cast<std::size_t>(ctx.cfg.relation_pool_cap))
                fresh.resize(static_cast<std::size_t>(ctx.cfg.relation_pool_cap));
        } else {
            // no explicit endpoint (or isolated candidates): label-based fallback
            fresh = ctx.index.search(text, index::UriKind::Relation,
                                     static_cast<std::size_t>(ctx.cfg.filter_pool));
        }

        const std::vector<index::UriCandidate>* prior = nullptr;
        if (prior_pools) {
            auto it = prior_pools->find(text);
            if (it != prior_pools->end()) prior = &it->second;
        }
        auto pool = union_pools(prior, std::move(fresh));
        if (pool.empty()) throw StarvedRelationError(text);
        out.pools[text] = pool;

        const TripleMention& first = *uses.front();
        const std::string pair =
            endpoint_descriptor(first.subject, ctx.store, entity_selected) + " and " +
            endpoint_descriptor(first.object, ctx.store, entity_selected);

        auto resp = ctx.gateway.call("relation-select",
                                     {{"K", std::to_string(ctx.cfg.k_relation)},
                                      {"question sentence", question},
                                      {"entity pair", pair},
                                      {"URI list", uri_lines(pool)}},
                                     static_cast<std::size_t>(ctx.cfg.n_shots), ctx.temperature);
        auto selected =
            parse_selection(resp.text, pool, static_cast<std::size_t>(ctx.cfg.k_relation));
        if (selected.empty())
            selected = top_of_pool(pool, static_cast<std::size_t>(ctx.cfg.k_relation));
        out.selected[text] = std::move(selected);
    }
    return out;
}

QuerySelection select_query(AgentContext& ctx, const std::string& question,
                            const sparql::SparqlTemplate& tmpl,
                            const CandidateMap& entity_selected,
                            const CandidateMap& relation_selected,
                            std::vector<CandidateVerdict>* verdicts_out) {
    auto to_slot_uris = [](const CandidateMap& m) {
        sparql::SlotUris out;
        for (const auto& [text, cands] : m) {
            auto& uris = out[text];
            uris.reserve(cands.size());
            for (const auto& c : cands) uris.push_back(c.uri);
        }
        return out;
    };
    auto candidates =
        sparql::enumerate_candidates(tmpl, to_slot_uris(entity_selected),
                                     to_slot_uris(relation_selected),
                                     static_cast<std::size_t>(ctx.cfg.enumeration_cap));

    QuerySelection out;
    std::vector<sparql::SparqlQuery> survivors;
    std::size_t unsupported_failures = 0;
    std::vector<std::string> unsupported_feats;
    for (const auto& q : candidates) {
        CandidateVerdict v{sparql::render(q), q.body.form, false};
        try {
            auto rs = kb::execute(ctx.store, q);
            switch (q.body.form) {
                case sparql::QueryForm::Ask: v.survived = true; break;
                case sparql::QueryForm::Select: v.survived = !rs.rows.empty(); break;
                case sparql::QueryForm::Count: v.survived = rs.count > 0; break;
            }
        } catch (const UnsupportedFeatureError& e) {
            ++unsupported_failures;
            unsupported_feats = e.features;
        } catch (const Error&) {
            // malformed candidate: eliminated
        }
        if (v.survived) survivors.push_back(q);
        out.verdicts.push_back(std::move(v));
    }
    if (verdicts_out) *verdicts_out = out.verdicts;

    if (survivors.empty()) {
        if (unsupported_failures == candidates.size() && !candidates.empty())
            throw UnsupportedFeatureError(std::move(unsupported_feats));
        throw NoFeasibleQueryError("all " + std::to_string(candidates.size()) +
                                   " candidate queries were eliminated");
    }
    if (survivors.size() == 1) {
        out.query = survivors.front();
        out.used_llm = false;
        return out;
    }

    std::string listing;
    for (const auto& q : survivors) {
        if (!listing.empty()) listing += '\n';
        listing += sparql::render(q);
    }
    auto resp = ctx.gateway.call("query-select",
                                 {{"question sentence", question},
                                  {"SPARQLs to choose", listing}},
                                 static_cast<std::size_t>(ctx.cfg.n_shots), ctx.temperature);
    const std::string reply = trim(resp.text);

    const sparql::SparqlQuery* chosen = nullptr;
    for (const auto& q : survivors) {
        if (reply == sparql::render(q)) {
            chosen = &q;
            break;
        }
    }
    if (!chosen) {
        for (const auto& q : survivors) {
            if (reply.find(sparql::render(q)) != std::string::npos) {
                chosen = &q;
                break;
            }
        }
    }
    if (!chosen) chosen = &survivors.front();  // off-list reply: top-ranked survivor
    out.query = *chosen;
    out.used_llm = true;
    return out;
}

// --- A-Agent -----------------------------------------------------------------

namespace {

std::set<std::string> binding_values(const kb::ResultSet& rs,
                                     const std::vector<std::string>& projection) {
    std::set<std::string> out;
    for (const auto& row : rs.rows)
        for (const auto& v : projection) {
            auto it = row.find(v);
            if (it != row.end()) out.insert(it->second.lexical);
        }
    return out;
}

std::string strip_trailing_punct(std::string s) {
    while (!s.empty() && (s.back() == '.' || s.back() == '!' || s.back() == '?')) s.pop_back();
    return trim(s);
}

}  // namespace

Answer answer(AgentContext& ctx, const std::string& question,
              const std::optional<sparql::SparqlQuery>& query, AnswerKind kind) {
    Answer a;
    a.kind = kind;

    if (query) {
        auto rs = kb::execute(ctx.store, *query);  // UnsupportedFeatureError is retryable
        a.provenance = Provenance::Kb;
        switch (kind) {
            case AnswerKind::Boolean:
                a.boolean = rs.kind == kb::ResultKind::Boolean ? rs.boolean
                            : rs.kind == kb::ResultKind::Count ? rs.count > 0
                                                               : !rs.rows.empty();
                break;
            case AnswerKind::Count:
                a.count = rs.kind == kb::ResultKind::Count ? rs.count
                          : rs.kind == kb::ResultKind::Boolean
                              ? (rs.boolean ? 1 : 0)
                              : static_cast<long long>(rs.rows.size());
                break;
            case AnswerKind::Select:
                if (rs.kind == kb::ResultKind::Bindings) {
                    a.values = binding_values(rs, query->body.projection);
                } else if (rs.kind == kb::ResultKind::Count) {
                    a.values = {std::to_string(rs.count)};
                } else {
                    a.values = {rs.boolean ? "true" : "false"};
                }
                break;
        }
        return a;
    }

    switch (kind) {
        case AnswerKind::Boolean: {
            auto resp = ctx.gateway.call("answer-boolean", {{"question sentence", question}},
                                         static_cast<std::size_t>(ctx.cfg.n_shots),
                                         ctx.temperature);
            const std::string t = detail::to_lower(trim(resp.text));
            if (t.rfind("true", 0) == 0 || t == "yes") {
                a.provenance = Provenance::LlmFallback;
                a.boolean = true;
            } else if (t.rfind("false", 0) == 0 || t == "no") {
                a.provenance = Provenance::LlmFallback;
                a.boolean = false;
            }  // anything else: abstain
            break;
        }
        case AnswerKind::Select: {
            auto resp = ctx.gateway.call("answer-fact", {{"question sentence", question}},
                                         static_cast<std::size_t>(ctx.cfg.n_shots),
                                         ctx.temperature);
            const std::string fact = strip_trailing_punct(trim(resp.text));
            if (!fact.empty()) {
                a.provenance = Provenance::LlmFallback;
                a.values = {fact};
            }
            break;
        }
        case AnswerKind::Count:
            break;  // no reliable LLM fallback for counting: abstain
    }
    return a;
}

}  // namespace triad::roles
