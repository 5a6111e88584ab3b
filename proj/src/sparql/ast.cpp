#include "triad/sparql/ast.hpp"

#include <algorithm>
#include <set>

namespace triad::sparql {

std::vector<const kb::TriplePattern*> SparqlTemplate::patterns() const {
    std::vector<const kb::TriplePattern*> out;
    for (const auto& item : items)
        if (const auto* p = std::get_if<kb::TriplePattern>(&item)) out.push_back(p);
    return out;
}

namespace {

template <typename Fn>
void for_each_position(const SparqlTemplate& t, Fn&& fn) {
    for (const auto& item : t.items) {
        const auto* p = std::get_if<kb::TriplePattern>(&item);
        if (!p) continue;
        fn(p->subject, false);
        fn(p->predicate, true);
        fn(p->object, false);
    }
}

}  // namespace

std::vector<std::string> SparqlTemplate::slots() const {
    std::vector<std::string> out;
    std::set<std::string> seen;
    for_each_position(*this, [&](const kb::PatternTerm& pt, bool) {
        if (pt.is_slot() && seen.insert(pt.text).second) out.push_back(pt.text);
    });
    return out;
}

std::vector<std::string> SparqlTemplate::relation_slots() const {
    std::vector<std::string> out;
    std::set<std::string> seen;
    for_each_position(*this, [&](const kb::PatternTerm& pt, bool predicate_position) {
        if (predicate_position && pt.is_slot() && seen.insert(pt.text).second)
            out.push_back(pt.text);
    });
    return out;
}

std::vector<std::string> SparqlTemplate::variables() const {
    std::vector<std::string> out;
    std::set<std::string> seen;
    for_each_position(*this, [&](const kb::PatternTerm& pt, bool) {
        if (pt.is_variable() && seen.insert(pt.text).second) out.push_back(pt.text);
    });
    return out;
}

std::vector<std::string> SparqlTemplate::unsupported_features() const {
    std::vector<std::string> out;
    for (const auto& item : items)
        if (const auto* u = std::get_if<UnsupportedClause>(&item)) out.push_back(u->keyword);
    for (const auto& u : trailing) out.push_back(u.keyword);
    return out;
}

namespace {

std::string term_text(const kb::PatternTerm& pt) {
    switch (pt.kind) {
        case kb::PatternTerm::Kind::Variable: return "?" + pt.text;
        case kb::PatternTerm::Kind::Slot: return "<" + pt.text + ">";
        case kb::PatternTerm::Kind::Constant: return pt.constant.to_ntriples();
    }
    return {};
}

}  // namespace

std::string render(const SparqlTemplate& t) {
    std::string out;
    switch (t.form) {
        case QueryForm::Select:
            out = "SELECT ";
            if (t.distinct) out += "DISTINCT ";
            for (std::size_t i = 0; i < t.projection.size(); ++i) {
                if (i) out += ' ';
                out += "?" + t.projection[i];
            }
            break;
        case QueryForm::Count:
            out = "SELECT COUNT(";
            if (t.distinct) out += "DISTINCT ";
            out += t.projection.empty() ? "*" : "?" + t.projection.front();
            out += ")";
            break;
        case QueryForm::Ask: out = "ASK"; break;
    }
    out += " WHERE { ";
    for (std::size_t i = 0; i < t.items.size(); ++i) {
        if (i) out += " . ";
        if (const auto* p = std::get_if<kb::TriplePattern>(&t.items[i]))
            out += term_text(p->subject) + " " + term_text(p->predicate) + " " +
                   term_text(p->object);
        else
            out += std::get<UnsupportedClause>(t.items[i]).raw;
    }
    out += " }";
    for (const auto& u : t.trailing) out += " " + u.raw;
    return out;
}

std::string render(const SparqlQuery& q) { return render(q.body); }

}  // namespace triad::sparql
