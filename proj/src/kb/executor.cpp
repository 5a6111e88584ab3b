#include "triad/kb/executor.hpp"

#include <algorithm>
#include <set>

#include "triad/errors.hpp"

namespace triad::kb {

namespace {

PatternTerm substituted(const PatternTerm& pt, const Binding& row) {
    if (!pt.is_variable()) return pt;
    auto it = row.find(pt.text);
    if (it == row.end()) return pt;
    return PatternTerm::constant_term(it->second);
}

}  // namespace

ResultSet execute(const KbStore& store, const sparql::SparqlTemplate& body) {
    if (!body.grounded())
        throw Error("query still contains mention slots and cannot be executed");
    if (auto feats = body.unsupported_features(); !feats.empty())
        throw UnsupportedFeatureError(std::move(feats));

    const auto pats = body.patterns();
    if (pats.empty()) throw Error("query has no triple patterns");

    const auto vars = body.variables();
    const std::set<std::string> bound(vars.begin(), vars.end());
    for (const auto& v : body.projection)
        if (!bound.count(v)) throw UnboundProjectionError(v);

    std::vector<Binding> rows{Binding{}};
    for (const auto* pat : pats) {
        std::vector<Binding> next;
        for (const auto& row : rows) {
            TriplePattern grounded{substituted(pat->subject, row),
                                   substituted(pat->predicate, row),
                                   substituted(pat->object, row)};
            for (auto& extension : store.match(grounded)) {
                Binding merged = row;
                merged.insert(extension.begin(), extension.end());
                next.push_back(std::move(merged));
            }
        }
        rows = std::move(next);
        if (rows.empty()) break;
    }

    ResultSet rs;
    switch (body.form) {
        case sparql::QueryForm::Ask:
            rs.kind = ResultKind::Boolean;
            rs.boolean = !rows.empty();
            break;
        case sparql::QueryForm::Select: {
            rs.kind = ResultKind::Bindings;
            for (const auto& row : rows) {
                Binding projected;
                for (const auto& v : body.projection) projected.emplace(v, row.at(v));
                rs.rows.push_back(std::move(projected));
            }
            std::sort(rs.rows.begin(), rs.rows.end());
            if (body.distinct)
                rs.rows.erase(std::unique(rs.rows.begin(), rs.rows.end()), rs.rows.end());
            break;
        }
        case sparql::QueryForm::Count: {
            rs.kind = ResultKind::Count;
            if (body.projection.empty()) {
                if (body.distinct) {
                    std::set<Binding> uniq(rows.begin(), rows.end());
                    rs.count = static_cast<long long>(uniq.size());
                } else {
                    rs.count = static_cast<long long>(rows.size());
                }
            } else {
                const auto& var = body.projection.front();
                if (body.distinct) {
                    std::set<Term> uniq;
                    for (const auto& row : rows) uniq.insert(row.at(var));
                    rs.count = static_cast<long long>(uniq.size());
                } else {
                    rs.count = static_cast<long long>(rows.size());
                }
            }
            break;
        }
    }
    return rs;
}

ResultSet execute(const KbStore& store, const sparql::SparqlQuery& query) {
    return execute(store, query.body);
}

}  // namespace triad::kb
