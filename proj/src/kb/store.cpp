#include "triad/kb/store.hpp"

#include <algorithm>
#include <fstream>
#include <ostream>

#include "triad/errors.hpp"

namespace triad::kb {

namespace {

// comparison keys for the permutation indexes
auto pos_key(const Triple& t) { return std::tie(t.predicate, t.object, t.subject); }
auto osp_key(const Triple& t) { return std::tie(t.object, t.subject, t.predicate); }

}  // namespace

KbStore KbStore::from_triples(std::vector<Triple> triples, const LoadOptions& opts) {
    KbStore store;
    store.triples_ = std::move(triples);
    store.finish_build(opts);
    return store;
}

void KbStore::add_label(const std::string& iri, std::string label) {
    auto& list = labels_[iri];
    auto it = std::lower_bound(list.begin(), list.end(), label);
    if (it == list.end() || *it != label) list.insert(it, std::move(label));
}

void KbStore::finish_build(const LoadOptions& opts) {
    std::sort(triples_.begin(), triples_.end());
    triples_.erase(std::unique(triples_.begin(), triples_.end()), triples_.end());

    pos_.resize(triples_.size());
    osp_.resize(triples_.size());
    for (std::uint32_t i = 0; i < triples_.size(); ++i) pos_[i] = osp_[i] = i;
    std::sort(pos_.begin(), pos_.end(), [this](std::uint32_t a, std::uint32_t b) {
        return pos_key(triples_[a]) < pos_key(triples_[b]);
    });
    std::sort(osp_.begin(), osp_.end(), [this](std::uint32_t a, std::uint32_t b) {
        return osp_key(triples_[a]) < osp_key(triples_[b]);
    });

    labels_.clear();
    const std::set<std::string> label_preds(opts.label_predicates.begin(),
                                            opts.label_predicates.end());
    for (const auto& t : triples_) {
        add_label(t.subject.lexical, local_name_label(t.subject.lexical));
        add_label(t.predicate.lexical, local_name_label(t.predicate.lexical));
        if (t.object.is_iri()) add_label(t.object.lexical, local_name_label(t.object.lexical));
        if (!t.object.is_iri() && label_preds.count(t.predicate.lexical))
            add_label(t.subject.lexical, t.object.lexical);
    }
}

bool KbStore::contains(const Triple& t) const {
    return std::binary_search(triples_.begin(), triples_.end(), t);
}

const std::vector<std::string>* KbStore::labels_of(const std::string& iri) const {
    auto it = labels_.find(iri);
    return it == labels_.end() ? nullptr : &it->second;
}

std::size_t KbStore::label_count() const {
    std::size_t n = 0;
    for (const auto& [iri, list] : labels_) n += list.size();
    return n;
}

namespace {

// Try to bind `pt` against term `value`; extends `row` and reports success.
bool bind_position(const PatternTerm& pt, const Term& value, Binding& row) {
    switch (pt.kind) {
        case PatternTerm::Kind::Constant:
            return pt.constant == value;
        case PatternTerm::Kind::Variable: {
            auto it = row.find(pt.text);
            if (it != row.end()) return it->second == value;
            row.emplace(pt.text, value);
            return true;
        }
        case PatternTerm::Kind::Slot:
            throw Error("pattern contains an unresolved mention slot <" + pt.text + ">");
    }
    return false;
}

bool match_triple(const TriplePattern& p, const Triple& t, Binding& out) {
    Binding row;
    if (!bind_position(p.subject, t.subject, row)) return false;
    if (!bind_position(p.predicate, t.predicate, row)) return false;
    if (!bind_position(p.object, t.object, row)) return false;
    out = std::move(row);
    return true;
}

bool binding_less(const Binding& a, const Binding& b) {
    return a < b;  // map comparison: lexicographic over (name, term) pairs
}

}  // namespace

std::vector<Binding> KbStore::match(const TriplePattern& pattern, DriverIndex driver) const {
    if (driver == DriverIndex::Auto) {
        if (pattern.subject.is_constant())
            driver = DriverIndex::Spo;
        else if (pattern.predicate.is_constant())
            driver = DriverIndex::Pos;
        else if (pattern.object.is_constant())
            driver = DriverIndex::Osp;
        else
            driver = DriverIndex::Spo;
    }

    std::vector<Binding> out;
    auto scan = [&](const Triple& t) {
        Binding row;
        if (match_triple(pattern, t, row)) out.push_back(std::move(row));
    };

    switch (driver) {
        case DriverIndex::Spo: {
            if (pattern.subject.is_constant()) {
                // range over the primary (s,p,o) order
                auto lo = std::lower_bound(
                    triples_.begin(), triples_.end(), pattern.subject.constant,
                    [](const Triple& t, const Term& s) { return t.subject < s; });
                for (auto it = lo; it != triples_.end() && it->subject == pattern.subject.constant;
                     ++it)
                    scan(*it);
            } else {
                for (const auto& t : triples_) scan(t);
            }
            break;
        }
        case DriverIndex::Pos: {
            if (pattern.predicate.is_constant()) {
                auto lo = std::lower_bound(
                    pos_.begin(), pos_.end(), pattern.predicate.constant,
                    [this](std::uint32_t i, const Term& p) { return triples_[i].predicate < p; });
                for (auto it = lo;
                     it != pos_.end() && triples_[*it].predicate == pattern.predicate.constant;
                     ++it)
                    scan(triples_[*it]);
            } else {
                for (std::uint32_t i : pos_) scan(triples_[i]);
            }
            break;
        }
        case DriverIndex::Osp: {
            if (pattern.object.is_constant()) {
                auto lo = std::lower_bound(
                    osp_.begin(), osp_.end(), pattern.object.constant,
                    [this](std::uint32_t i, const Term& o) { return triples_[i].object < o; });
                for (auto it = lo;
                     it != osp_.end() && triples_[*it].object == pattern.object.constant; ++it)
                    scan(triples_[*it]);
            } else {
                for (std::uint32_t i : osp_) scan(triples_[i]);
            }
            break;
        }
        case DriverIndex::Auto: break;  // unreachable
    }

    std::sort(out.begin(), out.end(), binding_less);
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::set<std::pair<std::string, Direction>> KbStore::neighbors(const std::string& iri) const {
    std::set<std::pair<std::string, Direction>> out;
    Term subject = Term::iri(iri);

    auto lo = std::lower_bound(triples_.begin(), triples_.end(), subject,
                               [](const Triple& t, const Term& s) { return t.subject < s; });
    for (auto it = lo; it != triples_.end() && it->subject == subject; ++it)
        out.emplace(it->predicate.lexical, Direction::Outgoing);

    auto olo = std::lower_bound(osp_.begin(), osp_.end(), subject,
                                [this](std::uint32_t i, const Term& o) {
                                    return triples_[i].object < o;
                                });
    for (auto it = olo; it != osp_.end() && triples_[*it].object == subject; ++it)
        out.emplace(triples_[*it].predicate.lexical, Direction::Incoming);

    return out;
}

void KbStore::serialize_ntriples(std::ostream& out) const {
    for (const auto& t : triples_) {
        out << t.subject.to_ntriples() << ' ' << t.predicate.to_ntriples() << ' '
            << t.object.to_ntriples() << " .\n";
    }
}

void KbStore::save_ntriples(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) throw UserError("cannot write N-Triples file: " + path.string());
    serialize_ntriples(out);
}

}  // namespace triad::kb
