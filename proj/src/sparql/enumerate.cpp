#include "triad/sparql/enumerate.hpp"

#include <algorithm>
#include <queue>
#include <set>

#include "triad/errors.hpp"

namespace triad::sparql {

SparqlQuery instantiate(const SparqlTemplate& t,
                        const std::map<std::string, std::string>& assignment) {
    auto slot_list = t.slots();
    std::vector<std::string> missing;
    for (const auto& s : slot_list)
        if (!assignment.count(s)) missing.push_back(s);
    if (!missing.empty()) throw MissingSlotError(std::move(missing));

    SparqlQuery q;
    q.body = t;
    q.body.raw.clear();
    for (auto& item : q.body.items) {
        auto* p = std::get_if<kb::TriplePattern>(&item);
        if (!p) continue;
        for (auto* pt : {&p->subject, &p->predicate, &p->object}) {
            if (pt->is_slot()) *pt = kb::PatternTerm::constant_term(
                kb::Term::iri(assignment.at(pt->text)));
        }
    }
    for (const auto& s : slot_list) q.assignment.emplace(s, assignment.at(s));
    return q;
}

std::vector<SparqlQuery> enumerate_candidates(const SparqlTemplate& t,
                                              const SlotUris& entity_uris,
                                              const SlotUris& relation_uris,
                                              std::size_t cap) {
    if (cap == 0) throw Error("enumeration cap must be positive");

    const auto slot_list = t.slots();
    const auto rel_list = t.relation_slots();
    const std::set<std::string> relation_set(rel_list.begin(), rel_list.end());

    std::vector<const std::vector<std::string>*> dims;
    dims.reserve(slot_list.size());
    for (const auto& slot : slot_list) {
        const SlotUris& source = relation_set.count(slot) ? relation_uris : entity_uris;
        auto it = source.find(slot);
        if (it == source.end() || it->second.empty()) throw StarvedSlotError(slot);
        dims.push_back(&it->second);
    }

    std::vector<SparqlQuery> out;
    if (slot_list.empty()) {
        out.push_back(instantiate(t, {}));
        return out;
    }

    // Best-first walk of the product lattice: pop order is (rank sum, URI
    // tuple), each successor increments one index, so emission is globally
    // sorted without materializing the full product.
    struct Node {
        std::size_t rank_sum;
        std::vector<std::string> uris;
        std::vector<std::size_t> ix;
        bool operator>(const Node& other) const {
            if (rank_sum != other.rank_sum) return rank_sum > other.rank_sum;
            return uris > other.uris;
        }
    };

    auto make_node = [&](std::vector<std::size_t> ix) {
        Node n;
        n.rank_sum = 0;
        n.uris.reserve(ix.size());
        for (std::size_t d = 0; d < ix.size(); ++d) {
            n.rank_sum += ix[d] + 1;
            n.uris.push_back((*dims[d])[ix[d]]);
        }
        n.ix = std::move(ix);
        return n;
    };

    std::priority_queue<Node, std::vector<Node>, std::greater<>> heap;
    std::set<std::vector<std::size_t>> visited;
    std::vector<std::size_t> origin(slot_list.size(), 0);
    visited.insert(origin);
    heap.push(make_node(origin));

    while (!heap.empty() && out.size() < cap) {
        Node n = heap.top();
        heap.pop();
        std::map<std::string, std::string> assignment;
        for (std::size_t d = 0; d < slot_list.size(); ++d)
            assignment.emplace(slot_list[d], n.uris[d]);
        out.push_back(instantiate(t, assignment));
        for (std::size_t d = 0; d < slot_list.size(); ++d) {
            if (n.ix[d] + 1 >= dims[d]->size()) continue;
            auto next = n.ix;
            ++next[d];
            if (visited.insert(next).second) heap.push(make_node(std::move(next)));
        }
    }
    return out;
}

}  // namespace triad::sparql
