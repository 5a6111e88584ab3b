#include "triad/index/mention_index.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

#include "triad/detail/text.hpp"
#include "triad/errors.hpp"

namespace triad::index {

namespace {

// Latin-1 supplement / Latin Extended-A to ASCII. Anything else non-ASCII
// acts as a token separator.
const char* fold_codepoint(unsigned long cp) {
    switch (cp) {
        case 0xC0: case 0xC1: case 0xC2: case 0xC3: case 0xC4: case 0xC5:
        case 0xE0: case 0xE1: case 0xE2: case 0xE3: case 0xE4: case 0xE5:
        case 0x100: case 0x101: case 0x102: case 0x103: case 0x104: case 0x105:
            return "a";
        case 0xC7: case 0xE7: case 0x106: case 0x107: case 0x10C: case 0x10D:
            return "c";
        case 0xC8: case 0xC9: case 0xCA: case 0xCB:
        case 0xE8: case 0xE9: case 0xEA: case 0xEB:
        case 0x112: case 0x113: case 0x118: case 0x119: case 0x11A: case 0x11B:
            return "e";
        case 0xCC: case 0xCD: case 0xCE: case 0xCF:
        case 0xEC: case 0xED: case 0xEE: case 0xEF:
        case 0x12A: case 0x12B:
            return "i";
        case 0xD1: case 0xF1: case 0x143: case 0x144:
            return "n";
        case 0xD2: case 0xD3: case 0xD4: case 0xD5: case 0xD6: case 0xD8:
        case 0xF2: case 0xF3: case 0xF4: case 0xF5: case 0xF6: case 0xF8:
        case 0x14C: case 0x14D:
            return "o";
        case 0xD9: case 0xDA: case 0xDB: case 0xDC:
        case 0xF9: case 0xFA: case 0xFB: case 0xFC: case 0x16A: case 0x16B:
            return "u";
        case 0xDD: case 0xFD: case 0xFF: case 0x176: case 0x177: case 0x178:
            return "y";
        case 0xDF: return "ss";
        case 0x152: return "oe";
        case 0x153: return "oe";
        case 0xC6: case 0xE6: return "ae";
        case 0x160: case 0x161: return "s";
        case 0x17D: case 0x17E: case 0x179: case 0x17A: case 0x17B: case 0x17C:
            return "z";
        default: return nullptr;
    }
}

// Decode one UTF-8 codepoint; advances i. Invalid bytes come back as-is.
unsigned long next_codepoint(std::string_view s, std::size_t& i) {
    unsigned char c = static_cast<unsigned char>(s[i]);
    if (c < 0x80) {
        ++i;
        return c;
    }
    int extra = 0;
    unsigned long cp = 0;
    if ((c & 0xE0) == 0xC0) {
        extra = 1;
        cp = c & 0x1F;
    } else if ((c & 0xF0) == 0xE0) {
        extra = 2;
        cp = c & 0x0F;
    } else if ((c & 0xF8) == 0xF0) {
        extra = 3;
        cp = c & 0x07;
    } else {
        ++i;
        return c;
    }
    if (i + extra >= s.size()) {
        ++i;
        return c;
    }
    for (int k = 1; k <= extra; ++k) {
        unsigned char cc = static_cast<unsigned char>(s[i + k]);
        if ((cc & 0xC0) != 0x80) {
            ++i;
            return c;
        }
        cp = (cp << 6) | (cc & 0x3F);
    }
    i += extra + 1;
    return cp;
}

}  // namespace

std::vector<std::string> normalize_tokens(std::string_view text) {
    std::vector<std::string> tokens;
    std::string current;
    auto flush = [&] {
        if (!current.empty()) {
            tokens.push_back(current);
            current.clear();
        }
    };
    std::size_t i = 0;
    while (i < text.size()) {
        unsigned long cp = next_codepoint(text, i);
        if (cp < 0x80) {
            char c = static_cast<char>(cp);
            if (std::isalnum(static_cast<unsigned char>(c)))
                current += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
            else
                flush();
        } else if (const char* folded = fold_codepoint(cp)) {
            current += folded;
        } else {
            flush();
        }
    }
    flush();
    return tokens;
}

std::string normalize_label(std::string_view text) {
    std::string out;
    for (const auto& tok : normalize_tokens(text)) {
        if (!out.empty()) out += ' ';
        out += tok;
    }
    return out;
}

void MentionIndex::SubIndex::add(std::string uri, std::string label) {
    Doc d;
    d.uri = std::move(uri);
    d.label = std::move(label);
    d.tokens = normalize_tokens(d.label);
    d.normalized = normalize_label(d.label);
    docs.push_back(std::move(d));
}

void MentionIndex::SubIndex::finish() {
    std::sort(docs.begin(), docs.end(), [](const Doc& a, const Doc& b) {
        return std::tie(a.uri, a.label) < std::tie(b.uri, b.label);
    });
    docs.erase(std::unique(docs.begin(), docs.end(),
                           [](const Doc& a, const Doc& b) {
                               return a.uri == b.uri && a.label == b.label;
                           }),
               docs.end());
    postings.clear();
    total_tokens = 0.0;
    for (std::size_t id = 0; id < docs.size(); ++id) {
        total_tokens += static_cast<double>(docs[id].tokens.size());
        std::set<std::string> uniq(docs[id].tokens.begin(), docs[id].tokens.end());
        for (const auto& tok : uniq) postings[tok].push_back(id);
    }
}

MentionIndex MentionIndex::build(const kb::KbStore& store) {
    std::set<std::string> entity_uris;
    std::set<std::string> relation_uris;
    for (const auto& t : store.triples()) {
        entity_uris.insert(t.subject.lexical);
        relation_uris.insert(t.predicate.lexical);
        if (t.object.is_iri()) entity_uris.insert(t.object.lexical);
    }

    MentionIndex ix;
    auto add_all = [&](SubIndex& sub, const std::set<std::string>& uris) {
        for (const auto& uri : uris) {
            const auto* labels = store.labels_of(uri);
            if (!labels) continue;
            for (const auto& label : *labels) sub.add(uri, label);
        }
    };
    add_all(ix.entities_, entity_uris);
    add_all(ix.relations_, relation_uris);
    ix.entities_.finish();
    ix.relations_.finish();
    return ix;
}

std::vector<UriCandidate> MentionIndex::search(const std::string& mention, UriKind kind,
                                               std::size_t limit) const {
    const SubIndex& sub_index = sub(kind);
    std::vector<UriCandidate> out;
    if (limit == 0 || sub_index.docs.empty()) return out;

    auto query_tokens = normalize_tokens(mention);
    std::set<std::string> uniq_terms(query_tokens.begin(), query_tokens.end());
    if (uniq_terms.empty()) return out;
    const std::string query_normalized = normalize_label(mention);

    const double n_docs = static_cast<double>(sub_index.docs.size());
    const double avg_len = sub_index.total_tokens / n_docs;

    std::map<std::size_t, double> scores;
    for (const auto& term : uniq_terms) {
        auto it = sub_index.postings.find(term);
        if (it == sub_index.postings.end()) continue;
        const double df = static_cast<double>(it->second.size());
        const double idf = std::log(1.0 + (n_docs - df + 0.5) / (df + 0.5));
        for (std::size_t id : it->second) {
            const Doc& doc = sub_index.docs[id];
            const double tf = static_cast<double>(
                std::count(doc.tokens.begin(), doc.tokens.end(), term));
            const double dl = static_cast<double>(doc.tokens.size());
            const double norm = tf + kBm25K1 * (1.0 - kBm25B + kBm25B * dl / avg_len);
            scores[id] += idf * (tf * (kBm25K1 + 1.0)) / norm;
        }
    }

    // best (score, label) per URI; exact-normalized-label match dominates
    std::map<std::string, std::pair<double, std::string>> per_uri;
    for (const auto& [id, bm25] : scores) {
        const Doc& doc = sub_index.docs[id];
        double score = bm25;
        if (doc.normalized == query_normalized) score += kExactMatchBonus;
        auto it = per_uri.find(doc.uri);
        if (it == per_uri.end() || score > it->second.first ||
            (score == it->second.first && doc.label < it->second.second))
            per_uri[doc.uri] = {score, doc.label};
    }

    std::vector<UriCandidate> all;
    all.reserve(per_uri.size());
    for (const auto& [uri, best] : per_uri)
        all.push_back(UriCandidate{uri, best.second, best.first, 0, CandidateSource::TextFilter});
    std::sort(all.begin(), all.end(), [](const UriCandidate& a, const UriCandidate& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.uri < b.uri;
    });
    if (all.size() > limit) all.resize(limit);
    for (std::size_t i = 0; i < all.size(); ++i) all[i].rank = static_cast<int>(i) + 1;
    return all;
}

std::size_t MentionIndex::doc_count() const {
    return entities_.docs.size() + relations_.docs.size();
}

std::size_t MentionIndex::doc_count(UriKind kind) const { return sub(kind).docs.size(); }

void MentionIndex::save(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) throw UserError("cannot write index snapshot: " + path.string());
    out << nlohmann::json{{"format", "triad-mention-index"}, {"version", 1}}.dump() << '\n';
    auto dump_sub = [&](const SubIndex& sub_index, const char* kind) {
        for (const auto& doc : sub_index.docs) {
            out << nlohmann::json{{"kind", kind}, {"uri", doc.uri}, {"label", doc.label}}.dump()
                << '\n';
        }
    };
    dump_sub(entities_, "entity");
    dump_sub(relations_, "relation");
}

MentionIndex MentionIndex::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw UserError("cannot open index snapshot: " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw UserError("empty index snapshot: " + path.string());
    auto header = nlohmann::json::parse(line, nullptr, false);
    if (header.is_discarded() || header.value("format", "") != "triad-mention-index")
        throw UserError("not a mention-index snapshot: " + path.string());

    MentionIndex ix;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        auto j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.contains("kind") || !j.contains("uri") || !j.contains("label"))
            throw UserError("bad snapshot record at line " + std::to_string(line_no));
        SubIndex& sub_index = (j["kind"] == "relation") ? ix.relations_ : ix.entities_;
        sub_index.add(j["uri"].get<std::string>(), j["label"].get<std::string>());
    }
    ix.entities_.finish();
    ix.relations_.finish();
    return ix;
}

}  // namespace triad::index
