#include <fstream>
#include <istream>
#include <string>

#include "triad/detail/text.hpp"
#include "triad/errors.hpp"
#include "triad/kb/store.hpp"

namespace triad::kb {

namespace {

struct LineCursor {
    std::string_view text;
    std::size_t pos = 0;

    void skip_ws() {
        while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t')) ++pos;
    }
    bool at_end() const { return pos >= text.size(); }
    char peek() const { return text[pos]; }
};

bool valid_absolute_iri(std::string_view iri) {
    // require a scheme per RFC 3986: ALPHA *(ALPHA / DIGIT / "+" / "-" / ".") ":"
    if (iri.empty()) return false;
    if (!std::isalpha(static_cast<unsigned char>(iri[0]))) return false;
    for (std::size_t i = 1; i < iri.size(); ++i) {
        char c = iri[i];
        if (c == ':') return i + 1 < iri.size();
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '+' && c != '-' && c != '.')
            return false;
    }
    return false;
}

// <...> term; returns the IRI text.
std::string parse_iri(LineCursor& cur) {
    if (cur.at_end() || cur.peek() != '<') throw Error("expected '<'");
    std::size_t start = ++cur.pos;
    while (cur.pos < cur.text.size() && cur.text[cur.pos] != '>') {
        char c = cur.text[cur.pos];
        if (c == '<' || c == ' ' || c == '"') throw Error("invalid character in IRI");
        ++cur.pos;
    }
    if (cur.pos >= cur.text.size()) throw Error("unterminated IRI");
    std::string iri(cur.text.substr(start, cur.pos - start));
    ++cur.pos;  // consume '>'
    if (!valid_absolute_iri(iri)) throw Error("IRI is not absolute: <" + iri + ">");
    return iri;
}

Term parse_literal(LineCursor& cur) {
    // opening quote already peeked
    std::size_t start = ++cur.pos;
    bool escaped = false;
    while (cur.pos < cur.text.size()) {
        char c = cur.text[cur.pos];
        if (escaped) {
            escaped = false;
        } else if (c == '\\') {
            escaped = true;
        } else if (c == '"') {
            break;
        }
        ++cur.pos;
    }
    if (cur.pos >= cur.text.size()) throw Error("unterminated literal");
    auto body = cur.text.substr(start, cur.pos - start);
    ++cur.pos;  // closing quote
    auto value = detail::unescape_quoted(body);
    if (!value) throw Error("bad escape in literal");

    std::string tag;
    if (cur.pos < cur.text.size() && cur.text[cur.pos] == '@') {
        std::size_t tag_start = cur.pos;
        ++cur.pos;
        while (cur.pos < cur.text.size() &&
               (std::isalnum(static_cast<unsigned char>(cur.text[cur.pos])) ||
                cur.text[cur.pos] == '-'))
            ++cur.pos;
        if (cur.pos == tag_start + 1) throw Error("empty language tag");
        tag = std::string(cur.text.substr(tag_start, cur.pos - tag_start));
    } else if (cur.pos + 1 < cur.text.size() && cur.text[cur.pos] == '^' &&
               cur.text[cur.pos + 1] == '^') {
        cur.pos += 2;
        std::string dt = parse_iri(cur);
        tag = "^^<" + dt + ">";
    }
    return Term::literal(*value, tag);
}

Term parse_object(LineCursor& cur) {
    if (cur.at_end()) throw Error("missing object");
    if (cur.peek() == '<') return Term::iri(parse_iri(cur));
    if (cur.peek() == '"') return parse_literal(cur);
    throw Error("object must be an IRI or a literal");
}

}  // namespace

/// Parse one N-Triples line into a triple. Returns false for blank and
/// comment lines. Throws triad::Error (without line context) on bad syntax.
static bool parse_ntriples_line(std::string_view line, Triple& out) {
    LineCursor cur{line, 0};
    cur.skip_ws();
    if (cur.at_end() || cur.peek() == '#') return false;

    out.subject = Term::iri(parse_iri(cur));
    cur.skip_ws();
    out.predicate = Term::iri(parse_iri(cur));
    cur.skip_ws();
    out.object = parse_object(cur);
    cur.skip_ws();
    if (cur.at_end() || cur.peek() != '.') throw Error("missing terminal '.'");
    ++cur.pos;
    cur.skip_ws();
    if (!cur.at_end() && cur.peek() != '#') throw Error("trailing content after '.'");
    return true;
}

KbStore KbStore::parse_ntriples(std::istream& in, const LoadOptions& opts, LoadStats* stats) {
    KbStore store;
    LoadStats local;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        ++local.lines;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        Triple t;
        try {
            if (!parse_ntriples_line(line, t)) continue;
        } catch (const Error& e) {
            if (opts.strict) throw NtriplesError(line_no, line, e.what());
            ++local.skipped;
            continue;
        }
        store.triples_.push_back(std::move(t));
        ++local.triples;
    }
    store.finish_build(opts);
    if (stats) *stats = local;
    return store;
}

KbStore KbStore::load_ntriples(const std::filesystem::path& path, const LoadOptions& opts,
                               LoadStats* stats) {
    std::ifstream in(path);
    if (!in) throw UserError("cannot open N-Triples file: " + path.string());
    return parse_ntriples(in, opts, stats);
}

}  // namespace triad::kb
