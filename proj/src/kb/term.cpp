#include "triad/kb/term.hpp"

namespace triad::kb {

std::string escape_literal(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '\\': out += "\\\\"; break;
            case '"': out += "\\\""; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            case '\t': out += "\\t"; break;
            default: out += c;
        }
    }
    return out;
}

std::string Term::to_ntriples() const {
    if (kind == TermKind::Iri) return "<" + lexical + ">";
    return "\"" + escape_literal(lexical) + "\"" + tag;
}

std::string local_name_label(std::string_view iri) {
    auto cut = iri.find_last_of("/#");
    std::string_view local = (cut == std::string_view::npos) ? iri : iri.substr(cut + 1);
    if (local.empty()) return std::string(iri);
    std::string out(local);
    for (char& c : out)
        if (c == '_') c = ' ';
    return out;
}

}  // namespace triad::kb
