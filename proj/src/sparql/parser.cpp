#include "triad/sparql/parser.hpp"

#include <cctype>
#include <set>

#include "triad/detail/text.hpp"
#include "triad/errors.hpp"

namespace triad::sparql {

namespace {

struct Token {
    enum class Type {
        Keyword,
        Var,
        IriOrSlot,
        Literal,
        LBrace,
        RBrace,
        Dot,
        Star,
        LParen,
        RParen,
        End,
    };
    Type type = Type::End;
    std::string text;       // keyword (uppercased), var name, or bracket content
    kb::Term literal;       // Type::Literal
    std::size_t offset = 0; // byte offset in the source
};

const std::set<std::string> kKeywords = {"SELECT", "DISTINCT", "WHERE",    "ASK",
                                         "COUNT",  "AS",       "FILTER",   "OPTIONAL",
                                         "GROUP",  "BY",       "HAVING"};

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    Token next() {
        if (has_peek_) {
            has_peek_ = false;
            return peeked_;
        }
        return lex();
    }

    const Token& peek() {
        if (!has_peek_) {
            peeked_ = lex();
            has_peek_ = true;
        }
        return peeked_;
    }

    /// Raw balanced capture starting at the next non-space character, which
    /// must be `open`. Returns the whitespace-collapsed slice including the
    /// delimiters. Only legal when no token is buffered.
    std::string capture_balanced(char open, char close) {
        if (has_peek_) throw SparqlParseError(peeked_.offset, "internal lexer state");
        skip_ws();
        if (pos_ >= src_.size() || src_[pos_] != open)
            throw SparqlParseError(pos_, std::string("expected '") + open + "'");
        std::size_t start = pos_;
        int depth = 0;
        bool in_string = false;
        bool escaped = false;
        for (; pos_ < src_.size(); ++pos_) {
            char c = src_[pos_];
            if (in_string) {
                if (escaped)
                    escaped = false;
                else if (c == '\\')
                    escaped = true;
                else if (c == '"')
                    in_string = false;
                continue;
            }
            if (c == '"') {
                in_string = true;
            } else if (c == open) {
                ++depth;
            } else if (c == close) {
                if (--depth == 0) {
                    ++pos_;
                    return detail::collapse_ws(src_.substr(start, pos_ - start));
                }
            }
        }
        throw SparqlParseError(start, std::string("unbalanced '") + open + "'");
    }

private:
    void skip_ws() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }

    Token lex() {
        skip_ws();
        Token tok;
        tok.offset = pos_;
        if (pos_ >= src_.size()) {
            tok.type = Token::Type::End;
            return tok;
        }
        char c = src_[pos_];
        switch (c) {
            case '{': ++pos_; tok.type = Token::Type::LBrace; return tok;
            case '}': ++pos_; tok.type = Token::Type::RBrace; return tok;
            case '(': ++pos_; tok.type = Token::Type::LParen; return tok;
            case ')': ++pos_; tok.type = Token::Type::RParen; return tok;
            case '.': ++pos_; tok.type = Token::Type::Dot; return tok;
            case '*': ++pos_; tok.type = Token::Type::Star; return tok;
            default: break;
        }
        if (c == '?') {
            ++pos_;
            std::size_t start = pos_;
            while (pos_ < src_.size() &&
                   (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
                ++pos_;
            if (pos_ == start) throw SparqlParseError(tok.offset, "empty variable name");
            tok.type = Token::Type::Var;
            tok.text = std::string(src_.substr(start, pos_ - start));
            return tok;
        }
        if (c == '<') {
            ++pos_;
            std::size_t start = pos_;
            while (pos_ < src_.size() && src_[pos_] != '>' && src_[pos_] != '<') ++pos_;
            if (pos_ >= src_.size() || src_[pos_] != '>')
                throw SparqlParseError(tok.offset, "unterminated '<'");
            tok.type = Token::Type::IriOrSlot;
            tok.text = std::string(src_.substr(start, pos_ - start));
            ++pos_;
            if (tok.text.empty()) throw SparqlParseError(tok.offset, "empty angle brackets");
            return tok;
        }
        if (c == '"') {
            ++pos_;
            std::size_t start = pos_;
            bool escaped = false;
            while (pos_ < src_.size()) {
                char d = src_[pos_];
                if (escaped)
                    escaped = false;
                else if (d == '\\')
                    escaped = true;
                else if (d == '"')
                    break;
                ++pos_;
            }
            if (pos_ >= src_.size()) throw SparqlParseError(tok.offset, "unterminated literal");
            auto body = src_.substr(start, pos_ - start);
            ++pos_;
            auto value = detail::unescape_quoted(body);
            if (!value) throw SparqlParseError(tok.offset, "bad escape in literal");
            std::string tag;
            if (pos_ < src_.size() && src_[pos_] == '@') {
                std::size_t tag_start = pos_++;
                while (pos_ < src_.size() &&
                       (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '-'))
                    ++pos_;
                tag = std::string(src_.substr(tag_start, pos_ - tag_start));
                if (tag.size() < 2) throw SparqlParseError(tag_start, "empty language tag");
            } else if (pos_ + 1 < src_.size() && src_[pos_] == '^' && src_[pos_ + 1] == '^') {
                pos_ += 2;
                if (pos_ >= src_.size() || src_[pos_] != '<')
                    throw SparqlParseError(pos_, "expected datatype IRI");
                std::size_t dt_start = ++pos_;
                while (pos_ < src_.size() && src_[pos_] != '>') ++pos_;
                if (pos_ >= src_.size()) throw SparqlParseError(dt_start, "unterminated datatype IRI");
                tag = "^^<" + std::string(src_.substr(dt_start, pos_ - dt_start)) + ">";
                ++pos_;
            }
            tok.type = Token::Type::Literal;
            tok.literal = kb::Term::literal(*value, tag);
            return tok;
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            std::size_t start = pos_;
            while (pos_ < src_.size() && std::isalpha(static_cast<unsigned char>(src_[pos_])))
                ++pos_;
            std::string word = detail::to_lower(src_.substr(start, pos_ - start));
            for (char& ch : word) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
            if (!kKeywords.count(word))
                throw SparqlParseError(tok.offset, "unexpected token '" + word + "'");
            tok.type = Token::Type::Keyword;
            tok.text = word;
            return tok;
        }
        throw SparqlParseError(tok.offset, std::string("unexpected character '") + c + "'");
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    Token peeked_;
    bool has_peek_ = false;
};

bool is_keyword(const Token& t, std::string_view kw) {
    return t.type == Token::Type::Keyword && t.text == kw;
}

class Parser {
public:
    explicit Parser(std::string_view src) : lx_(src), src_(src) {}

    SparqlTemplate run() {
        SparqlTemplate t;
        t.raw = std::string(src_);
        Token tok = lx_.next();
        bool select_star = false;
        if (is_keyword(tok, "SELECT")) {
            if (is_keyword(lx_.peek(), "DISTINCT")) {
                lx_.next();
                t.distinct = true;
            }
            parse_projection(t, select_star);
        } else if (is_keyword(tok, "ASK")) {
            t.form = QueryForm::Ask;
        } else {
            throw SparqlParseError(tok.offset, "expected SELECT or ASK");
        }
        if (is_keyword(lx_.peek(), "WHERE")) lx_.next();
        parse_group(t);
        parse_trailing(t);
        if (select_star) t.projection = t.variables();
        Token end = lx_.next();
        if (end.type != Token::Type::End)
            throw SparqlParseError(end.offset, "trailing content after query");
        if (t.form == QueryForm::Select && t.projection.empty())
            throw SparqlParseError(0, "SELECT projects no variables");
        return t;
    }

private:
    void parse_projection(SparqlTemplate& t, bool& select_star) {
        const Token& first = lx_.peek();
        if (is_keyword(first, "COUNT") || first.type == Token::Type::LParen) {
            parse_count(t);
            return;
        }
        if (first.type == Token::Type::Star) {
            lx_.next();
            select_star = true;
            return;
        }
        while (lx_.peek().type == Token::Type::Var) {
            Token v = lx_.next();
            t.projection.push_back(v.text);
        }
        if (t.projection.empty())
            throw SparqlParseError(first.offset, "expected projection variables, '*' or COUNT");
    }

    // COUNT(?x) / COUNT(DISTINCT ?x) / COUNT(*) / (COUNT(...) AS ?alias)
    void parse_count(SparqlTemplate& t) {
        t.form = QueryForm::Count;
        bool parenthesized = false;
        if (lx_.peek().type == Token::Type::LParen) {
            lx_.next();
            parenthesized = true;
        }
        Token kw = lx_.next();
        if (!is_keyword(kw, "COUNT")) throw SparqlParseError(kw.offset, "expected COUNT");
        Token open = lx_.next();
        if (open.type != Token::Type::LParen)
            throw SparqlParseError(open.offset, "expected '(' after COUNT");
        if (is_keyword(lx_.peek(), "DISTINCT")) {
            lx_.next();
            t.distinct = true;
        }
        Token arg = lx_.next();
        if (arg.type == Token::Type::Var)
            t.projection.push_back(arg.text);
        else if (arg.type != Token::Type::Star)
            throw SparqlParseError(arg.offset, "expected variable or '*' in COUNT");
        Token close = lx_.next();
        if (close.type != Token::Type::RParen)
            throw SparqlParseError(close.offset, "expected ')' in COUNT");
        if (parenthesized) {
            if (is_keyword(lx_.peek(), "AS")) {
                lx_.next();
                Token alias = lx_.next();  // alias discarded from the canonical form
                if (alias.type != Token::Type::Var)
                    throw SparqlParseError(alias.offset, "expected variable after AS");
            }
            Token outer = lx_.next();
            if (outer.type != Token::Type::RParen)
                throw SparqlParseError(outer.offset, "expected ')'");
        }
    }

    kb::PatternTerm parse_pattern_term() {
        Token tok = lx_.next();
        switch (tok.type) {
            case Token::Type::Var: return kb::PatternTerm::variable(tok.text);
            case Token::Type::IriOrSlot:
                if (tok.text.find("://") != std::string::npos)
                    return kb::PatternTerm::constant_term(kb::Term::iri(tok.text));
                return kb::PatternTerm::slot(tok.text);
            case Token::Type::Literal: return kb::PatternTerm::constant_term(tok.literal);
            default: throw SparqlParseError(tok.offset, "expected a pattern term");
        }
    }

    void parse_group(SparqlTemplate& t) {
        Token open = lx_.next();
        if (open.type != Token::Type::LBrace) throw SparqlParseError(open.offset, "expected '{'");
        while (true) {
            const Token& head = lx_.peek();
            if (head.type == Token::Type::RBrace) {
                lx_.next();
                break;
            }
            if (head.type == Token::Type::End)
                throw SparqlParseError(head.offset, "expected '}'");
            if (is_keyword(head, "FILTER")) {
                lx_.next();
                t.items.push_back(
                    UnsupportedClause{"FILTER", "FILTER" + lx_.capture_balanced('(', ')')});
            } else if (is_keyword(head, "OPTIONAL")) {
                lx_.next();
                t.items.push_back(
                    UnsupportedClause{"OPTIONAL", "OPTIONAL " + lx_.capture_balanced('{', '}')});
            } else {
                kb::TriplePattern p;
                p.subject = parse_pattern_term();
                p.predicate = parse_pattern_term();
                p.object = parse_pattern_term();
                t.items.push_back(p);
            }
            if (lx_.peek().type == Token::Type::Dot) lx_.next();
        }
    }

    void parse_trailing(SparqlTemplate& t) {
        while (true) {
            const Token& head = lx_.peek();
            if (is_keyword(head, "GROUP")) {
                lx_.next();
                Token by = lx_.next();
                if (!is_keyword(by, "BY")) throw SparqlParseError(by.offset, "expected BY");
                std::string raw = "GROUP BY";
                bool any = false;
                while (lx_.peek().type == Token::Type::Var) {
                    raw += " ?" + lx_.next().text;
                    any = true;
                }
                if (!any) throw SparqlParseError(by.offset, "expected variables after GROUP BY");
                t.trailing.push_back(UnsupportedClause{"GROUP BY", raw});
            } else if (is_keyword(head, "HAVING")) {
                lx_.next();
                t.trailing.push_back(
                    UnsupportedClause{"HAVING", "HAVING" + lx_.capture_balanced('(', ')')});
            } else {
                break;
            }
        }
    }

    Lexer lx_;
    std::string_view src_;
};

}  // namespace

SparqlTemplate parse(std::string_view text) { return Parser(text).run(); }

}  // namespace triad::sparql
