#include "fairfly/stl.hpp"

#include <cctype>
#include <charconv>
#include <optional>
#include <sstream>

namespace fairfly::stl {

ParseError::ParseError(const std::string& message, std::size_t position)
    : std::runtime_error("at offset " + std::to_string(position) + ": " + message), position_(position) {}

int ParseContext::resolve_uav(std::string_view name) const {
    if (!uav_names.empty()) {
        for (std::size_t i = 0; i < uav_names.size(); ++i) {
            if (uav_names[i] == name) {
                return static_cast<int>(i);
            }
        }
        return -1;
    }
    if (name.size() < 2 || name[0] != 'u') {
        return -1;
    }
    int index = 0;
    const auto* first = name.data() + 1;
    const auto* last = name.data() + name.size();
    auto [ptr, ec] = std::from_chars(first, last, index);
    if (ec != std::errc{} || ptr != last || index < 1) {
        return -1;
    }
    if (uav_count > 0 && index > uav_count) {
        return -1;
    }
    return index - 1;
}

std::string ParseContext::uav_name(int index) const {
    if (index >= 0 && static_cast<std::size_t>(index) < uav_names.size()) {
        return uav_names[index];
    }
    return "u" + std::to_string(index + 1);
}

namespace {

enum class Tok { End, Ident, Number, LParen, RParen, LBracket, RBracket, Comma, Not, And, Or, Implies };

struct Token {
    Tok kind = Tok::End;
    std::string text;
    double number = 0.0;
    std::size_t pos = 0;
};

class Lexer {
public:
    explicit Lexer(std::string_view text) : text_(text) {}

    Token next() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
            ++pos_;
        }
        Token tok;
        tok.pos = pos_;
        if (pos_ >= text_.size()) {
            return tok;
        }
        const char c = text_[pos_];
        auto single = [&](Tok kind) {
            tok.kind = kind;
            tok.text = std::string(1, c);
            ++pos_;
            return tok;
        };
        switch (c) {
        case '(':
            return single(Tok::LParen);
        case ')':
            return single(Tok::RParen);
        case '[':
            return single(Tok::LBracket);
        case ']':
            return single(Tok::RBracket);
        case ',':
            return single(Tok::Comma);
        case '!':
            return single(Tok::Not);
        case '&':
            return single(Tok::And);
        case '|':
            return single(Tok::Or);
        default:
            break;
        }
        if (c == '-' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '>') {
            tok.kind = Tok::Implies;
            tok.text = "->";
            pos_ += 2;
            return tok;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t end = pos_;
            while (end < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[end])) || text_[end] == '_')) {
                ++end;
            }
            tok.kind = Tok::Ident;
            tok.text = std::string(text_.substr(pos_, end - pos_));
            pos_ = end;
            return tok;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '+' || c == '.') {
            const char* first = text_.data() + pos_;
            const char* last = text_.data() + text_.size();
            if (*first == '+') {
                ++first;
            }
            auto [ptr, ec] = std::from_chars(first, last, tok.number);
            if (ec != std::errc{}) {
                throw ParseError("malformed number", pos_);
            }
            tok.kind = Tok::Number;
            tok.text = std::string(text_.substr(pos_, static_cast<std::size_t>(ptr - (text_.data() + pos_))));
            pos_ = static_cast<std::size_t>(ptr - text_.data());
            return tok;
        }
        throw ParseError(std::string("unexpected character '") + c + "'", pos_);
    }

private:
    std::string_view text_;
    std::size_t pos_ = 0;
};

class Parser {
public:
    Parser(std::string_view text, const ParseContext& ctx) : lexer_(text), ctx_(ctx) { advance(); }

    Formula parse_all() {
        Formula f = implication();
        if (cur_.kind != Tok::End) {
            throw ParseError("unexpected '" + cur_.text + "' after formula", cur_.pos);
        }
        return f;
    }

private:
    void advance() {
        cur_ = ahead_.has_value() ? *ahead_ : lexer_.next();
        ahead_.reset();
    }

    const Token& peek() {
        if (!ahead_) {
            ahead_ = lexer_.next();
        }
        return *ahead_;
    }

    Token expect(Tok kind, const char* what) {
        if (cur_.kind != kind) {
            throw ParseError(std::string("expected ") + what + (cur_.kind == Tok::End ? " at end of input" : " before '" + cur_.text + "'"),
                             cur_.pos);
        }
        Token t = cur_;
        advance();
        return t;
    }

    Formula implication() {
        Formula lhs = disjunction();
        if (cur_.kind == Tok::Implies) {
            advance();
            Formula rhs = implication();
            return Formula::disj({Formula::negate(lhs), rhs});
        }
        return lhs;
    }

    Formula disjunction() {
        FormulaList parts{conjunction()};
        while (cur_.kind == Tok::Or) {
            advance();
            parts.push_back(conjunction());
        }
        return Formula::disj(std::move(parts));
    }

    Formula conjunction() {
        FormulaList parts{until_expr()};
        while (cur_.kind == Tok::And) {
            advance();
            parts.push_back(until_expr());
        }
        return Formula::conj(std::move(parts));
    }

    Formula until_expr() {
        Formula lhs = unary();
        if (cur_.kind == Tok::Ident && cur_.text == "U" && peek().kind == Tok::LBracket) {
            advance();
            const Interval iv = interval();
            Formula rhs = unary();
            return Formula::until(iv, lhs, rhs);
        }
        return lhs;
    }

    Interval interval() {
        const std::size_t at = cur_.pos;
        expect(Tok::LBracket, "'['");
        const int lo = integer();
        expect(Tok::Comma, "','");
        const int hi = integer();
        expect(Tok::RBracket, "']'");
        if (lo < 0 || hi < lo) {
            throw ParseError("interval [" + std::to_string(lo) + "," + std::to_string(hi) +
                                 "] must satisfy 0 <= lo <= hi",
                             at);
        }
        return {lo, hi};
    }

    int integer() {
        const Token t = expect(Tok::Number, "an integer time index");
        if (t.number != static_cast<double>(static_cast<long long>(t.number)) || t.number > 1e8 || t.number < -1e8) {
            throw ParseError("time index '" + t.text + "' is not an integer", t.pos);
        }
        return static_cast<int>(t.number);
    }

    double number() { return expect(Tok::Number, "a number").number; }

    Formula unary() {
        if (cur_.kind == Tok::Not) {
            advance();
            return Formula::negate(unary());
        }
        if (cur_.kind == Tok::Ident && (cur_.text == "F" || cur_.text == "G") && peek().kind == Tok::LBracket) {
            const bool eventually = cur_.text == "F";
            advance();
            const Interval iv = interval();
            Formula body = unary();
            return eventually ? Formula::eventually(iv, body) : Formula::always(iv, body);
        }
        return primary();
    }

    int uav() {
        const Token t = expect(Tok::Ident, "a UAV name");
        const int index = ctx_.resolve_uav(t.text);
        if (index < 0) {
            throw ParseError("unknown UAV '" + t.text + "'", t.pos);
        }
        return index;
    }

    Formula primary() {
        if (cur_.kind == Tok::LParen) {
            advance();
            Formula inner = implication();
            expect(Tok::RParen, "')'");
            return inner;
        }
        if (cur_.kind != Tok::Ident) {
            throw ParseError(cur_.kind == Tok::End ? "unexpected end of formula" : "unexpected '" + cur_.text + "'",
                             cur_.pos);
        }
        const Token name = cur_;
        if (name.text == "true") {
            advance();
            return Formula::truth();
        }
        if (name.text == "false") {
            advance();
            return Formula::falsity();
        }
        if ((name.text == "in" || name.text == "out" || name.text == "sep" || name.text == "hs") &&
            peek().kind == Tok::LParen) {
            advance();
            advance();
            Formula atom = atom_body(name);
            expect(Tok::RParen, "')'");
            return atom;
        }
        auto it = ctx_.predicates.find(name.text);
        if (it == ctx_.predicates.end()) {
            throw ParseError("unknown predicate '" + name.text + "'", name.pos);
        }
        advance();
        AtomicPredicate p = it->second;
        p.label = name.text;
        return Formula::atom(std::move(p));
    }

    Formula atom_body(const Token& name) {
        if (name.text == "in" || name.text == "out") {
            const int u = uav();
            expect(Tok::Comma, "','");
            const Token region = expect(Tok::Ident, "a region name");
            auto it = ctx_.regions.find(region.text);
            if (it == ctx_.regions.end()) {
                throw ParseError("unknown region '" + region.text + "'", region.pos);
            }
            Box box = it->second;
            box.name = region.text;
            return Formula::atom(name.text == "in" ? in_box(u, std::move(box)) : out_box(u, std::move(box)));
        }
        if (name.text == "sep") {
            const int a = uav();
            expect(Tok::Comma, "','");
            const std::size_t at = cur_.pos;
            const int b = uav();
            expect(Tok::Comma, "','");
            const double s = number();
            if (a == b) {
                throw ParseError("separation needs two distinct UAVs", at);
            }
            return Formula::atom(separation(a, b, s));
        }
        const int u = uav();
        std::vector<double> values;
        while (cur_.kind == Tok::Comma) {
            advance();
            values.push_back(number());
        }
        if (static_cast<int>(values.size()) != ctx_.dim + 1) {
            throw ParseError("hs expects " + std::to_string(ctx_.dim) + " coefficients and an offset", name.pos);
        }
        const double b = values.back();
        values.pop_back();
        return Formula::atom(halfspace(u, std::move(values), b));
    }

    Lexer lexer_;
    const ParseContext& ctx_;
    Token cur_;
    std::optional<Token> ahead_;
};

std::string fmt_number(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

void print(std::ostream& out, const Formula& f, const ParseContext* ctx) {
    auto uav = [&](int i) { return ctx ? ctx->uav_name(i) : "u" + std::to_string(i + 1); };
    auto iv = [&](const Interval& i) { return "[" + std::to_string(i.lo) + "," + std::to_string(i.hi) + "]"; };
    switch (f.op()) {
    case Op::True:
        out << "true";
        return;
    case Op::Atom: {
        const auto& p = f.predicate();
        if (!p.label.empty()) {
            out << p.label;
            return;
        }
        switch (p.kind) {
        case AtomKind::InBox:
            out << "in(" << uav(p.uav_a) << ", " << p.box.name << ")";
            return;
        case AtomKind::OutBox:
            out << "out(" << uav(p.uav_a) << ", " << p.box.name << ")";
            return;
        case AtomKind::Separation:
            out << "sep(" << uav(p.uav_a) << ", " << uav(p.uav_b) << ", " << fmt_number(p.offset) << ")";
            return;
        case AtomKind::Halfspace:
            out << "hs(" << uav(p.uav_a);
            for (double c : p.coeffs) {
                out << ", " << fmt_number(c);
            }
            out << ", " << fmt_number(p.offset) << ")";
            return;
        }
        return;
    }
    case Op::Not:
        if (f.child().op() == Op::True) {
            out << "false";
            return;
        }
        out << "!";
        print(out, f.child(), ctx);
        return;
    case Op::And:
    case Op::Or: {
        out << "(";
        for (std::size_t i = 0; i < f.children().size(); ++i) {
            if (i > 0) {
                out << (f.op() == Op::And ? " & " : " | ");
            }
            print(out, f.children()[i], ctx);
        }
        out << ")";
        return;
    }
    case Op::Eventually:
    case Op::Always:
        out << (f.op() == Op::Eventually ? "F" : "G") << iv(f.interval());
        print(out, f.child(), ctx);
        return;
    case Op::Until:
        out << "(";
        print(out, f.child(0), ctx);
        out << " U" << iv(f.interval()) << " ";
        print(out, f.child(1), ctx);
        out << ")";
        return;
    }
}

} // namespace

Formula parse(std::string_view text, const ParseContext& context) { return Parser(text, context).parse_all(); }

std::string to_string(const Formula& formula, const ParseContext& context) {
    std::ostringstream out;
    print(out, formula, &context);
    return out.str();
}

std::string to_string(const Formula& formula) {
    std::ostringstream out;
    print(out, formula, nullptr);
    return out.str();
}

} // namespace fairfly::stl
