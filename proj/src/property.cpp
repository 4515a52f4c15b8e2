#include "rqv/property.hpp"

#include <cctype>
#include <charconv>
#include <cmath>

#include "rqv/error.hpp"

namespace rqv {

namespace {

class Parser {
public:
    explicit Parser(std::string_view text) : text_(text) {}

    Property parse() {
        Property p;
        skip_ws();
        if (accept('P')) {
            parse_bound(p);
            expect('[');
            parse_path(p);
            expect(']');
        } else if (accept('R')) {
            p.kind = QueryKind::reward_reach;
            expect('{');
            p.reward_name = parse_quoted();
            expect('}');
            parse_bound(p);
            expect('[');
            expect('F');
            p.target = parse_quoted();
            expect(']');
        } else {
            fail("expected 'P' or 'R'");
        }
        skip_ws();
        if (pos_ != text_.size()) fail("unexpected trailing input");
        return p;
    }

private:
    [[noreturn]] void fail(const std::string& what) const {
        throw ParseError("offset " + std::to_string(pos_), what);
    }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool peek(char c) {
        skip_ws();
        return pos_ < text_.size() && text_[pos_] == c;
    }

    bool accept(char c) {
        if (!peek(c)) return false;
        ++pos_;
        return true;
    }

    bool accept(std::string_view s) {
        skip_ws();
        if (text_.substr(pos_, s.size()) != s) return false;
        pos_ += s.size();
        return true;
    }

    void expect(char c) {
        if (!accept(c)) fail(std::string("expected '") + c + "'");
    }

    std::string parse_quoted() {
        if (!accept('"')) fail("expected '\"'");
        const std::size_t start = pos_;
        while (pos_ < text_.size() && text_[pos_] != '"') ++pos_;
        if (pos_ == text_.size()) fail("unterminated string");
        std::string s(text_.substr(start, pos_ - start));
        if (s.empty()) {
            pos_ = start;
            fail("empty label");
        }
        ++pos_;
        return s;
    }

    double parse_number() {
        skip_ws();
        const char* first = text_.data() + pos_;
        const char* last = text_.data() + text_.size();
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(first, last, v);
        if (ec != std::errc{} || ptr == first) fail("expected a number");
        if (!std::isfinite(v)) fail("number must be finite");
        pos_ += static_cast<std::size_t>(ptr - first);
        return v;
    }

    void parse_bound(Property& p) {
        if (accept("=?")) return;
        Comparison cmp;
        if (accept("<=")) {
            cmp = Comparison::le;
        } else if (accept(">=")) {
            cmp = Comparison::ge;
        } else if (accept('<')) {
            cmp = Comparison::lt;
        } else if (accept('>')) {
            cmp = Comparison::gt;
        } else {
            fail("expected a comparison or '=?'");
        }
        p.threshold = Threshold{cmp, parse_number()};
    }

    std::optional<double> parse_time_bound() {
        if (!accept("<=")) return std::nullopt;
        const std::size_t at = pos_;
        const double t = parse_number();
        if (t < 0.0) {
            pos_ = at;
            fail("time bound must be non-negative");
        }
        return t;
    }

    void parse_path(Property& p) {
        if (accept('F')) {
            p.time_bound = parse_time_bound();
            p.target = parse_quoted();
        } else {
            p.guard = parse_quoted();
            expect('U');
            p.time_bound = parse_time_bound();
            p.target = parse_quoted();
        }
        p.kind = p.time_bound ? QueryKind::prob_bounded_until : QueryKind::prob_reach;
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

std::string format_number(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

}  // namespace

const char* to_string(Comparison cmp) {
    switch (cmp) {
        case Comparison::le: return "<=";
        case Comparison::lt: return "<";
        case Comparison::ge: return ">=";
        case Comparison::gt: return ">";
    }
    return "?";
}

bool compare(double value, Comparison cmp, double bound) {
    switch (cmp) {
        case Comparison::le: return value <= bound;
        case Comparison::lt: return value < bound;
        case Comparison::ge: return value >= bound;
        case Comparison::gt: return value > bound;
    }
    return false;
}

Property parse_property(std::string_view text) { return Parser(text).parse(); }

std::string to_string(const Property& p) {
    std::string out;
    if (p.kind == QueryKind::reward_reach) {
        out = "R{\"" + p.reward_name + "\"}";
    } else {
        out = "P";
    }
    out += p.threshold ? std::string(to_string(p.threshold->cmp)) + format_number(p.threshold->bound) : "=?";
    out += " [ ";
    const std::string bound = p.time_bound ? "<=" + format_number(*p.time_bound) : "";
    if (p.guard) {
        out += "\"" + *p.guard + "\" U" + bound + " ";
    } else {
        out += "F" + bound + " ";
    }
    out += "\"" + p.target + "\" ]";
    return out;
}

}  // namespace rqv
