#include "ellattr/polynomials.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>

#include "ellattr/errors.hpp"

namespace ellattr {

namespace {

struct parser {
    std::string_view s;
    std::size_t pos = 0;

    void skip_ws() {
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }
    bool done() const { return pos >= s.size(); }
    char peek() const { return pos < s.size() ? s[pos] : '\0'; }

    [[noreturn]] void fail(const std::string& what, std::size_t at) const {
        throw syntax_error(at, what);
    }

    // Unsigned real literal: digits [. digits] [e[+-]digits] or ".5".
    double number() {
        const std::size_t start = pos;
        while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
        if (peek() == '.') {
            ++pos;
            while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
        }
        if (pos == start || (pos == start + 1 && s[start] == '.'))
            fail("expected a number", start);
        if (peek() == 'e' || peek() == 'E') {
            std::size_t mark = pos;
            ++pos;
            if (peek() == '+' || peek() == '-') ++pos;
            if (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) {
                while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
            } else {
                pos = mark;  // 'e' was not an exponent
            }
        }
        return std::strtod(std::string(s.substr(start, pos - start)).c_str(), nullptr);
    }

    bool starts_number() const {
        const char c = peek();
        return std::isdigit(static_cast<unsigned char>(c)) ||
               (c == '.' && pos + 1 < s.size() &&
                std::isdigit(static_cast<unsigned char>(s[pos + 1])));
    }

    // "(a+bi)" complex literal; also accepts "(a)", "(bi)", "(-i)", "(a-bi)".
    cplx complex_literal() {
        const std::size_t open = pos;
        ++pos;  // '('
        skip_ws();
        double re = 0.0, im = 0.0;
        bool have_im = false;

        double first_sign = 1.0;
        if (peek() == '+' || peek() == '-') {
            if (s[pos] == '-') first_sign = -1.0;
            ++pos;
            skip_ws();
        }
        double first = 1.0;
        bool first_is_bare_i = (peek() == 'i');
        if (!first_is_bare_i) first = number();
        skip_ws();
        if (peek() == 'i') {
            ++pos;
            im = first_sign * first;
            have_im = true;
        } else {
            re = first_sign * first;
        }
        skip_ws();
        if (!have_im && (peek() == '+' || peek() == '-')) {
            const double sign = (s[pos] == '-') ? -1.0 : 1.0;
            ++pos;
            skip_ws();
            double mag = 1.0;
            if (peek() != 'i') mag = number();
            skip_ws();
            if (peek() != 'i') fail("expected 'i' in complex literal", pos);
            ++pos;
            im = sign * mag;
        }
        skip_ws();
        if (peek() != ')') fail("unterminated complex literal", open);
        ++pos;
        return {re, im};
    }

    // One term: optional coefficient factors and variable factors.
    // Returns (exponents, coefficient).
    std::pair<std::array<std::uint8_t, 3>, cplx> term(double sign) {
        cplx coeff(sign, 0.0);
        int exps[3] = {0, 0, 0};
        bool any = false;
        for (;;) {
            skip_ws();
            const char c = peek();
            if (c == 'x' || c == 'y' || c == 'z') {
                const int var = c == 'x' ? 0 : (c == 'y' ? 1 : 2);
                ++pos;
                int e = 1;
                skip_ws();
                if (peek() == '^') {
                    const std::size_t caret = pos;
                    ++pos;
                    skip_ws();
                    if (!std::isdigit(static_cast<unsigned char>(peek())))
                        fail("expected an integer exponent after '^'", caret + 1);
                    e = 0;
                    while (std::isdigit(static_cast<unsigned char>(peek()))) {
                        e = e * 10 + (s[pos] - '0');
                        if (e > hom_poly::max_degree) fail("exponent too large", caret + 1);
                        ++pos;
                    }
                }
                exps[var] += e;
                if (exps[var] > hom_poly::max_degree) fail("exponent too large", pos);
                any = true;
            } else if (starts_number()) {
                coeff *= number();
                any = true;
            } else if (c == '(') {
                coeff *= complex_literal();
                any = true;
            } else if (c == '*') {
                ++pos;
                skip_ws();
                if (done()) fail("dangling '*'", pos);
                continue;
            } else {
                break;
            }
        }
        if (!any) fail("expected a term", pos);
        return {{std::uint8_t(exps[0]), std::uint8_t(exps[1]), std::uint8_t(exps[2])}, coeff};
    }

    std::vector<hom_poly::term> parse_all() {
        std::vector<hom_poly::term> out;
        skip_ws();
        if (done()) throw empty_polynomial_error();
        bool first = true;
        while (!done()) {
            double sign = 1.0;
            skip_ws();
            if (peek() == '+' || peek() == '-') {
                sign = (s[pos] == '-') ? -1.0 : 1.0;
                ++pos;
            } else if (!first) {
                fail("expected '+' or '-' between terms", pos);
            }
            skip_ws();
            if (done()) fail("expected a term", pos);
            auto [exps, coeff] = term(sign);
            out.push_back({exps, coeff});
            first = false;
            skip_ws();
        }
        return out;
    }
};

int term_degree(const hom_poly::term& t) { return t.exps[0] + t.exps[1] + t.exps[2]; }

void format_real(std::string& out, double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out += buf;
}

}  // namespace

hom_poly hom_poly::parse(std::string_view text) {
    parser p{text};
    return from_terms(p.parse_all());
}

hom_poly hom_poly::from_terms(std::vector<term> terms) {
    if (terms.empty()) throw empty_polynomial_error();
    const int deg = term_degree(terms.front());
    if (deg > max_degree)
        throw error("polynomial degree " + std::to_string(deg) + " exceeds the supported maximum " +
                    std::to_string(max_degree));
    for (const auto& t : terms)
        if (term_degree(t) != deg) throw inhomogeneous_error(deg, term_degree(t));
    hom_poly out(deg);
    out.terms_ = std::move(terms);
    out.normalize_terms();
    if (out.terms_.empty()) throw empty_polynomial_error();
    return out;
}

void hom_poly::normalize_terms() {
    std::map<std::array<std::uint8_t, 3>, cplx> merged;
    for (const auto& t : terms_) merged[t.exps] += t.coeff;
    terms_.clear();
    // descending exponent order: x-major, matches conventional reading order
    for (auto it = merged.rbegin(); it != merged.rend(); ++it)
        if (it->second != cplx(0.0, 0.0)) terms_.push_back({it->first, it->second});
}

std::string hom_poly::to_string() const {
    if (terms_.empty()) return "0";
    std::string out;
    bool first = true;
    for (const auto& t : terms_) {
        cplx c = t.coeff;
        const bool pure_real = c.imag() == 0.0;
        if (first) {
            if (pure_real && c.real() < 0) {
                out += "-";
                c = -c;
            }
        } else {
            if (pure_real && c.real() < 0) {
                out += " - ";
                c = -c;
            } else {
                out += " + ";
            }
        }
        first = false;

        const bool has_vars = t.exps[0] + t.exps[1] + t.exps[2] > 0;
        const bool unit = pure_real && c.real() == 1.0;
        if (!unit || !has_vars) {
            if (pure_real) {
                format_real(out, c.real());
            } else {
                out += "(";
                format_real(out, c.real());
                if (c.imag() >= 0 || std::isnan(c.imag())) out += "+";
                format_real(out, c.imag());
                out += "i)";
            }
            if (has_vars) out += "*";
        }
        static constexpr char names[3] = {'x', 'y', 'z'};
        bool firstvar = true;
        for (int v = 0; v < 3; ++v) {
            const int e = t.exps[std::size_t(v)];
            if (e == 0) continue;
            if (!firstvar) out += "*";
            firstvar = false;
            out += names[v];
            if (e > 1) {
                out += "^";
                out += std::to_string(e);
            }
        }
    }
    return out;
}

cplx hom_poly::eval(const std::array<cplx, 3>& z) const {
    // memoized coordinate powers up to the degree
    cplx pows[3][max_degree + 1];
    for (int v = 0; v < 3; ++v) {
        pows[v][0] = 1.0;
        for (int k = 1; k <= degree_; ++k) pows[v][k] = pows[v][k - 1] * z[std::size_t(v)];
    }
    cplx acc(0.0);
    for (const auto& t : terms_)
        acc += t.coeff * pows[0][t.exps[0]] * pows[1][t.exps[1]] * pows[2][t.exps[2]];
    return acc;
}

hom_poly hom_poly::partial(int variable) const {
    hom_poly out(degree_ > 0 ? degree_ - 1 : 0);
    for (const auto& t : terms_) {
        const int e = t.exps[std::size_t(variable)];
        if (e == 0) continue;
        term d = t;
        d.exps[std::size_t(variable)] = std::uint8_t(e - 1);
        d.coeff *= double(e);
        out.terms_.push_back(d);
    }
    out.normalize_terms();
    return out;
}

hom_poly hom_poly::operator*(const hom_poly& o) const {
    if (degree_ + o.degree_ > max_degree)
        throw error("product degree " + std::to_string(degree_ + o.degree_) +
                    " exceeds the supported maximum " + std::to_string(max_degree));
    hom_poly out(degree_ + o.degree_);
    if (is_zero() || o.is_zero()) return out;
    out.terms_.reserve(terms_.size() * o.terms_.size());
    for (const auto& a : terms_)
        for (const auto& b : o.terms_)
            out.terms_.push_back({{std::uint8_t(a.exps[0] + b.exps[0]),
                                   std::uint8_t(a.exps[1] + b.exps[1]),
                                   std::uint8_t(a.exps[2] + b.exps[2])},
                                  a.coeff * b.coeff});
    out.normalize_terms();
    return out;
}

hom_poly hom_poly::operator+(const hom_poly& o) const {
    if (is_zero()) return o;
    if (o.is_zero()) return *this;
    if (degree_ != o.degree_) throw inhomogeneous_error(degree_, o.degree_);
    hom_poly out(degree_);
    out.terms_ = terms_;
    out.terms_.insert(out.terms_.end(), o.terms_.begin(), o.terms_.end());
    out.normalize_terms();
    return out;
}

hom_poly hom_poly::scaled(cplx s) const {
    hom_poly out(degree_);
    if (s == cplx(0.0)) return out;
    out.terms_ = terms_;
    for (auto& t : out.terms_) t.coeff *= s;
    return out;
}

hom_poly hom_poly::pow(int k) const {
    hom_poly acc = from_terms({{{0, 0, 0}, 1.0}});
    for (int i = 0; i < k; ++i) acc = acc * (*this);
    return acc;
}

double hom_poly::coeff_scale() const {
    double m = 0.0;
    for (const auto& t : terms_) m = std::max(m, std::abs(t.coeff));
    return m;
}

bool hom_poly::operator==(const hom_poly& o) const {
    if (degree_ != o.degree_ || terms_.size() != o.terms_.size()) return false;
    for (std::size_t i = 0; i < terms_.size(); ++i)
        if (terms_[i].exps != o.terms_[i].exps || terms_[i].coeff != o.terms_[i].coeff)
            return false;
    return true;
}

hom_poly compose(const hom_poly& p, const std::array<hom_poly, 3>& g) {
    const int d = p.degree();
    // cached powers of each g component up to d
    std::array<std::vector<hom_poly>, 3> pows;
    for (int v = 0; v < 3; ++v) {
        pows[std::size_t(v)].push_back(hom_poly::from_terms({{{0, 0, 0}, 1.0}}));
        for (int k = 1; k <= d; ++k)
            pows[std::size_t(v)].push_back(pows[std::size_t(v)].back() * g[std::size_t(v)]);
    }
    hom_poly acc(p.degree() * g[0].degree());
    for (const auto& t : p.terms()) {
        hom_poly m = pows[0][t.exps[0]] * pows[1][t.exps[1]] * pows[2][t.exps[2]];
        acc = acc + m.scaled(t.coeff);
    }
    return acc;
}

}  // namespace ellattr
