#include <doctest.h>

#include <cmath>

#include "ellattr/errors.hpp"
#include "ellattr/polynomials.hpp"
#include "testutil.hpp"

using namespace ellattr;

namespace {

hom_poly random_poly(rng_stream& rng, int degree, int nterms) {
    std::vector<hom_poly::term> terms;
    for (int t = 0; t < nterms; ++t) {
        int i = int(rng.uniform() * (degree + 1));
        int j = int(rng.uniform() * (degree + 1 - i));
        const int k = degree - i - j;
        terms.push_back({{std::uint8_t(i), std::uint8_t(j), std::uint8_t(k)},
                         rng.gaussian_complex()});
    }
    return hom_poly::from_terms(terms);
}

}  // namespace

TEST_CASE("parse examples") {
    const hom_poly p = hom_poly::parse("x^3 + y^3 + z^3");
    CHECK(p.degree() == 3);
    CHECK(p.terms().size() == 3);
    for (const auto& t : p.terms()) CHECK(t.coeff == cplx(1.0));

    const hom_poly q = hom_poly::parse("x*y - 2*z^2");
    CHECK(q.degree() == 2);
    REQUIRE(q.terms().size() == 2);
    CHECK(q.eval({1.0, 1.0, 0.0}) == cplx(1.0));
    CHECK(q.eval({0.0, 0.0, 1.0}) == cplx(-2.0));

    CHECK_THROWS_AS(hom_poly::parse("x^2 + y"), inhomogeneous_error);
    CHECK_THROWS_AS(hom_poly::parse(""), empty_polynomial_error);
    CHECK_THROWS_AS(hom_poly::parse("   "), empty_polynomial_error);
}

TEST_CASE("parse flexibility and errors") {
    CHECK(hom_poly::parse("2xy") == hom_poly::parse("2*x*y"));
    CHECK(hom_poly::parse("-x^2") == hom_poly::parse("0*x^2 - x^2 + 0*y^2"));
    CHECK(hom_poly::parse("(1+2i)*x") == hom_poly::parse("(1 + 2 i) x"));
    CHECK(hom_poly::parse("(3i)x") == hom_poly::parse("(0+3i)*x"));
    CHECK(hom_poly::parse("1.5e2 * x^2") == hom_poly::parse("150x^2"));

    try {
        hom_poly::parse("x^^2");
        FAIL("expected syntax_error");
    } catch (const syntax_error& e) {
        CHECK(e.position == 2);  // the offending character
    }
    CHECK_THROWS_AS(hom_poly::parse("x +"), syntax_error);
    CHECK_THROWS_AS(hom_poly::parse("x y z w"), syntax_error);
    CHECK_THROWS_AS(hom_poly::parse("(1+2j)*x"), syntax_error);
    CHECK_THROWS_AS(hom_poly::parse("x - x"), empty_polynomial_error);
    CHECK_THROWS_AS(hom_poly::parse("x^65"), syntax_error);

    // products cannot silently exceed the supported degree
    const hom_poly big = hom_poly::parse("x^33");
    CHECK_THROWS_AS(big * big, error);
}

TEST_CASE("print-parse round trip") {
    rng_stream rng(3);
    for (int it = 0; it < 100; ++it) {
        const hom_poly p = random_poly(rng, 1 + int(rng.uniform() * 8), 1 + int(rng.uniform() * 9));
        const std::string s1 = p.to_string();
        const hom_poly q = hom_poly::parse(s1);
        CHECK(q == p);
        CHECK(q.to_string() == s1);
    }
}

TEST_CASE("eval examples") {
    const hom_poly fermat = hom_poly::parse("x^3 + y^3 + z^3");
    CHECK(std::abs(fermat.eval({1.0, -1.0, 0.0})) == 0.0);

    const hom_poly xyz = hom_poly::parse("x*y*z");
    CHECK(xyz.eval({1.0, 2.0, 3.0}) == cplx(6.0));

    rng_stream rng(11);
    for (int it = 0; it < 50; ++it) {
        std::array<cplx, 3> z{rng.gaussian_complex(), rng.gaussian_complex(),
                              rng.gaussian_complex()};
        std::array<cplx, 3> z2;
        for (int i = 0; i < 3; ++i) z2[std::size_t(i)] = 2.0 * z[std::size_t(i)];
        CHECK(testutil::rel_err(fermat.eval(z2), 8.0 * fermat.eval(z)) < 1e-10);
    }
}

TEST_CASE("eval matches the naive oracle") {
    rng_stream rng(17);
    for (int it = 0; it < 1000; ++it) {
        const hom_poly p = random_poly(rng, 1 + int(rng.uniform() * 10), 1 + int(rng.uniform() * 8));
        std::array<cplx, 3> z{rng.gaussian_complex(), rng.gaussian_complex(),
                              rng.gaussian_complex()};
        const cplx a = p.eval(z);
        const cplx b = testutil::naive_eval(p, z);
        CHECK(std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(b)));
    }
}

TEST_CASE("partial derivatives") {
    CHECK(hom_poly::parse("x^2*y").partial(0) == hom_poly::parse("2*x*y"));
    CHECK(hom_poly::parse("x^3").partial(2).is_zero());
    CHECK(hom_poly::parse("x*y - 2*z^2").partial(1) == hom_poly::parse("x"));

    SUBCASE("partials commute term-for-term") {
        // coefficients agree up to the rounding of the two multiplication orders
        auto same = [](const hom_poly& a, const hom_poly& b) {
            if (a.degree() != b.degree() || a.terms().size() != b.terms().size()) return false;
            for (std::size_t i = 0; i < a.terms().size(); ++i) {
                const auto& ta = a.terms()[i];
                const auto& tb = b.terms()[i];
                if (ta.exps != tb.exps) return false;
                if (std::abs(ta.coeff - tb.coeff) > 4e-16 * std::abs(tb.coeff)) return false;
            }
            return true;
        };
        rng_stream rng(23);
        for (int it = 0; it < 50; ++it) {
            const hom_poly p = random_poly(rng, 2 + int(rng.uniform() * 7), 5);
            CHECK(same(p.partial(0).partial(1), p.partial(1).partial(0)));
            CHECK(same(p.partial(1).partial(2), p.partial(2).partial(1)));
        }
    }
}

TEST_CASE("Euler identity") {
    rng_stream rng(29);
    for (int it = 0; it < 200; ++it) {
        const int d = 1 + int(rng.uniform() * 9);
        const hom_poly p = random_poly(rng, d, 1 + int(rng.uniform() * 9));
        const std::array<cplx, 3> z{rng.gaussian_complex(), rng.gaussian_complex(),
                                    rng.gaussian_complex()};
        const cplx euler = z[0] * p.partial(0).eval(z) + z[1] * p.partial(1).eval(z) +
                           z[2] * p.partial(2).eval(z);
        const cplx expect = double(d) * p.eval(z);
        const double scale = std::max(1.0, std::abs(expect));
        CHECK(std::abs(euler - expect) <= 1e-10 * scale);
    }
}
