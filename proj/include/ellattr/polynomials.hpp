#ifndef ELLATTR_POLYNOMIALS_HPP
#define ELLATTR_POLYNOMIALS_HPP

#include <array>
#include <complex>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "ellattr/projective.hpp"

namespace ellattr {

/// Sparse homogeneous polynomial in (x, y, z) over the complex numbers.
/// Terms are kept sorted by exponent triple; no zero coefficients are stored;
/// every stored (i, j, k) satisfies i + j + k = degree.
class hom_poly {
public:
    struct term {
        std::array<std::uint8_t, 3> exps;
        cplx coeff;
    };

    static constexpr int max_degree = 64;

    /// Zero polynomial of the given nominal degree.
    explicit hom_poly(int degree = 0) : degree_(degree) {}

    /// Parse the text grammar: terms joined by +/-; a term is an optional
    /// coefficient (real literal or "(a+bi)") times factors x, y, z with
    /// optional ^ integer powers; '*' separators are optional.
    /// Throws syntax_error (position-annotated), inhomogeneous_error, or
    /// empty_polynomial_error.
    static hom_poly parse(std::string_view text);

    /// Build from explicit terms (merges duplicates, drops zeros).
    /// Throws inhomogeneous_error on mixed degrees.
    static hom_poly from_terms(std::vector<term> terms);

    /// Canonical text form; parse(print(p)) reproduces p exactly.
    std::string to_string() const;

    cplx eval(const std::array<cplx, 3>& z) const;
    cplx eval(const proj_point& p) const { return eval(p.coords()); }

    /// Formal partial derivative with respect to variable 0, 1 or 2.
    /// Degree drops by one; may be the zero polynomial.
    hom_poly partial(int variable) const;

    hom_poly operator*(const hom_poly& o) const;
    hom_poly operator+(const hom_poly& o) const;
    hom_poly scaled(cplx s) const;
    hom_poly pow(int k) const;

    int degree() const { return degree_; }
    bool is_zero() const { return terms_.empty(); }
    const std::vector<term>& terms() const { return terms_; }

    /// Largest coefficient modulus (0 for the zero polynomial); the natural
    /// normalization scale for residuals.
    double coeff_scale() const;

    bool operator==(const hom_poly& o) const;

private:
    int degree_;
    std::vector<term> terms_;

    void normalize_terms();
};

/// Substitute g = (g0, g1, g2) into p: the composite p(g0, g1, g2),
/// homogeneous of degree deg(p) * deg(g).
hom_poly compose(const hom_poly& p, const std::array<hom_poly, 3>& g);

}  // namespace ellattr

#endif
