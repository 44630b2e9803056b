#ifndef ELLATTR_ERRORS_HPP
#define ELLATTR_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ellattr {

/// Base class of all toolkit errors.
struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// --- projective ---
struct zero_vector_error : error {
    zero_vector_error() : error("all homogeneous coordinates are zero") {}
};

// --- polynomials ---
struct syntax_error : error {
    std::size_t position;  // 0-based offset into the input text
    syntax_error(std::size_t pos, const std::string& what)
        : error("syntax error at position " + std::to_string(pos + 1) + ": " + what),
          position(pos) {}
};
struct inhomogeneous_error : error {
    inhomogeneous_error(int deg_a, int deg_b)
        : error("polynomial is not homogeneous: monomials of degree " + std::to_string(deg_a) +
                " and " + std::to_string(deg_b)) {}
};
struct empty_polynomial_error : error {
    empty_polynomial_error() : error("polynomial has no terms") {}
};

// --- rational maps ---
struct invalid_map_error : error {
    using error::error;
};
struct near_indeterminacy_error : error {
    double residual;
    explicit near_indeterminacy_error(double r)
        : error("map evaluation too close to an indeterminacy point (|F(z)| = " +
                std::to_string(r) + ")"),
          residual(r) {}
};
struct suspected_common_factor_error : error {
    using error::error;
};
struct empty_sample_error : error {
    empty_sample_error() : error("empty point sample") {}
};

// --- elliptic ---
struct degenerate_lattice_error : error {
    using error::error;
};
struct near_pole_error : error {
    near_pole_error() : error("argument within 1e-8 of a lattice point") {}
};
struct inversion_failure_error : error {
    using error::error;
};
struct not_invariant_error : error {
    using error::error;
};
struct degree_mismatch_error : error {
    using error::error;
};
struct degenerate_pair_error : error {
    degenerate_pair_error() : error("pair offset below 1e-12") {}
};

// --- lyapunov ---
struct inconsistent_orbit_error : error {
    using error::error;
};
struct critical_point_on_orbit_error : error {
    using error::error;
};
struct too_many_critical_hits_error : error {
    using error::error;
};
struct fit_residual_error : error {
    using error::error;
};

// --- cli / io ---
struct io_error : error {
    using error::error;
};
struct schema_error : error {
    std::string pointer;  // JSON-pointer of the offending field
    schema_error(std::string ptr, const std::string& what)
        : error("spec error at " + (ptr.empty() ? std::string("document root") : ptr) + ": " +
                what),
          pointer(std::move(ptr)) {}
};

}  // namespace ellattr

#endif
