#ifndef ELLATTR_ELLIPTIC_HPP
#define ELLATTR_ELLIPTIC_HPP

#include <complex>
#include <functional>
#include <utility>
#include <vector>

#include "ellattr/polynomials.hpp"
#include "ellattr/projective.hpp"
#include "ellattr/ratmap.hpp"
#include "ellattr/rng.hpp"

namespace ellattr {

/// Weierstrass invariants of a lattice.
struct weierstrass_data {
    cplx g2;
    cplx g3;
    cplx discriminant;  // g2^3 - 27 g3^2
};

/// Period lattice of the complex plane, normalized so Im(omega2/omega1) > 0.
/// Evaluation goes through a Lagrange-Gauss reduced basis, which bounds the
/// theta nome |q| <= exp(-pi sqrt(3)/2) for every input basis.
class lattice {
public:
    lattice(cplx omega1, cplx omega2);

    cplx omega1() const { return w1_; }
    cplx omega2() const { return w2_; }
    cplx reduced1() const { return r1_; }
    cplx reduced2() const { return r2_; }
    cplx tau() const { return r2_ / r1_; }

    const weierstrass_data& invariants() const { return inv_; }

    /// Representative of t in the centered fundamental cell of the reduced
    /// basis (distance to the lattice is |result| up to the cell geometry).
    cplx reduce(cplx t) const;

    /// Diameter of the period parallelogram, max(|w1+w2|, |w1-w2|).
    double diameter() const;

    /// (wp(t), wp'(t)). Throws near_pole_error when t is within 1e-8 of a
    /// lattice point.
    std::pair<cplx, cplx> wp(cplx t) const;

private:
    cplx w1_, w2_;  // as given (after sign normalization)
    cplx r1_, r2_;  // reduced basis
    weierstrass_data inv_;

    // cached theta data for the reduced basis
    cplx q_;         // nome exp(i pi tau)
    cplx null2_, null3_, null4_;  // theta_{2,3,4}(0, q)

    void compute_invariants();
};

/// Weierstrass invariants (classical Eisenstein values g2, g3) of a lattice.
weierstrass_data invariants_from_lattice(const lattice& L);

/// The curve side of a system: lattice, invariants and the plane cubic
/// y^2 z - 4 x^3 + g2 x z^2 + g3 z^3 cut out by the embedding
/// psi(t) = [wp(t) : wp'(t) : 1].
class curve_embedding {
public:
    explicit curve_embedding(lattice L);

    const lattice& torus() const { return lattice_; }
    const weierstrass_data& invariants() const { return lattice_.invariants(); }
    const hom_poly& defining_poly() const { return poly_; }

    /// psi(t), with [0:1:0] returned for t within 1e-8 of the lattice.
    proj_point psi(cplx t) const;

    /// Exact sampler of the canonical measure: t = s w1 + r w2 with s, r
    /// independent uniform in [0,1).
    std::vector<std::pair<cplx, proj_point>> sample_mu_c(rng_stream& rng, std::size_t n) const;

    /// Invert psi near the curve by Newton iteration on wp, seeded either
    /// explicitly or from a coarse fundamental-domain grid. Throws
    /// inversion_failure_error when Newton stagnates after one grid
    /// refinement.
    cplx psi_inverse(const proj_point& q, const cplx* seed = nullptr) const;

private:
    lattice lattice_;
    hom_poly poly_;
    // lazy inversion seed grid; psi_inverse is not safe to call concurrently
    mutable std::vector<std::pair<cplx, proj_point>> grid_;
    mutable int grid_res_ = 0;

    void build_grid(int res) const;
    cplx newton_from(cplx seed, cplx x_target, cplx y_target, bool& ok) const;
};

/// Fitted affine lift t -> a t + b of the restriction of a map to the curve.
struct torus_map_fit {
    cplx a;
    cplx b;              // representative in the fundamental cell
    double rms_residual = 0.0;
    double abs_a_sq = 0.0;
    int map_degree = 0;
};

/// Fit the lift of f restricted to the curve of E. Verifies invariance
/// first (not_invariant_error), recovers a from local finite differences of
/// the inverted images (immune to lattice translations), then refines (a, b)
/// by least squares over unwrapped anchors. Throws degree_mismatch_error
/// when | |a|^2 - deg f | > 0.05.
torus_map_fit fit_torus_map(const rational_map& f, const curve_embedding& E, int n_anchors);

/// Same pipeline against an arbitrary point map (used to fit synthetic or
/// composed dynamics); expected_degree feeds the degree check.
torus_map_fit fit_torus_map_fn(const std::function<proj_point(const proj_point&)>& step,
                               const curve_embedding& E, int n_anchors, int expected_degree);

struct separation_report {
    double beta_hat = 0.0;
    cplx worst_t;       // base point of the minimizing pair
    cplx worst_offset;  // its offset
};

/// Max-over-time separation of one nearby pair under the fitted torus
/// dynamics (exact on the torus, so no drift off the curve). Throws
/// degenerate_pair_error when |dt| < 1e-12.
double pair_separation(const torus_map_fit& fit, const curve_embedding& E, cplx t, cplx dt,
                       int horizon);

/// beta_hat = min over random nearby pairs of the max-over-time separation;
/// pair offsets are at most diameter/100.
separation_report separation_probe(const torus_map_fit& fit, const curve_embedding& E,
                                   int n_pairs, int horizon, rng_stream& rng);

}  // namespace ellattr

#endif
