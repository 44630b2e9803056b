#ifndef ELLATTR_RATMAP_HPP
#define ELLATTR_RATMAP_HPP

#include <array>
#include <optional>
#include <vector>

#include "ellattr/polynomials.hpp"
#include "ellattr/projective.hpp"

namespace ellattr {

/// 2x2 complex matrix (row major).
struct mat2 {
    cplx a{}, b{}, c{}, d{};
    cplx det() const { return a * d - b * c; }
};

/// Rational self-map of the projective plane, [F0 : F1 : F2] with three
/// homogeneous components of a common degree d >= 2. The formal partials of
/// every component are precomputed for the Jacobian machinery.
class rational_map {
public:
    explicit rational_map(std::array<hom_poly, 3> components);

    const hom_poly& component(int i) const { return f_[std::size_t(i)]; }
    const std::array<hom_poly, 3>& components() const { return f_; }
    const hom_poly& partial(int i, int var) const {
        return partials_[std::size_t(i)][std::size_t(var)];
    }
    int degree() const { return degree_; }

    /// Largest coefficient modulus over the three components.
    double coeff_scale() const;

private:
    std::array<hom_poly, 3> f_;
    std::array<std::array<hom_poly, 3>, 3> partials_;
    int degree_;
};

/// f composed with g (componentwise polynomial substitution), degree
/// deg(f) * deg(g).
rational_map compose(const rational_map& f, const rational_map& g);

/// Image of a point, renormalized. Throws near_indeterminacy_error when
/// ||F(z)|| < eta on the unit-norm representative.
proj_point eval_map(const rational_map& f, const proj_point& p, double eta = 1e-12);

/// Raw image norm ||F(z)|| at the unit representative; the indeterminacy
/// residual used by the eta test above.
double image_norm(const rational_map& f, const proj_point& p);

/// Derivative of the affine chart representation of f, source chart ->
/// image chart, assembled from the formal partials via the quotient rule.
/// Charts default to the max-modulus chart of p and of f(p).
mat2 chart_jacobian(const rational_map& f, const proj_point& p, int src_chart = -1,
                    int img_chart = -1, double eta = 1e-12);

/// log of the Fubini-Study volume Jacobian (nats):
///   2 log |det chart_jacobian| + 3 log((1+|u|^2+|v|^2)/(1+|u'|^2+|v'|^2)).
/// Chart-independent. Returns -infinity (a distinguished critical-point
/// value) when |det| < 1e-300.
double log_jacobian_fs(const rational_map& f, const proj_point& p, int src_chart = -1,
                       double eta = 1e-12);

inline bool is_critical(double log_jac) { return !(log_jac > -1e308); }

struct jacobian_sample {
    proj_point point;
    mat2 chart_jac;
    double log_jac_fs = 0.0;
};

jacobian_sample jacobian_at(const rational_map& f, const proj_point& p);

/// Candidate indeterminacy points: local minima of ||F(z)|| on the unit
/// sphere below 1e-8, located by seeded Gauss-Newton descent and clustered.
/// Deterministic for fixed (f, resolution). Throws
/// suspected_common_factor_error when the candidate count keeps growing
/// with resolution (the zero set looks one-dimensional).
std::vector<proj_point> indeterminacy_scan(const rational_map& f, int resolution);

struct invariance_report {
    double max_residual = 0.0;
    double mean_residual = 0.0;
    std::size_t n_points = 0;
};

/// Scale-free residuals |P(F(z))| / (scale(P) ||F(z)||^deg P) over points that
/// must lie on {P = 0}. Throws empty_sample_error on an empty list and
/// near_indeterminacy_error if any sample sits at an indeterminacy point.
invariance_report verify_curve_invariance(const rational_map& f, const hom_poly& P,
                                          const std::vector<proj_point>& points);

/// min over the sample of ||F(z)|| on unit representatives. The curve stays
/// clear of the indeterminacy set when this is above 1e-6.
double check_curve_avoids_indeterminacy(const rational_map& f,
                                        const std::vector<proj_point>& points);

inline constexpr double indeterminacy_clearance = 1e-6;

}  // namespace ellattr

#endif
