#ifndef ELLATTR_LYAPUNOV_HPP
#define ELLATTR_LYAPUNOV_HPP

#include <cstdint>
#include <utility>
#include <vector>

#include "ellattr/elliptic.hpp"
#include "ellattr/ratmap.hpp"
#include "ellattr/rng.hpp"
#include "ellattr/stats.hpp"

namespace ellattr {

/// Exponents of the canonical measure. chi1 is exact, chi2 derives from the
/// sum formula chi1 + chi2 = integral/2; nothing here is re-estimated.
struct exponent_report {
    int degree = 0;
    double chi1 = 0.0;             // log(degree)/2, exact
    double integral_mean = 0.0;    // <mu_C, log Jac f>
    double integral_se = 0.0;
    std::uint64_t samples = 0;
    double chi2 = 0.0;             // integral/2 - chi1
    double chi2_se = 0.0;          // integral_se / 2
    double log_degree = 0.0;
    bool criterion_met = false;    // integral + 3 se < log degree
    std::uint64_t critical_hits = 0;
};

/// Pure bookkeeping from a measured integral; the exactness invariants
/// (chi1 = log d / 2, chi1 + chi2 = integral/2) hold by construction.
exponent_report make_exponent_report(int degree, double integral_mean, double integral_se,
                                     std::uint64_t samples, std::uint64_t critical_hits = 0);

/// Direct Monte Carlo value of <mu_C, log Jac f> over exact pushforward
/// samples (no orbits). Parallel over fixed-size chunks with deterministic
/// merge order, so the result is bitwise stable for a fixed seed at any
/// thread count. Requires n >= 1000. Samples at critical points (log Jac =
/// -inf) are excluded and counted; more than 0.1% of them aborts with
/// too_many_critical_hits_error.
struct integral_result {
    mean_accumulator acc;
    std::uint64_t critical_hits = 0;
};
integral_result integral_log_jac(const rational_map& f, const curve_embedding& E,
                                 std::uint64_t n, rng_stream& rng, int threads = 1);

exponent_report transverse_exponent(const rational_map& f, const curve_embedding& E,
                                    std::uint64_t n, rng_stream& rng, int threads = 1);

/// Drift-free orbit on the curve: t_{k+1} = a t_k + b exactly on the torus,
/// mapped through psi. Throws fit_residual_error when the fit residual is
/// above 1e-6.
std::vector<proj_point> orbit_on_curve(const curve_embedding& E, const torus_map_fit& fit,
                                       cplx t0, std::size_t n);

/// Birkhoff average of log Jac f along the fitted torus orbit, with a
/// batch-means standard error; the independent cross-check of
/// integral_log_jac.
std::pair<double, double> birkhoff_log_jac(const rational_map& f, const curve_embedding& E,
                                           const torus_map_fit& fit, cplx t0, std::size_t n);

/// Oseledec estimates along one orbit.
struct cocycle_report {
    double lambda1 = 0.0;
    double lambda2 = 0.0;
    int m1 = 1;
    int m2 = 1;  // m2 = 0 when the exponents merged
    std::size_t steps = 0;
    double mean_log_jac = 0.0;  // (1/n) sum log Jac_FS along the orbit
    /// (k, (1/k) log sin angle(E1, E2) at orbit point k)
    std::vector<std::pair<std::size_t, double>> angle_diagnostic;
};

/// QR accumulation of chart Jacobians along a consistent orbit (each point
/// within 1e-8 of the image of the previous). Exponents merge when
/// |l1 - l2| < 10/n. The angle diagnostic estimates the fast direction from
/// the forward frame and the slow direction from a windowed product, and
/// reports (1/k) log sin of the angle between them.
cocycle_report cocycle_exponents(const rational_map& f, const std::vector<proj_point>& orbit,
                                 int reorthonormalize_every = 1);

}  // namespace ellattr

#endif
