#ifndef ELLATTR_TESTUTIL_HPP
#define ELLATTR_TESTUTIL_HPP

#include <array>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "ellattr/elliptic.hpp"
#include "ellattr/polynomials.hpp"
#include "ellattr/projective.hpp"
#include "ellattr/ratmap.hpp"
#include "ellattr/rng.hpp"

namespace testutil {

using ellattr::cplx;

inline ellattr::rational_map make_map(const std::string& f0, const std::string& f1,
                                      const std::string& f2) {
    return ellattr::rational_map(
        {ellattr::hom_poly::parse(f0), ellattr::hom_poly::parse(f1), ellattr::hom_poly::parse(f2)});
}

inline ellattr::rational_map squares_map() { return make_map("x^2", "y^2", "z^2"); }
inline ellattr::rational_map cremona_like_map() { return make_map("y*z", "x*z", "x*y"); }
inline ellattr::rational_map common_factor_map() { return make_map("x*z", "y*z", "z^2"); }

/// The bundled degree-4 map extending doubling on y^2 z = 4x^3 - 4x z^2.
inline ellattr::rational_map duplication_map() {
    return make_map("2*x*y^3 + 24*x^2*y*z + 8*y*z^3",
                    "y^4 - 12*x*y^2*z - 144*x^2*z^2 + 16*z^4", "8*y^3*z");
}

/// Side length of the square lattice whose cubic is y^2 = 4x^3 - 4x.
inline constexpr double lemniscate_omega = 2.6220575542921198;

inline ellattr::curve_embedding lemniscatic_embedding() {
    return ellattr::curve_embedding(
        ellattr::lattice(cplx(lemniscate_omega, 0.0), cplx(0.0, lemniscate_omega)));
}

inline ellattr::proj_point random_point(ellattr::rng_stream& rng) {
    return ellattr::sample_fs_uniform(rng);
}

/// Points of the Fermat cubic x^3 + y^3 + z^3 = 0.
inline std::vector<ellattr::proj_point> fermat_points(std::size_t n, ellattr::rng_stream& rng) {
    std::vector<ellattr::proj_point> out;
    while (out.size() < n) {
        const cplx a = rng.gaussian_complex();
        const cplx b = rng.gaussian_complex();
        const cplx c = std::pow(-(a * a * a + b * b * b), 1.0 / 3.0);
        out.push_back(ellattr::proj_point::normalize({a, b, c}));
    }
    return out;
}

/// Straightforward long-double monomial evaluation, independent of the
/// library's power-table path.
inline cplx naive_eval(const ellattr::hom_poly& p, const std::array<cplx, 3>& z) {
    using lcplx = std::complex<long double>;
    lcplx acc(0.0L);
    const lcplx zz[3] = {lcplx(z[0]), lcplx(z[1]), lcplx(z[2])};
    for (const auto& t : p.terms()) {
        lcplx m(lcplx(t.coeff));
        for (int v = 0; v < 3; ++v)
            for (int e = 0; e < t.exps[std::size_t(v)]; ++e) m *= zz[v];
        acc += m;
    }
    return cplx(double(acc.real()), double(acc.imag()));
}

/// Central finite differences of the affine chart map of f (source chart of
/// p, image chart j), the independent oracle for chart_jacobian.
inline ellattr::mat2 fd_chart_jacobian(const ellattr::rational_map& f,
                                       const ellattr::proj_point& p, int img, double h = 1e-6) {
    const auto cc = ellattr::to_chart(p);
    const int j1 = (img == 0) ? 1 : 0;
    const int j2 = (img == 2) ? 1 : 2;
    auto chart_map = [&](cplx u, cplx v) -> std::array<cplx, 2> {
        ellattr::chart_coords c{cc.chart, u, v};
        const auto z = ellattr::chart_embedding(c);
        std::array<cplx, 3> w;
        for (int i = 0; i < 3; ++i) w[std::size_t(i)] = f.component(i).eval(z);
        return {w[std::size_t(j1)] / w[std::size_t(img)], w[std::size_t(j2)] / w[std::size_t(img)]};
    };
    ellattr::mat2 out;
    const auto fu_p = chart_map(cc.u + h, cc.v);
    const auto fu_m = chart_map(cc.u - h, cc.v);
    const auto fv_p = chart_map(cc.u, cc.v + h);
    const auto fv_m = chart_map(cc.u, cc.v - h);
    out.a = (fu_p[0] - fu_m[0]) / (2.0 * h);
    out.c = (fu_p[1] - fu_m[1]) / (2.0 * h);
    out.b = (fv_p[0] - fv_m[0]) / (2.0 * h);
    out.d = (fv_p[1] - fv_m[1]) / (2.0 * h);
    return out;
}

/// Roots of 4x^3 - g2 x - g3 by Durand-Kerner; the oracle for half-period
/// values of wp.
inline std::array<cplx, 3> depressed_quartic_roots(cplx g2, cplx g3) {
    std::array<cplx, 3> r{cplx(0.9, 0.4), cplx(-0.5, 0.8), cplx(-0.2, -1.1)};
    auto f = [&](cplx x) { return 4.0 * x * x * x - g2 * x - g3; };
    for (int it = 0; it < 200; ++it) {
        for (int k = 0; k < 3; ++k) {
            cplx denom(4.0);
            for (int j = 0; j < 3; ++j)
                if (j != k) denom *= r[std::size_t(k)] - r[std::size_t(j)];
            r[std::size_t(k)] -= f(r[std::size_t(k)]) / denom;
        }
    }
    return r;
}

inline double rel_err(cplx a, cplx b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

}  // namespace testutil

#endif
