#include "ellattr/projective.hpp"

#include <algorithm>
#include <cmath>

#include "ellattr/errors.hpp"

namespace ellattr {

proj_point proj_point::normalize(const std::array<cplx, 3>& raw) {
    double maxmod = 0.0;
    for (const auto& c : raw) maxmod = std::max(maxmod, std::abs(c));
    if (!(maxmod > 1e-300)) throw zero_vector_error();

    // scale by the max modulus first so the norm cannot overflow
    std::array<cplx, 3> v;
    for (int i = 0; i < 3; ++i) v[std::size_t(i)] = raw[std::size_t(i)] / maxmod;
    double norm = std::sqrt(std::norm(v[0]) + std::norm(v[1]) + std::norm(v[2]));
    for (auto& c : v) c /= norm;

    // phase anchor: first coordinate above the canonicalization tolerance
    for (const auto& c : v) {
        const double m = std::abs(c);
        if (m >= 1e-12) {
            const cplx phase = std::conj(c) / m;
            for (auto& w : v) w *= phase;
            break;
        }
    }
    proj_point p;
    p.c_ = v;
    return p;
}

int proj_point::max_chart() const {
    int best = 0;
    double bm = std::abs(c_[0]);
    for (int i = 1; i < 3; ++i) {
        const double m = std::abs(c_[std::size_t(i)]);
        if (m > bm) {
            bm = m;
            best = i;
        }
    }
    return best;
}

double fs_distance(const proj_point& p, const proj_point& q) {
    const auto& a = p.coords();
    const auto& b = q.coords();
    // c = <q, p>; both have unit norm
    cplx c(0);
    for (int i = 0; i < 3; ++i) c += std::conj(b[std::size_t(i)]) * a[std::size_t(i)];
    double s = 0.0;
    for (int i = 0; i < 3; ++i) s += std::norm(a[std::size_t(i)] - c * b[std::size_t(i)]);
    return std::sqrt(std::min(1.0, s));
}

chart_coords to_chart(const proj_point& p, int chart) {
    const int ch = chart < 0 ? p.max_chart() : chart;
    const cplx d = p[ch];
    chart_coords out;
    out.chart = ch;
    int k = 0;
    cplx uv[2];
    for (int i = 0; i < 3; ++i)
        if (i != ch) uv[k++] = p[i] / d;
    out.u = uv[0];
    out.v = uv[1];
    return out;
}

std::array<cplx, 3> chart_embedding(const chart_coords& c) {
    std::array<cplx, 3> z;
    z[std::size_t(c.chart)] = 1.0;
    int k = 0;
    for (int i = 0; i < 3; ++i)
        if (i != c.chart) z[std::size_t(i)] = (k++ == 0) ? c.u : c.v;
    return z;
}

proj_point from_chart(const chart_coords& c) { return proj_point::normalize(chart_embedding(c)); }

proj_point sample_fs_uniform(rng_stream& rng) {
    for (;;) {
        std::array<cplx, 3> v{rng.gaussian_complex(), rng.gaussian_complex(),
                              rng.gaussian_complex()};
        const double n2 = std::norm(v[0]) + std::norm(v[1]) + std::norm(v[2]);
        if (n2 > 1e-280) return proj_point::normalize(v);
        // measure-zero draw; resample
    }
}

}  // namespace ellattr
