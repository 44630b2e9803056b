// Shared body of the batch kernels, templated on a small vector type so the
// scalar and SIMD backends execute the exact same per-lane operation
// sequence. Included by each backend translation unit.
#ifndef ELLATTR_KERNELS_KERNEL_IMPL_HPP
#define ELLATTR_KERNELS_KERNEL_IMPL_HPP

#include <cstddef>
#include <cstdint>

#include "ellattr/kernels/kernels.hpp"

namespace ellattr::kernels {
extern const batch_ops scalar_ops;
#if defined(__x86_64__) || defined(_M_X64)
extern const batch_ops avx2_ops;
#endif
}  // namespace ellattr::kernels

namespace ellattr::kernels::detail {

// complex product, pinned order: (ar*br - ai*bi, ar*bi + ai*br)
template <class V>
inline void cmul(V ar, V ai, V br, V bi, V& cr, V& ci) {
    cr = ar * br - ai * bi;
    ci = ar * bi + ai * br;
}

template <class V>
struct lane_kernels {
    static constexpr std::size_t W = V::width;

    // P(p) for lanes [i, i+W)
    static void eval_at(const packed_poly& p, const point_batch& pts, std::size_t i,
                        V& accr, V& acci) {
        V pr[3][hom_poly::max_degree + 1];
        V pi[3][hom_poly::max_degree + 1];
        const double* cr[3] = {pts.xr.data() + i, pts.yr.data() + i, pts.zr.data() + i};
        const double* cim[3] = {pts.xi.data() + i, pts.yi.data() + i, pts.zi.data() + i};
        for (int v = 0; v < 3; ++v) {
            pr[v][0] = V::set1(1.0);
            pi[v][0] = V::set1(0.0);
            const V zr = V::load(cr[v]);
            const V zi = V::load(cim[v]);
            for (int k = 1; k <= p.degree; ++k)
                cmul(pr[v][k - 1], pi[v][k - 1], zr, zi, pr[v][k], pi[v][k]);
        }
        accr = V::set1(0.0);
        acci = V::set1(0.0);
        for (std::size_t t = 0; t < p.size(); ++t) {
            const int a = p.ei[t], b = p.ej[t], c = p.ek[t];
            V mr, mi, m2r, m2i;
            cmul(pr[0][a], pi[0][a], pr[1][b], pi[1][b], mr, mi);
            cmul(mr, mi, pr[2][c], pi[2][c], m2r, m2i);
            const V tr = V::set1(p.cre[t]);
            const V ti = V::set1(p.cim[t]);
            accr = accr + (tr * m2r - ti * m2i);
            acci = acci + (tr * m2i + ti * m2r);
        }
    }

    static void eval_poly(const packed_poly& p, const point_batch& pts, std::size_t i,
                          double* wr, double* wi) {
        V ar, ai;
        eval_at(p, pts, i, ar, ai);
        ar.store(wr + i);
        ai.store(wi + i);
    }

    static void map_step(const packed_poly* f3, double eta, point_batch& pts, std::size_t i,
                         std::uint8_t* flag) {
        V wr[3], wi[3];
        for (int c = 0; c < 3; ++c) eval_at(f3[c], pts, i, wr[c], wi[c]);
        const V n0 = wr[0] * wr[0] + wi[0] * wi[0];
        const V n1 = wr[1] * wr[1] + wi[1] * wi[1];
        const V n2 = wr[2] * wr[2] + wi[2] * wi[2];
        const V nrm2 = (n0 + n1) + n2;
        const auto near = V::cmp_lt(nrm2, V::set1(eta * eta));
        const V s = V::set1(1.0) / V::sqrt(nrm2);
        double* dr[3] = {pts.xr.data() + i, pts.yr.data() + i, pts.zr.data() + i};
        double* di[3] = {pts.xi.data() + i, pts.yi.data() + i, pts.zi.data() + i};
        for (int c = 0; c < 3; ++c) {
            V::select(near, V::load(dr[c]), wr[c] * s).store(dr[c]);
            V::select(near, V::load(di[c]), wi[c] * s).store(di[c]);
        }
        V::write_mask(near, flag + i);
    }

    static void point_proximity(const double* targets, std::size_t n_targets,
                                const point_batch& pts, std::size_t i, double* out) {
        const V p0r = V::load(pts.xr.data() + i), p0i = V::load(pts.xi.data() + i);
        const V p1r = V::load(pts.yr.data() + i), p1i = V::load(pts.yi.data() + i);
        const V p2r = V::load(pts.zr.data() + i), p2i = V::load(pts.zi.data() + i);
        V best = V::set1(1.0);
        for (std::size_t t = 0; t < n_targets; ++t) {
            const double* q = targets + 6 * t;
            const V q0r = V::set1(q[0]), q0i = V::set1(q[1]);
            const V q1r = V::set1(q[2]), q1i = V::set1(q[3]);
            const V q2r = V::set1(q[4]), q2i = V::set1(q[5]);
            // c = <q, p> (conjugate q), componentwise then pinned sum
            const V cr = ((q0r * p0r + q0i * p0i) + (q1r * p1r + q1i * p1i)) +
                         (q2r * p2r + q2i * p2i);
            const V ci = ((q0r * p0i - q0i * p0r) + (q1r * p1i - q1i * p1r)) +
                         (q2r * p2i - q2i * p2r);
            // s = || p - c q ||^2
            V w0r = p0r - (cr * q0r - ci * q0i), w0i = p0i - (cr * q0i + ci * q0r);
            V w1r = p1r - (cr * q1r - ci * q1i), w1i = p1i - (cr * q1i + ci * q1r);
            V w2r = p2r - (cr * q2r - ci * q2i), w2i = p2i - (cr * q2i + ci * q2r);
            const V s = ((w0r * w0r + w0i * w0i) + (w1r * w1r + w1i * w1i)) +
                        (w2r * w2r + w2i * w2i);
            best = V::min(V::sqrt(V::min(s, V::set1(1.0))), best);
        }
        best.store(out + i);
    }

    static void curve_proximity(const packed_poly* p4, double scale, const point_batch& pts,
                                std::size_t i, double* out) {
        V er, ei, gxr, gxi, gyr, gyi, gzr, gzi;
        eval_at(p4[0], pts, i, er, ei);
        eval_at(p4[1], pts, i, gxr, gxi);
        eval_at(p4[2], pts, i, gyr, gyi);
        eval_at(p4[3], pts, i, gzr, gzi);
        const V r = V::sqrt(er * er + ei * ei);
        const V g = V::sqrt(((gxr * gxr + gxi * gxi) + (gyr * gyr + gyi * gyi)) +
                            (gzr * gzr + gzi * gzi));
        const V floor = V::set1(1e-12 * scale);
        const auto tiny = V::cmp_lt(g, floor);
        V::select(tiny, r * V::set1(1.0 / scale), r / g).store(out + i);
    }
};

// Whole-batch drivers: wide vectors over the aligned body, scalar lanes for
// the tail. Per-lane results are identical for any width.
template <class VW, class V1>
struct batch_kernels {
    static void eval_poly(const packed_poly& p, const point_batch& pts, double* wr, double* wi) {
        const std::size_t n = pts.size();
        std::size_t i = 0;
        for (; i + VW::width <= n; i += VW::width) lane_kernels<VW>::eval_poly(p, pts, i, wr, wi);
        for (; i < n; ++i) lane_kernels<V1>::eval_poly(p, pts, i, wr, wi);
    }
    static void map_step(const packed_poly* f3, double eta, point_batch& pts,
                         std::uint8_t* flag) {
        const std::size_t n = pts.size();
        std::size_t i = 0;
        for (; i + VW::width <= n; i += VW::width)
            lane_kernels<VW>::map_step(f3, eta, pts, i, flag);
        for (; i < n; ++i) lane_kernels<V1>::map_step(f3, eta, pts, i, flag);
    }
    static void point_proximity(const double* targets, std::size_t n_targets,
                                const point_batch& pts, double* out) {
        const std::size_t n = pts.size();
        std::size_t i = 0;
        for (; i + VW::width <= n; i += VW::width)
            lane_kernels<VW>::point_proximity(targets, n_targets, pts, i, out);
        for (; i < n; ++i) lane_kernels<V1>::point_proximity(targets, n_targets, pts, i, out);
    }
    static void curve_proximity(const packed_poly* p4, double scale, const point_batch& pts,
                                double* out) {
        const std::size_t n = pts.size();
        std::size_t i = 0;
        for (; i + VW::width <= n; i += VW::width)
            lane_kernels<VW>::curve_proximity(p4, scale, pts, i, out);
        for (; i < n; ++i) lane_kernels<V1>::curve_proximity(p4, scale, pts, i, out);
    }
};

// width-1 reference lane
struct vec1 {
    static constexpr std::size_t width = 1;
    double v;

    static vec1 load(const double* p) { return {*p}; }
    void store(double* p) const { *p = v; }
    static vec1 set1(double x) { return {x}; }

    friend vec1 operator+(vec1 a, vec1 b) { return {a.v + b.v}; }
    friend vec1 operator-(vec1 a, vec1 b) { return {a.v - b.v}; }
    friend vec1 operator*(vec1 a, vec1 b) { return {a.v * b.v}; }
    friend vec1 operator/(vec1 a, vec1 b) { return {a.v / b.v}; }

    static vec1 sqrt(vec1 a) { return {__builtin_sqrt(a.v)}; }
    static vec1 min(vec1 a, vec1 b) { return {a.v < b.v ? a.v : b.v}; }

    using mask = bool;
    static mask cmp_lt(vec1 a, vec1 b) { return a.v < b.v; }
    static vec1 select(mask m, vec1 a, vec1 b) { return m ? a : b; }
    static void write_mask(mask m, std::uint8_t* p) { *p = m ? 1 : 0; }
};

}  // namespace ellattr::kernels::detail

#endif
