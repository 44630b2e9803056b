#ifndef ELLATTR_KERNELS_KERNELS_HPP
#define ELLATTR_KERNELS_KERNELS_HPP

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "ellattr/polynomials.hpp"

namespace ellattr::kernels {

/// Flat monomial form of a hom_poly for the batch kernels.
struct packed_poly {
    int degree = 0;
    std::vector<double> cre, cim;
    std::vector<std::uint8_t> ei, ej, ek;

    static packed_poly pack(const hom_poly& p);
    std::size_t size() const { return cre.size(); }
};

/// Structure-of-arrays batch of homogeneous coordinate triples.
struct point_batch {
    std::vector<double> xr, xi, yr, yi, zr, zi;

    explicit point_batch(std::size_t n = 0) { resize(n); }
    std::size_t size() const { return xr.size(); }
    void resize(std::size_t n) {
        xr.resize(n); xi.resize(n); yr.resize(n); yi.resize(n); zr.resize(n); zi.resize(n);
    }
    void set(std::size_t i, const std::array<cplx, 3>& c) {
        xr[i] = c[0].real(); xi[i] = c[0].imag();
        yr[i] = c[1].real(); yi[i] = c[1].imag();
        zr[i] = c[2].real(); zi[i] = c[2].imag();
    }
    std::array<cplx, 3> get(std::size_t i) const {
        return {cplx(xr[i], xi[i]), cplx(yr[i], yi[i]), cplx(zr[i], zi[i])};
    }
};

/// One backend = one ISA-specific implementation of the batch kernels.
/// All backends implement the exact same arithmetic in the exact same
/// per-lane order, so their outputs are bit-identical; the equivalence
/// suite asserts this.
struct batch_ops {
    const char* name;

    /// w[i] = P(p_i)
    void (*eval_poly)(const packed_poly& p, const point_batch& pts, double* wr, double* wi);

    /// In-place map step: p_i <- F(p_i) / ||F(p_i)||. Lanes where
    /// ||F(p_i)|| < eta are left untouched and get flag[i] = 1.
    void (*map_step)(const packed_poly* f3, double eta, point_batch& pts, std::uint8_t* flag);

    /// out[i] = min over targets q of chordal FS distance(p_i, q).
    /// Targets are unit triples packed as 6 doubles each (re0,im0,...,im2);
    /// the batch points must also have unit norm.
    void (*point_proximity)(const double* targets, std::size_t n_targets,
                            const point_batch& pts, double* out);

    /// out[i] = |P(p_i)| / ||grad P(p_i)||, with the raw residual
    /// |P(p_i)| / scale as fallback when the gradient norm is below
    /// 1e-12 * scale. p4 = {P, dP/dx, dP/dy, dP/dz}, scale = coeff scale of P.
    void (*curve_proximity)(const packed_poly* p4, double scale,
                            const point_batch& pts, double* out);
};

/// Backend selected at process start: "avx2" when the CPU supports it,
/// otherwise "scalar".
const batch_ops& active();

/// All backends compiled into this binary (scalar always; avx2 on x86-64
/// builds, usable only when the CPU supports it).
std::vector<const batch_ops*> available();

/// Force a backend by name for tests; returns false if unknown or
/// unsupported on this CPU. force("") restores automatic selection.
bool force(std::string_view name);

}  // namespace ellattr::kernels

#endif
