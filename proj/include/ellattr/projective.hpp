#ifndef ELLATTR_PROJECTIVE_HPP
#define ELLATTR_PROJECTIVE_HPP

#include <array>
#include <complex>

#include "ellattr/rng.hpp"

namespace ellattr {

using cplx = std::complex<double>;

/// A point of the projective plane stored in canonical form: Euclidean norm 1
/// and the first coordinate of modulus above 1e-12 made real and positive.
/// Raw triples differing by a nonzero complex scalar canonicalize to the same
/// representative up to ~1e-15 roundoff.
class proj_point {
public:
    proj_point() : c_{cplx(1), cplx(0), cplx(0)} {}

    /// Canonicalize a raw coordinate triple.
    /// Throws zero_vector_error if all moduli are below 1e-300.
    static proj_point normalize(const std::array<cplx, 3>& raw);

    const std::array<cplx, 3>& coords() const { return c_; }
    cplx operator[](int i) const { return c_[std::size_t(i)]; }

    /// Index of the coordinate of maximal modulus (lowest index wins ties).
    int max_chart() const;

private:
    std::array<cplx, 3> c_;
};

inline proj_point normalize(const std::array<cplx, 3>& raw) { return proj_point::normalize(raw); }

/// Chordal Fubini-Study distance, sqrt(1 - |<p,q>|^2), in [0, 1].
/// Computed as the norm of p minus its projection onto q, which stays
/// accurate near zero where the direct formula loses half the digits.
double fs_distance(const proj_point& p, const proj_point& q);

/// Affine coordinates of a point in one of the three standard charts:
/// the two remaining coordinates, in index order, divided by the chart one.
struct chart_coords {
    int chart = 0;
    cplx u;
    cplx v;
};

/// Chart transition. With chart < 0 the max-modulus chart is used, which
/// guarantees |u| <= 1 and |v| <= 1.
chart_coords to_chart(const proj_point& p, int chart = -1);
proj_point from_chart(const chart_coords& c);

/// Homogeneous representative of a chart point, with 1 in the chart slot
/// (not normalized). Shared by the Jacobian machinery.
std::array<cplx, 3> chart_embedding(const chart_coords& c);

/// Fubini-Study-uniform random point: a normalized standard complex
/// Gaussian triple. Unitary-invariant by construction.
proj_point sample_fs_uniform(rng_stream& rng);

}  // namespace ellattr

#endif
