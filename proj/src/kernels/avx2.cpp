// AVX2 backend: 4 lanes per 256-bit vector. Deliberately no FMA so results
// stay bit-identical to the scalar reference (mul and add round separately
// in both).
#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include "kernel_impl.hpp"

namespace ellattr::kernels {

namespace {

struct vec4 {
    static constexpr std::size_t width = 4;
    __m256d v;

    static vec4 load(const double* p) { return {_mm256_loadu_pd(p)}; }
    void store(double* p) const { _mm256_storeu_pd(p, v); }
    static vec4 set1(double x) { return {_mm256_set1_pd(x)}; }

    friend vec4 operator+(vec4 a, vec4 b) { return {_mm256_add_pd(a.v, b.v)}; }
    friend vec4 operator-(vec4 a, vec4 b) { return {_mm256_sub_pd(a.v, b.v)}; }
    friend vec4 operator*(vec4 a, vec4 b) { return {_mm256_mul_pd(a.v, b.v)}; }
    friend vec4 operator/(vec4 a, vec4 b) { return {_mm256_div_pd(a.v, b.v)}; }

    static vec4 sqrt(vec4 a) { return {_mm256_sqrt_pd(a.v)}; }
    static vec4 min(vec4 a, vec4 b) { return {_mm256_min_pd(a.v, b.v)}; }

    using mask = __m256d;
    static mask cmp_lt(vec4 a, vec4 b) { return _mm256_cmp_pd(a.v, b.v, _CMP_LT_OQ); }
    static vec4 select(mask m, vec4 a, vec4 b) { return {_mm256_blendv_pd(b.v, a.v, m)}; }
    static void write_mask(mask m, std::uint8_t* p) {
        const int bits = _mm256_movemask_pd(m);
        for (int k = 0; k < 4; ++k) p[k] = std::uint8_t((bits >> k) & 1);
    }
};

using impl = detail::batch_kernels<vec4, detail::vec1>;

}  // namespace

const batch_ops avx2_ops = {
    "avx2",
    &impl::eval_poly,
    &impl::map_step,
    &impl::point_proximity,
    &impl::curve_proximity,
};

}  // namespace ellattr::kernels

#endif  // x86-64
