// aarch64 variant; compiled only on ARM targets.
#if defined(__aarch64__)
#include <arm_neon.h>

#include "bloch/simd.hpp"

namespace bloch::simd::detail {

namespace {

inline float64x2_t exp_nonpositive(float64x2_t y) {
    y = vmaxq_f64(y, vdupq_n_f64(-708.0));
    const float64x2_t n = vrndnq_f64(vmulq_f64(y, vdupq_n_f64(1.4426950408889634)));
    float64x2_t r = vfmsq_f64(y, n, vdupq_n_f64(6.93147180369123816490e-01));
    r = vfmsq_f64(r, n, vdupq_n_f64(1.90821492927058770002e-10));
    static constexpr double c[13] = {1.0,         1.0,          1.0 / 2,       1.0 / 6,        1.0 / 24,
                                     1.0 / 120,   1.0 / 720,    1.0 / 5040,    1.0 / 40320,    1.0 / 362880,
                                     1.0 / 3628800, 1.0 / 39916800, 1.0 / 479001600};
    float64x2_t poly = vdupq_n_f64(c[12]);
    for (int i = 11; i >= 0; --i) poly = vfmaq_f64(vdupq_n_f64(c[i]), poly, r);
    const int64x2_t bits = vshlq_n_s64(vaddq_s64(vcvtq_s64_f64(n), vdupq_n_s64(1023)), 52);
    return vmulq_f64(poly, vreinterpretq_f64_s64(bits));
}

}  // namespace

void fermi_occupations_neon(const double* e, std::size_t n, double beta, double mu, double* p, double* q) {
    const float64x2_t vb = vdupq_n_f64(beta), vm = vdupq_n_f64(mu), one = vdupq_n_f64(1.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const float64x2_t x = vmulq_f64(vb, vsubq_f64(vld1q_f64(e + i), vm));
        const float64x2_t t = exp_nonpositive(vnegq_f64(vabsq_f64(x)));
        const float64x2_t inv = vdivq_f64(one, vaddq_f64(one, t));
        const float64x2_t ti = vmulq_f64(t, inv);
        const uint64x2_t pos = vcgeq_f64(x, vdupq_n_f64(0.0));
        vst1q_f64(p + i, vbslq_f64(pos, ti, inv));
        vst1q_f64(q + i, vbslq_f64(pos, inv, ti));
    }
    if (i < n) fermi_occupations_scalar(e + i, n - i, beta, mu, p + i, q + i);
}

std::size_t count_le_neon(const double* e, std::size_t n, double level) {
    std::size_t c = 0, i = 0;
    const float64x2_t vl = vdupq_n_f64(level);
    for (; i + 2 <= n; i += 2) {
        const uint64x2_t m = vcleq_f64(vld1q_f64(e + i), vl);
        c += (vgetq_lane_u64(m, 0) ? 1 : 0) + (vgetq_lane_u64(m, 1) ? 1 : 0);
    }
    return c + count_le_scalar(e + i, n - i, level);
}

}  // namespace bloch::simd::detail
#endif
