// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.
#include <immintrin.h>

#include "bloch/simd.hpp"

namespace bloch::simd::detail {

namespace {

/// exp(y) for y <= 0 (clamped at -708 so the result stays normal); ~1 ulp.
inline __m256d exp_nonpositive(__m256d y) {
    y = _mm256_max_pd(y, _mm256_set1_pd(-708.0));
    const __m256d n = _mm256_round_pd(_mm256_mul_pd(y, _mm256_set1_pd(1.4426950408889634)),
                                      _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
    __m256d r = _mm256_fnmadd_pd(n, _mm256_set1_pd(6.93147180369123816490e-01), y);
    r = _mm256_fnmadd_pd(n, _mm256_set1_pd(1.90821492927058770002e-10), r);
    // Taylor polynomial of degree 12 on |r| <= ln2/2.
    static constexpr double c[13] = {1.0,
                                     1.0,
                                     1.0 / 2,
                                     1.0 / 6,
                                     1.0 / 24,
                                     1.0 / 120,
                                     1.0 / 720,
                                     1.0 / 5040,
                                     1.0 / 40320,
                                     1.0 / 362880,
                                     1.0 / 3628800,
                                     1.0 / 39916800,
                                     1.0 / 479001600};
    __m256d poly = _mm256_set1_pd(c[12]);
    for (int i = 11; i >= 0; --i) poly = _mm256_fmadd_pd(poly, r, _mm256_set1_pd(c[i]));
    const __m128i ni = _mm256_cvtpd_epi32(n);
    const __m256i bits = _mm256_slli_epi64(_mm256_add_epi64(_mm256_cvtepi32_epi64(ni), _mm256_set1_epi64x(1023)), 52);
    return _mm256_mul_pd(poly, _mm256_castsi256_pd(bits));
}

}  // namespace

void fermi_occupations_avx2(const double* e, std::size_t n, double beta, double mu, double* p, double* q) {
    const __m256d vb = _mm256_set1_pd(beta), vm = _mm256_set1_pd(mu), one = _mm256_set1_pd(1.0);
    const __m256d sign = _mm256_set1_pd(-0.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d x = _mm256_mul_pd(vb, _mm256_sub_pd(_mm256_loadu_pd(e + i), vm));
        const __m256d t = exp_nonpositive(_mm256_or_pd(x, sign));  // exp(-|x|)
        const __m256d inv = _mm256_div_pd(one, _mm256_add_pd(one, t));
        const __m256d ti = _mm256_mul_pd(t, inv);
        const __m256d pos = _mm256_cmp_pd(x, _mm256_setzero_pd(), _CMP_GE_OQ);
        _mm256_storeu_pd(p + i, _mm256_blendv_pd(inv, ti, pos));
        _mm256_storeu_pd(q + i, _mm256_blendv_pd(ti, inv, pos));
    }
    if (i < n) fermi_occupations_scalar(e + i, n - i, beta, mu, p + i, q + i);
}

std::size_t count_le_avx2(const double* e, std::size_t n, double level) {
    const __m256d vl = _mm256_set1_pd(level);
    std::size_t c = 0, i = 0;
    for (; i + 4 <= n; i += 4) {
        const int mask = _mm256_movemask_pd(_mm256_cmp_pd(_mm256_loadu_pd(e + i), vl, _CMP_LE_OQ));
        c += static_cast<std::size_t>(__builtin_popcount(mask));
    }
    return c + count_le_scalar(e + i, n - i, level);
}

}  // namespace bloch::simd::detail
