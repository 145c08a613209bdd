#include "bloch/simd.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <cstring>

namespace bloch::simd {

namespace detail {

void fermi_occupations_scalar(const double* e, std::size_t n, double beta, double mu, double* p, double* q) {
    for (std::size_t i = 0; i < n; ++i) {
        const double x = beta * (e[i] - mu);
        const double t = std::exp(-std::abs(x));
        const double inv = 1.0 / (1.0 + t);
        if (x >= 0) {
            p[i] = t * inv;
            q[i] = inv;
        } else {
            p[i] = inv;
            q[i] = t * inv;
        }
    }
}

std::size_t count_le_scalar(const double* e, std::size_t n, double level) {
    std::size_t c = 0;
    for (std::size_t i = 0; i < n; ++i) c += e[i] <= level ? 1 : 0;
    return c;
}

#if !defined(BLOCH_HAVE_AVX2)
void fermi_occupations_avx2(const double* e, std::size_t n, double b, double m, double* p, double* q) {
    fermi_occupations_scalar(e, n, b, m, p, q);
}
std::size_t count_le_avx2(const double* e, std::size_t n, double l) { return count_le_scalar(e, n, l); }
#endif
#if !defined(__aarch64__)
void fermi_occupations_neon(const double* e, std::size_t n, double b, double m, double* p, double* q) {
    fermi_occupations_scalar(e, n, b, m, p, q);
}
std::size_t count_le_neon(const double* e, std::size_t n, double l) { return count_le_scalar(e, n, l); }
#endif

}  // namespace detail

const char* name(Isa isa) {
    switch (isa) {
        case Isa::Avx2: return "avx2";
        case Isa::Neon: return "neon";
        default: return "scalar";
    }
}

bool available(Isa isa) {
    switch (isa) {
        case Isa::Scalar: return true;
        case Isa::Avx2:
#if defined(BLOCH_HAVE_AVX2)
            return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
            return false;
#endif
        case Isa::Neon:
#if defined(__aarch64__)
            return true;
#else
            return false;
#endif
    }
    return false;
}

namespace {

Isa detect() {
    if (const char* env = std::getenv("BLOCH_SIMD")) {
        if (std::strcmp(env, "scalar") == 0) return Isa::Scalar;
        if (std::strcmp(env, "avx2") == 0 && available(Isa::Avx2)) return Isa::Avx2;
        if (std::strcmp(env, "neon") == 0 && available(Isa::Neon)) return Isa::Neon;
    }
    if (available(Isa::Avx2)) return Isa::Avx2;
    if (available(Isa::Neon)) return Isa::Neon;
    return Isa::Scalar;
}

std::atomic<int>& forced() {
    static std::atomic<int> f{-1};
    return f;
}

}  // namespace

Isa active() {
    const int f = forced().load();
    if (f >= 0) return static_cast<Isa>(f);
    static const Isa isa = detect();
    return isa;
}

void force(Isa isa) { forced().store(available(isa) ? static_cast<int>(isa) : 0); }

void fermi_occupations(const double* e, std::size_t n, double beta, double mu, double* p, double* q, Isa isa) {
    switch (isa) {
        case Isa::Avx2: detail::fermi_occupations_avx2(e, n, beta, mu, p, q); return;
        case Isa::Neon: detail::fermi_occupations_neon(e, n, beta, mu, p, q); return;
        default: detail::fermi_occupations_scalar(e, n, beta, mu, p, q);
    }
}

std::size_t count_le(const double* e, std::size_t n, double level, Isa isa) {
    switch (isa) {
        case Isa::Avx2: return detail::count_le_avx2(e, n, level);
        case Isa::Neon: return detail::count_le_neon(e, n, level);
        default: return detail::count_le_scalar(e, n, level);
    }
}

}  // namespace bloch::simd
