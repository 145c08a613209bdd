#pragma once
/// Vectorised inner kernels over band-energy arrays. Every kernel has a scalar reference
/// implementation; AVX2 (x86-64) and NEON (aarch64) variants are selected once at runtime and
/// are tested for equivalence against the reference.

#include <cstddef>
#include <string>

namespace bloch::simd {

enum class Isa { Scalar, Avx2, Neon };

const char* name(Isa isa);
bool available(Isa isa);
/// Best available ISA, unless overridden by the environment variable BLOCH_SIMD=scalar|avx2|neon.
Isa active();
/// Overrides the active ISA for the rest of the process (tests, benchmarking).
void force(Isa isa);

/// Fermi-Dirac occupation and its complement for x_i = beta (e_i - mu):
///   p_i = 1 / (exp(x_i) + 1),  q_i = 1 / (exp(-x_i) + 1) = 1 - p_i,
/// both evaluated without cancellation (one exponential of -|x_i| per element).
void fermi_occupations(const double* e, std::size_t n, double beta, double mu, double* p, double* q, Isa isa);
inline void fermi_occupations(const double* e, std::size_t n, double beta, double mu, double* p, double* q) {
    fermi_occupations(e, n, beta, mu, p, q, active());
}

/// Number of entries with e_i <= level.
std::size_t count_le(const double* e, std::size_t n, double level, Isa isa);
inline std::size_t count_le(const double* e, std::size_t n, double level) { return count_le(e, n, level, active()); }

namespace detail {
void fermi_occupations_scalar(const double*, std::size_t, double, double, double*, double*);
std::size_t count_le_scalar(const double*, std::size_t, double);
void fermi_occupations_avx2(const double*, std::size_t, double, double, double*, double*);
std::size_t count_le_avx2(const double*, std::size_t, double);
void fermi_occupations_neon(const double*, std::size_t, double, double, double*, double*);
std::size_t count_le_neon(const double*, std::size_t, double);
}  // namespace detail

}  // namespace bloch::simd
