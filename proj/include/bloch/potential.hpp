#pragma once
/// Periodic potentials on the cubic lattice Z^3 given by truncated Fourier series.

#include <array>
#include <complex>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace bloch {

using cplx = std::complex<double>;

/// Reciprocal lattice vector G = 2*pi*(n1, n2, n3).
struct ReciprocalVector {
    int n1 = 0, n2 = 0, n3 = 0;

    ReciprocalVector operator-() const { return {-n1, -n2, -n3}; }
    ReciprocalVector operator-(const ReciprocalVector& o) const { return {n1 - o.n1, n2 - o.n2, n3 - o.n3}; }
    ReciprocalVector operator+(const ReciprocalVector& o) const { return {n1 + o.n1, n2 + o.n2, n3 + o.n3}; }
    auto operator<=>(const ReciprocalVector&) const = default;

    /// max(|n1|, |n2|, |n3|)
    int norm_inf() const;
    /// Cartesian component alpha in {0,1,2} of G, i.e. 2*pi*n_alpha.
    double cart(int alpha) const;
};

/// Sparse Fourier coefficients V^(G); V(x) = sum_G V^(G) exp(i G.x).
class FourierPotential {
public:
    FourierPotential() = default;

    /// Sets V^(G) (overwrites). Zero coefficients are dropped.
    void set(const ReciprocalVector& g, cplx value);
    /// V^(G), zero when absent.
    cplx coefficient(const ReciprocalVector& g) const;

    const std::map<ReciprocalVector, cplx>& coefficients() const { return coeffs_; }
    bool empty() const { return coeffs_.empty(); }
    /// Largest max-norm of a stored G (0 when empty).
    int support_radius() const;
    /// True when V has no G != 0 component (the Hamiltonian is then diagonal in plane waves).
    bool is_constant() const;

    /// Order-stable 64-bit FNV-1a hash of the coefficient bit patterns; used as a cache key.
    std::uint64_t hash() const;

private:
    std::map<ReciprocalVector, cplx> coeffs_;
};

struct Violation {
    ReciprocalVector g;
    cplx value;
    std::string reason;
};

struct ValidationReport {
    std::vector<Violation> violations;
    bool ok() const { return violations.empty(); }
};

/// Checks Hermitian symmetry V^(-G) = conj(V^(G)) (within 1e-14 relative) and realness of V^(0).
/// Each missing or mismatched partner is reported at the partner position -G.
ValidationReport validate(const FourierPotential& pot);

/// sum_G V^(G) exp(2 pi i n.x); x in fractional cell coordinates. The imaginary residue is discarded.
double evaluate_realspace(const FourierPotential& pot, const std::array<double, 3>& x);
/// Same, also returning the discarded imaginary residue.
cplx evaluate_realspace_complex(const FourierPotential& pot, const std::array<double, 3>& x);

/// Default amplitude of the separable_gap fixture when amplitude 0 is requested.
inline constexpr double kSeparableGapDefaultAmplitude = 10.0;

/// Named fixtures:
///  - "free": V = 0.
///  - "cosine3d": V(x) = A * sum_i cos(2 pi x_i)   (V^(+-2 pi e_i) = A/2).
///  - "separable_gap": V(x) = -A * sum_i cos(2 pi x_i) with wells on the lattice sites; the
///    separable spectrum opens the gap between bands 1 and 2 for A >~ 5.5. Amplitude 0 selects 10.
/// Throws std::invalid_argument for an unknown name.
FourierPotential named_potential(const std::string& name, double amplitude);

}  // namespace bloch
