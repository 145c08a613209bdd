#pragma once
/// Orbital susceptibility: momentum-matrix coefficient tensors, per-band coefficient functions
/// c_{j,l}(k) of the derivatives d^l f of the Fermi log-kernel, the finite-temperature
/// susceptibility at fixed density, and its zero-temperature semiconductor and metal limits.
///
/// All band indices are 0-based. Units hbar = m = 1, unit cubic cell, (e/c)^2 = 1, spinless.

#include <array>
#include <string>
#include <vector>

#include "bloch/bz.hpp"
#include "bloch/fermi.hpp"
#include "bloch/fiber.hpp"

namespace bloch {

/// (pi_12(1) pi_23(2) - pi_12(2) pi_23(1)) (pi_34(2) pi_41(1) - pi_34(1) pi_41(2)) with the
/// momentum directions 1, 2 = x, y.
cplx coeff_C4(const FiberSolution& sol, int j1, int j2, int j3, int j4);
/// |pi_12(1)|^2 + |pi_12(2)|^2.
double coeff_C2(const FiberSolution& sol, int j1, int j2);

/// Highest derivative order tracked in the coefficient buckets (order 4 must vanish).
inline constexpr int kChiMaxOrder = 4;
using OrderCoefficients = std::array<double, kChiMaxOrder + 1>;

/// Coefficient functions of all bands j < J at one k, from the residue expansion of the two
/// trace reductions: the quadruple sum weighted by C4 feeds `a`, the single/double sums
/// (pure third-order poles and C2-weighted ones) feed `b`, and c = a + b.
struct ChiCoefficients {
    int J = 0;                          ///< effective band cutoff (never splits a degenerate cluster)
    int J_half = 0;                     ///< coarser cutoff used for the truncation estimate
    std::vector<double> energies;       ///< E_j with degenerate clusters replaced by their mean
    std::vector<OrderCoefficients> a, b, c;
    std::vector<OrderCoefficients> a_half, c_half;  ///< same with every sum cut at J_half (j < J_half)
    double tail_bound = 0.0;            ///< max_{j < J_half, l} |c - c_half|
    double max_imag = 0.0;              ///< largest discarded imaginary part of a grouped C4 sum
    double direct_value = 0.0;          ///< sum of the evaluated contour integrals (when a state is given)
    double direct_value_half = 0.0;
};

/// Residue-path coefficients. With `state`, also sums the contour integrals term by term
/// (`direct_value`), which must equal sum_j sum_l f^(l)(E_j) c_{j,l}.
/// Throws std::invalid_argument if J is outside [1, M].
ChiCoefficients coeffs_via_residues(const FiberSolution& sol, int J, const ThermoState* state = nullptr);

/// sum_{j < J} sum_{l <= 4} f^(l)(E_j) c_{j,l} (or with c_half and j < J_half).
double coefficient_trace(const ChiCoefficients& c, const ThermoState& state, bool half = false);

/// Closed-form coefficients of an isolated band j1 with all internal sums cut at J.
struct ExplicitCoefficients {
    double a3 = 0, a2 = 0, b3 = 0, b2 = 0, b1 = 0, b0 = 0, c3 = 0, c2 = 0;
    double tail_bound = 0;  ///< crude size of the neglected j2 >= J terms of c2
};
/// Throws std::domain_error if band j1 is degenerate at sol.k.
ExplicitCoefficients explicit_coeffs(const FiberSolution& sol, int j1, int J);

/// F_N(k) = -2 a_{N,2}(k) for an isolated band N (explicit double sum cut at J).
double coefficient_F(const FiberSolution& sol, int band, int J);

enum class FiniteTAssembly {
    Auto,          ///< FermiSurface for a metal with an isolated Fermi band, BandSum otherwise
    BandSum,       ///< plain grid average of the trace over all bands
    FermiSurface,  ///< band-N second-order terms via the Fermi-smeared tetrahedron surface integral
};

struct ChiOptions {
    int J = 0;        ///< band cutoff; 0 selects 3 x occupied bands (capped by the basis size)
    int threads = 1;
    FiniteTAssembly assembly = FiniteTAssembly::Auto;
};

struct ChiResult {
    double value = 0.0;
    double surface_term = 0.0;  ///< metal: value = -(1/12)(2 pi)^-3 (surface - 6 volume)
    double volume_term = 0.0;
    std::vector<double> band_terms;  ///< semiconductor: per filled band
    bool zero_temperature = false;
    double beta = 0.0;
    double mu = 0.0;            ///< finite T: chemical potential
    double fermi_energy = 0.0;  ///< zero T: E_F or E_M
    int N = 0;                  ///< Fermi band / filled band count (physics numbering)
    int J = 0, grid_n = 0, cutoff_n = 0;
    bool grid_shifted = false;
    std::string method;
    double tail_bound = 0.0;          ///< |value(J) - value(J_half)|
    double assembly_mismatch = 0.0;   ///< |bucket assembly - direct trace sum|, relative
    double max_imag = 0.0;
    std::size_t full_solves = 0;      ///< k-points that needed eigenvectors
};

/// Default band cutoff for a density: 3 x ceil(rho0), at most the basis size.
int default_band_cutoff(const GridBands& bands, double rho0);

/// chi(beta, rho0) = -(1/2 beta) (1/n^3) sum_k sum_j sum_l f^(l)(E_j) c_{j,l} at mu = solve_mu.
ChiResult chi_finite_T(const GridBands& bands, double beta, double rho0, const ChiOptions& opt = {});
ChiResult chi_finite_T(const FourierPotential& pot, const PlaneWaveBasis& basis, const BZGrid& grid, double beta,
                       double rho0, int J);

/// Semiconductor limit: (1/2)(1/n^3) sum_k sum_{j < N} (c_{j,1} + (E_j - E_F) c_{j,0}).
/// Throws std::invalid_argument if the classification is not SC.
ChiResult chi_zero_T_SC(const GridBands& bands, double rho0, const ChiOptions& opt = {});

/// Metal limit: -(1/12)(2 pi)^-3 [S - 6 V] with the Fermi-surface integral
/// S = int_{S_F} dsigma/|grad E_N| (E_N,11 E_N,22 - E_N,12^2 - 3 F_N) and the occupied-volume term
/// V = (2 pi)^3 (1/n^3) sum_k sum_{j <= N} [E_j <= E_F] (c_{j,1} + (E_j - E_F) c_{j,0}).
/// Throws std::invalid_argument if not a metal or the Fermi band is not isolated.
ChiResult chi_zero_T_metal(const GridBands& bands, double rho0, const ChiOptions& opt = {});

/// Dispatches on classify(): semiconductor or metal limit.
ChiResult chi_zero_T(const GridBands& bands, double rho0, const ChiOptions& opt = {});

}  // namespace bloch
