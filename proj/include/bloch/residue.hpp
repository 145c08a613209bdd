#pragma once
/// Closed-form contour integrals I = (1/2 pi i) oint f(xi) prod_p (E_p - xi)^(-m_p) d xi of the
/// Fermi log-kernel f around all real poles (counter-clockwise, so I[f / (xi - E)] = f(E)).

#include <array>
#include <utility>
#include <vector>

#include "bloch/bz.hpp"

namespace bloch {

/// Largest total multiplicity of a pole specification (derivatives of f up to order 7).
inline constexpr int kMaxTotalMultiplicity = kMaxFermiDerivative + 1;

struct Pole {
    double energy;
    int multiplicity;
};

struct PoleSpec {
    std::vector<Pole> poles;
    int total_multiplicity() const;
};

/// Weights w[l] of d^l f / d xi^l evaluated at one pole.
using DerivativeWeights = std::array<double, kMaxFermiDerivative + 1>;

struct PoleContribution {
    int pole;
    DerivativeWeights weight;  ///< beta-independent rational functions of the pole energies
    DerivativeWeights value;   ///< weight[l] * f^(l)(E_pole)
};

struct ResidueResult {
    double value = 0.0;
    std::vector<PoleContribution> per_pole;
};

/// Residue weights of every pole: I = sum_p sum_l w_p[l] f^(l)(E_p). With d_q = E_q - E_p and
/// g_n the Taylor coefficients of prod_{q != p} (d_q - t)^(-m_q),
/// w_p[l] = (-1)^{m_p} g_{m_p - 1 - l} / l!. Poles must be distinct.
/// Throws std::out_of_range if a pole order exceeds kMaxTotalMultiplicity.
void residue_weights(const Pole* poles, int count, DerivativeWeights* out);
std::vector<DerivativeWeights> residue_weights(const PoleSpec& spec);

/// Residue evaluation with per-pole, per-derivative breakdown.
ResidueResult contour_integral(const ThermoState& state, const PoleSpec& spec);

/// Single-linkage clustering of pole energies whose consecutive gaps are <= eps; each cluster
/// becomes one pole at the multiplicity-weighted mean energy with the summed multiplicity.
/// Output is sorted by energy.
PoleSpec merge_poles(const std::vector<std::pair<double, int>>& raw, double eps);

}  // namespace bloch
