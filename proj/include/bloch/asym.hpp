#pragma once
/// Low-density asymptotics of the lowest band: effective masses at the band bottom, the
/// Fermi-energy law E_F - E_0 ~ s rho0^(2/3), and the Landau-Peierls slope chi_M / k_F.

#include <array>
#include <ostream>
#include <vector>

#include "bloch/chi.hpp"

namespace bloch {

struct EffectiveMass {
    std::array<double, 3> m_star{};                      ///< ascending masses 1 / (Hessian eigenvalue)
    std::array<std::array<double, 3>, 3> axes{};         ///< axes[i] = principal direction of m_star[i]
    std::array<std::array<double, 3>, 3> hessian{};      ///< Hessian of E_1 at k = 0
};

/// Hessian of the lowest band at k = 0 from the second-derivative sum rule, diagonalised.
/// Throws std::domain_error if an eigenvalue is not positive.
EffectiveMass effective_mass(const FourierPotential& pot, const PlaneWaveBasis& basis);

/// (6 pi^2)^(2/3) / 2 * (m1 m2 m3)^(-1/3).
double fermi_coefficient(const EffectiveMass& m);
/// Spinless Landau-Peierls slope -(m1 m2 m3)^(1/3) / (24 pi^2 m1 m2) for a field along axis 3.
double landau_peierls_prediction(const EffectiveMass& m);
/// k_F = (6 pi^2 rho0)^(1/3).
double fermi_wavevector(double rho0);

struct FermiEnergyFit {
    double s = 0;       ///< coefficient of rho0^(2/3)
    double offset = 0;  ///< constant term (absorbs the interpolation bias of the discrete IDS)
    double t = 0;       ///< coefficient of rho0^(4/3) (0 when the ladder has fewer than 4 points)
    double E0 = 0;
    std::vector<double> rho, E_M;
};

/// Least-squares fit of E_M(rho0) - E_0 = offset + s x + t x^2 with x = rho0^(2/3).
/// Every density must classify as a metal in band 1.
FermiEnergyFit fermi_energy_expansion(const GridBands& bands, const std::vector<double>& rho_ladder);
FermiEnergyFit fermi_energy_expansion(const FourierPotential& pot, const PlaneWaveBasis& basis, const BZGrid& grid,
                                      const std::vector<double>& rho_ladder);

struct LandauPeierlsRow {
    double rho0, k_F, chi, chi_over_kF, prediction;
};

struct LandauPeierlsReport {
    EffectiveMass mass;
    std::vector<LandauPeierlsRow> rows;
    double slope = 0;       ///< Richardson extrapolation from the two smallest densities
    double prediction = 0;
    double relative_error() const;
};

/// Default density ladder {1e-3, 5e-4, 2e-4}.
std::vector<double> default_rho_ladder();

/// chi_M at every density, chi/k_F, and the extrapolated slope. Assuming chi/k_F = slope + c k_F^2,
/// slope = (k2^2 y1 - k1^2 y2) / (k2^2 - k1^2) over the two smallest densities.
LandauPeierlsReport landau_peierls_check(const GridBands& bands, const std::vector<double>& rho_ladder,
                                         const ChiOptions& opt = {});
LandauPeierlsReport landau_peierls_check(const FourierPotential& pot, const PlaneWaveBasis& basis, const BZGrid& grid,
                                         const std::vector<double>& rho_ladder, int J = 0);

/// CSV table rho0,k_F,chi,chi_over_kF,prediction.
void write_csv(const LandauPeierlsReport& report, std::ostream& out);

}  // namespace bloch
