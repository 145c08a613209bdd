#pragma once
/// Chemical potential at fixed density, zero-temperature Fermi energy classification
/// (semiconductor gap midpoint or metallic IDS inverse) and the gap fixed-point map.

#include <stdexcept>
#include <string>
#include <vector>

#include "bloch/bz.hpp"

namespace bloch {

/// mu with density(mu) = rho0 on the stored bands. The root is bracketed and refined by
/// safeguarded Newton steps to full double precision, so |density - rho0| is at rounding level
/// even when mu lies inside a gap. Throws std::invalid_argument if rho0 is not in (0, nbands).
double solve_mu(const GridBands& bands, double beta, double rho0, int threads = 1);
double solve_mu(const FourierPotential& pot, const PlaneWaveBasis& basis, const BZGrid& grid, double beta,
                double rho0);

struct GapRow {
    int band;          ///< N (physics numbering)
    double max_lower;  ///< max over the grid of E_N
    double min_upper;  ///< min over the grid of E_{N+1}
};

struct FermiClassification {
    enum class Variant { SC, Metal };
    Variant variant = Variant::Metal;
    int N = 0;              ///< SC: filled bands; Metal: band containing E_M (smallest if several)
    double a_N = 0, b_N = 0;  ///< SC gap edges
    double E_F = 0;         ///< SC gap midpoint
    double E_M = 0;         ///< Metal Fermi energy
    bool multiple_bands = false;  ///< Metal: several bands straddle E_M
    double tol_gap = 0;
    std::vector<GapRow> gap_table;

    bool is_sc() const { return variant == Variant::SC; }
    double fermi_energy() const { return is_sc() ? E_F : E_M; }
};

/// Thrown when the gap that controls an integer filling is closed within tolerance.
struct SemimetalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Gap tolerance: 4 x the larger, over bands N and N+1, of the mean per-cell energy spread.
double gap_tolerance(const GridBands& bands, int n_band);

/// Zero-temperature Fermi energy classification at density rho0.
/// Integer fillings (within 1e-9) with an open gap give SC; otherwise the interpolated
/// (tetrahedron) IDS is inverted for E_M. Throws SemimetalError or std::invalid_argument.
FermiClassification classify(const GridBands& bands, double rho0);
FermiClassification classify(const FourierPotential& pot, const PlaneWaveBasis& basis, const BZGrid& grid,
                             double rho0);

/// Gap fixed-point map x -> c_N + (1/2 beta) ln(L(x) / U(x)), where L and U are the hole and
/// electron populations below/above the gap measured relative to the gap edges. Evaluated in
/// log-sum-exp form, so it never underflows. Its unique fixed point is solve_mu(beta, N).
double sc_fixed_point_map(const GridBands& bands, const FermiClassification& cls, double beta, double x);

struct EdgeDiagnostic {
    std::vector<double> deltas;
    std::vector<double> increments;  ///< n(a_N) - n(a_N - delta)
    double C = 0;                    ///< least-squares fit increments ~ C delta^3
};

/// IDS growth just below the upper edge a_N of band N (physics numbering).
EdgeDiagnostic edge_diagnostic(const GridBands& bands, int n_band, const std::vector<double>& deltas);

}  // namespace bloch
