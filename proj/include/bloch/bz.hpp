#pragma once
/// Brillouin-zone grids, Fermi statistics kernels, band energies on a grid, integrated density
/// of states and grand-canonical density.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "bloch/fiber.hpp"
#include "bloch/potential.hpp"

namespace bloch {

/// Uniform n^3 grid over the Brillouin zone (-pi, pi]^3. Unshifted grids contain k = 0;
/// shifted grids are offset by half a cell and avoid every high-symmetry point.
/// Every point carries weight 1/n^3 for averages (2 pi)^-3 int dk.
class BZGrid {
public:
    explicit BZGrid(int n_per_axis, bool shifted = false);

    int n() const { return n_; }
    bool shifted() const { return shifted_; }
    std::size_t size() const { return static_cast<std::size_t>(n_) * n_ * n_; }
    double weight() const { return 1.0 / static_cast<double>(size()); }

    /// Coordinate of grid index i in [0, n) along one axis.
    double coord(int i) const;
    /// Flat index (i1 n + i2) n + i3 (indices wrapped periodically).
    std::size_t index(int i1, int i2, int i3) const;
    Vec3 point(std::size_t flat) const;

private:
    int n_;
    bool shifted_;
};

/// Inverse temperature and chemical potential.
struct ThermoState {
    double beta;
    double mu;

    /// Throws std::invalid_argument unless beta > 0 and both values are finite.
    ThermoState(double beta_, double mu_);
    /// Fugacity exp(beta mu) (may overflow to inf for huge beta mu).
    double z() const;
};

/// Highest derivative order of the log-kernel f supported by the recurrences.
inline constexpr int kMaxFermiDerivative = 7;

/// f(xi) = ln(1 + exp(beta (mu - xi))) and its xi-derivatives of order l <= 7, overflow safe:
///   l = 1: -beta f_FD,  l >= 2: -beta d^{l-1}/dxi^{l-1} f_FD.
/// Throws std::out_of_range for l outside [0, 7].
double f_log(const ThermoState& s, double xi, int l);
/// Fermi-Dirac occupation 1 / (exp(beta (xi - mu)) + 1).
double fermi_dirac(const ThermoState& s, double xi);
/// d/dxi f_FD = -beta f_FD (1 - f_FD).
double fermi_dirac_derivative(const ThermoState& s, double xi);

/// Lowest `nbands` band energies at every point of a grid (row-major: point, band).
/// Keeps the potential and basis so that full eigen-data of any point can be regenerated
/// deterministically on demand.
class GridBands {
public:
    /// nbands = 0 keeps all basis bands. threads caps the worker count.
    static GridBands compute(const FourierPotential& pot, const PlaneWaveBasis& basis, const BZGrid& grid,
                             int nbands = 0, int threads = 1);
    /// Wraps precomputed energies (used by the cache loader).
    GridBands(FourierPotential pot, PlaneWaveBasis basis, BZGrid grid, int nbands, std::vector<double> energies);

    const FourierPotential& potential() const { return pot_; }
    const PlaneWaveBasis& basis() const { return basis_; }
    const BZGrid& grid() const { return grid_; }
    int nbands() const { return nbands_; }
    std::size_t nk() const { return grid_.size(); }
    /// True when every basis band is stored (the IDS is then exact at all energies).
    bool complete() const { return nbands_ == basis_.dimension(); }

    double energy(std::size_t k, int band) const { return e_[k * nbands_ + band]; }
    const double* row(std::size_t k) const { return e_.data() + k * nbands_; }
    const std::vector<double>& energies() const { return e_; }

    double band_min(int band) const { return bmin_[band]; }
    double band_max(int band) const { return bmax_[band]; }
    /// E_0 = min over the grid of the lowest band.
    double bottom() const { return bmin_[0]; }

    /// Full solution (eigenvectors, momentum matrices) at grid point k.
    FiberSolution solve_full(std::size_t k) const;

private:
    void extrema();

    FourierPotential pot_;
    PlaneWaveBasis basis_;
    BZGrid grid_;
    int nbands_;
    std::vector<double> e_;
    std::vector<double> bmin_, bmax_;
};

/// Integrated density of states n(E) = (1/n^3) sum_k #{j : E_j(k) <= E} over the stored bands.
double ids(const GridBands& bands, double e);
double ids(const FourierPotential& pot, const PlaneWaveBasis& basis, const BZGrid& grid, double e);

/// rho = (1/n^3) sum_k sum_j f_FD(E_j(k)) over the stored bands.
double density(const GridBands& bands, const ThermoState& s, int threads = 1);
double density(const FourierPotential& pot, const PlaneWaveBasis& basis, const BZGrid& grid, const ThermoState& s);

}  // namespace bloch
