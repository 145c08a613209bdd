#pragma once
/// Linear-tetrahedron treatment of one band on a periodic grid: isosurface integrals
/// int_{E_N = eps} dsigma / |grad E_N| * F(k), Fermi-smeared versions, and the interpolated IDS.

#include <array>
#include <cstddef>
#include <limits>
#include <ostream>
#include <vector>

#include "bloch/bz.hpp"

namespace bloch {

/// Every grid cube split into 6 tetrahedra around its main diagonal, with periodic wrapping.
/// Vertex data: band energies and, optionally, exact band gradients (from pi_NN).
class TetraMesh {
public:
    TetraMesh(const BZGrid& grid, std::vector<double> energy, std::vector<Vec3> gradient = {});

    const BZGrid& grid() const { return grid_; }
    const std::vector<double>& energy() const { return energy_; }
    bool has_gradient() const { return !gradient_.empty(); }
    const std::vector<Vec3>& gradient() const { return gradient_; }
    void set_gradient(std::size_t vertex, const Vec3& g);

    std::size_t tetra_count() const { return 6 * grid_.size(); }
    /// Grid indices of the four vertices of tetrahedron t, ordered along the path 0 -> 7 of the cube.
    std::array<std::size_t, 4> vertices(std::size_t t) const;
    /// Cartesian offsets of the four vertices relative to the cube origin.
    std::array<Vec3, 4> offsets(std::size_t t) const;
    double tetra_volume() const;
    /// Sum of all tetrahedron volumes, (2 pi)^3 up to rounding.
    double total_volume() const;

    /// Sorted grid indices of all vertices of tetrahedra whose energy range brackets any level.
    std::vector<std::size_t> crossing_vertices(const std::vector<double>& levels) const;

private:
    BZGrid grid_;
    std::vector<double> energy_;
    std::vector<Vec3> gradient_;
};

/// Mesh of band `band` (0-based) from grid energies, without gradients.
TetraMesh make_tetra_mesh(const GridBands& bands, int band);

struct SurfaceIntegral {
    double value = 0.0;
    std::size_t crossing = 0;    ///< tetrahedra cut by the isosurface
    std::size_t degenerate = 0;  ///< of which skipped because |grad E| <= 1e-6
};

/// sum over crossing tetrahedra of area / |grad E| * F, with |grad E| and F linearly interpolated
/// at the centroid of the planar cut. Gradients come from the mesh when present, otherwise
/// from the linear interpolant. An empty F means F = 1. Throws std::runtime_error when more
/// than 1% of the crossing tetrahedra have a degenerate gradient.
SurfaceIntegral surface_integral(const TetraMesh& mesh, double level, const std::vector<double>& f = {});

/// int d(eps) (-d f_FD/d eps)(eps) S_F(eps) where S_F is the isosurface integral above, i.e.
/// (1/beta) int d(eps) f''(eps) S_F(eps), evaluated as int_0^1 du S_F(eps(u)) with
/// eps(u) = mu + ln(1/u - 1)/beta by composite Gauss-Legendre quadrature.
double fermi_smeared_surface_integral(const TetraMesh& mesh, double beta, double mu, const std::vector<double>& f = {});
/// Energy levels used by fermi_smeared_surface_integral (to pre-compute vertex data lazily).
std::vector<double> fermi_smearing_levels(const TetraMesh& mesh, double beta, double mu);

/// Interpolated IDS of one band: fraction of the zone with E_N(k) <= e (tetrahedron method).
double ids_tetra_band(const TetraMesh& mesh, double e);
/// Interpolated IDS summed over all stored bands (bands entirely below e count fully).
double ids_tetra(const GridBands& bands, double e);
/// Inverts the tetrahedron IDS summed over all stored bands: returns E with n(E) = rho0.
double invert_ids_tetra(const GridBands& bands, double rho0);

struct IsolationReport {
    double d1 = std::numeric_limits<double>::infinity();  ///< E_F - max E_{N-1} (inf for N = 1)
    double d2 = std::numeric_limits<double>::infinity();  ///< min E_{N+1} - E_F (inf if not stored)
    bool ok = false;
};

/// Distances from E_F to the neighbouring bands of band N (physics numbering, N >= 1).
IsolationReport isolation_check(const GridBands& bands, int n_band, double e_fermi, double margin);

/// Writes the isosurface E = level as a triangle soup in Wavefront OBJ format.
/// Returns the number of triangles written.
std::size_t write_obj(const TetraMesh& mesh, double level, std::ostream& out);

}  // namespace bloch
