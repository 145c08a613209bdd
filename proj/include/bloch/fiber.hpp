#pragma once
/// Fiber Hamiltonian h(k) = 1/2 (-i grad + k)^2 + V in a truncated plane-wave basis.

#include <array>
#include <vector>

#include <Eigen/Dense>

#include "bloch/potential.hpp"

namespace bloch {

using Vec3 = std::array<double, 3>;

/// Degeneracy threshold eps_deg(E) = 1e-8 (1 + |E|): closer levels form one degenerate group.
inline double degeneracy_eps(double e) { return 1e-8 * (1.0 + (e < 0 ? -e : e)); }

/// Plane waves exp(i (k+G).x) with max(|n1|,|n2|,|n3|) <= cutoff_n, lexicographic in (n1,n2,n3).
class PlaneWaveBasis {
public:
    explicit PlaneWaveBasis(int cutoff_n);

    int cutoff() const { return cutoff_; }
    int dimension() const { return static_cast<int>(vectors_.size()); }
    const std::vector<ReciprocalVector>& vectors() const { return vectors_; }
    /// Position of G in the basis, or -1 when outside.
    int index_of(const ReciprocalVector& g) const;

private:
    int cutoff_;
    std::vector<ReciprocalVector> vectors_;
};

/// Eigen-data of h(k). Band indices are 0-based (band 0 is E_1 in physics numbering).
struct FiberSolution {
    Vec3 k{};
    Eigen::VectorXd energies;                 ///< ascending
    Eigen::MatrixXcd eigvecs;                 ///< columns u_j over plane waves
    std::array<Eigen::MatrixXcd, 3> pi_hat;   ///< pi_hat[alpha](i,j) = <u_i, (p_alpha + k_alpha) u_j>

    int size() const { return static_cast<int>(energies.size()); }
};

/// H[G,G'] = 1/2 |k+G|^2 delta + V^(G-G'). Throws if the cutoff is below the potential support.
Eigen::MatrixXcd assemble(const FourierPotential& pot, const PlaneWaveBasis& basis, const Vec3& k);

/// Full diagonalization plus momentum matrix elements. Each eigenvector is phase-fixed so that
/// its largest-magnitude component is real positive. Throws std::runtime_error on solver failure.
FiberSolution solve(const FourierPotential& pot, const PlaneWaveBasis& basis, const Vec3& k);

/// Eigenvalues only (ascending).
Eigen::VectorXd solve_energies(const FourierPotential& pot, const PlaneWaveBasis& basis, const Vec3& k);

/// delta_ij + 2 sum_{m != N} Re(pi_mN(i) pi_Nm(j)) / (E_N - E_m), summed over the whole basis.
/// Directions i, j in {0,1,2}. Throws std::domain_error if band N is degenerate at sol.k.
double second_derivative_sum_rule(const FiberSolution& sol, int band, int i, int j);

/// All six entries of the band Hessian via the sum rule.
std::array<std::array<double, 3>, 3> band_hessian(const FiberSolution& sol, int band);

/// Band velocity dE_N/dk_alpha = pi_NN(alpha).
Vec3 band_gradient(const FiberSolution& sol, int band);

/// Re-gauges the eigenvectors u_j -> e^{i phase_j} u_j (and the momentum matrices accordingly).
/// Physical quantities built from closed index loops must not change.
FiberSolution apply_gauge(const FiberSolution& sol, const std::vector<double>& phases);

/// True if band N is separated from both neighbours by more than eps_deg.
bool band_isolated(const FiberSolution& sol, int band);

}  // namespace bloch
