#include "bloch/fiber.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace bloch {

PlaneWaveBasis::PlaneWaveBasis(int cutoff_n) : cutoff_(cutoff_n) {
    if (cutoff_n < 0) throw std::invalid_argument("basis cutoff must be >= 0");
    for (int a = -cutoff_n; a <= cutoff_n; ++a)
        for (int b = -cutoff_n; b <= cutoff_n; ++b)
            for (int c = -cutoff_n; c <= cutoff_n; ++c) vectors_.push_back({a, b, c});
}

int PlaneWaveBasis::index_of(const ReciprocalVector& g) const {
    if (g.norm_inf() > cutoff_) return -1;
    const int L = 2 * cutoff_ + 1;
    return ((g.n1 + cutoff_) * L + (g.n2 + cutoff_)) * L + (g.n3 + cutoff_);
}

namespace {

double kinetic(const ReciprocalVector& g, const Vec3& k);

/// Real Fourier coefficients of a Hermitian potential make h(k) real symmetric, which
/// allows the (several times faster) real eigensolver.
bool real_coefficients(const FourierPotential& pot) {
    for (const auto& [q, v] : pot.coefficients())
        if (v.imag() != 0.0) return false;
    return true;
}

Eigen::MatrixXd assemble_real(const FourierPotential& pot, const PlaneWaveBasis& basis, const Vec3& k) {
    const int M = basis.dimension();
    const auto& vs = basis.vectors();
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(M, M);
    for (int i = 0; i < M; ++i) h(i, i) = kinetic(vs[i], k);
    for (int i = 0; i < M; ++i)
        for (const auto& [q, v] : pot.coefficients()) {
            const int j = basis.index_of(vs[i] - q);
            if (j >= 0) h(i, j) += v.real();
        }
    return h;
}

double kinetic(const ReciprocalVector& g, const Vec3& k) {
    double s = 0.0;
    for (int a = 0; a < 3; ++a) {
        const double q = k[a] + g.cart(a);
        s += q * q;
    }
    return 0.5 * s;
}

void check_cutoff(const FourierPotential& pot, const PlaneWaveBasis& basis) {
    if (basis.cutoff() < pot.support_radius())
        throw std::invalid_argument("basis cutoff " + std::to_string(basis.cutoff()) +
                                    " is below the potential support radius " +
                                    std::to_string(pot.support_radius()));
}

/// Constant potential: plane waves are exact eigenvectors; sort them by energy (stable).
FiberSolution solve_diagonal(const FourierPotential& pot, const PlaneWaveBasis& basis, const Vec3& k) {
    const int M = basis.dimension();
    const double v0 = pot.coefficient({0, 0, 0}).real();
    std::vector<double> e(M);
    for (int i = 0; i < M; ++i) e[i] = kinetic(basis.vectors()[i], k) + v0;
    std::vector<int> order(M);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return e[a] < e[b]; });

    FiberSolution sol;
    sol.k = k;
    sol.energies.resize(M);
    sol.eigvecs = Eigen::MatrixXcd::Zero(M, M);
    for (int a = 0; a < 3; ++a) sol.pi_hat[a] = Eigen::MatrixXcd::Zero(M, M);
    for (int j = 0; j < M; ++j) {
        const int g = order[j];
        sol.energies[j] = e[g];
        sol.eigvecs(g, j) = 1.0;
        for (int a = 0; a < 3; ++a) sol.pi_hat[a](j, j) = k[a] + basis.vectors()[g].cart(a);
    }
    return sol;
}

}  // namespace

Eigen::MatrixXcd assemble(const FourierPotential& pot, const PlaneWaveBasis& basis, const Vec3& k) {
    check_cutoff(pot, basis);
    const int M = basis.dimension();
    const auto& vs = basis.vectors();
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(M, M);
    for (int i = 0; i < M; ++i) h(i, i) = kinetic(vs[i], k);
    // Sparse potential: for each basis vector G and stored coefficient V^(Q), couple G to G - Q.
    for (int i = 0; i < M; ++i)
        for (const auto& [q, v] : pot.coefficients()) {
            const int j = basis.index_of(vs[i] - q);
            if (j >= 0) h(i, j) += v;  // H[G, G'] with G - G' = Q
        }
    return h;
}

FiberSolution solve(const FourierPotential& pot, const PlaneWaveBasis& basis, const Vec3& k) {
    check_cutoff(pot, basis);
    if (pot.is_constant()) return solve_diagonal(pot, basis, k);

    const int M = basis.dimension();
    FiberSolution sol;
    sol.k = k;
    if (real_coefficients(pot)) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(assemble_real(pot, basis, k));
        if (es.info() != Eigen::Success) throw std::runtime_error("Hermitian eigensolver did not converge");
        sol.energies = es.eigenvalues();
        sol.eigvecs = es.eigenvectors().cast<cplx>();
    } else {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(assemble(pot, basis, k));
        if (es.info() != Eigen::Success) throw std::runtime_error("Hermitian eigensolver did not converge");
        sol.energies = es.eigenvalues();
        sol.eigvecs = es.eigenvectors();
    }
    for (int j = 0; j < M; ++j) {
        int best = 0;
        double bm = -1.0;
        for (int i = 0; i < M; ++i) {
            const double m = std::abs(sol.eigvecs(i, j));
            if (m > bm) {
                bm = m;
                best = i;
            }
        }
        const cplx c = sol.eigvecs(best, j);
        sol.eigvecs.col(j) *= std::conj(c) / std::abs(c);
        sol.eigvecs(best, j) = cplx(std::abs(c), 0.0);
    }
    for (int a = 0; a < 3; ++a) {
        Eigen::VectorXd d(M);
        for (int i = 0; i < M; ++i) d[i] = k[a] + basis.vectors()[i].cart(a);
        const Eigen::MatrixXcd w = d.asDiagonal() * sol.eigvecs;
        sol.pi_hat[a].noalias() = sol.eigvecs.adjoint() * w;
    }
    return sol;
}

Eigen::VectorXd solve_energies(const FourierPotential& pot, const PlaneWaveBasis& basis, const Vec3& k) {
    check_cutoff(pot, basis);
    if (pot.is_constant()) {
        const int M = basis.dimension();
        const double v0 = pot.coefficient({0, 0, 0}).real();
        std::vector<double> e(M);
        for (int i = 0; i < M; ++i) e[i] = kinetic(basis.vectors()[i], k) + v0;
        std::sort(e.begin(), e.end());
        return Eigen::Map<Eigen::VectorXd>(e.data(), M);
    }
    if (real_coefficients(pot)) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(assemble_real(pot, basis, k), Eigen::EigenvaluesOnly);
        if (es.info() != Eigen::Success) throw std::runtime_error("Hermitian eigensolver did not converge");
        return es.eigenvalues();
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(assemble(pot, basis, k), Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw std::runtime_error("Hermitian eigensolver did not converge");
    return es.eigenvalues();
}

FiberSolution apply_gauge(const FiberSolution& sol, const std::vector<double>& phases) {
    if (static_cast<int>(phases.size()) != sol.size()) throw std::invalid_argument("one phase per band required");
    Eigen::VectorXcd d(sol.size());
    for (int j = 0; j < sol.size(); ++j) d[j] = std::polar(1.0, phases[j]);
    FiberSolution out = sol;
    out.eigvecs = sol.eigvecs * d.asDiagonal();
    for (int a = 0; a < 3; ++a) out.pi_hat[a] = d.conjugate().asDiagonal() * sol.pi_hat[a] * d.asDiagonal();
    return out;
}

bool band_isolated(const FiberSolution& sol, int band) {
    const double e = sol.energies[band];
    const double eps = degeneracy_eps(e);
    if (band > 0 && e - sol.energies[band - 1] <= eps) return false;
    if (band + 1 < sol.size() && sol.energies[band + 1] - e <= eps) return false;
    return true;
}

double second_derivative_sum_rule(const FiberSolution& sol, int band, int i, int j) {
    if (!band_isolated(sol, band))
        throw std::domain_error("band " + std::to_string(band) + " is degenerate at this k");
    const double en = sol.energies[band];
    double s = 0.0;
    for (int m = 0; m < sol.size(); ++m) {
        if (m == band) continue;
        s += (sol.pi_hat[i](m, band) * sol.pi_hat[j](band, m)).real() / (en - sol.energies[m]);
    }
    return (i == j ? 1.0 : 0.0) + 2.0 * s;
}

std::array<std::array<double, 3>, 3> band_hessian(const FiberSolution& sol, int band) {
    std::array<std::array<double, 3>, 3> h{};
    for (int i = 0; i < 3; ++i)
        for (int j = i; j < 3; ++j) h[i][j] = h[j][i] = second_derivative_sum_rule(sol, band, i, j);
    return h;
}

Vec3 band_gradient(const FiberSolution& sol, int band) {
    return {sol.pi_hat[0](band, band).real(), sol.pi_hat[1](band, band).real(),
            sol.pi_hat[2](band, band).real()};
}

}  // namespace bloch
