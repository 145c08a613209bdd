#include "bloch/bz.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "bloch/parallel.hpp"
#include "bloch/simd.hpp"
#include "bloch/summation.hpp"

namespace bloch {

BZGrid::BZGrid(int n_per_axis, bool shifted) : n_(n_per_axis), shifted_(shifted) {
    if (n_per_axis < 1) throw std::invalid_argument("grid size must be >= 1");
}

double BZGrid::coord(int i) const {
    const double h = 2.0 * std::numbers::pi / n_;
    if (shifted_) return -std::numbers::pi + h * (i + 0.5);
    // Symmetric about 0, contains k = 0, and stays inside (-pi, pi].
    return h * (i - (n_ - 1) / 2);
}

std::size_t BZGrid::index(int i1, int i2, int i3) const {
    auto wrap = [this](int i) { return static_cast<std::size_t>(((i % n_) + n_) % n_); };
    return (wrap(i1) * n_ + wrap(i2)) * n_ + wrap(i3);
}

Vec3 BZGrid::point(std::size_t flat) const {
    const int i3 = static_cast<int>(flat % n_);
    const int i2 = static_cast<int>((flat / n_) % n_);
    const int i1 = static_cast<int>(flat / n_ / n_);
    return {coord(i1), coord(i2), coord(i3)};
}

ThermoState::ThermoState(double beta_, double mu_) : beta(beta_), mu(mu_) {
    if (!(beta_ > 0.0) || !std::isfinite(beta_)) throw std::invalid_argument("beta must be finite and > 0");
    if (!std::isfinite(mu_)) throw std::invalid_argument("mu must be finite");
}

double ThermoState::z() const { return std::exp(beta * mu); }

namespace {

/// With t = tanh(y/2): d^n/dy^n tanh(y/2) = (1 - t^2) U_n(t), U_1 = 1/2,
/// U_{n+1} = -t U_n + (1 - t^2) U_n' / 2. Coefficients in powers of t.
const std::array<std::vector<double>, kMaxFermiDerivative>& tanh_derivative_polys() {
    static const auto table = [] {
        std::array<std::vector<double>, kMaxFermiDerivative> u;
        u[1] = {0.5};
        for (int n = 1; n + 1 < kMaxFermiDerivative; ++n) {
            const auto& a = u[n];
            std::vector<double> r(a.size() + 1, 0.0);
            for (std::size_t i = 0; i < a.size(); ++i) r[i + 1] -= a[i];  // -t U
            for (std::size_t i = 1; i < a.size(); ++i) {                   // (1 - t^2) U' / 2
                const double d = 0.5 * i * a[i];
                r[i - 1] += d;
                r[i + 1] -= d;
            }
            u[n + 1] = r;
        }
        return u;
    }();
    return table;
}

/// p = 1/(e^y + 1), q = 1 - p without cancellation.
void logistic_pair(double y, double& p, double& q) {
    const double t = std::exp(-std::abs(y));
    const double inv = 1.0 / (1.0 + t);
    if (y >= 0) {
        p = t * inv;
        q = inv;
    } else {
        p = inv;
        q = t * inv;
    }
}

}  // namespace

double f_log(const ThermoState& s, double xi, int l) {
    if (l < 0 || l > kMaxFermiDerivative)
        throw std::out_of_range("derivative order " + std::to_string(l) + " of the Fermi kernel is not implemented");
    const double y = s.beta * (xi - s.mu);
    if (l == 0) return y < 0 ? -y + std::log1p(std::exp(y)) : std::log1p(std::exp(-y));
    double p, q;
    logistic_pair(y, p, q);
    if (l == 1) return -s.beta * p;
    // f^(l) = -beta^l d^{l-1}p/dy^{l-1}, p = (1 - tanh(y/2))/2, and 1 - t^2 = 4pq.
    const auto& poly = tanh_derivative_polys()[l - 1];
    const double t = q - p;
    double u = 0.0;
    for (std::size_t i = poly.size(); i-- > 0;) u = u * t + poly[i];
    return std::pow(s.beta, l) * 2.0 * p * q * u;
}

double fermi_dirac(const ThermoState& s, double xi) {
    double p, q;
    logistic_pair(s.beta * (xi - s.mu), p, q);
    return p;
}

double fermi_dirac_derivative(const ThermoState& s, double xi) {
    double p, q;
    logistic_pair(s.beta * (xi - s.mu), p, q);
    return -s.beta * p * q;
}

GridBands::GridBands(FourierPotential pot, PlaneWaveBasis basis, BZGrid grid, int nbands, std::vector<double> energies)
    : pot_(std::move(pot)), basis_(std::move(basis)), grid_(grid), nbands_(nbands), e_(std::move(energies)) {
    if (nbands_ < 1 || nbands_ > basis_.dimension()) throw std::invalid_argument("band count out of range");
    if (e_.size() != grid_.size() * static_cast<std::size_t>(nbands_))
        throw std::invalid_argument("energy table size does not match grid and band count");
    extrema();
}

GridBands GridBands::compute(const FourierPotential& pot, const PlaneWaveBasis& basis, const BZGrid& grid,
                             int nbands, int threads) {
    const int nb = nbands <= 0 ? basis.dimension() : std::min(nbands, basis.dimension());
    std::vector<double> e(grid.size() * nb);
    parallel_for(grid.size(), threads, [&](std::size_t k) {
        const Eigen::VectorXd ev = solve_energies(pot, basis, grid.point(k));
        std::copy(ev.data(), ev.data() + nb, e.begin() + k * nb);
    });
    return GridBands(pot, basis, grid, nb, std::move(e));
}

void GridBands::extrema() {
    bmin_.assign(nbands_, std::numeric_limits<double>::infinity());
    bmax_.assign(nbands_, -std::numeric_limits<double>::infinity());
    for (std::size_t k = 0; k < nk(); ++k)
        for (int j = 0; j < nbands_; ++j) {
            bmin_[j] = std::min(bmin_[j], energy(k, j));
            bmax_[j] = std::max(bmax_[j], energy(k, j));
        }
}

FiberSolution GridBands::solve_full(std::size_t k) const { return solve(pot_, basis_, grid_.point(k)); }

double ids(const GridBands& bands, double e) {
    std::uint64_t count = 0;
    for (std::size_t k = 0; k < bands.nk(); ++k) count += simd::count_le(bands.row(k), bands.nbands(), e);
    return static_cast<double>(count) / static_cast<double>(bands.nk());
}

double ids(const FourierPotential& pot, const PlaneWaveBasis& basis, const BZGrid& grid, double e) {
    return ids(GridBands::compute(pot, basis, grid), e);
}

double density(const GridBands& bands, const ThermoState& s, int threads) {
    const int nb = bands.nbands();
    std::vector<double> per_k(bands.nk());
    parallel_for(bands.nk(), threads, [&](std::size_t k) {
        std::vector<double> p(nb), q(nb);
        simd::fermi_occupations(bands.row(k), nb, s.beta, s.mu, p.data(), q.data());
        per_k[k] = pairwise_sum(p);
    });
    return pairwise_sum(per_k) / static_cast<double>(bands.nk());
}

double density(const FourierPotential& pot, const PlaneWaveBasis& basis, const BZGrid& grid, const ThermoState& s) {
    return density(GridBands::compute(pot, basis, grid), s);
}

}  // namespace bloch
