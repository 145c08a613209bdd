#include "verify.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "bloch/parallel.hpp"
#include "bloch/residue.hpp"
#include "contour_oracle.hpp"

namespace blochchi {

namespace {

/// Uniform double in [0, 1) from the top 53 bits (identical on every platform).
double uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

/// Random k-points where the first nb + 1 bands are separated by at least `gap`
/// (finite-difference stencils must not cross a degeneracy).
std::vector<bloch::Vec3> random_kpoints(std::mt19937_64& rng, const bloch::FourierPotential& pot,
                                        const bloch::PlaneWaveBasis& basis, int count, int nb, double gap) {
    std::vector<bloch::Vec3> out;
    const int limit = std::min(nb + 1, basis.dimension());
    while (static_cast<int>(out.size()) < count) {
        bloch::Vec3 k;
        for (double& x : k) x = std::numbers::pi * (2.0 * uniform(rng) - 1.0);
        const Eigen::VectorXd e = bloch::solve_energies(pot, basis, k);
        bool ok = true;
        for (int j = 0; j + 1 < limit; ++j) ok = ok && e[j + 1] - e[j] > gap;
        if (ok) out.push_back(k);
    }
    return out;
}

double energy_at(const bloch::FourierPotential& pot, const bloch::PlaneWaveBasis& basis, bloch::Vec3 k, int band) {
    return bloch::solve_energies(pot, basis, k)[band];
}

bloch::Vec3 shifted(bloch::Vec3 k, int a, double da, int b = -1, double db = 0.0) {
    k[a] += da;
    if (b >= 0) k[b] += db;
    return k;
}

/// Central difference of E_band along axis a, step h.
double fd_first(const bloch::FourierPotential& pot, const bloch::PlaneWaveBasis& basis, const bloch::Vec3& k, int band,
                int a, double h) {
    return (energy_at(pot, basis, shifted(k, a, h), band) - energy_at(pot, basis, shifted(k, a, -h), band)) / (2 * h);
}

/// Second derivative d^2 E / dk_a dk_b by the 4-point stencil, Richardson-extrapolated (O(h^4)).
double fd_second(const bloch::FourierPotential& pot, const bloch::PlaneWaveBasis& basis, const bloch::Vec3& k, int band,
                 int a, int b, double h) {
    auto stencil = [&](double s) {
        if (a == b)
            return (energy_at(pot, basis, shifted(k, a, s), band) - 2 * energy_at(pot, basis, k, band) +
                    energy_at(pot, basis, shifted(k, a, -s), band)) /
                   (s * s);
        return (energy_at(pot, basis, shifted(k, a, s, b, s), band) - energy_at(pot, basis, shifted(k, a, s, b, -s), band) -
                energy_at(pot, basis, shifted(k, a, -s, b, s), band) +
                energy_at(pot, basis, shifted(k, a, -s, b, -s), band)) /
               (4 * s * s);
    };
    const double d1 = stencil(h), d2 = stencil(2 * h);
    return d1 + (d1 - d2) / 3.0;
}

CheckResult finish(std::string name, const std::vector<double>& errors, double tol) {
    CheckResult r;
    r.name = std::move(name);
    r.samples = static_cast<int>(errors.size());
    r.max_error = errors.empty() ? 0.0 : *std::max_element(errors.begin(), errors.end());
    r.tolerance = tol;
    r.passed = r.max_error <= tol;
    return r;
}

}  // namespace

std::vector<CheckResult> run_verify(const RunConfig& cfg, int threads) {
    const bloch::FourierPotential pot = cfg.potential();
    const bloch::PlaneWaveBasis basis = cfg.basis();
    const int M = basis.dimension();
    const int nb = std::min(cfg.verify_bands, M - 1);
    const int J = std::min(30, M);
    std::mt19937_64 rng(cfg.seed);
    const auto kpts = random_kpoints(rng, pot, basis, cfg.verify_points, nb, 5e-2);
    const std::size_t nk = kpts.size();
    std::vector<CheckResult> out;

    // Band velocities and Hessians against finite differences (relative, floored at 1).
    {
        std::vector<double> vel(nk), hes(nk);
        bloch::parallel_for(nk, threads, [&](std::size_t i) {
            const bloch::FiberSolution sol = bloch::solve(pot, basis, kpts[i]);
            double ev = 0, eh = 0;
            for (int j = 0; j < nb; ++j) {
                const bloch::Vec3 g = bloch::band_gradient(sol, j);
                const auto H = bloch::band_hessian(sol, j);
                for (int a = 0; a < 3; ++a) {
                    const double fd = fd_first(pot, basis, kpts[i], j, a, 1e-4);
                    ev = std::max(ev, std::abs(g[a] - fd) / std::max(1.0, std::abs(fd)));
                    for (int b = a; b < 3; ++b) {
                        const double fd2 = fd_second(pot, basis, kpts[i], j, a, b, 1e-3);
                        eh = std::max(eh, std::abs(H[a][b] - fd2) / std::max(1.0, std::abs(fd2)));
                    }
                }
            }
            vel[i] = ev;
            hes[i] = eh;
        });
        out.push_back(finish("band_velocity_sum_rule", vel, cfg.tol.sum_rule));
        out.push_back(finish("hessian_sum_rule", hes, cfg.tol.hessian));
    }

    // Residue engine against quadruple-precision contour quadrature.
    {
        const int nspec = 2 * cfg.verify_points;
        struct Draw {
            double beta, mu;
            std::vector<std::pair<double, int>> poles;
        };
        std::vector<Draw> draws;
        for (int s = 0; s < nspec; ++s) {
            Draw d;
            d.beta = 1.0 + 49.0 * uniform(rng);
            d.mu = -1.0 + 4.0 * uniform(rng);
            int left = 1 + static_cast<int>(rng() % 5);
            while (left > 0) {
                const int m = 1 + static_cast<int>(rng() % left);
                double e;
                bool ok;
                do {
                    e = -1.0 + 4.0 * uniform(rng);
                    ok = true;
                    for (const auto& p : d.poles) ok = ok && std::abs(p.first - e) >= 0.3;
                } while (!ok);
                d.poles.push_back({e, m});
                left -= m;
            }
            draws.push_back(d);
        }
        std::vector<double> err(draws.size());
        bloch::parallel_for(draws.size(), threads, [&](std::size_t i) {
            bloch::PoleSpec spec;
            for (const auto& [e, m] : draws[i].poles) spec.poles.push_back({e, m});
            const double lib = bloch::contour_integral(bloch::ThermoState(draws[i].beta, draws[i].mu), spec).value;
            const auto ref = oracle::scalar_contour_integral(draws[i].beta, draws[i].mu, draws[i].poles);
            err[i] = ref.converged ? std::abs(lib - ref.value) : std::numeric_limits<double>::infinity();
        });
        out.push_back(finish("residue_vs_contour_quadrature", err, cfg.tol.residue));
    }

    // Coefficients: explicit vs residue path, vanishing l = 4 bucket, gauge invariance.
    {
        std::vector<double> dual(nk), l4(nk), gauge(nk);
        std::vector<std::vector<double>> phases(nk, std::vector<double>(M));
        for (auto& p : phases)
            for (double& x : p) x = 2.0 * std::numbers::pi * uniform(rng);
        bloch::parallel_for(nk, threads, [&](std::size_t i) {
            const bloch::FiberSolution sol = bloch::solve(pot, basis, kpts[i]);
            const bloch::ChiCoefficients c = bloch::coeffs_via_residues(sol, J);
            double d = 0, v = 0, g = 0;
            for (int j = 0; j < nb; ++j) {
                const bloch::ExplicitCoefficients e = bloch::explicit_coeffs(sol, j, c.J);
                d = std::max({d, std::abs(e.c2 - c.c[j][2]), std::abs(e.c3 - c.c[j][3])});
            }
            for (int j = 0; j < c.J; ++j) v = std::max(v, std::abs(c.c[j][4]));
            const bloch::ChiCoefficients cg = bloch::coeffs_via_residues(bloch::apply_gauge(sol, phases[i]), J);
            for (int j = 0; j < c.J; ++j)
                for (int l = 0; l <= bloch::kChiMaxOrder; ++l)
                    g = std::max(g, std::abs(cg.c[j][l] - c.c[j][l]) / std::max(1.0, std::abs(c.c[j][l])));
            dual[i] = d;
            l4[i] = v;
            gauge[i] = g;
        });
        out.push_back(finish("explicit_vs_residue_coefficients", dual, cfg.tol.dual_path));
        out.push_back(finish("fourth_derivative_bucket_vanishes", l4, cfg.tol.vanishing));
        out.push_back(finish("gauge_invariance", gauge, cfg.tol.gauge));
    }

    // F_1 vanishes at the band bottom k = 0.
    {
        const bloch::FiberSolution sol = bloch::solve(pot, basis, {0.0, 0.0, 0.0});
        out.push_back(finish("band_bottom_F1", {std::abs(bloch::coefficient_F(sol, 0, J))}, cfg.tol.band_bottom));
    }
    return out;
}

}  // namespace blochchi
