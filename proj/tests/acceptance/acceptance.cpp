// End-to-end acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
//
//   bloch_acceptance --blochchi PATH --configs DIR [--cache DIR] [--only N]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "bloch/asym.hpp"
#include "bloch/cache.hpp"
#include "bloch/chi.hpp"
#include "bloch/fermi.hpp"
#include "bloch/potential.hpp"
#include "bloch/residue.hpp"
#include "bloch/surface.hpp"
#include "contour_oracle.hpp"
#include "frozen_values.hpp"
#include "matrix_oracle.hpp"

using namespace bloch;
using std::numbers::pi;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool passed = false;
    std::string detail;
};

struct Context {
    std::string blochchi;
    fs::path configs;
    fs::path cache;
};

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

double uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

Vec3 random_k(std::mt19937_64& rng) {
    return {pi * (2 * uniform(rng) - 1), pi * (2 * uniform(rng) - 1), pi * (2 * uniform(rng) - 1)};
}

/// Random k-points where the first `count` + 1 bands are separated by at least `gap`.
std::vector<Vec3> separated_kpoints(std::mt19937_64& rng, const FourierPotential& pot, const PlaneWaveBasis& basis,
                                    int points, int count, double gap) {
    std::vector<Vec3> out;
    while (static_cast<int>(out.size()) < points) {
        const Vec3 k = random_k(rng);
        const Eigen::VectorXd e = solve_energies(pot, basis, k);
        bool ok = true;
        for (int j = 0; j < count && j + 1 < e.size(); ++j) ok = ok && e[j + 1] - e[j] > gap;
        if (ok) out.push_back(k);
    }
    return out;
}

GridBands cached_bands(const Context& ctx, const FourierPotential& pot, int cutoff, int n, bool shifted,
                       int nbands = 0) {
    return load_or_compute(ctx.cache, pot, PlaneWaveBasis(cutoff), BZGrid(n, shifted), nbands);
}

// ---------------------------------------------------------------------------------------------

/// Band velocities and Hessians from momentum matrices vs finite differences of the energies.
Outcome sum_rules(const Context&) {
    const auto pot = named_potential("cosine3d", 2.0);
    const PlaneWaveBasis basis(3);
    constexpr int kBands = 4;
    std::mt19937_64 rng(101);
    const auto kpts = separated_kpoints(rng, pot, basis, 20, kBands, 5e-2);
    auto energies = [&](Vec3 k, int a, double da, int b = -1, double db = 0) {
        k[a] += da;
        if (b >= 0) k[b] += db;
        return solve_energies(pot, basis, k);
    };
    double worst_v = 0, worst_h = 0;
    for (const Vec3& k : kpts) {
        const auto sol = solve(pot, basis, k);
        const double hv = 1e-4;
        for (int a = 0; a < 3; ++a) {
            const Eigen::VectorXd ep = energies(k, a, hv), em = energies(k, a, -hv);
            for (int j = 0; j < kBands; ++j) {
                const double fd = (ep[j] - em[j]) / (2 * hv);
                worst_v = std::max(worst_v, std::abs(sol.pi_hat[a](j, j).real() - fd) / std::max(1.0, std::abs(fd)));
            }
        }
        // 4-point stencils at steps h and 2h, Richardson-combined to O(h^4)
        const double hh = 1e-3;
        const Eigen::VectorXd e0 = solve_energies(pot, basis, k);
        for (int a = 0; a < 3; ++a)
            for (int b = a; b < 3; ++b) {
                Eigen::VectorXd d[2];
                for (int s = 0; s < 2; ++s) {
                    const double h = hh * (s + 1);
                    if (a == b)
                        d[s] = (energies(k, a, h) - 2 * e0 + energies(k, a, -h)) / (h * h);
                    else
                        d[s] = (energies(k, a, h, b, h) - energies(k, a, h, b, -h) - energies(k, a, -h, b, h) +
                                energies(k, a, -h, b, -h)) /
                               (4 * h * h);
                }
                for (int j = 0; j < kBands; ++j) {
                    const double fd = d[0][j] + (d[0][j] - d[1][j]) / 3.0;
                    const double sr = second_derivative_sum_rule(sol, j, a, b);
                    worst_h = std::max(worst_h, std::abs(sr - fd) / std::max(1.0, std::abs(fd)));
                }
            }
    }
    return {worst_v <= 1e-6 && worst_h <= 1e-5,
            "velocity " + fmt("%.2e", worst_v) + " (tol 1e-6), Hessian " + fmt("%.2e", worst_h) + " (tol 1e-5)"};
}

/// Closed-form residues vs quadruple-precision contour quadrature on 50 random pole specs.
Outcome residue_vs_quadrature(const Context&) {
    std::mt19937_64 rng(202);
    double worst = 0;
    int unconverged = 0;
    for (int trial = 0; trial < 50; ++trial) {
        const int target = 1 + static_cast<int>(rng() % 5);
        std::vector<std::pair<double, int>> poles;
        int total = 0;
        while (total < target) {
            const double e = -1 + 4 * uniform(rng);
            bool far = true;
            for (auto& p : poles) far = far && std::abs(p.first - e) >= 0.2;
            const int m = 1 + static_cast<int>(rng() % 3);
            if (!far || total + m > target) continue;
            poles.emplace_back(e, m);
            total += m;
        }
        const double beta = 1 + 49 * uniform(rng), mu = -1 + 4 * uniform(rng);
        PoleSpec spec;
        for (auto& [e, m] : poles) spec.poles.push_back({e, m});
        const auto ref = oracle::scalar_contour_integral(beta, mu, poles);
        unconverged += !ref.converged;
        worst = std::max(worst, std::abs(contour_integral(ThermoState(beta, mu), spec).value - ref.value));
    }
    return {worst <= 1e-9 && unconverged == 0,
            "max |residue - quadrature| " + fmt("%.2e", worst) + " (tol 1e-9), unconverged " +
                std::to_string(unconverged)};
}

/// The order-4 derivative bucket cancels identically.
Outcome fourth_order_bucket(const Context&) {
    const auto pot = named_potential("cosine3d", 2.0);
    const PlaneWaveBasis basis(1);
    std::mt19937_64 rng(303);
    double worst = 0;
    for (int t = 0; t < 10; ++t) {
        const auto c = coeffs_via_residues(solve(pot, basis, random_k(rng)), basis.dimension());
        for (int j = 0; j < c.J; ++j) worst = std::max(worst, std::abs(c.c[j][4]));
    }
    return {worst <= 1e-12, "max |c_{j,4}| " + fmt("%.2e", worst) + " (tol 1e-12)"};
}

/// Closed-form second/third-order coefficients vs the residue-engine buckets.
Outcome dual_path(const Context&) {
    const auto pot = named_potential("cosine3d", 2.0);
    const PlaneWaveBasis basis(1);
    std::mt19937_64 rng(404);
    double worst = 0;
    for (const Vec3& k : separated_kpoints(rng, pot, basis, 10, 4, 1e-3)) {
        const auto sol = solve(pot, basis, k);
        const auto r = coeffs_via_residues(sol, basis.dimension());
        for (int j = 0; j < 4; ++j) {
            const auto e = explicit_coeffs(sol, j, basis.dimension());
            worst = std::max({worst, std::abs(r.c[j][2] - e.c2), std::abs(r.c[j][3] - e.c3)});
        }
    }
    return {worst <= 1e-8, "max |explicit - residue| " + fmt("%.2e", worst) + " (tol 1e-8)"};
}

/// Free-electron integrated density of states against the sphere volume.
Outcome free_ids(const Context& ctx) {
    const auto bands = cached_bands(ctx, FourierPotential{}, 3, 32, false, 64);
    double worst = 0, at = 0;
    for (int i = 0; i <= 90; ++i) {
        const double e = 1.0 + 0.1 * i;
        const double exact = std::pow(2 * e, 1.5) / (6 * pi * pi);
        const double err = std::abs(ids_tetra(bands, e) - exact) / exact;
        if (err > worst) worst = err, at = e;
    }
    return {worst <= 0.02, "max relative error " + fmt("%.3f%%", 100 * worst) + " at E=" + fmt("%.1f", at) +
                               " (tol 2%, tetrahedron IDS)"};
}

/// E_F - E_0 = s rho0^(2/3): free electrons and the effective-mass prediction for cosine3d(0.5).
Outcome fermi_energy_law(const Context& ctx) {
    const auto free = fermi_energy_expansion(cached_bands(ctx, FourierPotential{}, 0, 128, false),
                                             default_rho_ladder());
    const double s_free = std::pow(6 * pi * pi, 2.0 / 3.0) / 2;
    const double e_free = std::abs(free.s - s_free) / s_free;

    const auto pot = named_potential("cosine3d", 0.5);
    const auto mass = effective_mass(pot, PlaneWaveBasis(1));
    const auto fit = fermi_energy_expansion(cached_bands(ctx, pot, 1, 64, false, 4), default_rho_ladder());
    const double e_cos = std::abs(fit.s - fermi_coefficient(mass)) / fermi_coefficient(mass);
    return {e_free <= 0.02 && e_cos <= 0.03, "free " + fmt("%.3f%%", 100 * e_free) + " (tol 2%), cosine3d(0.5) " +
                                                 fmt("%.3f%%", 100 * e_cos) + " (tol 3%)"};
}

/// Semiconductor: mu(beta) -> gap midpoint, and mu(beta) is the fixed point of the gap map.
Outcome semiconductor_limit(const Context& ctx) {
    const auto bands = cached_bands(ctx, named_potential("separable_gap", 0.0), 1, 16, false);
    const auto cls = classify(bands, 1.0);
    if (!cls.is_sc()) return {false, "fixture did not classify as a semiconductor"};
    const double gap = cls.b_N - cls.a_N;
    double prev = 1e300, last = 0, residual = 0;
    bool monotone = true;
    std::string devs;
    for (double beta : {20.0, 40.0, 80.0}) {
        const double mu = solve_mu(bands, beta, 1.0);
        const double dev = std::abs(mu - cls.E_F) / gap;
        monotone = monotone && dev < prev;
        prev = last = dev;
        residual = std::max(residual, std::abs(sc_fixed_point_map(bands, cls, beta, mu) - mu));
        devs += (devs.empty() ? "" : ", ") + fmt("%.3f%%", 100 * dev);
    }
    return {monotone && last <= 0.05 && residual <= 1e-8,
            "|mu - E_F|/gap at beta 20,40,80: " + devs + (monotone ? " (monotone)" : " (NOT monotone)") +
                ", fixed-point residual " + fmt("%.1e", residual)};
}

/// F_1(0) = 0 at the band bottom.
Outcome band_bottom_F(const Context&) {
    double worst = 0;
    for (double v : {0.5, 1.0, 2.0})
        worst = std::max(worst, std::abs(coefficient_F(solve(named_potential("cosine3d", v), PlaneWaveBasis(2),
                                                             {0, 0, 0}),
                                                       0, 30)));
    return {worst <= 1e-8, "max |F_1(0)| " + fmt("%.2e", worst) + " (tol 1e-8, J=30)"};
}

/// Richardson-extrapolated chi_M / k_F for free electrons.
Outcome landau_peierls(const Context& ctx) {
    const auto report = landau_peierls_check(cached_bands(ctx, FourierPotential{}, 0, 128, false),
                                             default_rho_ladder());
    const double err = report.relative_error();
    return {err <= 0.05 && report.slope < 0,
            "slope " + fmt("%.5e", report.slope) + " vs " + fmt("%.5e", report.prediction) + ", error " +
                fmt("%.2f%%", 100 * err) + " (tol 5%)"};
}

/// Finite temperature approaches the zero-temperature metal and semiconductor values.
Outcome finite_to_zero_T(const Context& ctx) {
    std::string detail;
    bool ok = true;
    {
        const auto bands = cached_bands(ctx, named_potential("cosine3d", 0.5), 2, 24, false, 12);
        ChiOptions opt;
        opt.J = 10;
        const double chi0 = chi_zero_T_metal(bands, 0.02, opt).value;
        double prev = 1e300, rel = 0;
        bool monotone = true;
        detail += "metal:";
        for (double beta : {25.0, 50.0, 100.0}) {
            rel = std::abs(chi_finite_T(bands, beta, 0.02, opt).value - chi0) / std::abs(chi0);
            monotone = monotone && rel < prev;
            prev = rel;
            detail += " " + fmt("%.2f%%", 100 * rel);
        }
        detail += monotone ? " (monotone, tol 2% at beta=100)" : " (NOT monotone)";
        ok = ok && monotone && rel <= 0.02;
    }
    {
        const auto bands = cached_bands(ctx, named_potential("separable_gap", 0.0), 1, 16, false);
        ChiOptions opt;
        opt.J = 12;
        const double chi0 = chi_zero_T_SC(bands, 1.0, opt).value;
        const double rel = std::abs(chi_finite_T(bands, 200.0, 1.0, opt).value - chi0) / std::abs(chi0);
        detail += "; semiconductor beta=200: " + fmt("%.2e", rel) + " (tol 1e-2)";
        ok = ok && rel <= 0.01;
    }
    return {ok, detail};
}

/// Band-sum susceptibility vs the resolvent-trace contour oracle.
Outcome oracle_equivalence(const Context&) {
    const auto pot = named_potential("cosine3d", 2.0);
    const PlaneWaveBasis basis(1);
    const BZGrid grid(4);
    ChiOptions opt;
    opt.J = basis.dimension();
    opt.assembly = FiniteTAssembly::BandSum;
    const auto lib = chi_finite_T(GridBands::compute(pot, basis, grid), 10.0, 0.05, opt);
    const auto ref = oracle::matrix_contour_chi(pot, basis, grid, 10.0, lib.mu);
    const double rel = std::abs(lib.value - ref.value) / std::abs(ref.value);
    const double rel_frozen =
        std::abs(lib.value - frozen::kChiOracleCos2Cut1Grid4Beta10) / std::abs(frozen::kChiOracleCos2Cut1Grid4Beta10);
    return {ref.converged && rel <= 1e-6 && rel_frozen <= 1e-6,
            "chi " + fmt("%.12e", lib.value) + ", oracle " + fmt("%.12e", ref.value) + ", relative " +
                fmt("%.1e", rel) + " (tol 1e-6)"};
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// `verify` output is byte-identical across thread counts.
Outcome determinism(const Context& ctx) {
    const fs::path dir = fs::temp_directory_path() / ("bloch-acceptance-" + std::to_string(std::random_device{}()));
    fs::create_directories(dir);
    std::string detail;
    bool ok = true;
    std::string outputs[2];
    const int threads[2] = {1, 8};
    for (int i = 0; i < 2; ++i) {
        const fs::path out = dir / ("verify-t" + std::to_string(threads[i]) + ".json");
        const std::string cmd = "\"" + ctx.blochchi + "\" --config \"" + (ctx.configs / "verify_cosine.json").string() +
                                "\" --threads " + std::to_string(threads[i]) + " --out \"" + out.string() + "\"" +
                                (ctx.cache.empty() ? " --no-cache" : " --cache \"" + ctx.cache.string() + "\"") +
                                " verify > /dev/null";
        const int status = std::system(cmd.c_str());
        const int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
        if (code != 0) {
            ok = false;
            detail += "threads " + std::to_string(threads[i]) + " exit " + std::to_string(code) + "; ";
        }
        outputs[i] = read_file(out);
    }
    fs::remove_all(dir);
    const bool same = !outputs[0].empty() && outputs[0] == outputs[1];
    detail += same ? "threads 1 and 8 byte-identical (" + std::to_string(outputs[0].size()) + " bytes)"
                   : "outputs differ";
    return {ok && same, detail};
}

struct Criterion {
    int id;
    const char* name;
    std::function<Outcome(const Context&)> run;
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"End-to-end acceptance criteria for the orbital susceptibility library"};
    Context ctx;
    std::string cache;
    int only = 0;
    app.add_option("--blochchi", ctx.blochchi, "Path to the blochchi executable")->required();
    app.add_option("--configs", ctx.configs, "Directory with the example configurations")->required();
    app.add_option("--cache", cache, "Band-energy cache directory (empty disables caching)");
    app.add_option("--only", only, "Run a single criterion");
    CLI11_PARSE(app, argc, argv);
    ctx.cache = cache;
    if (!ctx.cache.empty()) fs::create_directories(ctx.cache);

    const std::vector<Criterion> criteria = {
        {1, "sum rules vs finite differences", sum_rules},
        {2, "residues vs contour quadrature", residue_vs_quadrature},
        {3, "fourth-order bucket vanishes", fourth_order_bucket},
        {4, "explicit vs residue coefficients", dual_path},
        {5, "free-electron IDS", free_ids},
        {6, "Fermi-energy law", fermi_energy_law},
        {7, "semiconductor limit", semiconductor_limit},
        {8, "F_1(0) = 0", band_bottom_F},
        {9, "Landau-Peierls slope", landau_peierls},
        {10, "finite-T to zero-T", finite_to_zero_T},
        {11, "resolvent-trace oracle", oracle_equivalence},
        {12, "thread determinism", determinism},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        if (only && c.id != only) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run(ctx);
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        failed += !o.passed;
        std::printf("criterion %2d %s  %s: %s [%.1f s]\n", c.id, o.passed ? "PASS" : "FAIL", c.name, o.detail.c_str(),
                    secs);
        std::fflush(stdout);
    }
    std::printf("%s\n", failed ? "ACCEPTANCE FAILED" : "ALL CRITERIA PASSED");
    return failed ? 1 : 0;
}
