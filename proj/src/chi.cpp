#include "bloch/chi.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "bloch/parallel.hpp"
#include "bloch/residue.hpp"
#include "bloch/summation.hpp"
#include "bloch/surface.hpp"

namespace bloch {

cplx coeff_C4(const FiberSolution& sol, int j1, int j2, int j3, int j4) {
    const auto& p1 = sol.pi_hat[0];
    const auto& p2 = sol.pi_hat[1];
    return (p1(j1, j2) * p2(j2, j3) - p2(j1, j2) * p1(j2, j3)) * (p2(j3, j4) * p1(j4, j1) - p1(j3, j4) * p2(j4, j1));
}

double coeff_C2(const FiberSolution& sol, int j1, int j2) {
    return std::norm(sol.pi_hat[0](j1, j2)) + std::norm(sol.pi_hat[1](j1, j2));
}

namespace {

/// Smallest cutoff >= j that does not split a cluster of degenerate levels.
int cluster_boundary(const FiberSolution& sol, int j) {
    while (j < sol.size() && sol.energies[j] - sol.energies[j - 1] <= degeneracy_eps(sol.energies[j])) ++j;
    return j;
}

/// Accumulates residue buckets of weighted pole terms into per-band coefficients.
class BucketAccumulator {
public:
    BucketAccumulator(const FiberSolution& sol, int J, int J_half, const ThermoState* state)
        : J_(J), Jh_(J_half), state_(state) {
        cluster_.resize(J);
        for (int j = 0; j < J; ++j) {
            if (j > 0 && sol.energies[j] - sol.energies[j - 1] <= degeneracy_eps(sol.energies[j]))
                cluster_[j] = cluster_[j - 1];
            else {
                cluster_[j] = static_cast<int>(energy_.size());
                energy_.push_back(0.0);
                size_.push_back(0);
            }
            energy_[cluster_[j]] += sol.energies[j];
            ++size_[cluster_[j]];
        }
        for (std::size_t c = 0; c < energy_.size(); ++c) energy_[c] /= size_[c];
        if (state_) {
            fd_.resize(energy_.size());
            for (std::size_t c = 0; c < energy_.size(); ++c)
                for (int l = 0; l <= kChiMaxOrder; ++l) fd_[c][l] = f_log(*state_, energy_[c], l);
        }
    }

    double band_energy(int j) const { return energy_[cluster_[j]]; }

    /// Adds S * I[f prod (E_band - xi)^-mult] to `full` (and to `half` when every band < J_half).
    void add(double S, const int* bands, const int* mult, int count, std::vector<OrderCoefficients>& full,
             std::vector<OrderCoefficients>& half, double& direct, double& direct_half) const {
        Pole poles[kMaxTotalMultiplicity];
        int pole_cluster[kMaxTotalMultiplicity];
        int owner[kMaxTotalMultiplicity];  // pole index of each entry
        int np = 0;
        bool in_half = true;
        for (int i = 0; i < count; ++i) {
            const int c = cluster_[bands[i]];
            in_half = in_half && bands[i] < Jh_;
            int p = 0;
            while (p < np && pole_cluster[p] != c) ++p;
            if (p == np) {
                pole_cluster[np] = c;
                poles[np++] = {energy_[c], 0};
            }
            poles[p].multiplicity += mult[i];
            owner[i] = p;
        }
        DerivativeWeights w[kMaxTotalMultiplicity];
        residue_weights(poles, np, w);
        for (int i = 0; i < count; ++i) {
            const int p = owner[i];
            // A merged pole's bucket is shared by its bands in proportion to their multiplicity.
            const double share = S * mult[i] / poles[p].multiplicity;
            for (int l = 0; l < poles[p].multiplicity && l <= kChiMaxOrder; ++l) {
                full[bands[i]][l] += share * w[p][l];
                if (in_half) half[bands[i]][l] += share * w[p][l];
            }
        }
        if (state_) {
            double v = 0.0;
            for (int p = 0; p < np; ++p)
                for (int l = 0; l < poles[p].multiplicity; ++l) v += w[p][l] * fd_[pole_cluster[p]][l];
            direct += S * v;
            if (in_half) direct_half += S * v;
        }
    }

private:
    int J_, Jh_;
    const ThermoState* state_;
    std::vector<int> cluster_;
    std::vector<double> energy_;
    std::vector<int> size_;
    std::vector<OrderCoefficients> fd_;
};

}  // namespace

ChiCoefficients coeffs_via_residues(const FiberSolution& sol, int J, const ThermoState* state) {
    const int M = sol.size();
    if (J < 1 || J > M) throw std::invalid_argument("band cutoff J = " + std::to_string(J) + " outside [1, " +
                                                    std::to_string(M) + "]");
    ChiCoefficients out;
    J = cluster_boundary(sol, J);
    const int Jh = std::min(J, cluster_boundary(sol, std::max(1, (J + 1) / 2)));
    out.J = J;
    out.J_half = Jh;

    const BucketAccumulator acc(sol, J, Jh, state);
    out.energies.resize(J);
    for (int j = 0; j < J; ++j) out.energies[j] = acc.band_energy(j);
    const OrderCoefficients zero{};
    out.a.assign(J, zero);
    out.b.assign(J, zero);
    out.a_half.assign(J, zero);
    std::vector<OrderCoefficients> b_half(J, zero);

    const auto& P1 = sol.pi_hat[0];
    const auto& P2 = sol.pi_hat[1];
    double pmax = 0.0;
    for (int x = 0; x < J; ++x)
        for (int y = 0; y < J; ++y) pmax = std::max({pmax, std::abs(P1(x, y)), std::abs(P2(x, y))});
    const double prune4 = 1e-16 * std::pow(pmax, 4), prune2 = 1e-16 * pmax * pmax;

    // A(x,y,z) = P1_xy P2_yz - P2_xy P1_yz, so C4(1,2,3,4) = -A(1,2,3) A(3,4,1).
    std::vector<cplx> A(static_cast<std::size_t>(J) * J * J);
    auto at = [J](int x, int y, int z) { return (static_cast<std::size_t>(x) * J + y) * J + z; };
    for (int x = 0; x < J; ++x)
        for (int y = 0; y < J; ++y)
            for (int z = 0; z < J; ++z) A[at(x, y, z)] = P1(x, y) * P2(y, z) - P2(x, y) * P1(y, z);

    double direct = 0.0, direct_half = 0.0;
    // Quadruple sum: the integrand f / ((E1-xi)^2 (E2-xi)(E3-xi)(E4-xi)) is symmetric in (2,3,4),
    // so the C4 weights of all orderings of one multiset are combined (their sum is real).
    static constexpr int kPerm[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
    for (int j1 = 0; j1 < J; ++j1)
        for (int x = 0; x < J; ++x)
            for (int y = x; y < J; ++y)
                for (int z = y; z < J; ++z) {
                    const int idx[3] = {x, y, z};
                    cplx S(0.0, 0.0);
                    int seen[6][3];
                    int nseen = 0;
                    for (const auto& pm : kPerm) {
                        const int p = idx[pm[0]], q = idx[pm[1]], r = idx[pm[2]];
                        bool dup = false;
                        for (int s = 0; s < nseen && !dup; ++s) dup = seen[s][0] == p && seen[s][1] == q && seen[s][2] == r;
                        if (dup) continue;
                        seen[nseen][0] = p;
                        seen[nseen][1] = q;
                        seen[nseen][2] = r;
                        ++nseen;
                        S -= A[at(j1, p, q)] * A[at(q, r, j1)];
                    }
                    if (std::abs(S) <= prune4) continue;
                    out.max_imag = std::max(out.max_imag, std::abs(S.imag()));
                    const int bands[4] = {j1, x, y, z}, mult[4] = {2, 1, 1, 1};
                    acc.add(S.real(), bands, mult, 4, out.a, out.a_half, direct, direct_half);
                }
    // Single and double sums: -I[f/(E1-xi)^3] + C2_12 I[f/((E1-xi)^3 (E2-xi))].
    for (int j1 = 0; j1 < J; ++j1) {
        const int b1[1] = {j1}, m1[1] = {3};
        acc.add(-1.0, b1, m1, 1, out.b, b_half, direct, direct_half);
        for (int j2 = 0; j2 < J; ++j2) {
            const double c2 = coeff_C2(sol, j1, j2);
            if (c2 <= prune2) continue;
            const int b2[2] = {j1, j2}, m2[2] = {3, 1};
            acc.add(c2, b2, m2, 2, out.b, b_half, direct, direct_half);
        }
    }
    out.c.assign(J, zero);
    out.c_half.assign(J, zero);
    for (int j = 0; j < J; ++j)
        for (int l = 0; l <= kChiMaxOrder; ++l) {
            out.c[j][l] = out.a[j][l] + out.b[j][l];
            out.c_half[j][l] = out.a_half[j][l] + b_half[j][l];
            if (j < Jh) out.tail_bound = std::max(out.tail_bound, std::abs(out.c[j][l] - out.c_half[j][l]));
        }
    out.direct_value = direct;
    out.direct_value_half = direct_half;
    return out;
}

double coefficient_trace(const ChiCoefficients& c, const ThermoState& state, bool half) {
    const int J = half ? c.J_half : c.J;
    const auto& cc = half ? c.c_half : c.c;
    double s = 0.0;
    for (int j = 0; j < J; ++j)
        for (int l = 0; l <= kChiMaxOrder; ++l)
            if (cc[j][l] != 0.0) s += f_log(state, c.energies[j], l) * cc[j][l];
    return s;
}

ExplicitCoefficients explicit_coeffs(const FiberSolution& sol, int j1, int J) {
    if (!band_isolated(sol, j1)) throw std::domain_error("band " + std::to_string(j1) + " is degenerate at this k");
    J = std::min(J, sol.size());
    const auto& P1 = sol.pi_hat[0];
    const auto& P2 = sol.pi_hat[1];
    const double e1 = sol.energies[j1];
    const double p11 = P1(j1, j1).real(), p21 = P2(j1, j1).real();
    double s2 = 0, s1 = 0, sx = 0, sc2 = 0, sc2_2 = 0, sc2_3 = 0, single = 0, dbl = 0;
    for (int j2 = 0; j2 < J; ++j2) {
        if (j2 == j1) continue;
        const double d = sol.energies[j2] - e1;
        s2 += std::norm(P2(j1, j2)) / d;
        s1 += std::norm(P1(j1, j2)) / d;
        sx += 2.0 * (P2(j1, j2) * P1(j2, j1)).real() / d;
        const double c2 = coeff_C2(sol, j1, j2);
        sc2 += c2 / d;
        sc2_2 += c2 / (d * d);
        sc2_3 += c2 / (d * d * d);
        single += (coeff_C4(sol, j2, j1, j1, j1) - coeff_C4(sol, j1, j1, j2, j1)).real() / (d * d);
        for (int j3 = 0; j3 < J; ++j3) {
            if (j3 == j1) continue;
            const double d3 = sol.energies[j3] - e1;
            dbl += (coeff_C4(sol, j1, j1, j2, j3) + coeff_C4(sol, j1, j2, j1, j3) + coeff_C4(sol, j1, j2, j3, j1)).real() /
                   (d * d3);
        }
    }
    ExplicitCoefficients r;
    r.a3 = (p11 * p11 * s2 + p21 * p21 * s1 - p11 * p21 * sx) / 6.0;
    r.a2 = -0.5 * (dbl + single);
    r.b3 = (p11 * p11 + p21 * p21) / 6.0;
    r.b2 = -0.5 * sc2 + 0.5;
    r.b1 = -sc2_2;
    r.b0 = -2.0 * sc2_3;
    r.c3 = r.a3 + r.b3;
    r.c2 = r.a2 + r.b2;
    for (int j2 = J; j2 < sol.size(); ++j2) r.tail_bound += 0.5 * coeff_C2(sol, j1, j2) / std::abs(sol.energies[j2] - e1);
    return r;
}

double coefficient_F(const FiberSolution& sol, int band, int J) { return -2.0 * explicit_coeffs(sol, band, J).a2; }

int default_band_cutoff(const GridBands& bands, double rho0) {
    const int occupied = std::max(1, static_cast<int>(std::ceil(rho0 - 1e-9)));
    return std::min(3 * occupied, bands.basis().dimension());
}

namespace {

constexpr double kTwoPiCubed = 8.0 * std::numbers::pi * std::numbers::pi * std::numbers::pi;
/// Points whose lowest band lies this many thermal energies above mu contribute < e^-40.
constexpr double kThermalCut = 40.0;

/// Sampled band extrema are uncertain by about one cell spread (tol_gap / 4), so a Fermi band
/// counts as isolated when its neighbours stay at least that far from E_F.
double isolation_margin(const FermiClassification& cls) { return cls.tol_gap / 4.0; }

struct PointResult {
    double trace = 0, trace_half = 0, direct = 0, direct_half = 0, max_imag = 0;
    double full_trace = 0;  // all bands and orders, used to scale the consistency check
    double surface_f = 0, surface_f_half = 0;  // Fermi-surface integrand at a mesh vertex
    Vec3 grad{};
};

ChiResult base_result(const GridBands& bands, int J) {
    ChiResult r;
    r.J = J;
    r.grid_n = bands.grid().n();
    r.grid_shifted = bands.grid().shifted();
    r.cutoff_n = bands.basis().cutoff();
    return r;
}

double relative(double a, double b) { return std::abs(a - b) / std::max(std::abs(a), 1e-300); }

/// Surface integrand E_11 E_22 - E_12^2 - 3 F_N with F_N = -2 a_{N,2} from the residue buckets.
void fermi_surface_integrand(const FiberSolution& sol, const ChiCoefficients& c, int band, PointResult& out) {
    if (!band_isolated(sol, band))
        throw std::invalid_argument("Fermi band " + std::to_string(band + 1) + " is degenerate at a surface vertex");
    const auto h = band_hessian(sol, band);
    const double minor = h[0][0] * h[1][1] - h[0][1] * h[0][1];
    out.surface_f = minor + 6.0 * c.a[band][2];
    out.surface_f_half = band < c.J_half ? minor + 6.0 * c.a_half[band][2] : out.surface_f;
    out.grad = band_gradient(sol, band);
}

/// Sums the slots in `idx` order with pairwise summation.
template <class Get>
double sum_over(const std::vector<std::size_t>& idx, Get get) {
    std::vector<double> v(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) v[i] = get(idx[i]);
    return pairwise_sum(v);
}

}  // namespace

ChiResult chi_finite_T(const GridBands& bands, double beta, double rho0, const ChiOptions& opt) {
    const int J = opt.J > 0 ? opt.J : default_band_cutoff(bands, rho0);
    const double mu = solve_mu(bands, beta, rho0, opt.threads);
    const ThermoState state(beta, mu);
    ChiResult r = base_result(bands, J);
    r.beta = beta;
    r.mu = mu;

    FiniteTAssembly mode = opt.assembly;
    FermiClassification cls;
    if (mode != FiniteTAssembly::BandSum) {
        cls = classify(bands, rho0);
        const bool metal = !cls.is_sc();
        const bool isolated = metal && isolation_check(bands, cls.N, cls.E_M, isolation_margin(cls)).ok &&
                              isolation_check(bands, cls.N, mu, isolation_margin(cls)).ok;
        if (mode == FiniteTAssembly::Auto) mode = isolated ? FiniteTAssembly::FermiSurface : FiniteTAssembly::BandSum;
        else if (!isolated)
            throw std::invalid_argument("Fermi-surface assembly needs a metal with an isolated Fermi band");
    }
    const std::size_t nk = bands.nk();

    std::vector<char> volume(nk, 0), surface(nk, 0);
    for (std::size_t k = 0; k < nk; ++k) volume[k] = bands.energy(k, 0) <= mu + kThermalCut / beta;
    const int nband = cls.N - 1;
    TetraMesh mesh = make_tetra_mesh(bands, std::max(nband, 0));
    if (mode == FiniteTAssembly::FermiSurface)
        for (std::size_t v : mesh.crossing_vertices(fermi_smearing_levels(mesh, beta, mu))) surface[v] = 1;
    std::vector<std::size_t> todo;
    for (std::size_t k = 0; k < nk; ++k)
        if (volume[k] || surface[k]) todo.push_back(k);

    std::vector<PointResult> res(nk);
    parallel_for(todo.size(), opt.threads, [&](std::size_t i) {
        const std::size_t k = todo[i];
        const FiberSolution sol = bands.solve_full(k);
        const ChiCoefficients c = coeffs_via_residues(sol, J, &state);
        PointResult& pr = res[k];
        pr.max_imag = c.max_imag;
        if (volume[k]) {
            pr.direct = c.direct_value;
            pr.direct_half = c.direct_value_half;
            if (mode == FiniteTAssembly::BandSum) {
                pr.trace = coefficient_trace(c, state);
                pr.trace_half = coefficient_trace(c, state, true);
            } else {
                // Everything except the second/third-order terms of the Fermi band.
                auto rest = [&](const std::vector<OrderCoefficients>& cc, int Jc) {
                    double s = 0.0;
                    for (int j = 0; j < Jc; ++j)
                        for (int l = 0; l <= kChiMaxOrder; ++l) {
                            if (j == nband && (l == 2 || l == 3)) continue;
                            if (cc[j][l] != 0.0) s += f_log(state, c.energies[j], l) * cc[j][l];
                        }
                    return s;
                };
                pr.trace = rest(c.c, c.J);
                pr.trace_half = rest(c.c_half, c.J_half);
            }
        }
        if (surface[k]) fermi_surface_integrand(sol, c, nband, pr);
        if (volume[k] && mode == FiniteTAssembly::FermiSurface) {
            // Bucket/direct consistency is checked on the full trace, whatever the assembly.
            pr.full_trace = coefficient_trace(c, state);
            pr.direct -= pr.full_trace;
        }
    });

    std::vector<std::size_t> vol_idx;
    for (std::size_t k = 0; k < nk; ++k)
        if (volume[k]) vol_idx.push_back(k);
    const double inv_nk = 1.0 / static_cast<double>(nk);
    const double trace = sum_over(vol_idx, [&](std::size_t k) { return res[k].trace; }) * inv_nk;
    const double trace_half = sum_over(vol_idx, [&](std::size_t k) { return res[k].trace_half; }) * inv_nk;
    for (std::size_t k : todo) r.max_imag = std::max(r.max_imag, res[k].max_imag);
    r.full_solves = todo.size();

    if (mode == FiniteTAssembly::BandSum) {
        const double direct = sum_over(vol_idx, [&](std::size_t k) { return res[k].direct; }) * inv_nk;
        r.method = "band-sum";
        r.value = -trace / (2.0 * beta);
        r.volume_term = -kTwoPiCubed * trace / beta;
        r.surface_term = 0.0;
        r.assembly_mismatch = relative(trace, direct);
        r.tail_bound = std::abs(r.value + trace_half / (2.0 * beta));
        return r;
    }
    // direct - bucket trace, accumulated per point: should vanish.
    const double diff = sum_over(vol_idx, [&](std::size_t k) { return res[k].direct; }) * inv_nk;
    std::vector<double> g(nk, 0.0), g_half(nk, 0.0);
    for (std::size_t k = 0; k < nk; ++k)
        if (surface[k]) {
            mesh.set_gradient(k, res[k].grad);
            g[k] = res[k].surface_f;
            g_half[k] = res[k].surface_f_half;
        }
    const double S = fermi_smeared_surface_integral(mesh, beta, mu, g);
    const double S_half = fermi_smeared_surface_integral(mesh, beta, mu, g_half);
    r.method = "fermi-surface";
    r.N = cls.N;
    r.surface_term = S;
    r.volume_term = -kTwoPiCubed * trace / beta;
    r.value = -(S - 6.0 * r.volume_term) / (12.0 * kTwoPiCubed);
    const double half_value = -(S_half + 6.0 * kTwoPiCubed * trace_half / beta) / (12.0 * kTwoPiCubed);
    r.tail_bound = std::abs(r.value - half_value);
    const double full = sum_over(vol_idx, [&](std::size_t k) { return res[k].full_trace; }) * inv_nk;
    r.assembly_mismatch = std::abs(diff) / std::max(std::abs(full), 1e-300);
    return r;
}

ChiResult chi_finite_T(const FourierPotential& pot, const PlaneWaveBasis& basis, const BZGrid& grid, double beta,
                       double rho0, int J) {
    ChiOptions opt;
    opt.J = J;
    opt.assembly = FiniteTAssembly::BandSum;
    return chi_finite_T(GridBands::compute(pot, basis, grid), beta, rho0, opt);
}

namespace {

/// Occupied-state contribution sum_{j <= n} [E_j <= E_F] (c_{j,1} + (E_j - E_F) c_{j,0}).
double occupied_term(const ChiCoefficients& c, int nfilled, double ef, bool half, std::vector<double>* per_band) {
    const auto& cc = half ? c.c_half : c.c;
    const int top = std::min(nfilled, half ? c.J_half : c.J);
    double s = 0.0;
    for (int j = 0; j < top; ++j) {
        if (c.energies[j] > ef) continue;
        const double t = cc[j][1] + (c.energies[j] - ef) * cc[j][0];
        if (per_band) (*per_band)[j] += t;
        s += t;
    }
    return s;
}

}  // namespace

ChiResult chi_zero_T_SC(const GridBands& bands, double rho0, const ChiOptions& opt) {
    const FermiClassification cls = classify(bands, rho0);
    if (!cls.is_sc()) throw std::invalid_argument("semiconductor limit requested but the filling is metallic");
    const int J = std::max(opt.J > 0 ? opt.J : default_band_cutoff(bands, rho0), cls.N);
    ChiResult r = base_result(bands, J);
    r.zero_temperature = true;
    r.method = "semiconductor";
    r.fermi_energy = cls.E_F;
    r.N = cls.N;
    const std::size_t nk = bands.nk();
    std::vector<std::vector<double>> per(nk, std::vector<double>(cls.N, 0.0));
    std::vector<double> half(nk, 0.0), imag(nk, 0.0);
    parallel_for(nk, opt.threads, [&](std::size_t k) {
        const ChiCoefficients c = coeffs_via_residues(bands.solve_full(k), J);
        occupied_term(c, cls.N, cls.E_F, false, &per[k]);
        half[k] = occupied_term(c, cls.N, cls.E_F, true, nullptr);
        imag[k] = c.max_imag;
    });
    r.band_terms.assign(cls.N, 0.0);
    std::vector<double> col(nk);
    for (int j = 0; j < cls.N; ++j) {
        for (std::size_t k = 0; k < nk; ++k) col[k] = per[k][j];
        r.band_terms[j] = 0.5 * pairwise_sum(col) / static_cast<double>(nk);
        r.value += r.band_terms[j];
    }
    r.tail_bound = std::abs(r.value - 0.5 * pairwise_sum(half) / static_cast<double>(nk));
    r.max_imag = *std::max_element(imag.begin(), imag.end());
    r.full_solves = nk;
    return r;
}

ChiResult chi_zero_T_metal(const GridBands& bands, double rho0, const ChiOptions& opt) {
    const FermiClassification cls = classify(bands, rho0);
    if (cls.is_sc()) throw std::invalid_argument("metal limit requested but the filling is a semiconductor");
    const IsolationReport iso = isolation_check(bands, cls.N, cls.E_M, isolation_margin(cls));
    if (!iso.ok)
        throw std::invalid_argument("Fermi band " + std::to_string(cls.N) + " is not isolated at E_F (d1 = " +
                                    std::to_string(iso.d1) + ", d2 = " + std::to_string(iso.d2) + ")");
    const int J = std::max(opt.J > 0 ? opt.J : default_band_cutoff(bands, rho0), cls.N);
    ChiResult r = base_result(bands, J);
    r.zero_temperature = true;
    r.method = "metal";
    r.fermi_energy = cls.E_M;
    r.N = cls.N;
    const int nband = cls.N - 1;
    const double ef = cls.E_M;
    const std::size_t nk = bands.nk();

    TetraMesh mesh = make_tetra_mesh(bands, nband);
    std::vector<char> volume(nk, 0), surface(nk, 0);
    for (std::size_t k = 0; k < nk; ++k) volume[k] = bands.energy(k, 0) <= ef;
    for (std::size_t v : mesh.crossing_vertices({ef})) surface[v] = 1;
    std::vector<std::size_t> todo, vol_idx;
    for (std::size_t k = 0; k < nk; ++k) {
        if (volume[k] || surface[k]) todo.push_back(k);
        if (volume[k]) vol_idx.push_back(k);
    }
    std::vector<PointResult> res(nk);
    parallel_for(todo.size(), opt.threads, [&](std::size_t i) {
        const std::size_t k = todo[i];
        const FiberSolution sol = bands.solve_full(k);
        const ChiCoefficients c = coeffs_via_residues(sol, J);
        PointResult& pr = res[k];
        pr.max_imag = c.max_imag;
        if (volume[k]) {
            pr.trace = occupied_term(c, cls.N, ef, false, nullptr);
            pr.trace_half = occupied_term(c, cls.N, ef, true, nullptr);
        }
        if (surface[k]) fermi_surface_integrand(sol, c, nband, pr);
    });
    const double inv_nk = 1.0 / static_cast<double>(nk);
    const double vol = kTwoPiCubed * sum_over(vol_idx, [&](std::size_t k) { return res[k].trace; }) * inv_nk;
    const double vol_half = kTwoPiCubed * sum_over(vol_idx, [&](std::size_t k) { return res[k].trace_half; }) * inv_nk;
    std::vector<double> g(nk, 0.0), g_half(nk, 0.0);
    for (std::size_t k = 0; k < nk; ++k)
        if (surface[k]) {
            mesh.set_gradient(k, res[k].grad);
            g[k] = res[k].surface_f;
            g_half[k] = res[k].surface_f_half;
        }
    const double S = surface_integral(mesh, ef, g).value;
    const double S_half = surface_integral(mesh, ef, g_half).value;
    r.surface_term = S;
    r.volume_term = vol;
    r.value = -(S - 6.0 * vol) / (12.0 * kTwoPiCubed);
    r.tail_bound = std::abs(r.value + (S_half - 6.0 * vol_half) / (12.0 * kTwoPiCubed));
    for (std::size_t k : todo) r.max_imag = std::max(r.max_imag, res[k].max_imag);
    r.full_solves = todo.size();
    return r;
}

ChiResult chi_zero_T(const GridBands& bands, double rho0, const ChiOptions& opt) {
    return classify(bands, rho0).is_sc() ? chi_zero_T_SC(bands, rho0, opt) : chi_zero_T_metal(bands, rho0, opt);
}

}  // namespace bloch
