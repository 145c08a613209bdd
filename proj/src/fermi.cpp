#include "bloch/fermi.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "bloch/simd.hpp"
#include "bloch/summation.hpp"
#include "bloch/surface.hpp"

namespace bloch {

namespace {

/// Residual of the density equation on sorted state energies, written so that no term cancels:
/// with T = rho0 nk = K + r, F(mu) = sum_{s >= K} p_s - sum_{s < K} q_s - r.
struct DensityEquation {
    std::vector<double> e;  // ascending
    std::size_t K;
    double r;
    double beta;
    mutable std::vector<double> p, q;

    void eval(double mu, double& f, double& df) const {
        p.resize(e.size());
        q.resize(e.size());
        simd::fermi_occupations(e.data(), e.size(), beta, mu, p.data(), q.data());
        const double above = pairwise_sum(p.data() + K, e.size() - K);
        const double below = pairwise_sum(q.data(), K);
        f = above - below - r;
        for (std::size_t i = 0; i < e.size(); ++i) p[i] *= q[i];
        df = beta * pairwise_sum(p);
    }
};

double log_sum_exp(const std::vector<double>& x) {
    if (x.empty()) return -std::numeric_limits<double>::infinity();
    const double m = *std::max_element(x.begin(), x.end());
    if (!std::isfinite(m)) return m;
    std::vector<double> t(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) t[i] = std::exp(x[i] - m);
    return m + std::log(pairwise_sum(t));
}

/// ln(1 + e^y) without overflow.
double softplus(double y) { return y > 0 ? y + std::log1p(std::exp(-y)) : std::log1p(std::exp(y)); }

}  // namespace

double solve_mu(const GridBands& bands, double beta, double rho0, int /*threads*/) {
    if (!(beta > 0.0)) throw std::invalid_argument("beta must be > 0");
    if (!(rho0 > 0.0) || rho0 >= bands.nbands())
        throw std::invalid_argument("density " + std::to_string(rho0) + " outside (0, " +
                                    std::to_string(bands.nbands()) + ") representable by the stored bands");
    DensityEquation eq;
    eq.e = bands.energies();
    std::sort(eq.e.begin(), eq.e.end());
    const double target = rho0 * static_cast<double>(bands.nk());
    eq.K = static_cast<std::size_t>(std::floor(target));
    eq.r = target - std::floor(target);
    eq.beta = beta;

    const double centre = eq.e[std::min(eq.K, eq.e.size() - 1)];
    double lo = centre - 1.0, hi = centre + 1.0, f, df;
    for (double w = 1.0;; w *= 2) {
        eq.eval(lo, f, df);
        if (f < 0) break;
        lo -= w;
    }
    for (double w = 1.0;; w *= 2) {
        eq.eval(hi, f, df);
        if (f > 0) break;
        hi += w;
    }
    double x = 0.5 * (lo + hi);
    for (int it = 0; it < 400; ++it) {
        eq.eval(x, f, df);
        if (f == 0.0) return x;
        (f < 0 ? lo : hi) = x;
        double next = x - f / df;
        if (!(next > lo && next < hi) || !std::isfinite(next)) next = 0.5 * (lo + hi);
        const double tiny = 2.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(x));
        if (std::abs(next - x) <= tiny || hi - lo <= tiny) return next;
        x = next;
    }
    return x;
}

double solve_mu(const FourierPotential& pot, const PlaneWaveBasis& basis, const BZGrid& grid, double beta,
                double rho0) {
    return solve_mu(GridBands::compute(pot, basis, grid), beta, rho0);
}

double gap_tolerance(const GridBands& bands, int n_band) {
    const BZGrid& g = bands.grid();
    const int n = g.n();
    double worst = 0.0;
    for (int band : {n_band - 1, n_band}) {
        if (band < 0 || band >= bands.nbands()) continue;
        double sum = 0.0;
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
                for (int c = 0; c < n; ++c) {
                    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
                    for (int corner = 0; corner < 8; ++corner) {
                        const double e =
                            bands.energy(g.index(a + (corner & 1), b + ((corner >> 1) & 1), c + (corner >> 2)), band);
                        lo = std::min(lo, e);
                        hi = std::max(hi, e);
                    }
                    sum += hi - lo;
                }
        worst = std::max(worst, sum / static_cast<double>(g.size()));
    }
    return 4.0 * worst;
}

FermiClassification classify(const GridBands& bands, double rho0) {
    if (!(rho0 > 0.0)) throw std::invalid_argument("density must be > 0");
    if (rho0 >= bands.nbands()) throw std::invalid_argument("density exceeds the capacity of the stored bands");
    FermiClassification c;
    for (int j = 1; j < bands.nbands(); ++j) c.gap_table.push_back({j, bands.band_max(j - 1), bands.band_min(j)});

    const double filled = std::round(rho0);
    if (std::abs(rho0 - filled) <= 1e-9 && filled >= 1) {
        const int N = static_cast<int>(filled);
        const double a = bands.band_max(N - 1), b = bands.band_min(N);
        c.tol_gap = gap_tolerance(bands, N);
        if (b - a > c.tol_gap) {
            c.variant = FermiClassification::Variant::SC;
            c.N = N;
            c.a_N = a;
            c.b_N = b;
            c.E_F = 0.5 * (a + b);
            return c;
        }
        if (std::abs(b - a) <= c.tol_gap)
            throw SemimetalError("gap between bands " + std::to_string(N) + " and " + std::to_string(N + 1) +
                                 " is closed within tolerance (" + std::to_string(b - a) + " vs tol " +
                                 std::to_string(c.tol_gap) + "): semimetal fillings are not supported");
    }
    c.variant = FermiClassification::Variant::Metal;
    c.E_M = invert_ids_tetra(bands, rho0);
    int count = 0;
    for (int j = 0; j < bands.nbands(); ++j)
        if (bands.band_min(j) <= c.E_M && c.E_M <= bands.band_max(j)) {
            if (count++ == 0) c.N = j + 1;
        }
    if (count == 0) {
        c.N = 1;
        for (int j = 0; j < bands.nbands(); ++j)
            if (bands.band_max(j) < c.E_M) c.N = j + 1;
    }
    c.multiple_bands = count > 1;
    c.tol_gap = gap_tolerance(bands, c.N);
    return c;
}

FermiClassification classify(const FourierPotential& pot, const PlaneWaveBasis& basis, const BZGrid& grid,
                             double rho0) {
    return classify(GridBands::compute(pot, basis, grid), rho0);
}

double sc_fixed_point_map(const GridBands& bands, const FermiClassification& cls, double beta, double x) {
    if (!cls.is_sc() || !(cls.b_N > cls.a_N)) throw std::invalid_argument("fixed-point map needs an open gap");
    if (!(beta > 0.0)) throw std::invalid_argument("beta must be > 0");
    std::vector<double> lower, upper;
    for (std::size_t k = 0; k < bands.nk(); ++k)
        for (int j = 0; j < bands.nbands(); ++j) {
            const double e = bands.energy(k, j);
            if (j < cls.N)
                lower.push_back(-softplus(beta * (x - e)));  // ln(1 - f_FD(e))
            else
                upper.push_back(-softplus(beta * (e - x)));  // ln f_FD(e)
        }
    // ln(holes) - ln(electrons) = beta (a + b - 2x) + ln(L/U): identical to the gap-edge form.
    return x + (log_sum_exp(lower) - log_sum_exp(upper)) / (2.0 * beta);
}

EdgeDiagnostic edge_diagnostic(const GridBands& bands, int n_band, const std::vector<double>& deltas) {
    if (n_band < 1 || n_band > bands.nbands()) throw std::invalid_argument("band index out of range");
    EdgeDiagnostic d;
    d.deltas = deltas;
    const double a = bands.band_max(n_band - 1);
    const double top = ids(bands, a);
    double num = 0.0, den = 0.0;
    for (double delta : deltas) {
        const double inc = top - ids(bands, a - delta);
        d.increments.push_back(inc);
        num += inc * delta * delta * delta;
        den += std::pow(delta, 6);
    }
    d.C = den > 0 ? num / den : 0.0;
    return d;
}

}  // namespace bloch
