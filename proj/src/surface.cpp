#include "bloch/surface.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include <boost/math/quadrature/gauss.hpp>

namespace bloch {

namespace {

/// Axis orders of the six tetrahedra; each is the path 0 -> a -> a|b -> 7 through the cube.
constexpr int kAxisOrder[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};

double step(const BZGrid& g) { return 2.0 * std::numbers::pi / g.n(); }

Vec3 sub(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
double norm(const Vec3& a) { return std::sqrt(a[0] * a[0] + a[1] * a[1] + a[2] * a[2]); }

struct CutPoint {
    Vec3 r;
    std::array<double, 4> lambda;  ///< barycentric weights over the tetra's (unsorted) vertices
};

/// Planar cut of a linear tetrahedron at `level`: 0, 3 or 4 points in cyclic order.
int cut_tetra(const std::array<double, 4>& e, const std::array<Vec3, 4>& r, double level, CutPoint* out) {
    std::array<int, 4> o = {0, 1, 2, 3};
    std::sort(o.begin(), o.end(), [&](int a, int b) { return e[a] < e[b] || (e[a] == e[b] && a < b); });
    const double e0 = e[o[0]], e1 = e[o[1]], e2 = e[o[2]], e3 = e[o[3]];
    if (!(level > e0 && level < e3)) return 0;
    auto point = [&](int a, int b) {
        const double w = (level - e[a]) / (e[b] - e[a]);
        CutPoint c;
        for (int x = 0; x < 3; ++x) c.r[x] = r[a][x] + w * (r[b][x] - r[a][x]);
        c.lambda = {0, 0, 0, 0};
        c.lambda[a] = 1.0 - w;
        c.lambda[b] = w;
        return c;
    };
    if (level < e1) {
        out[0] = point(o[0], o[1]);
        out[1] = point(o[0], o[2]);
        out[2] = point(o[0], o[3]);
        return 3;
    }
    if (level < e2) {
        out[0] = point(o[0], o[2]);
        out[1] = point(o[0], o[3]);
        out[2] = point(o[1], o[3]);
        out[3] = point(o[1], o[2]);
        return 4;
    }
    out[0] = point(o[0], o[3]);
    out[1] = point(o[1], o[3]);
    out[2] = point(o[2], o[3]);
    return 3;
}

double triangle_area(const Vec3& a, const Vec3& b, const Vec3& c) { return 0.5 * norm(cross(sub(b, a), sub(c, a))); }

/// Area of the cut and barycentric weights of its centroid.
double cut_area(const CutPoint* p, int np, std::array<double, 4>& lambda) {
    lambda = {0, 0, 0, 0};
    double total = 0.0;
    for (int t = 1; t + 1 < np; ++t) {
        const double a = triangle_area(p[0].r, p[t].r, p[t + 1].r);
        for (int v = 0; v < 4; ++v) lambda[v] += a * (p[0].lambda[v] + p[t].lambda[v] + p[t + 1].lambda[v]) / 3.0;
        total += a;
    }
    if (total > 0)
        for (double& l : lambda) l /= total;
    else
        for (int v = 0; v < 4; ++v) lambda[v] = (p[0].lambda[v] + p[1].lambda[v] + p[2].lambda[v]) / 3.0;
    return total;
}

struct TetraData {
    std::array<std::size_t, 4> v;
    std::array<double, 4> e;
    std::array<Vec3, 4> r;
};

TetraData tetra_data(const TetraMesh& mesh, std::size_t t) {
    TetraData d;
    d.v = mesh.vertices(t);
    d.r = mesh.offsets(t);
    for (int i = 0; i < 4; ++i) d.e[i] = mesh.energy()[d.v[i]];
    return d;
}

/// Contribution area / |grad E| * F of one tetrahedron; sets `degenerate` if skipped.
double tetra_contribution(const TetraMesh& mesh, const TetraData& d, std::size_t t, double level,
                          const std::vector<double>& f, bool& crossed, bool& degenerate) {
    CutPoint pts[4];
    const int np = cut_tetra(d.e, d.r, level, pts);
    crossed = np > 0;
    degenerate = false;
    if (!crossed) return 0.0;
    std::array<double, 4> lam;
    const double area = cut_area(pts, np, lam);
    double gnorm;
    if (mesh.has_gradient()) {
        Vec3 g{0, 0, 0};
        for (int v = 0; v < 4; ++v)
            for (int x = 0; x < 3; ++x) g[x] += lam[v] * mesh.gradient()[d.v[v]][x];
        gnorm = norm(g);
    } else {
        // Linear interpolant along the path 0 -> 1 -> 2 -> 3: each step moves along one axis.
        const double h = step(mesh.grid());
        const int p = static_cast<int>(t % 6);
        Vec3 g{0, 0, 0};
        for (int s = 0; s < 3; ++s) g[kAxisOrder[p][s]] = (d.e[s + 1] - d.e[s]) / h;
        gnorm = norm(g);
    }
    if (gnorm <= 1e-6) {
        degenerate = true;
        return 0.0;
    }
    double fv = 1.0;
    if (!f.empty()) {
        fv = 0.0;
        for (int v = 0; v < 4; ++v) fv += lam[v] * f[d.v[v]];
    }
    return area / gnorm * fv;
}

void check_degenerate(const SurfaceIntegral& s) {
    if (s.crossing > 0 && 100 * s.degenerate > s.crossing)
        throw std::runtime_error("isosurface gradient degenerate on " + std::to_string(s.degenerate) + " of " +
                                 std::to_string(s.crossing) + " crossing tetrahedra");
}

/// Blochl's cumulative volume fraction of a linear tetrahedron below e.
double tetra_fraction(std::array<double, 4> x, double e) {
    std::sort(x.begin(), x.end());
    const double e1 = x[0], e2 = x[1], e3 = x[2], e4 = x[3];
    if (e <= e1) return 0.0;
    if (e >= e4) return 1.0;
    if (e < e2) return (e - e1) * (e - e1) * (e - e1) / ((e2 - e1) * (e3 - e1) * (e4 - e1));
    if (e < e3) {
        const double e21 = e2 - e1, e31 = e3 - e1, e41 = e4 - e1, e32 = e3 - e2, e42 = e4 - e2, d = e - e2;
        return (e21 * e21 + 3.0 * e21 * d + 3.0 * d * d - (e31 + e42) / (e32 * e42) * d * d * d) / (e31 * e41);
    }
    return 1.0 - (e4 - e) * (e4 - e) * (e4 - e) / ((e4 - e1) * (e4 - e2) * (e4 - e3));
}

}  // namespace

TetraMesh::TetraMesh(const BZGrid& grid, std::vector<double> energy, std::vector<Vec3> gradient)
    : grid_(grid), energy_(std::move(energy)), gradient_(std::move(gradient)) {
    if (energy_.size() != grid_.size()) throw std::invalid_argument("mesh energies do not match the grid");
    if (!gradient_.empty() && gradient_.size() != grid_.size())
        throw std::invalid_argument("mesh gradients do not match the grid");
}

void TetraMesh::set_gradient(std::size_t vertex, const Vec3& g) {
    if (gradient_.empty()) gradient_.assign(grid_.size(), Vec3{0, 0, 0});
    gradient_[vertex] = g;
}

std::array<std::size_t, 4> TetraMesh::vertices(std::size_t t) const {
    const std::size_t cube = t / 6;
    const int p = static_cast<int>(t % 6);
    const int n = grid_.n();
    int idx[3] = {static_cast<int>(cube / n / n), static_cast<int>((cube / n) % n), static_cast<int>(cube % n)};
    std::array<std::size_t, 4> v;
    v[0] = grid_.index(idx[0], idx[1], idx[2]);
    for (int s = 0; s < 3; ++s) {
        ++idx[kAxisOrder[p][s]];
        v[s + 1] = grid_.index(idx[0], idx[1], idx[2]);
    }
    return v;
}

std::array<Vec3, 4> TetraMesh::offsets(std::size_t t) const {
    const int p = static_cast<int>(t % 6);
    const double h = step(grid_);
    std::array<Vec3, 4> r{};
    r[0] = {0, 0, 0};
    for (int s = 0; s < 3; ++s) {
        r[s + 1] = r[s];
        r[s + 1][kAxisOrder[p][s]] += h;
    }
    return r;
}

double TetraMesh::tetra_volume() const {
    const double h = step(grid_);
    return h * h * h / 6.0;
}

double TetraMesh::total_volume() const {
    // Computed geometrically per tetrahedron so the tiling itself is exercised.
    double total = 0.0;
    for (std::size_t t = 0; t < tetra_count(); ++t) {
        const auto r = offsets(t);
        const Vec3 a = sub(r[1], r[0]), b = sub(r[2], r[0]), c = sub(r[3], r[0]);
        const Vec3 bc = cross(b, c);
        total += std::abs(a[0] * bc[0] + a[1] * bc[1] + a[2] * bc[2]) / 6.0;
    }
    return total;
}

std::vector<std::size_t> TetraMesh::crossing_vertices(const std::vector<double>& levels) const {
    std::vector<double> lv(levels);
    std::sort(lv.begin(), lv.end());
    std::vector<char> mark(grid_.size(), 0);
    for (std::size_t t = 0; t < tetra_count(); ++t) {
        const auto v = vertices(t);
        double lo = energy_[v[0]], hi = lo;
        for (int i = 1; i < 4; ++i) {
            lo = std::min(lo, energy_[v[i]]);
            hi = std::max(hi, energy_[v[i]]);
        }
        auto it = std::upper_bound(lv.begin(), lv.end(), lo);
        if (it != lv.end() && *it < hi)
            for (auto x : v) mark[x] = 1;
    }
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < mark.size(); ++i)
        if (mark[i]) out.push_back(i);
    return out;
}

TetraMesh make_tetra_mesh(const GridBands& bands, int band) {
    std::vector<double> e(bands.nk());
    for (std::size_t k = 0; k < bands.nk(); ++k) e[k] = bands.energy(k, band);
    return TetraMesh(bands.grid(), std::move(e));
}

SurfaceIntegral surface_integral(const TetraMesh& mesh, double level, const std::vector<double>& f) {
    if (!f.empty() && f.size() != mesh.grid().size()) throw std::invalid_argument("F samples do not match the grid");
    SurfaceIntegral s;
    for (std::size_t t = 0; t < mesh.tetra_count(); ++t) {
        const TetraData d = tetra_data(mesh, t);
        const auto [lo, hi] = std::minmax({d.e[0], d.e[1], d.e[2], d.e[3]});
        if (!(level > lo && level < hi)) continue;
        bool crossed, degenerate;
        s.value += tetra_contribution(mesh, d, t, level, f, crossed, degenerate);
        s.crossing += crossed;
        s.degenerate += degenerate;
    }
    check_degenerate(s);
    return s;
}

namespace {

constexpr int kSmearingPanels = 8;

/// Gauss-Legendre nodes/weights (30 points) mapped to the panels of [a, b].
void smearing_rule(double a, double b, std::vector<double>& x, std::vector<double>& w) {
    using rule = boost::math::quadrature::gauss<double, 30>;
    const auto& ab = rule::abscissa();
    const auto& wt = rule::weights();
    const double width = (b - a) / kSmearingPanels;
    for (int p = 0; p < kSmearingPanels; ++p) {
        const double c = a + (p + 0.5) * width, h = 0.5 * width;
        for (std::size_t i = 0; i < ab.size(); ++i) {
            for (int s : {-1, 1}) {
                if (ab[i] == 0.0 && s > 0) continue;
                x.push_back(c + s * h * ab[i]);
                w.push_back(h * wt[i]);
            }
        }
    }
}

void smearing_nodes(const TetraMesh& mesh, double beta, double mu, std::vector<double>& levels,
                    std::vector<double>& weights) {
    const auto [lo_it, hi_it] = std::minmax_element(mesh.energy().begin(), mesh.energy().end());
    // u = f_FD(eps) decreases with eps; the isosurface is empty outside [min E, max E].
    const ThermoState s(beta, mu);
    const double u_lo = fermi_dirac(s, *hi_it), u_hi = fermi_dirac(s, *lo_it);
    std::vector<double> u;
    smearing_rule(u_lo, u_hi, u, weights);
    for (double x : u) levels.push_back(mu + std::log((1.0 - x) / x) / beta);
}

}  // namespace

std::vector<double> fermi_smearing_levels(const TetraMesh& mesh, double beta, double mu) {
    std::vector<double> levels, weights;
    smearing_nodes(mesh, beta, mu, levels, weights);
    return levels;
}

double fermi_smeared_surface_integral(const TetraMesh& mesh, double beta, double mu, const std::vector<double>& f) {
    if (!f.empty() && f.size() != mesh.grid().size()) throw std::invalid_argument("F samples do not match the grid");
    std::vector<double> levels, weights;
    smearing_nodes(mesh, beta, mu, levels, weights);
    if (levels.empty()) return 0.0;
    const auto [lmin, lmax] = std::minmax_element(levels.begin(), levels.end());

    // Tetrahedra that can be cut by any level.
    std::vector<std::size_t> active;
    for (std::size_t t = 0; t < mesh.tetra_count(); ++t) {
        const auto v = mesh.vertices(t);
        double lo = mesh.energy()[v[0]], hi = lo;
        for (int i = 1; i < 4; ++i) {
            lo = std::min(lo, mesh.energy()[v[i]]);
            hi = std::max(hi, mesh.energy()[v[i]]);
        }
        if (hi > *lmin && lo < *lmax) active.push_back(t);
    }
    double total = 0.0;
    for (std::size_t i = 0; i < levels.size(); ++i) {
        SurfaceIntegral s;
        for (std::size_t t : active) {
            const TetraData d = tetra_data(mesh, t);
            bool crossed, degenerate;
            s.value += tetra_contribution(mesh, d, t, levels[i], f, crossed, degenerate);
            s.crossing += crossed;
            s.degenerate += degenerate;
        }
        check_degenerate(s);
        total += weights[i] * s.value;
    }
    return total;
}

double ids_tetra_band(const TetraMesh& mesh, double e) {
    double total = 0.0;
    for (std::size_t t = 0; t < mesh.tetra_count(); ++t) {
        const auto v = mesh.vertices(t);
        total += tetra_fraction({mesh.energy()[v[0]], mesh.energy()[v[1]], mesh.energy()[v[2]], mesh.energy()[v[3]]}, e);
    }
    return total / static_cast<double>(mesh.tetra_count());
}

double ids_tetra(const GridBands& bands, double e) {
    double total = 0.0;
    for (int j = 0; j < bands.nbands(); ++j) {
        if (bands.band_max(j) <= e)
            total += 1.0;
        else if (bands.band_min(j) < e)
            total += ids_tetra_band(make_tetra_mesh(bands, j), e);
    }
    return total;
}

double invert_ids_tetra(const GridBands& bands, double rho0) {
    if (!(rho0 > 0.0) || rho0 >= bands.nbands())
        throw std::invalid_argument("density outside the capacity of the stored bands");
    const int nb = bands.nbands();
    double lo = bands.band_min(0) - 1.0, hi = bands.band_max(nb - 1) + 1.0;
    // Bands entirely below/above the bracket contribute 1/0; only straddling tetrahedra are
    // kept explicitly, and the bracket shrinks between refinement passes.
    std::vector<std::array<double, 4>> partial;
    double full = 0.0;
    const std::size_t ntet = 6 * bands.nk();
    auto collect = [&] {
        partial.clear();
        full = 0.0;
        for (int j = 0; j < nb; ++j) {
            if (bands.band_max(j) <= lo) {
                full += static_cast<double>(ntet);
                continue;
            }
            if (bands.band_min(j) >= hi) continue;
            const TetraMesh mesh = make_tetra_mesh(bands, j);
            for (std::size_t t = 0; t < ntet; ++t) {
                const auto v = mesh.vertices(t);
                std::array<double, 4> x{mesh.energy()[v[0]], mesh.energy()[v[1]], mesh.energy()[v[2]],
                                        mesh.energy()[v[3]]};
                const auto [a, b] = std::minmax({x[0], x[1], x[2], x[3]});
                if (b <= lo)
                    full += 1.0;
                else if (a < hi)
                    partial.push_back(x);
            }
        }
    };
    auto count = [&](double e) {
        double s = full;
        for (const auto& x : partial) s += tetra_fraction(x, e);
        return s / static_cast<double>(ntet);
    };
    collect();
    const double target = rho0;
    for (int pass = 0; pass < 200 && hi - lo > 4 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(hi));
         ++pass) {
        const double mid = 0.5 * (lo + hi);
        if (count(mid) < target)
            lo = mid;
        else
            hi = mid;
        if (pass % 8 == 7) collect();  // drop tetrahedra that no longer straddle the bracket
    }
    return 0.5 * (lo + hi);
}

IsolationReport isolation_check(const GridBands& bands, int n_band, double e_fermi, double margin) {
    if (n_band < 1 || n_band > bands.nbands()) throw std::invalid_argument("band index out of range");
    IsolationReport r;
    if (n_band >= 2) r.d1 = e_fermi - bands.band_max(n_band - 2);
    if (n_band < bands.nbands()) r.d2 = bands.band_min(n_band) - e_fermi;
    r.ok = r.d1 >= margin && r.d2 >= margin;
    return r;
}

std::size_t write_obj(const TetraMesh& mesh, double level, std::ostream& out) {
    out << "# isosurface E = " << level << "\n";
    std::size_t nv = 0, ntri = 0;
    for (std::size_t t = 0; t < mesh.tetra_count(); ++t) {
        const TetraData d = tetra_data(mesh, t);
        CutPoint pts[4];
        const int np = cut_tetra(d.e, d.r, level, pts);
        if (np == 0) continue;
        const Vec3 origin = mesh.grid().point(d.v[0]);
        for (int i = 0; i < np; ++i)
            out << "v " << origin[0] + pts[i].r[0] << ' ' << origin[1] + pts[i].r[1] << ' ' << origin[2] + pts[i].r[2]
                << "\n";
        for (int i = 1; i + 1 < np; ++i) {
            out << "f " << nv + 1 << ' ' << nv + 1 + i << ' ' << nv + 2 + i << "\n";
            ++ntri;
        }
        nv += np;
    }
    return ntri;
}

}  // namespace bloch
