#include <cmath>
#include <numbers>
#include <sstream>

#include "bloch/fermi.hpp"
#include "bloch/potential.hpp"
#include "bloch/surface.hpp"
#include "doctest.h"

using namespace bloch;
using std::numbers::pi;

namespace {

/// Free-electron lowest band with the exact gradient k attached to every vertex.
TetraMesh free_mesh(int n, bool shifted = true) {
    const auto bands = GridBands::compute(FourierPotential{}, PlaneWaveBasis(0), BZGrid(n, shifted));
    auto mesh = make_tetra_mesh(bands, 0);
    for (std::size_t k = 0; k < bands.nk(); ++k) mesh.set_gradient(k, bands.grid().point(k));
    return mesh;
}

double sphere_ratio(int n, double kF) { return surface_integral(free_mesh(n), kF * kF / 2).value / (4 * pi * kF); }

}  // namespace

TEST_SUITE("surface") {

TEST_CASE("tetrahedra tile the zone") {
    const TetraMesh mesh(BZGrid(5), std::vector<double>(125, 0.0));
    CHECK(mesh.tetra_count() == 6 * 125);
    CHECK(mesh.total_volume() == doctest::Approx(8 * pi * pi * pi).epsilon(1e-12));
    double v = 0;
    for (std::size_t t = 0; t < mesh.tetra_count(); ++t) v += mesh.tetra_volume();
    CHECK(v == doctest::Approx(8 * pi * pi * pi).epsilon(1e-10));
}

TEST_CASE("free-electron sphere: area over speed is 4 pi k_F") {
    CHECK(sphere_ratio(24, 1.5) == doctest::Approx(1.0).epsilon(0.02));
    const double e16 = std::abs(sphere_ratio(16, 1.5) - 1), e24 = std::abs(sphere_ratio(24, 1.5) - 1),
                 e32 = std::abs(sphere_ratio(32, 1.5) - 1);
    CHECK(e16 >= e24);
    CHECK(e24 >= e32);
}

TEST_CASE("interpolated gradients also give the sphere") {
    const auto bands = GridBands::compute(FourierPotential{}, PlaneWaveBasis(0), BZGrid(24, true));
    const double kF = 1.5;
    CHECK(surface_integral(make_tetra_mesh(bands, 0), kF * kF / 2).value ==
          doctest::Approx(4 * pi * kF).epsilon(0.02));
}

TEST_CASE("zero weight, empty isosurface and linearity") {
    const auto mesh = free_mesh(12);
    const std::size_t nv = mesh.energy().size();
    CHECK(surface_integral(mesh, 1.0, std::vector<double>(nv, 0.0)).value == 0.0);
    CHECK(surface_integral(mesh, -1.0).value == 0.0);
    CHECK(surface_integral(mesh, 1e3).value == 0.0);
    std::vector<double> f(nv), g(nv), h(nv);
    for (std::size_t i = 0; i < nv; ++i) {
        f[i] = std::sin(0.1 * i);
        g[i] = 1.0 + 0.01 * i;
        h[i] = 2.5 * f[i] - 0.7 * g[i];
    }
    const double If = surface_integral(mesh, 1.0, f).value, Ig = surface_integral(mesh, 1.0, g).value;
    CHECK(surface_integral(mesh, 1.0, h).value == doctest::Approx(2.5 * If - 0.7 * Ig).epsilon(1e-12));
}

TEST_CASE("smeared surface integral approaches the sharp one") {
    const auto mesh = free_mesh(16);
    const double sharp = surface_integral(mesh, 1.0).value;
    CHECK(fermi_smeared_surface_integral(mesh, 200.0, 1.0) == doctest::Approx(sharp).epsilon(0.02));
}

TEST_CASE("tetrahedron IDS of the free band") {
    const auto bands = GridBands::compute(FourierPotential{}, PlaneWaveBasis(0), BZGrid(24, true));
    const double e = 1.0;
    CHECK(ids_tetra(bands, e) == doctest::Approx(std::pow(2 * e, 1.5) / (6 * pi * pi)).epsilon(0.02));
    CHECK(ids_tetra(bands, -1.0) == 0.0);
    CHECK(invert_ids_tetra(bands, ids_tetra(bands, e)) == doctest::Approx(e).epsilon(1e-9));
}

TEST_CASE("isolation report") {
    const auto free = GridBands::compute(FourierPotential{}, PlaneWaveBasis(1), BZGrid(8, true), 4);
    const auto low = isolation_check(free, 1, 0.3, 0.01);
    CHECK(std::isinf(low.d1));
    CHECK(low.d2 > 0);
    CHECK(low.ok);
    const auto gap = GridBands::compute(named_potential("separable_gap", 0.0), PlaneWaveBasis(1), BZGrid(16));
    const auto cls = classify(gap, 0.5);
    const auto r = isolation_check(gap, cls.N, cls.E_M, 0.0);
    CHECK(r.d2 > 0);
    // a level inside the overlap of bands 1 and 2 of the free gas is not isolated
    const double crossing = 0.5 * (free.band_min(1) + free.band_max(0));
    CHECK_FALSE(isolation_check(free, 2, crossing, 0.01).ok);
    CHECK_THROWS_AS(isolation_check(free, 0, 0.0, 0.0), std::invalid_argument);
}

TEST_CASE("OBJ dump of the isosurface") {
    const auto mesh = free_mesh(8);
    std::ostringstream out;
    const std::size_t tri = write_obj(mesh, 1.0, out);
    CHECK(tri > 0);
    const std::string s = out.str();
    CHECK(s.find("\nv ") != std::string::npos);
    CHECK(s.find("\nf ") != std::string::npos);
    std::ostringstream empty;
    CHECK(write_obj(mesh, -5.0, empty) == 0);
}

}
