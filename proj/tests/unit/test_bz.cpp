#include <cmath>
#include <numbers>
#include <vector>

#include "bloch/bz.hpp"
#include "bloch/potential.hpp"
#include "bloch/summation.hpp"
#include "doctest.h"
#include "finite_difference.hpp"
#include "frozen_values.hpp"

using namespace bloch;
using std::numbers::pi;

namespace {

double free_ids(double e) { return std::pow(2 * e, 1.5) / (6 * pi * pi); }

}  // namespace

TEST_SUITE("bz") {

TEST_CASE("grid weights sum to one and points lie in the zone") {
    for (bool shifted : {false, true}) {
        for (int n : {1, 4, 7}) {
            const BZGrid g(n, shifted);
            std::vector<double> w(g.size(), g.weight());
            CHECK(std::abs(pairwise_sum(w) - 1.0) < 1e-14);
            for (std::size_t i = 0; i < g.size(); ++i)
                for (double c : g.point(i)) {
                    CHECK(c > -pi);
                    CHECK(c <= pi);
                }
        }
    }
    CHECK(BZGrid(4, false).coord(1) == 0.0);  // unshifted grids contain the zone centre
    CHECK(BZGrid(5, false).coord(2) == 0.0);
    CHECK(BZGrid(4, true).coord(0) == doctest::Approx(-pi + pi / 4));
    CHECK_THROWS_AS(BZGrid(0), std::invalid_argument);
}

TEST_CASE("thermodynamic state validation") {
    CHECK_THROWS_AS(ThermoState(0.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(ThermoState(-1.0, 0.0), std::invalid_argument);
    CHECK(ThermoState(2.0, 0.5).z() == doctest::Approx(std::exp(1.0)));
}

TEST_CASE("log-kernel identities") {
    const ThermoState s(7.0, 0.3);
    CHECK(f_log(s, 0.3, 0) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
    CHECK(fermi_dirac(s, 0.3) == doctest::Approx(0.5));
    CHECK(fermi_dirac_derivative(s, 0.3) == doctest::Approx(-7.0 / 4));
    CHECK(f_log(s, 0.3, 1) == doctest::Approx(-7.0 * 0.5));
    CHECK(f_log(s, 1.1, 1) == doctest::Approx(-7.0 * fermi_dirac(s, 1.1)).epsilon(1e-14));
    CHECK(f_log(s, 1.1, 2) == doctest::Approx(-7.0 * fermi_dirac_derivative(s, 1.1)).epsilon(1e-14));
}

TEST_CASE("third derivative agrees with the finite-difference oracle") {
    const ThermoState s(10.0, 0.0);
    CHECK(f_log(s, 2.0, 3) == doctest::Approx(frozen::kLogKernel3Beta10Dx2).epsilon(1e-7));
    CHECK(f_log(s, 2.0, 3) == doctest::Approx(oracle::fd_log_kernel(10.0, 0.0, 2.0, 3)).epsilon(1e-7));
    CHECK(f_log(s, 0.05, 2) == doctest::Approx(frozen::kLogKernel2Beta10Dx05).epsilon(1e-7));
    for (double xi : {-0.4, 0.1, 0.9})
        for (int l = 1; l <= 3; ++l)
            CHECK(f_log(s, xi, l) == doctest::Approx(oracle::fd_log_kernel(10.0, 0.0, xi, l)).epsilon(1e-7));
}

TEST_CASE("kernels stay finite far in the tails") {
    const ThermoState s(100.0, 0.0);
    for (double xi : {-50.0, 50.0, 1e4, -1e4}) {
        for (int l = 0; l <= kMaxFermiDerivative; ++l) CHECK(std::isfinite(f_log(s, xi, l)));
    }
    CHECK(f_log(s, 50.0, 0) == 0.0);
    CHECK(f_log(s, -50.0, 0) == doctest::Approx(5000.0));
    CHECK_THROWS_AS(f_log(s, 0.0, kMaxFermiDerivative + 1), std::out_of_range);
}

TEST_CASE("the Fermi derivative integrates to one") {
    const ThermoState s(20.0, 0.0);
    const double h = 1e-3;
    double sum = 0;
    for (int i = -4000; i <= 4000; ++i) sum += -fermi_dirac_derivative(s, i * h) * (std::abs(i) == 4000 ? 0.5 : 1.0);
    CHECK(sum * h == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("integrated density of states") {
    const auto bands = GridBands::compute(named_potential("cosine3d", 2.0), PlaneWaveBasis(1), BZGrid(6));
    CHECK(ids(bands, bands.bottom() - 1.0) == 0.0);
    double prev = 0;
    for (int i = 0; i <= 40; ++i) {
        const double v = ids(bands, bands.bottom() + 0.5 * i);
        CHECK(v >= prev);
        prev = v;
    }
    CHECK(ids(bands, bands.band_max(bands.nbands() - 1)) == doctest::Approx(bands.nbands()));
}

TEST_CASE("free-electron IDS at E = 2") {
    const auto bands = GridBands::compute(FourierPotential{}, PlaneWaveBasis(3), BZGrid(32), 8);
    CHECK(ids(bands, 2.0) == doctest::Approx(free_ids(2.0)).epsilon(0.02));
}

TEST_CASE("density limits and monotonicity") {
    const auto free = GridBands::compute(FourierPotential{}, PlaneWaveBasis(1), BZGrid(16), 8);
    CHECK(density(free, ThermoState(10.0, free.bottom() - 6.0)) < 1e-25);
    CHECK(density(free, ThermoState(100.0, 0.5)) == doctest::Approx(ids(free, 0.5)).epsilon(0.01));
    const auto bands = GridBands::compute(named_potential("cosine3d", 2.0), PlaneWaveBasis(1), BZGrid(6));
    CHECK(density(bands, ThermoState(5.0, 0.4)) < density(bands, ThermoState(5.0, 0.6)));
    double prev = 0;
    for (int i = 0; i < 10; ++i) {
        const double d = density(bands, ThermoState(5.0, -2.0 + 0.5 * i));
        CHECK(d > prev);
        prev = d;
    }
    const double mu = bands.band_min(0) + 0.1;
    CHECK(std::abs(density(bands, ThermoState(200.0, mu)) - ids(bands, mu)) <= 1e-3);
}

TEST_CASE("thread count does not change the density") {
    const auto bands = GridBands::compute(named_potential("cosine3d", 2.0), PlaneWaveBasis(1), BZGrid(6), 0, 3);
    const auto serial = GridBands::compute(named_potential("cosine3d", 2.0), PlaneWaveBasis(1), BZGrid(6));
    CHECK(bands.energies() == serial.energies());
    const ThermoState s(8.0, 1.0);
    CHECK(density(bands, s, 1) == density(bands, s, 4));
}

}
