#include <cmath>

#include "bloch/bz.hpp"
#include "bloch/chi.hpp"
#include "bloch/fermi.hpp"
#include "bloch/potential.hpp"
#include "contour_oracle.hpp"
#include "doctest.h"
#include "finite_difference.hpp"
#include "frozen_values.hpp"
#include "matrix_oracle.hpp"

using namespace bloch;

TEST_SUITE("oracles") {

TEST_CASE("contour quadrature reproduces closed-form poles") {
    const ThermoState s(10.0, 0.3);
    const auto simple = oracle::scalar_contour_integral(10.0, 0.3, {{0.5, 1}});
    CHECK(simple.converged);
    CHECK(std::abs(simple.value + f_log(s, 0.5, 0)) < 1e-12);
    const auto quad = oracle::scalar_contour_integral(10.0, 0.3, {{0.5, 4}});
    CHECK(std::abs(quad.value - f_log(s, 0.5, 3) / 6.0) < 1e-10);
}

TEST_CASE("contour quadrature reproduces its frozen values") {
    CHECK(oracle::scalar_contour_integral(5.0, 0.0, {{-0.7, 2}, {0.4, 1}, {1.3, 1}, {2.6, 1}}).value ==
          doctest::Approx(frozen::kContourFourPolesBeta5).epsilon(1e-12));
    CHECK(oracle::scalar_contour_integral(100.0, 0.5, {{0.2, 2}, {0.9, 1}}, 1e-11, 20000).value ==
          doctest::Approx(frozen::kContourNarrowBeta100).epsilon(1e-12));
}

TEST_CASE("finite-difference kernel derivatives") {
    const ThermoState s(3.0, 0.0);
    CHECK(oracle::fd_log_kernel(3.0, 0.0, 0.4, 1) == doctest::Approx(-3.0 * fermi_dirac(s, 0.4)).epsilon(1e-10));
    CHECK(oracle::fd_log_kernel(10.0, 0.0, 2.0, 3) == doctest::Approx(frozen::kLogKernel3Beta10Dx2).epsilon(1e-12));
    CHECK_THROWS_AS(oracle::fd_log_kernel(1.0, 0.0, 0.0, 4), std::invalid_argument);
}

TEST_CASE("finite-difference band derivatives of free electrons") {
    const Vec3 k{0.3, 0.2, -0.1};
    const PlaneWaveBasis basis(0);
    CHECK(oracle::fd_band_velocity(FourierPotential{}, basis, k, 0, 0) == doctest::Approx(0.3).epsilon(1e-9));
    CHECK(oracle::fd_band_hessian(FourierPotential{}, basis, k, 0, 1, 1) == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(std::abs(oracle::fd_band_hessian(FourierPotential{}, basis, k, 0, 0, 2)) < 1e-8);
}

TEST_CASE("resolvent-trace oracle: free electrons are diamagnetic and the quadrature is converged") {
    const PlaneWaveBasis basis(0);
    // the grid must resolve the Fermi sphere (k_F ~ 0.53); at 4^3 or 8^3 the sum is not yet diamagnetic
    const BZGrid grid(12, true);
    const auto bands = GridBands::compute(FourierPotential{}, basis, grid);
    ChiOptions opt;
    opt.assembly = FiniteTAssembly::BandSum;
    const auto lib = chi_finite_T(bands, 10.0, 0.02, opt);
    const double mu = lib.mu;
    const auto a = oracle::matrix_contour_chi(FourierPotential{}, basis, grid, 10.0, mu);
    const auto b = oracle::matrix_contour_chi(FourierPotential{}, basis, grid, 10.0, mu, 1e-14, 20000);
    REQUIRE(a.converged);
    REQUIRE(b.converged);
    CHECK(a.value < 0);
    CHECK(std::abs(a.value - b.value) < 1e-8 * std::abs(b.value));
    CHECK(lib.value == doctest::Approx(a.value).epsilon(1e-9));
}

}
