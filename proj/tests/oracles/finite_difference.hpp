#pragma once
/// Finite-difference references built only from eigenvalues (no eigenvectors, no sum rules).

#include "bloch/fiber.hpp"

namespace oracle {

/// Centered first difference of E_band along axis a with step h.
double fd_band_velocity(const bloch::FourierPotential& pot, const bloch::PlaneWaveBasis& basis, bloch::Vec3 k,
                        int band, int a, double h = 1e-4);

/// d^2 E_band / dk_a dk_b: second-difference (a == b) or 4-point mixed stencil, Richardson
/// extrapolated over steps h and 2h.
double fd_band_hessian(const bloch::FourierPotential& pot, const bloch::PlaneWaveBasis& basis, bloch::Vec3 k, int band,
                       int a, int b, double h = 1e-3);

/// l-th derivative of xi -> ln(1 + exp(beta (mu - xi))) by a 4th-order central stencil applied
/// recursively in quadruple precision (l <= 3).
double fd_log_kernel(double beta, double mu, double xi, int l, double h = 1e-3);

}  // namespace oracle
