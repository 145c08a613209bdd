#include "bloch/potential.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numbers>
#include <stdexcept>

namespace bloch {

int ReciprocalVector::norm_inf() const {
    return std::max({std::abs(n1), std::abs(n2), std::abs(n3)});
}

double ReciprocalVector::cart(int alpha) const {
    const int n = alpha == 0 ? n1 : (alpha == 1 ? n2 : n3);
    return 2.0 * std::numbers::pi * n;
}

void FourierPotential::set(const ReciprocalVector& g, cplx value) {
    if (value == cplx(0.0, 0.0))
        coeffs_.erase(g);
    else
        coeffs_[g] = value;
}

cplx FourierPotential::coefficient(const ReciprocalVector& g) const {
    auto it = coeffs_.find(g);
    return it == coeffs_.end() ? cplx(0.0, 0.0) : it->second;
}

int FourierPotential::support_radius() const {
    int r = 0;
    for (const auto& [g, v] : coeffs_) r = std::max(r, g.norm_inf());
    return r;
}

bool FourierPotential::is_constant() const {
    for (const auto& [g, v] : coeffs_)
        if (g.norm_inf() != 0) return false;
    return true;
}

std::uint64_t FourierPotential::hash() const {
    std::uint64_t h = 1469598103934665603ULL;
    auto mix = [&h](const void* p, std::size_t n) {
        const auto* b = static_cast<const unsigned char*>(p);
        for (std::size_t i = 0; i < n; ++i) {
            h ^= b[i];
            h *= 1099511628211ULL;
        }
    };
    for (const auto& [g, v] : coeffs_) {
        const std::int32_t n[3] = {g.n1, g.n2, g.n3};
        const double re = v.real(), im = v.imag();
        mix(n, sizeof n);
        mix(&re, sizeof re);
        mix(&im, sizeof im);
    }
    return h;
}

ValidationReport validate(const FourierPotential& pot) {
    ValidationReport rep;
    for (const auto& [g, v] : pot.coefficients()) {
        const double tol = 1e-14 * std::max(1.0, std::abs(v));
        if (g.norm_inf() == 0) {
            if (std::abs(v.imag()) > tol) rep.violations.push_back({g, v, "G = 0 coefficient is not real"});
            continue;
        }
        const cplx partner = pot.coefficient(-g);
        if (std::abs(partner - std::conj(v)) > tol) {
            // Report each broken pair once, at the position whose value is wrong or missing.
            if (pot.coefficients().count(-g) == 0 || g < -g)
                rep.violations.push_back({-g, partner, "Hermitian partner V(-G) != conj(V(G))"});
        }
    }
    return rep;
}

cplx evaluate_realspace_complex(const FourierPotential& pot, const std::array<double, 3>& x) {
    cplx s(0.0, 0.0);
    for (const auto& [g, v] : pot.coefficients()) {
        const double phase = 2.0 * std::numbers::pi * (g.n1 * x[0] + g.n2 * x[1] + g.n3 * x[2]);
        s += v * cplx(std::cos(phase), std::sin(phase));
    }
    return s;
}

double evaluate_realspace(const FourierPotential& pot, const std::array<double, 3>& x) {
    return evaluate_realspace_complex(pot, x).real();
}

FourierPotential named_potential(const std::string& name, double amplitude) {
    FourierPotential pot;
    auto add_cosines = [&pot](double a) {
        for (int axis = 0; axis < 3; ++axis) {
            ReciprocalVector g{axis == 0, axis == 1, axis == 2};
            pot.set(g, a / 2.0);
            pot.set(-g, a / 2.0);
        }
    };
    if (name == "free") return pot;
    if (name == "cosine3d") {
        add_cosines(amplitude);
        return pot;
    }
    if (name == "separable_gap") {
        add_cosines(-(amplitude == 0.0 ? kSeparableGapDefaultAmplitude : amplitude));
        return pot;
    }
    throw std::invalid_argument("unknown potential '" + name + "' (expected free, cosine3d or separable_gap)");
}

}  // namespace bloch
