#pragma once
/// Globally adaptive 15-point Gauss-Kronrod quadrature of a complex-valued function along a
/// straight segment of the complex plane. Generic over the real type so the scalar contour
/// oracle can run in quadruple precision.

#include <algorithm>
#include <cmath>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace oracle {

template <class Real, class Cx>
struct SegmentResult {
    Cx value{};
    Real error = 0;
    int intervals = 0;
    bool converged = false;
};

/// int_a^b g(xi) d xi along the segment a -> b, refined until the summed Kronrod-Gauss
/// difference is below abs_tol or max_intervals is reached.
template <class Real, class Cx, class G>
SegmentResult<Real, Cx> integrate_segment(const G& g, const Cx& a, const Cx& b, Real abs_tol, int max_intervals) {
    using GK = boost::math::quadrature::gauss_kronrod<Real, 15>;
    using GL = boost::math::quadrature::gauss<Real, 7>;
    const auto& xk = GK::abscissa();
    const auto& wk = GK::weights();
    const auto& wg = GL::weights();
    const Cx dir = b - a;

    struct Piece {
        Real lo, hi;
        Cx value;
        Real err;
    };
    auto rule = [&](Real lo, Real hi) {
        const Real c = (lo + hi) / 2, r = (hi - lo) / 2;
        Cx k{}, gs{};
        for (std::size_t i = 0; i < xk.size(); ++i) {
            if (i == 0) {
                const Cx v = g(a + dir * Cx(c));
                k = k + v * Cx(wk[0]);
                gs = gs + v * Cx(wg[0]);
                continue;
            }
            const Cx v1 = g(a + dir * Cx(c + r * xk[i]));
            const Cx v2 = g(a + dir * Cx(c - r * xk[i]));
            k = k + (v1 + v2) * Cx(wk[i]);
            if (i % 2 == 0) gs = gs + (v1 + v2) * Cx(wg[i / 2]);
        }
        const Cx scale = dir * Cx(r);
        k = k * scale;
        gs = gs * scale;
        using std::abs;
        return Piece{lo, hi, k, abs(k - gs)};
    };

    std::vector<Piece> pieces{rule(Real(0), Real(1))};
    SegmentResult<Real, Cx> out;
    for (;;) {
        Real total = 0;
        std::size_t worst = 0;
        for (std::size_t i = 0; i < pieces.size(); ++i) {
            total += pieces[i].err;
            if (pieces[i].err > pieces[worst].err) worst = i;
        }
        out.error = total;
        if (total <= abs_tol) {
            out.converged = true;
            break;
        }
        if (static_cast<int>(pieces.size()) >= max_intervals) break;
        const Piece p = pieces[worst];
        const Real mid = (p.lo + p.hi) / 2;
        pieces[worst] = rule(p.lo, mid);
        pieces.push_back(rule(mid, p.hi));
    }
    // Sum the pieces in position order so the result does not depend on the refinement history.
    std::sort(pieces.begin(), pieces.end(), [](const Piece& x, const Piece& y) { return x.lo < y.lo; });
    for (const auto& p : pieces) out.value = out.value + p.value;
    out.intervals = static_cast<int>(pieces.size());
    return out;
}

}  // namespace oracle
