#include "bloch/residue.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace bloch {

int PoleSpec::total_multiplicity() const {
    int m = 0;
    for (const auto& p : poles) m += p.multiplicity;
    return m;
}

void residue_weights(const Pole* poles, int count, DerivativeWeights* out) {
    static const auto inv_factorial = [] {
        std::array<double, kMaxTotalMultiplicity> f{};
        double x = 1.0;
        for (int i = 0; i < kMaxTotalMultiplicity; ++i) {
            if (i > 0) x *= i;
            f[i] = 1.0 / x;
        }
        return f;
    }();
    for (int p = 0; p < count; ++p) {
        const int m = poles[p].multiplicity;
        if (m < 1 || m > kMaxTotalMultiplicity)
            throw std::out_of_range("pole of order " + std::to_string(m) + " needs a derivative of f beyond order " +
                                    std::to_string(kMaxFermiDerivative));
        // g(t) = prod_{q != p} (d_q - t)^{-m_q}, truncated at order m - 1.
        std::array<double, kMaxTotalMultiplicity> g{};
        g[0] = 1.0;
        for (int q = 0; q < count; ++q) {
            if (q == p) continue;
            const double d = poles[q].energy - poles[p].energy;
            const int mq = poles[q].multiplicity;
            // (d - t)^{-mq} = d^{-mq} sum_n binom(mq + n - 1, n) (t/d)^n
            std::array<double, kMaxTotalMultiplicity> s{};
            const double inv = 1.0 / d;
            double lead = std::pow(inv, mq), binom = 1.0;
            for (int n = 0; n < m; ++n) {
                s[n] = binom * lead;
                binom = binom * (mq + n) / (n + 1);
                lead *= inv;
            }
            std::array<double, kMaxTotalMultiplicity> r{};
            for (int a = 0; a < m; ++a)
                for (int b = 0; a + b < m; ++b) r[a + b] += g[a] * s[b];
            g = r;
        }
        DerivativeWeights& w = out[p];
        w.fill(0.0);
        const double sign = (m % 2 == 0) ? 1.0 : -1.0;
        for (int l = 0; l < m; ++l) w[l] = sign * g[m - 1 - l] * inv_factorial[l];
    }
}

std::vector<DerivativeWeights> residue_weights(const PoleSpec& spec) {
    std::vector<DerivativeWeights> w(spec.poles.size());
    residue_weights(spec.poles.data(), static_cast<int>(spec.poles.size()), w.data());
    return w;
}

ResidueResult contour_integral(const ThermoState& state, const PoleSpec& spec) {
    const auto w = residue_weights(spec);
    ResidueResult r;
    for (std::size_t p = 0; p < spec.poles.size(); ++p) {
        PoleContribution c{static_cast<int>(p), w[p], {}};
        c.value.fill(0.0);
        for (int l = 0; l < spec.poles[p].multiplicity; ++l) {
            c.value[l] = w[p][l] * f_log(state, spec.poles[p].energy, l);
            r.value += c.value[l];
        }
        r.per_pole.push_back(c);
    }
    return r;
}

PoleSpec merge_poles(const std::vector<std::pair<double, int>>& raw, double eps) {
    if (eps < 0) throw std::invalid_argument("merge tolerance must be >= 0");
    std::vector<std::pair<double, int>> s(raw);
    std::sort(s.begin(), s.end());
    PoleSpec out;
    std::size_t i = 0;
    while (i < s.size()) {
        std::size_t j = i + 1;
        while (j < s.size() && s[j].first - s[j - 1].first <= eps) ++j;
        double weighted = 0.0;
        int m = 0;
        for (std::size_t t = i; t < j; ++t) {
            weighted += s[t].first * s[t].second;
            m += s[t].second;
        }
        out.poles.push_back({weighted / m, m});
        i = j;
    }
    return out;
}

}  // namespace bloch
