#include "bloch/asym.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <stdexcept>

#include <Eigen/Dense>

namespace bloch {

EffectiveMass effective_mass(const FourierPotential& pot, const PlaneWaveBasis& basis) {
    const FiberSolution sol = solve(pot, basis, {0.0, 0.0, 0.0});
    EffectiveMass m;
    m.hessian = band_hessian(sol, 0);
    Eigen::Matrix3d h;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) h(i, j) = m.hessian[i][j];
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(h);
    // Descending curvature = ascending mass.
    for (int i = 0; i < 3; ++i) {
        const double lam = es.eigenvalues()[2 - i];
        if (!(lam > 0.0)) throw std::domain_error("band bottom Hessian is not positive definite");
        m.m_star[i] = 1.0 / lam;
        for (int x = 0; x < 3; ++x) m.axes[i][x] = es.eigenvectors()(x, 2 - i);
    }
    return m;
}

double fermi_coefficient(const EffectiveMass& m) {
    return 0.5 * std::pow(6.0 * std::numbers::pi * std::numbers::pi, 2.0 / 3.0) /
           std::cbrt(m.m_star[0] * m.m_star[1] * m.m_star[2]);
}

double landau_peierls_prediction(const EffectiveMass& m) {
    // Field along k_3: the masses of the plane (1, 2) enter the denominator.
    return -std::cbrt(m.m_star[0] * m.m_star[1] * m.m_star[2]) /
           (24.0 * std::numbers::pi * std::numbers::pi * m.m_star[0] * m.m_star[1]);
}

double fermi_wavevector(double rho0) { return std::cbrt(6.0 * std::numbers::pi * std::numbers::pi * rho0); }

FermiEnergyFit fermi_energy_expansion(const GridBands& bands, const std::vector<double>& rho_ladder) {
    if (rho_ladder.size() < 2) throw std::invalid_argument("the fit needs at least two densities");
    FermiEnergyFit fit;
    fit.E0 = bands.bottom();
    const bool quadratic = rho_ladder.size() >= 4;
    const int cols = quadratic ? 3 : 2;
    Eigen::MatrixXd X(rho_ladder.size(), cols);
    Eigen::VectorXd y(rho_ladder.size());
    for (std::size_t i = 0; i < rho_ladder.size(); ++i) {
        const FermiClassification c = classify(bands, rho_ladder[i]);
        if (c.is_sc() || c.N != 1)
            throw std::runtime_error("density " + std::to_string(rho_ladder[i]) + " is not a band-1 metal");
        const double x = std::pow(rho_ladder[i], 2.0 / 3.0);
        X(i, 0) = 1.0;
        X(i, 1) = x;
        if (quadratic) X(i, 2) = x * x;
        y[i] = c.E_M - fit.E0;
        fit.rho.push_back(rho_ladder[i]);
        fit.E_M.push_back(c.E_M);
    }
    const Eigen::VectorXd coef = X.colPivHouseholderQr().solve(y);
    fit.offset = coef[0];
    fit.s = coef[1];
    fit.t = quadratic ? coef[2] : 0.0;
    return fit;
}

FermiEnergyFit fermi_energy_expansion(const FourierPotential& pot, const PlaneWaveBasis& basis, const BZGrid& grid,
                                      const std::vector<double>& rho_ladder) {
    return fermi_energy_expansion(GridBands::compute(pot, basis, grid, std::min(4, basis.dimension())), rho_ladder);
}

double LandauPeierlsReport::relative_error() const { return std::abs(slope - prediction) / std::abs(prediction); }

std::vector<double> default_rho_ladder() { return {1e-3, 5e-4, 2e-4}; }

LandauPeierlsReport landau_peierls_check(const GridBands& bands, const std::vector<double>& rho_ladder,
                                         const ChiOptions& opt) {
    if (rho_ladder.size() < 2) throw std::invalid_argument("the slope needs at least two densities");
    LandauPeierlsReport rep;
    rep.mass = effective_mass(bands.potential(), bands.basis());
    rep.prediction = landau_peierls_prediction(rep.mass);
    for (double rho : rho_ladder) {
        const ChiResult chi = chi_zero_T_metal(bands, rho, opt);
        const double kf = fermi_wavevector(rho);
        rep.rows.push_back({rho, kf, chi.value, chi.value / kf, rep.prediction});
    }
    std::vector<LandauPeierlsRow> sorted = rep.rows;
    std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.rho0 < b.rho0; });
    const double k1 = sorted[0].k_F, k2 = sorted[1].k_F;
    rep.slope = (k2 * k2 * sorted[0].chi_over_kF - k1 * k1 * sorted[1].chi_over_kF) / (k2 * k2 - k1 * k1);
    return rep;
}

LandauPeierlsReport landau_peierls_check(const FourierPotential& pot, const PlaneWaveBasis& basis, const BZGrid& grid,
                                         const std::vector<double>& rho_ladder, int J) {
    ChiOptions opt;
    opt.J = J;
    return landau_peierls_check(GridBands::compute(pot, basis, grid, std::min(4, basis.dimension())), rho_ladder,
                                opt);
}

void write_csv(const LandauPeierlsReport& report, std::ostream& out) {
    out << "rho0,k_F,chi,chi_over_kF,prediction\n" << std::setprecision(17);
    for (const auto& r : report.rows)
        out << r.rho0 << ',' << r.k_F << ',' << r.chi << ',' << r.chi_over_kF << ',' << r.prediction << '\n';
}

}  // namespace bloch
