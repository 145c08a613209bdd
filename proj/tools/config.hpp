#pragma once
/// Run configuration: one flat JSON object per run.

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "bloch/chi.hpp"
#include "bloch/potential.hpp"

namespace blochchi {

/// Configuration or command-line misuse; reported with exit status 1.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Tolerances {
    double sum_rule = 1e-6;      ///< relative, band velocity vs finite difference
    double hessian = 1e-5;       ///< relative, sum-rule Hessian vs finite difference
    double residue = 1e-9;       ///< absolute, residue engine vs contour quadrature
    double dual_path = 1e-8;     ///< absolute, explicit vs residue coefficients
    double band_bottom = 1e-8;   ///< |F_1(0)|
    double gauge = 1e-10;        ///< relative change of coefficients under a random gauge
    double vanishing = 1e-12;    ///< l = 4 coefficient bucket
};

struct RunConfig {
    // Potential: either a named fixture (+ amplitude) or inline coefficients.
    std::string potential_name;
    double amplitude = 0.0;
    std::vector<std::array<double, 5>> coefficients;  ///< n1, n2, n3, Re, Im

    int cutoff = -1;
    int grid = 0;
    bool shifted = false;
    int nbands = 0;  ///< stored bands (0 = all)

    std::optional<double> beta, rho0, mu;
    int J = 0;
    bloch::FiniteTAssembly assembly = bloch::FiniteTAssembly::Auto;

    // ids ladder
    double e_min = 0.0, e_max = 1.0;
    int e_steps = 11;
    // bands along a path (corner list in units of pi) and points per segment
    std::vector<std::array<double, 3>> kpath;
    int kpath_steps = 20;
    // sweep
    std::vector<double> rho_ladder;
    // verify
    std::uint64_t seed = 20240601;
    int verify_points = 5;
    int verify_bands = 4;

    Tolerances tol;
    std::string cache_dir;
    std::string out;

    bloch::FourierPotential potential() const;
    bloch::PlaneWaveBasis basis() const;
    bloch::BZGrid bz_grid() const;
};

/// Parses and validates a configuration file. Throws UsageError with line/column diagnostics.
RunConfig load_config(const std::string& path);
RunConfig parse_config(const std::string& text, const std::string& origin = "<config>");

/// Requires a grid; for thermodynamic commands also exactly one of rho0 / mu (and beta if
/// needs_beta). Throws UsageError naming the conflict.
void require_grid(const RunConfig& c);
void require_density_or_mu(const RunConfig& c, bool needs_beta);

}  // namespace blochchi
