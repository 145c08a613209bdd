// blochchi: command-line driver for band structures, densities, Fermi-level classification
// and orbital susceptibilities of a periodic potential.
//
// Exit status: 0 success, 1 usage/configuration/computation error, 2 verification failure.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

#include "CLI11.hpp"
#include "bloch/asym.hpp"
#include "bloch/cache.hpp"
#include "bloch/chi.hpp"
#include "bloch/fermi.hpp"
#include "bloch/surface.hpp"
#include "config.hpp"
#include "json.hpp"
#include "json_writer.hpp"
#include "verify.hpp"

namespace {

using nlohmann::json;
using blochchi::RunConfig;
using blochchi::UsageError;

struct Session {
    RunConfig cfg;
    int threads = 1;
    std::string cache_dir;
    std::string out;

    bloch::GridBands bands(int nbands) const {
        blochchi::require_grid(cfg);
        return bloch::load_or_compute(cache_dir, cfg.potential(), cfg.basis(), cfg.bz_grid(), nbands, threads);
    }
};

std::string assembly_name(bloch::FiniteTAssembly a) {
    switch (a) {
        case bloch::FiniteTAssembly::BandSum: return "band-sum";
        case bloch::FiniteTAssembly::FermiSurface: return "fermi-surface";
        default: return "auto";
    }
}

json config_echo(const RunConfig& c) {
    json j;
    if (!c.potential_name.empty()) {
        j["potential"] = c.potential_name;
        j["amplitude"] = c.amplitude;
    } else {
        json rows = json::array();
        for (const auto& r : c.coefficients) rows.push_back({static_cast<int>(r[0]), static_cast<int>(r[1]),
                                                             static_cast<int>(r[2]), r[3], r[4]});
        j["coefficients"] = rows;
    }
    j["cutoff"] = c.cutoff;
    if (c.grid > 0) {
        j["grid"] = c.grid;
        j["shifted"] = c.shifted;
    }
    if (c.beta) j["beta"] = *c.beta;
    if (c.rho0) j["rho0"] = *c.rho0;
    if (c.mu) j["mu"] = *c.mu;
    if (c.J > 0) j["J"] = c.J;
    return j;
}

json chi_json(const bloch::ChiResult& r) {
    json j;
    j["value"] = r.value;
    j["method"] = r.method;
    j["zero_temperature"] = r.zero_temperature;
    j["N"] = r.N;
    j["J"] = r.J;
    j["tail_bound"] = r.tail_bound;
    j["grid_n"] = r.grid_n;
    j["grid_shifted"] = r.grid_shifted;
    j["cutoff_n"] = r.cutoff_n;
    if (r.zero_temperature) {
        j["fermi_energy"] = r.fermi_energy;
        if (r.method == "metal") {
            j["surface_term"] = r.surface_term;
            j["volume_term"] = r.volume_term;
        } else {
            j["band_terms"] = r.band_terms;
        }
    } else {
        j["beta"] = r.beta;
        j["mu"] = r.mu;
        j["assembly_mismatch"] = r.assembly_mismatch;
    }
    j["max_discarded_imaginary"] = r.max_imag;
    return j;
}

json classification_json(const bloch::FermiClassification& c) {
    json j;
    j["variant"] = c.is_sc() ? "SC" : "Metal";
    j["N"] = c.N;
    j["tol_gap"] = c.tol_gap;
    if (c.is_sc()) {
        j["E_F"] = c.E_F;
        j["a_N"] = c.a_N;
        j["b_N"] = c.b_N;
    } else {
        j["E_M"] = c.E_M;
        j["multiple_bands"] = c.multiple_bands;
    }
    json rows = json::array();
    for (const auto& g : c.gap_table)
        rows.push_back({{"band", g.band}, {"max_lower", g.max_lower}, {"min_upper", g.min_upper},
                        {"gap", g.min_upper - g.max_lower}});
    j["gap_table"] = rows;
    return j;
}

/// CSV beside the JSON output (same stem, .csv extension); skipped without an output path.
std::string write_table(const Session& s, const std::string& header, const std::vector<std::vector<double>>& rows) {
    if (s.out.empty()) return "";
    std::filesystem::path p(s.out);
    p.replace_extension(".csv");
    std::ofstream f(p);
    if (!f) throw std::runtime_error("cannot write " + p.string());
    f << header << "\n";
    char buf[40];
    for (const auto& r : rows) {
        for (std::size_t i = 0; i < r.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%.17g", r[i]);
            f << (i ? "," : "") << buf;
        }
        f << "\n";
    }
    return p.string();
}

json cmd_bands(const Session& s) {
    const auto pot = s.cfg.potential();
    const auto basis = s.cfg.basis();
    const int nb = std::min(s.cfg.nbands > 0 ? s.cfg.nbands : 8, basis.dimension());
    std::vector<std::array<double, 3>> corners = s.cfg.kpath;
    if (corners.empty()) corners = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 0, 0}, {1, 1, 1}};  // G X M G R
    std::vector<std::vector<double>> rows;
    double dist = 0;
    bloch::Vec3 prev{};
    for (std::size_t seg = 0; seg + 1 < corners.size(); ++seg)
        for (int i = (seg == 0 ? 0 : 1); i <= s.cfg.kpath_steps; ++i) {
            const double t = static_cast<double>(i) / s.cfg.kpath_steps;
            bloch::Vec3 k;
            for (int a = 0; a < 3; ++a)
                k[a] = std::numbers::pi * (corners[seg][a] + t * (corners[seg + 1][a] - corners[seg][a]));
            if (!rows.empty()) dist += std::sqrt((k[0] - prev[0]) * (k[0] - prev[0]) + (k[1] - prev[1]) * (k[1] - prev[1]) +
                                                 (k[2] - prev[2]) * (k[2] - prev[2]));
            prev = k;
            const Eigen::VectorXd e = bloch::solve_energies(pot, basis, k);
            std::vector<double> row{dist, k[0], k[1], k[2]};
            for (int j = 0; j < nb; ++j) row.push_back(e[j]);
            rows.push_back(row);
        }
    std::string header = "path,k1,k2,k3";
    for (int j = 1; j <= nb; ++j) header += ",E" + std::to_string(j);
    json r;
    r["path_points"] = rows.size();
    r["csv"] = write_table(s, header, rows);
    if (s.cfg.grid > 0) {
        const bloch::GridBands g = s.bands(nb);
        json ext = json::array();
        for (int j = 0; j < g.nbands(); ++j) ext.push_back({{"band", j + 1}, {"min", g.band_min(j)}, {"max", g.band_max(j)}});
        r["grid_extrema"] = ext;
        r["E0"] = g.bottom();
    }
    return r;
}

json cmd_ids(const Session& s) {
    const bloch::GridBands g = s.bands(s.cfg.nbands);
    std::vector<std::vector<double>> rows;
    json table = json::array();
    for (int i = 0; i < s.cfg.e_steps; ++i) {
        const double e = s.cfg.e_steps == 1 ? s.cfg.e_min
                                            : s.cfg.e_min + (s.cfg.e_max - s.cfg.e_min) * i / (s.cfg.e_steps - 1);
        const double n = bloch::ids(g, e), nt = bloch::ids_tetra(g, e);
        rows.push_back({e, n, nt});
        table.push_back({{"E", e}, {"ids", n}, {"ids_tetra", nt}});
    }
    json r;
    r["table"] = table;
    r["csv"] = write_table(s, "E,ids,ids_tetra", rows);
    return r;
}

json cmd_mu(const Session& s) {
    blochchi::require_density_or_mu(s.cfg, true);
    const bloch::GridBands g = s.bands(s.cfg.nbands);
    json r;
    if (s.cfg.rho0) {
        const double mu = bloch::solve_mu(g, *s.cfg.beta, *s.cfg.rho0, s.threads);
        r["mu"] = mu;
        r["density_at_mu"] = bloch::density(g, bloch::ThermoState(*s.cfg.beta, mu), s.threads);
    } else {
        r["mu"] = *s.cfg.mu;
        r["density_at_mu"] = bloch::density(g, bloch::ThermoState(*s.cfg.beta, *s.cfg.mu), s.threads);
    }
    return r;
}

double density_from_config(const Session& s, const bloch::GridBands& g, bool zero_temperature) {
    if (s.cfg.rho0) return *s.cfg.rho0;
    return zero_temperature ? bloch::ids_tetra(g, *s.cfg.mu)
                            : bloch::density(g, bloch::ThermoState(*s.cfg.beta, *s.cfg.mu), s.threads);
}

json cmd_classify(const Session& s) {
    blochchi::require_density_or_mu(s.cfg, false);
    const bloch::GridBands g = s.bands(s.cfg.nbands);
    const double rho0 = density_from_config(s, g, true);
    json r = classification_json(bloch::classify(g, rho0));
    r["rho0"] = rho0;
    return r;
}

json cmd_chi(const Session& s) {
    blochchi::require_density_or_mu(s.cfg, true);
    const bloch::GridBands g = s.bands(s.cfg.nbands);
    bloch::ChiOptions opt;
    opt.J = s.cfg.J;
    opt.threads = s.threads;
    opt.assembly = s.cfg.assembly;
    const double rho0 = density_from_config(s, g, false);
    json r = chi_json(bloch::chi_finite_T(g, *s.cfg.beta, rho0, opt));
    r["rho0"] = rho0;
    r["assembly_requested"] = assembly_name(s.cfg.assembly);
    return r;
}

json cmd_chi0(const Session& s) {
    blochchi::require_density_or_mu(s.cfg, false);
    const bloch::GridBands g = s.bands(s.cfg.nbands);
    bloch::ChiOptions opt;
    opt.J = s.cfg.J;
    opt.threads = s.threads;
    const double rho0 = density_from_config(s, g, true);
    const bloch::FermiClassification cls = bloch::classify(g, rho0);
    json r = chi_json(bloch::chi_zero_T(g, rho0, opt));
    r["rho0"] = rho0;
    r["classification"] = classification_json(cls);
    return r;
}

json cmd_sweep(const Session& s) {
    const bloch::GridBands g = s.bands(s.cfg.nbands > 0 ? s.cfg.nbands : std::min(4, s.cfg.basis().dimension()));
    bloch::ChiOptions opt;
    opt.J = s.cfg.J;
    opt.threads = s.threads;
    const auto ladder = s.cfg.rho_ladder.empty() ? bloch::default_rho_ladder() : s.cfg.rho_ladder;
    const bloch::LandauPeierlsReport rep = bloch::landau_peierls_check(g, ladder, opt);
    json rows = json::array();
    std::vector<std::vector<double>> csv;
    for (const auto& row : rep.rows) {
        rows.push_back({{"rho0", row.rho0}, {"k_F", row.k_F}, {"chi", row.chi}, {"chi_over_kF", row.chi_over_kF},
                        {"prediction", row.prediction}});
        csv.push_back({row.rho0, row.k_F, row.chi, row.chi_over_kF, row.prediction});
    }
    json r;
    r["m_star"] = rep.mass.m_star;
    r["s_coeff"] = bloch::fermi_coefficient(rep.mass);
    r["rows"] = rows;
    r["chi_slope"] = rep.slope;
    r["lp_prediction"] = rep.prediction;
    r["relative_error"] = rep.relative_error();
    r["csv"] = write_table(s, "rho0,k_F,chi,chi_over_kF,prediction", csv);
    return r;
}

json cmd_verify(const Session& s, bool& passed) {
    const auto checks = blochchi::run_verify(s.cfg, s.threads);
    json arr = json::array();
    passed = true;
    for (const auto& c : checks) {
        arr.push_back({{"name", c.name}, {"passed", c.passed}, {"max_error", c.max_error}, {"tolerance", c.tolerance},
                       {"samples", c.samples}});
        passed = passed && c.passed;
    }
    json r;
    r["checks"] = arr;
    r["passed"] = passed;
    return r;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Orbital magnetic susceptibility of Bloch electrons"};
    app.require_subcommand(1);
    std::string config_path, out, cache;
    int threads = 1;
    bool no_cache = false;
    app.add_option("--config", config_path, "JSON run configuration")->required()->check(CLI::ExistingFile);
    app.add_option("--threads", threads, "worker threads (results do not depend on it)")->check(CLI::Range(1, 1024));
    app.add_option("--out", out, "write the JSON record here (CSV tables go beside it)");
    app.add_option("--cache", cache, "band-energy cache directory");
    app.add_flag("--no-cache", no_cache, "disable the band-energy cache");

    const std::pair<const char*, const char*> commands[] = {
        {"bands", "band energies along a k-path (and grid extrema)"},
        {"ids", "integrated density of states over an energy ladder"},
        {"mu", "chemical potential at fixed density (or density at fixed mu)"},
        {"classify", "zero-temperature Fermi energy classification"},
        {"chi", "finite-temperature susceptibility"},
        {"chi0", "zero-temperature susceptibility (semiconductor or metal limit)"},
        {"sweep", "Landau-Peierls low-density ladder"},
        {"verify", "invariant suite"}};
    for (const auto& [name, help] : commands) app.add_subcommand(name, help)->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    try {
        Session s;
        s.cfg = blochchi::load_config(config_path);
        s.threads = threads;
        s.cache_dir = no_cache ? "" : (!cache.empty() ? cache : s.cfg.cache_dir);
        s.out = !out.empty() ? out : s.cfg.out;

        json record;
        record["command"] = command;
        record["config"] = config_echo(s.cfg);
        bool passed = true;
        if (command == "bands") record["result"] = cmd_bands(s);
        else if (command == "ids") record["result"] = cmd_ids(s);
        else if (command == "mu") record["result"] = cmd_mu(s);
        else if (command == "classify") record["result"] = cmd_classify(s);
        else if (command == "chi") record["result"] = cmd_chi(s);
        else if (command == "chi0") record["result"] = cmd_chi0(s);
        else if (command == "sweep") record["result"] = cmd_sweep(s);
        else if (command == "verify") record["result"] = cmd_verify(s, passed);

        std::ostringstream text;
        blochchi::write_json(record, text);
        if (s.out.empty()) {
            std::cout << text.str();
        } else {
            std::ofstream f(s.out);
            if (!f) throw std::runtime_error("cannot write " + s.out);
            f << text.str();
        }
        return passed ? 0 : 2;
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error (" << command << "): " << e.what() << "\n";
        return 1;
    }
}
