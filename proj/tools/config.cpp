#include "config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace blochchi {

namespace {

using nlohmann::json;

std::string location(const std::string& text, std::size_t byte) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

double number(const json& j, const std::string& key) {
    if (!j.is_number()) throw UsageError("config key '" + key + "' must be a number");
    return j.get<double>();
}

int integer(const json& j, const std::string& key) {
    if (!j.is_number_integer()) throw UsageError("config key '" + key + "' must be an integer");
    return j.get<int>();
}

double positive(const json& j, const std::string& key) {
    const double v = number(j, key);
    if (!(v > 0.0)) throw UsageError("config key '" + key + "' must be positive");
    return v;
}

}  // namespace

bloch::FourierPotential RunConfig::potential() const {
    if (!potential_name.empty()) return bloch::named_potential(potential_name, amplitude);
    bloch::FourierPotential pot;
    for (const auto& c : coefficients)
        pot.set({static_cast<int>(c[0]), static_cast<int>(c[1]), static_cast<int>(c[2])}, {c[3], c[4]});
    const auto report = bloch::validate(pot);
    if (!report.ok()) throw UsageError("inline potential is invalid at G = (" + std::to_string(report.violations.front().g.n1) + ", " +
                         std::to_string(report.violations.front().g.n2) + ", " +
                         std::to_string(report.violations.front().g.n3) + "): " + report.violations.front().reason);
    return pot;
}

bloch::PlaneWaveBasis RunConfig::basis() const { return bloch::PlaneWaveBasis(cutoff); }

bloch::BZGrid RunConfig::bz_grid() const { return bloch::BZGrid(grid, shifted); }

RunConfig parse_config(const std::string& text, const std::string& origin) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw UsageError(origin + ": JSON syntax error at " + location(text, e.byte > 0 ? e.byte - 1 : 0) + ": " +
                         e.what());
    }
    if (!j.is_object()) throw UsageError(origin + ": top level must be a JSON object");

    static const std::set<std::string> known = {
        "potential", "amplitude", "coefficients", "cutoff", "grid",  "shifted",     "nbands",
        "beta",      "rho0",      "mu",           "J",      "assembly", "e_min",    "e_max",
        "e_steps",   "kpath",     "kpath_steps",  "rho_ladder", "seed", "verify_points", "verify_bands",
        "tolerances", "cache",    "out"};
    for (const auto& [key, value] : j.items())
        if (!known.count(key)) throw UsageError(origin + ": unknown config key '" + key + "'");

    RunConfig c;
    if (j.contains("potential")) {
        if (!j["potential"].is_string()) throw UsageError("config key 'potential' must be a fixture name");
        c.potential_name = j["potential"].get<std::string>();
    }
    if (j.contains("amplitude")) c.amplitude = number(j["amplitude"], "amplitude");
    if (j.contains("coefficients")) {
        if (!j["coefficients"].is_array()) throw UsageError("config key 'coefficients' must be an array");
        for (const auto& row : j["coefficients"]) {
            if (!row.is_array() || row.size() != 5)
                throw UsageError("each coefficient must be [n1, n2, n3, re, im]");
            std::array<double, 5> v{};
            for (int i = 0; i < 3; ++i) v[i] = integer(row[i], "coefficients");
            for (int i = 3; i < 5; ++i) v[i] = number(row[i], "coefficients");
            c.coefficients.push_back(v);
        }
    }
    if (c.potential_name.empty() == c.coefficients.empty())
        throw UsageError(origin + ": give exactly one of 'potential' (fixture name) or 'coefficients'");
    if (!j.contains("cutoff")) throw UsageError(origin + ": 'cutoff' is required");
    c.cutoff = integer(j["cutoff"], "cutoff");
    if (c.cutoff < 0) throw UsageError("config key 'cutoff' must be >= 0");
    if (j.contains("grid")) {
        c.grid = integer(j["grid"], "grid");
        if (c.grid < 1) throw UsageError("config key 'grid' must be >= 1");
    }
    if (j.contains("shifted")) {
        if (!j["shifted"].is_boolean()) throw UsageError("config key 'shifted' must be true or false");
        c.shifted = j["shifted"].get<bool>();
    }
    if (j.contains("nbands")) c.nbands = integer(j["nbands"], "nbands");
    if (j.contains("beta")) c.beta = positive(j["beta"], "beta");
    if (j.contains("rho0")) c.rho0 = positive(j["rho0"], "rho0");
    if (j.contains("mu")) c.mu = number(j["mu"], "mu");
    if (j.contains("J")) c.J = integer(j["J"], "J");
    if (j.contains("assembly")) {
        const std::string a = j["assembly"].is_string() ? j["assembly"].get<std::string>() : "";
        if (a == "auto")
            c.assembly = bloch::FiniteTAssembly::Auto;
        else if (a == "band-sum")
            c.assembly = bloch::FiniteTAssembly::BandSum;
        else if (a == "fermi-surface")
            c.assembly = bloch::FiniteTAssembly::FermiSurface;
        else
            throw UsageError("config key 'assembly' must be \"auto\", \"band-sum\" or \"fermi-surface\"");
    }
    if (j.contains("e_min")) c.e_min = number(j["e_min"], "e_min");
    if (j.contains("e_max")) c.e_max = number(j["e_max"], "e_max");
    if (j.contains("e_steps")) c.e_steps = integer(j["e_steps"], "e_steps");
    if (c.e_steps < 1 || c.e_max < c.e_min) throw UsageError("energy ladder needs e_steps >= 1 and e_max >= e_min");
    if (j.contains("kpath")) {
        for (const auto& p : j["kpath"]) {
            if (!p.is_array() || p.size() != 3) throw UsageError("each kpath corner must be [k1, k2, k3] (units of pi)");
            c.kpath.push_back({number(p[0], "kpath"), number(p[1], "kpath"), number(p[2], "kpath")});
        }
        if (c.kpath.size() < 2) throw UsageError("kpath needs at least two corners");
    }
    if (j.contains("kpath_steps")) c.kpath_steps = integer(j["kpath_steps"], "kpath_steps");
    if (c.kpath_steps < 1) throw UsageError("config key 'kpath_steps' must be >= 1");
    if (j.contains("rho_ladder")) {
        if (!j["rho_ladder"].is_array()) throw UsageError("config key 'rho_ladder' must be an array");
        for (const auto& r : j["rho_ladder"]) c.rho_ladder.push_back(positive(r, "rho_ladder"));
    }
    if (j.contains("seed")) {
        if (!j["seed"].is_number_unsigned()) throw UsageError("config key 'seed' must be a non-negative integer");
        c.seed = j["seed"].get<std::uint64_t>();
    }
    if (j.contains("verify_points")) c.verify_points = integer(j["verify_points"], "verify_points");
    if (j.contains("verify_bands")) c.verify_bands = integer(j["verify_bands"], "verify_bands");
    if (c.verify_points < 1 || c.verify_bands < 1) throw UsageError("verify_points and verify_bands must be >= 1");
    if (j.contains("tolerances")) {
        const json& t = j["tolerances"];
        if (!t.is_object()) throw UsageError("config key 'tolerances' must be an object");
        const std::pair<const char*, double*> slots[] = {
            {"sum_rule", &c.tol.sum_rule}, {"hessian", &c.tol.hessian},       {"residue", &c.tol.residue},
            {"dual_path", &c.tol.dual_path}, {"band_bottom", &c.tol.band_bottom}, {"gauge", &c.tol.gauge},
            {"vanishing", &c.tol.vanishing}};
        for (const auto& [key, value] : t.items()) {
            bool found = false;
            for (const auto& [name, slot] : slots)
                if (key == name) {
                    *slot = positive(value, "tolerances." + key);
                    found = true;
                }
            if (!found) throw UsageError(origin + ": unknown tolerance '" + key + "'");
        }
    }
    if (j.contains("cache")) {
        if (!j["cache"].is_string()) throw UsageError("config key 'cache' must be a directory path");
        c.cache_dir = j["cache"].get<std::string>();
    }
    if (j.contains("out")) {
        if (!j["out"].is_string()) throw UsageError("config key 'out' must be a file path");
        c.out = j["out"].get<std::string>();
    }
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot read config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path);
}

void require_grid(const RunConfig& c) {
    if (c.grid < 1) throw UsageError("this command needs 'grid' (points per axis) in the config");
}

void require_density_or_mu(const RunConfig& c, bool needs_beta) {
    if (c.rho0 && c.mu)
        throw UsageError("config sets both 'rho0' and 'mu'; thermodynamic commands need exactly one of them");
    if (!c.rho0 && !c.mu) throw UsageError("config sets neither 'rho0' nor 'mu'; give exactly one of them");
    if (needs_beta && !c.beta) throw UsageError("this command needs 'beta' in the config");
}

}  // namespace blochchi
