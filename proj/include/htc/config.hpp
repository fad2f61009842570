// config.hpp: flat "key = value" run configuration.
//
// One key per line, '#' starts a comment. Every key has a default, unknown or repeated
// keys are errors, and every error carries the line it came from. All energies, rates
// and frequencies are in units of omega_v (the vibrational frequency).

#pragma once

#include <algorithm>
#include <charconv>
#include <cerrno>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <type_traits>
#include <string>
#include <vector>

#include "htc/critical.hpp"
#include "htc/eigensystem.hpp"
#include "htc/model.hpp"
#include "htc/spectra.hpp"

namespace htc {

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct RunConfig {
    ModelParams model{};
    double rabi_collective{-1.0};  // sqrt(N) Omega; overrides rabi_single when >= 0

    SolveOptions solver{};

    FrequencyGrid grid{};
    PopulationModel population{};
    LineshapeOptions lineshape{};
    AbsorptionOptions absorption{};
    double bound_broadening{0.0};
    std::vector<int> lpl_channels{0, 1};

    std::vector<int> sweep_n{1, 2, 3, 4, 5, 6};
    std::vector<double> sweep_huang_rhys{1.0};
    double bracket_lo{1.0};  // collective units sqrt(N) Omega
    double bracket_hi{4.0};
    CriticalOptions critical{};

    double ilp_min{-2.0};
    double ilp_max{2.0};
    double ilp_step{0.02};
    double sigma_p{0.5};
    std::vector<int> ilp_channels{0, 1, 2};

    bool dump_matrix{false};

    // Echo of every key with its effective value, in key order.
    std::map<std::string, std::string> values;

    ModelParams effective_model() const {
        ModelParams p = model;
        if (rabi_collective >= 0.0) p.rabi_single = rabi_collective / std::sqrt(static_cast<double>(p.n_molecules));
        return p;
    }
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline double parse_double(const std::string& v) {
    errno = 0;
    char* end = nullptr;
    const double x = std::strtod(v.c_str(), &end);
    if (v.empty() || end != v.c_str() + v.size() || errno == ERANGE || !std::isfinite(x))
        throw ConfigError("expected a finite number, got '" + v + "'");
    return x;
}

inline long parse_long(const std::string& v) {
    errno = 0;
    char* end = nullptr;
    const long x = std::strtol(v.c_str(), &end, 10);
    if (v.empty() || end != v.c_str() + v.size() || errno == ERANGE) throw ConfigError("expected an integer, got '" + v + "'");
    return x;
}

inline int parse_int(const std::string& v, long lo = 0) {
    const long x = parse_long(v);
    if (x < lo || x > 1000000000L) throw ConfigError("integer " + v + " out of range (min " + std::to_string(lo) + ")");
    return static_cast<int>(x);
}

inline double parse_nonneg(const std::string& v) {
    const double x = parse_double(v);
    if (x < 0.0) throw ConfigError("expected a non-negative number, got '" + v + "'");
    return x;
}

inline double parse_pos(const std::string& v) {
    const double x = parse_double(v);
    if (!(x > 0.0)) throw ConfigError("expected a positive number, got '" + v + "'");
    return x;
}

inline bool parse_bool(const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("expected true or false, got '" + v + "'");
}

inline std::vector<std::string> split_list(const std::string& v) {
    std::vector<std::string> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(trim(item));
    if (out.empty() || std::any_of(out.begin(), out.end(), [](const std::string& s) { return s.empty(); }))
        throw ConfigError("expected a non-empty comma-separated list, got '" + v + "'");
    return out;
}

inline std::vector<int> parse_int_list(const std::string& v, long lo) {
    std::vector<int> out;
    for (const auto& s : split_list(v)) out.push_back(parse_int(s, lo));
    return out;
}

inline std::vector<double> parse_nonneg_list(const std::string& v) {
    std::vector<double> out;
    for (const auto& s : split_list(v)) out.push_back(parse_nonneg(s));
    return out;
}

// shortest text that parses back to the same double
inline std::string fmt(double x) {
    char buf[40];
    const auto r = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, r.ptr);
}

template <class T>
std::string join(const std::vector<T>& xs) {
    std::string s;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) s += ',';
        if constexpr (std::is_floating_point_v<T>)
            s += fmt(xs[i]);
        else
            s += std::to_string(xs[i]);
    }
    return s;
}

}  // namespace detail

struct ConfigKey {
    std::string name;
    std::string doc;
    std::function<void(RunConfig&, const std::string&)> set;
    std::function<std::string(const RunConfig&)> get;
};

inline const std::vector<ConfigKey>& config_keys() {
    using namespace detail;
    static const std::vector<ConfigKey> keys = {
        {"units", "energy unit of every frequency and rate; only omega_v is accepted",
         [](RunConfig&, const std::string& v) {
             if (v != "omega_v") throw ConfigError("only 'omega_v' is supported, got '" + v + "'");
         },
         [](const RunConfig&) { return std::string("omega_v"); }},
        {"n_molecules", "number of molecules N",
         [](RunConfig& c, const std::string& v) { c.model.n_molecules = parse_int(v, 1); },
         [](const RunConfig& c) { return std::to_string(c.model.n_molecules); }},
        {"huang_rhys", "Huang-Rhys factor lambda^2",
         [](RunConfig& c, const std::string& v) { c.model.huang_rhys = parse_nonneg(v); },
         [](const RunConfig& c) { return fmt(c.model.huang_rhys); }},
        {"vib_freq", "vibrational frequency omega_v (sets the scale; keep 1)",
         [](RunConfig& c, const std::string& v) { c.model.vib_freq = parse_pos(v); },
         [](const RunConfig& c) { return fmt(c.model.vib_freq); }},
        {"rabi_single", "single-molecule vacuum Rabi frequency Omega",
         [](RunConfig& c, const std::string& v) { c.model.rabi_single = parse_nonneg(v); },
         [](const RunConfig& c) { return fmt(c.model.rabi_single); }},
        {"rabi_collective", "collective Rabi frequency sqrt(N) Omega; negative = use rabi_single",
         [](RunConfig& c, const std::string& v) { c.rabi_collective = parse_double(v); },
         [](const RunConfig& c) { return fmt(c.rabi_collective); }},
        {"detuning", "Delta = omega_00 - omega_c",
         [](RunConfig& c, const std::string& v) { c.model.detuning = parse_double(v); },
         [](const RunConfig& c) { return fmt(c.model.detuning); }},
        {"kappa", "empty-cavity photon decay rate",
         [](RunConfig& c, const std::string& v) { c.model.kappa = parse_nonneg(v); },
         [](const RunConfig& c) { return fmt(c.model.kappa); }},
        {"gamma_e_collective", "size-enhanced fluorescence rate N gamma_e",
         [](RunConfig& c, const std::string& v) { c.model.gamma_e_collective = parse_nonneg(v); },
         [](const RunConfig& c) { return fmt(c.model.gamma_e_collective); }},
        {"nu_max", "max vibrational quanta per molecule in the excitation manifold",
         [](RunConfig& c, const std::string& v) { c.model.nu_max = parse_int(v, 0); },
         [](const RunConfig& c) { return std::to_string(c.model.nu_max); }},
        {"nu_max_ground", "max total vibrational quanta of ground-manifold final states",
         [](RunConfig& c, const std::string& v) { c.model.nu_max_ground = parse_int(v, 0); },
         [](const RunConfig& c) { return std::to_string(c.model.nu_max_ground); }},
        {"dipole_unit", "transition dipole mu",
         [](RunConfig& c, const std::string& v) { c.model.dipole_unit = parse_pos(v); },
         [](const RunConfig& c) { return fmt(c.model.dipole_unit); }},
        {"basis_cap", "largest basis allowed",
         [](RunConfig& c, const std::string& v) { c.model.basis_cap = static_cast<std::size_t>(parse_int(v, 1)); },
         [](const RunConfig& c) { return std::to_string(c.model.basis_cap); }},
        {"solver_route", "auto, site or symmetry",
         [](RunConfig& c, const std::string& v) {
             if (v == "auto") c.solver.route = SolverRoute::Auto;
             else if (v == "site") c.solver.route = SolverRoute::Site;
             else if (v == "symmetry") c.solver.route = SolverRoute::Symmetry;
             else throw ConfigError("expected auto, site or symmetry, got '" + v + "'");
         },
         [](const RunConfig& c) { return std::string(to_string(c.solver.route)); }},
        {"site_route_max_dim", "auto route uses the site basis up to this dimension",
         [](RunConfig& c, const std::string& v) { c.solver.site_route_max_dim = static_cast<std::size_t>(parse_int(v, 0)); },
         [](const RunConfig& c) { return std::to_string(c.solver.site_route_max_dim); }},
        {"degeneracy_tol", "eigenvalue clustering tolerance",
         [](RunConfig& c, const std::string& v) { c.solver.degeneracy_tol = parse_pos(v); },
         [](const RunConfig& c) { return fmt(c.solver.degeneracy_tol); }},
        {"eps_dark", "dark threshold on |mu_jG|^2/(N mu^2) and |<G|a|j>|^2",
         [](RunConfig& c, const std::string& v) { c.solver.thresholds.eps_dark = parse_pos(v); },
         [](const RunConfig& c) { return fmt(c.solver.thresholds.eps_dark); }},
        {"eps_emit", "emission threshold on F_j and photon weight",
         [](RunConfig& c, const std::string& v) { c.solver.thresholds.eps_emit = parse_pos(v); },
         [](const RunConfig& c) { return fmt(c.solver.thresholds.eps_emit); }},
        {"symmetric_min", "symmetric-sector weight needed for X and Xb",
         [](RunConfig& c, const std::string& v) { c.solver.thresholds.symmetric_min = parse_nonneg(v); },
         [](const RunConfig& c) { return fmt(c.solver.thresholds.symmetric_min); }},
        {"xb_center", "Xb window centre",
         [](RunConfig& c, const std::string& v) { c.solver.thresholds.xb_center = parse_double(v); },
         [](const RunConfig& c) { return fmt(c.solver.thresholds.xb_center); }},
        {"xb_halfwidth", "Xb window half width",
         [](RunConfig& c, const std::string& v) { c.solver.thresholds.xb_halfwidth = parse_nonneg(v); },
         [](const RunConfig& c) { return fmt(c.solver.thresholds.xb_halfwidth); }},
        {"xb_dipole_max", "upper dipole fraction of a weakly bright Xb state",
         [](RunConfig& c, const std::string& v) { c.solver.thresholds.xb_dipole_max = parse_pos(v); },
         [](const RunConfig& c) { return fmt(c.solver.thresholds.xb_dipole_max); }},
        {"grid_min", "spectral grid start",
         [](RunConfig& c, const std::string& v) { c.grid.min = parse_double(v); },
         [](const RunConfig& c) { return fmt(c.grid.min); }},
        {"grid_max", "spectral grid end",
         [](RunConfig& c, const std::string& v) { c.grid.max = parse_double(v); },
         [](const RunConfig& c) { return fmt(c.grid.max); }},
        {"grid_step", "spectral grid step",
         [](RunConfig& c, const std::string& v) { c.grid.step = parse_pos(v); },
         [](const RunConfig& c) { return fmt(c.grid.step); }},
        {"population", "uniform, gaussian or delta",
         [](RunConfig& c, const std::string& v) {
             if (v == "uniform") c.population.kind = PopulationModel::Kind::UniformWindow;
             else if (v == "gaussian") c.population.kind = PopulationModel::Kind::Gaussian;
             else if (v == "delta") c.population.kind = PopulationModel::Kind::Delta;
             else throw ConfigError("expected uniform, gaussian or delta, got '" + v + "'");
         },
         [](const RunConfig& c) {
             switch (c.population.kind) {
                 case PopulationModel::Kind::UniformWindow: return std::string("uniform");
                 case PopulationModel::Kind::Gaussian: return std::string("gaussian");
                 case PopulationModel::Kind::Delta: return std::string("delta");
             }
             return std::string("?");
         }},
        {"window_min", "uniform population lower edge (-inf allowed)",
         [](RunConfig& c, const std::string& v) {
             c.population.window_min = v == "-inf" ? -std::numeric_limits<double>::infinity() : parse_double(v);
         },
         [](const RunConfig& c) {
             return std::isinf(c.population.window_min) ? std::string("-inf") : fmt(c.population.window_min);
         }},
        {"window_max", "uniform population upper edge (highest populated polariton, estimate)",
         [](RunConfig& c, const std::string& v) { c.population.window_max = parse_double(v); },
         [](const RunConfig& c) { return fmt(c.population.window_max); }},
        {"pop_center", "gaussian population centre",
         [](RunConfig& c, const std::string& v) { c.population.center = parse_double(v); },
         [](const RunConfig& c) { return fmt(c.population.center); }},
        {"pop_width", "gaussian population standard deviation",
         [](RunConfig& c, const std::string& v) { c.population.width = parse_pos(v); },
         [](const RunConfig& c) { return fmt(c.population.width); }},
        {"pop_target", "delta population: entry index in the eigen report",
         [](RunConfig& c, const std::string& v) { c.population.target = static_cast<std::size_t>(parse_int(v, 0)); },
         [](const RunConfig& c) { return std::to_string(c.population.target); }},
        {"kappa_floor", "minimum lineshape half width (Gamma_j can be 0 or roundoff)",
         [](RunConfig& c, const std::string& v) {
             c.lineshape.kappa_floor = parse_pos(v);
             c.absorption.kappa_floor = c.lineshape.kappa_floor;
         },
         [](const RunConfig& c) { return fmt(c.lineshape.kappa_floor); }},
        {"kappa_nr", "non-radiative addition to the ground-polariton coherence decay",
         [](RunConfig& c, const std::string& v) { c.absorption.kappa_nr = parse_nonneg(v); },
         [](const RunConfig& c) { return fmt(c.absorption.kappa_nr); }},
        {"pump_strength", "pump amplitude Omega_p",
         [](RunConfig& c, const std::string& v) { c.absorption.pump_strength = parse_nonneg(v); },
         [](const RunConfig& c) { return fmt(c.absorption.pump_strength); }},
        {"bound_broadening", "fixed bound-absorption width; 0 = per-state max(Gamma_j/2 + kappa_nr, kappa_floor)",
         [](RunConfig& c, const std::string& v) { c.bound_broadening = parse_nonneg(v); },
         [](const RunConfig& c) { return fmt(c.bound_broadening); }},
        {"lpl_channels", "LPL ground-channel truncations to write, each <= nu_max_ground",
         [](RunConfig& c, const std::string& v) { c.lpl_channels = parse_int_list(v, 0); },
         [](const RunConfig& c) { return join(c.lpl_channels); }},
        {"sweep_n", "sweep-critical: molecule numbers",
         [](RunConfig& c, const std::string& v) { c.sweep_n = parse_int_list(v, 1); },
         [](const RunConfig& c) { return join(c.sweep_n); }},
        {"sweep_huang_rhys", "sweep-critical: Huang-Rhys factors",
         [](RunConfig& c, const std::string& v) { c.sweep_huang_rhys = parse_nonneg_list(v); },
         [](const RunConfig& c) { return join(c.sweep_huang_rhys); }},
        {"bracket_lo", "sweep-critical: bracket start in sqrt(N) Omega",
         [](RunConfig& c, const std::string& v) { c.bracket_lo = parse_nonneg(v); },
         [](const RunConfig& c) { return fmt(c.bracket_lo); }},
        {"bracket_hi", "sweep-critical: bracket end in sqrt(N) Omega",
         [](RunConfig& c, const std::string& v) { c.bracket_hi = parse_pos(v); },
         [](const RunConfig& c) { return fmt(c.bracket_hi); }},
        {"critical_tol", "sweep-critical: |omega| tolerance at the root",
         [](RunConfig& c, const std::string& v) { c.critical.eig_tol = parse_pos(v); },
         [](const RunConfig& c) { return fmt(c.critical.eig_tol); }},
        {"min_overlap", "sweep-critical: eigenvector overlap needed to keep tracking",
         [](RunConfig& c, const std::string& v) { c.critical.min_overlap = parse_pos(v); },
         [](const RunConfig& c) { return fmt(c.critical.min_overlap); }},
        {"scan_steps", "sweep-critical: coarse steps across the bracket",
         [](RunConfig& c, const std::string& v) { c.critical.scan_steps = parse_int(v, 1); },
         [](const RunConfig& c) { return std::to_string(c.critical.scan_steps); }},
        {"ilp_min", "sweep-ilp: first pump centre omega_p",
         [](RunConfig& c, const std::string& v) { c.ilp_min = parse_double(v); },
         [](const RunConfig& c) { return fmt(c.ilp_min); }},
        {"ilp_max", "sweep-ilp: last pump centre omega_p",
         [](RunConfig& c, const std::string& v) { c.ilp_max = parse_double(v); },
         [](const RunConfig& c) { return fmt(c.ilp_max); }},
        {"ilp_step", "sweep-ilp: pump centre step",
         [](RunConfig& c, const std::string& v) { c.ilp_step = parse_pos(v); },
         [](const RunConfig& c) { return fmt(c.ilp_step); }},
        {"sigma_p", "sweep-ilp: gaussian population width",
         [](RunConfig& c, const std::string& v) { c.sigma_p = parse_pos(v); },
         [](const RunConfig& c) { return fmt(c.sigma_p); }},
        {"ilp_channels", "sweep-ilp: ground-channel truncations",
         [](RunConfig& c, const std::string& v) { c.ilp_channels = parse_int_list(v, 0); },
         [](const RunConfig& c) { return join(c.ilp_channels); }},
        {"dump_matrix", "eig: also write the Hamiltonian as row col value triplets",
         [](RunConfig& c, const std::string& v) { c.dump_matrix = parse_bool(v); },
         [](const RunConfig& c) { return std::string(c.dump_matrix ? "true" : "false"); }},
    };
    return keys;
}

inline const ConfigKey* find_config_key(const std::string& name) {
    for (const auto& k : config_keys())
        if (k.name == name) return &k;
    return nullptr;
}

class ConfigBuilder {
public:
    // `origin` names the source in messages, e.g. "run.conf:12" or "--set".
    void apply(const std::string& key, const std::string& value, const std::string& origin) {
        const ConfigKey* k = find_config_key(key);
        if (!k) throw ConfigError(origin + ": unknown key '" + key + "'");
        if (!seen_.insert(key).second && !overrides_)
            throw ConfigError(origin + ": key '" + key + "' given more than once");
        try {
            k->set(cfg_, value);
        } catch (const ConfigError& e) {
            throw ConfigError(origin + ": key '" + key + "': " + e.what());
        }
    }

    void parse_text(std::istream& in, const std::string& source) {
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            line = detail::trim(line);
            if (line.empty()) continue;
            const std::string origin = source + ":" + std::to_string(lineno);
            const auto eq = line.find('=');
            if (eq == std::string::npos) throw ConfigError(origin + ": expected 'key = value'");
            const std::string key = detail::trim(line.substr(0, eq));
            const std::string value = detail::trim(line.substr(eq + 1));
            if (key.empty()) throw ConfigError(origin + ": missing key before '='");
            if (value.empty()) throw ConfigError(origin + ": key '" + key + "' has no value");
            apply(key, value, origin);
        }
    }

    void parse_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open config file '" + path + "'");
        parse_text(in, path);
    }

    // "key=value" from the command line; later ones win and may repeat file keys.
    void apply_override(const std::string& kv) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw ConfigError("--set: expected key=value, got '" + kv + "'");
        overrides_ = true;
        apply(detail::trim(kv.substr(0, eq)), detail::trim(kv.substr(eq + 1)), "--set " + kv);
    }

    RunConfig finish() const {
        RunConfig c = cfg_;
        if (c.rabi_collective >= 0.0 && seen_.count("rabi_single"))
            throw ConfigError("set either rabi_single or rabi_collective, not both");
        if (!(c.grid.max > c.grid.min)) throw ConfigError("grid_max must exceed grid_min");
        if (!(c.bracket_hi > c.bracket_lo)) throw ConfigError("bracket_hi must exceed bracket_lo");
        if (!(c.ilp_max >= c.ilp_min)) throw ConfigError("ilp_max must not be below ilp_min");
        if (c.population.kind == PopulationModel::Kind::UniformWindow &&
            !(c.population.window_max > c.population.window_min))
            throw ConfigError("window_max must exceed window_min");
        try {
            c.effective_model().validate();
        } catch (const ModelError& e) {
            throw ConfigError(std::string("invalid model parameters: ") + e.what());
        }
        for (int k : c.lpl_channels)
            if (k > c.model.nu_max_ground)
                throw ConfigError("lpl_channels entry " + std::to_string(k) + " exceeds nu_max_ground " +
                                  std::to_string(c.model.nu_max_ground));
        for (const auto& k : config_keys()) c.values[k.name] = k.get(c);
        return c;
    }

private:
    RunConfig cfg_{};
    std::set<std::string> seen_;
    bool overrides_{false};
};

inline RunConfig default_config() { return ConfigBuilder{}.finish(); }

inline RunConfig parse_config_text(const std::string& text, const std::string& source = "<text>") {
    ConfigBuilder b;
    std::istringstream in(text);
    b.parse_text(in, source);
    return b.finish();
}

// FNV-1a over the sorted key=value echo.
inline std::uint64_t config_hash(const RunConfig& c) {
    std::uint64_t h = 1469598103934665603ULL;
    for (const auto& [k, v] : c.values) {
        for (char ch : k + "=" + v + "\n") {
            h ^= static_cast<unsigned char>(ch);
            h *= 1099511628211ULL;
        }
    }
    return h;
}

inline std::string config_hash_hex(const RunConfig& c) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(config_hash(c)));
    return buf;
}

// Single provenance line: hash, unit statement and every effective key.
inline std::string provenance_line(const RunConfig& c, const std::string& what) {
    std::string s = "# htc " + what + " config_hash=" + config_hash_hex(c) + " units=omega_v";
    for (const auto& [k, v] : c.values) s += " " + k + "=" + v;
    return s;
}

inline std::string describe_config_keys() {
    const RunConfig d = default_config();
    std::string s;
    for (const auto& k : config_keys()) s += k.name + " = " + d.values.at(k.name) + "    # " + k.doc + "\n";
    return s;
}

}  // namespace htc
