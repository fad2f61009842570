// cli.hpp: subcommand drivers behind tools/htc: eig, spectra, sweep-critical, sweep-ilp.
//
// Every file starts with the provenance line of the run config. CSV numbers use 9
// significant digits and a fixed row order, so a given config always yields the same bytes.

#pragma once

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "htc/config.hpp"
#include "htc/critical.hpp"
#include "htc/eigensystem.hpp"
#include "htc/hamiltonian.hpp"
#include "htc/parallel.hpp"
#include "htc/spectra.hpp"

namespace htc {

enum class OutputFormat { Csv, Json };

class OutputError : public std::runtime_error {
public:
    explicit OutputError(const std::string& what) : std::runtime_error(what) {}
};

struct RunContext {
    RunConfig config;
    std::filesystem::path out_dir{"."};
    OutputFormat format{OutputFormat::Csv};
    int threads{1};
};

namespace io {

using json = nlohmann::ordered_json;

inline std::string num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", x);
    return buf;
}

class File {
public:
    File(const std::filesystem::path& path, std::vector<std::filesystem::path>& written) : path_(path) {
        out_.open(path, std::ios::binary);
        if (!out_) throw OutputError("cannot write '" + path.string() + "'");
        written.push_back(path);
    }
    ~File() = default;
    std::ofstream& operator*() { return out_; }
    void close() {
        out_.close();
        if (!out_) throw OutputError("failed writing '" + path_.string() + "'");
    }

private:
    std::filesystem::path path_;
    std::ofstream out_;
};

inline void write_series_csv(const RunContext& ctx, const std::string& name, const std::string& what,
                             const SpectralSeries& s, std::vector<std::filesystem::path>& written) {
    File f(ctx.out_dir / (name + ".csv"), written);
    *f << provenance_line(ctx.config, what) << '\n' << "omega_over_wv,value\n";
    for (std::size_t i = 0; i < s.grid.size(); ++i) *f << num(s.grid[i] / ctx.config.model.vib_freq) << ',' << num(s.values[i]) << '\n';
    f.close();
}

inline void write_sticks_csv(const RunContext& ctx, const std::string& name, const std::string& what,
                             const SpectralSeries& s, const EigenSystem& es, std::vector<std::filesystem::path>& written) {
    File f(ctx.out_dir / (name + ".csv"), written);
    *f << provenance_line(ctx.config, what) << '\n' << "omega_over_wv,strength,j,i,label_j\n";
    for (const auto& st : s.sticks)
        *f << num(st.omega / ctx.config.model.vib_freq) << ',' << num(st.strength) << ',' << st.state << ',' << st.channel
           << ',' << to_string(es.label[st.state]) << '\n';
    f.close();
}

inline json series_json(const SpectralSeries& s, const EigenSystem* es, double wv) {
    json j;
    j["omega_over_wv"] = json::array();
    j["value"] = json::array();
    for (std::size_t i = 0; i < s.grid.size(); ++i) {
        j["omega_over_wv"].push_back(s.grid[i] / wv);
        j["value"].push_back(s.values[i]);
    }
    if (es) {
        j["sticks"] = json::array();
        for (const auto& st : s.sticks)
            j["sticks"].push_back({{"omega_over_wv", st.omega / wv},
                                   {"strength", st.strength},
                                   {"j", st.state},
                                   {"i", st.channel},
                                   {"label_j", to_string(es->label[st.state])}});
    }
    return j;
}

inline json header_json(const RunContext& ctx, const std::string& what) {
    json h;
    h["command"] = what;
    h["config_hash"] = config_hash_hex(ctx.config);
    h["units"] = "omega_v";
    h["config"] = json::object();
    for (const auto& [k, v] : ctx.config.values) h["config"][k] = v;
    return h;
}

inline void write_json(const RunContext& ctx, const std::string& name, const json& body,
                       std::vector<std::filesystem::path>& written) {
    File f(ctx.out_dir / (name + ".json"), written);
    *f << body.dump(1) << '\n';
    f.close();
}

}  // namespace io

inline void prepare_output(const RunContext& ctx) {
    std::error_code ec;
    std::filesystem::create_directories(ctx.out_dir, ec);
    if (ec || !std::filesystem::is_directory(ctx.out_dir))
        throw OutputError("cannot create output directory '" + ctx.out_dir.string() + "'");
}

// --------------------------------- eig --------------------------------------

inline io::json eig_report_json(const EigenSystem& es) {
    io::json states = io::json::array();
    for (std::size_t j = 0; j < es.size(); ++j) {
        states.push_back({{"j", j},
                          {"omega", es.omega[j]},
                          {"aG2", es.aG[j] * es.aG[j]},
                          {"muG2", es.mu_G[j] * es.mu_G[j]},
                          {"dipole_fraction", es.dipole_fraction(j)},
                          {"gamma", es.gamma[j]},
                          {"f_emission", es.f_emission[j]},
                          {"degeneracy", es.degeneracy[j]},
                          {"multiplicity", es.multiplicity[j]},
                          {"sector", to_string(es.sector[j])},
                          {"photon_weight", es.photon_weight[j]},
                          {"symmetric_weight", es.symmetric_weight[j]},
                          {"label", to_string(es.label[j])}});
    }
    return states;
}

inline std::vector<std::filesystem::path> run_eig(const RunContext& ctx) {
    prepare_output(ctx);
    const ModelParams p = ctx.config.effective_model();
    const EigenSystem es = solve(p, ctx.config.solver);
    std::vector<std::filesystem::path> written;
    if (ctx.format == OutputFormat::Json) {
        io::json body;
        body["header"] = io::header_json(ctx, "eig");
        body["total_states"] = es.total_states();
        body["states"] = eig_report_json(es);
        io::write_json(ctx, "eig_report", body, written);
    } else {
        io::File f(ctx.out_dir / "eig_report.csv", written);
        *f << provenance_line(ctx.config, "eig") << '\n'
           << "j,omega_over_wv,aG2,muG2,dipole_fraction,gamma,f_emission,degeneracy,multiplicity,sector,"
              "photon_weight,symmetric_weight,label\n";
        const double wv = p.vib_freq;
        for (std::size_t j = 0; j < es.size(); ++j)
            *f << j << ',' << io::num(es.omega[j] / wv) << ',' << io::num(es.aG[j] * es.aG[j]) << ','
               << io::num(es.mu_G[j] * es.mu_G[j]) << ',' << io::num(es.dipole_fraction(j)) << ','
               << io::num(es.gamma[j] / wv) << ',' << io::num(es.f_emission[j]) << ',' << es.degeneracy[j] << ','
               << es.multiplicity[j] << ',' << to_string(es.sector[j]) << ',' << io::num(es.photon_weight[j]) << ','
               << io::num(es.symmetric_weight[j]) << ',' << to_string(es.label[j]) << '\n';
        f.close();
    }
    if (ctx.config.dump_matrix) {
        const Basis exc = enumerate_excitation_basis(p);
        const HtcMatrix h = build_hamiltonian(p, exc);
        io::File f(ctx.out_dir / "hamiltonian_triplets.txt", written);
        *f << provenance_line(ctx.config, "eig") << '\n';
        write_triplets(*f, h.entries, "basis_id=" + std::to_string(h.basis_id));
        f.close();
    }
    return written;
}

// -------------------------------- spectra -----------------------------------

inline std::vector<std::filesystem::path> run_spectra(const RunContext& ctx) {
    prepare_output(ctx);
    const RunConfig& c = ctx.config;
    const ModelParams p = c.effective_model();
    const EigenSystem es = solve(p, c.solver);
    const auto grid = c.grid.points();

    const SpectralSeries absorption = absorption_spectrum(es, grid, c.absorption);
    const SpectralSeries bound = bound_absorption(es, grid, c.bound_broadening, c.absorption);
    std::vector<SpectralSeries> lpl;
    for (int k : c.lpl_channels) lpl.push_back(lpl_spectrum(es, c.population, grid, k, c.lineshape));

    std::vector<std::filesystem::path> written;
    if (ctx.format == OutputFormat::Json) {
        io::json body;
        body["header"] = io::header_json(ctx, "spectra");
        body["absorption"] = io::series_json(absorption, &es, p.vib_freq);
        body["absorption_normalized"] = io::series_json(normalized_to_max(absorption), nullptr, p.vib_freq);
        body["bound_absorption"] = io::series_json(bound, &es, p.vib_freq);
        for (std::size_t i = 0; i < lpl.size(); ++i) {
            const std::string tag = "lpl_nmg" + std::to_string(c.lpl_channels[i]);
            body[tag] = io::series_json(lpl[i], &es, p.vib_freq);
            body[tag + "_normalized"] = io::series_json(normalized_to_max(lpl[i]), nullptr, p.vib_freq);
        }
        io::write_json(ctx, "spectra", body, written);
        return written;
    }
    io::write_series_csv(ctx, "absorption", "spectra absorption raw", absorption, written);
    io::write_series_csv(ctx, "absorption_normalized", "spectra absorption normalized", normalized_to_max(absorption),
                         written);
    io::write_sticks_csv(ctx, "absorption_sticks", "spectra absorption sticks", absorption, es, written);
    io::write_series_csv(ctx, "bound_absorption", "spectra bound absorption normalized", bound, written);
    io::write_sticks_csv(ctx, "bound_absorption_sticks", "spectra bound absorption sticks", bound, es, written);
    for (std::size_t i = 0; i < lpl.size(); ++i) {
        const std::string tag = "lpl_nmg" + std::to_string(c.lpl_channels[i]);
        io::write_series_csv(ctx, tag, "spectra " + tag + " raw", lpl[i], written);
        io::write_series_csv(ctx, tag + "_normalized", "spectra " + tag + " normalized", normalized_to_max(lpl[i]),
                             written);
        io::write_sticks_csv(ctx, tag + "_sticks", "spectra " + tag + " sticks", lpl[i], es, written);
    }
    return written;
}

// ---------------------------- sweep-critical --------------------------------

struct CriticalRow {
    int n_molecules{1};
    double huang_rhys{0.0};
    bool ok{false};
    CriticalResult result{};
    double dipole_fraction{0.0};  // of the symmetric state nearest zero at the root
    std::string message;
};

// Zero-energy state of the symmetric sector at the found coupling.
inline double critical_dipole_fraction(ModelParams p, double rabi_single) {
    p.rabi_single = rabi_single;
    SolveOptions opt;
    opt.route = SolverRoute::Symmetry;
    const EigenSystem es = solve(p, opt);
    std::size_t best = 0;
    double best_abs = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < es.size(); ++j)
        if (es.sector[j] == Sector::Symmetric && std::abs(es.omega[j]) < best_abs) {
            best_abs = std::abs(es.omega[j]);
            best = j;
        }
    return es.dipole_fraction(best);
}

inline std::vector<CriticalRow> sweep_critical(const RunConfig& c, int threads) {
    if (c.sweep_n.empty() || c.sweep_huang_rhys.empty()) throw ConfigError("sweep-critical: empty sweep range");
    std::vector<CriticalRow> rows;
    for (int n : c.sweep_n)
        for (double l2 : c.sweep_huang_rhys) {
            CriticalRow r;
            r.n_molecules = n;
            r.huang_rhys = l2;
            rows.push_back(std::move(r));
        }
    parallel_for(rows.size(), threads, [&](std::size_t i) {
        CriticalRow& r = rows[i];
        ModelParams p = c.effective_model();
        p.n_molecules = r.n_molecules;
        p.huang_rhys = r.huang_rhys;
        try {
            r.result = find_critical_coupling_collective(p, c.bracket_lo, c.bracket_hi, c.critical);
            r.dipole_fraction = critical_dipole_fraction(p, r.result.rabi_single);
            r.ok = true;
        } catch (const std::exception& e) {
            r.ok = false;
            r.message = e.what();
        }
    });
    return rows;
}

inline std::vector<std::filesystem::path> run_sweep_critical(const RunContext& ctx) {
    prepare_output(ctx);
    const auto rows = sweep_critical(ctx.config, ctx.threads);
    std::vector<std::filesystem::path> written;
    if (ctx.format == OutputFormat::Json) {
        io::json body;
        body["header"] = io::header_json(ctx, "sweep-critical");
        body["rows"] = io::json::array();
        for (const auto& r : rows) {
            io::json row = {{"n_molecules", r.n_molecules}, {"huang_rhys", r.huang_rhys}, {"status", r.ok ? "ok" : "error"}};
            if (r.ok) {
                row["rabi_single"] = r.result.rabi_single;
                row["rabi_collective"] = r.result.rabi_collective;
                row["omega_x"] = r.result.omega;
                row["dipole_fraction_x"] = r.dipole_fraction;
            } else {
                row["message"] = r.message;
            }
            body["rows"].push_back(row);
        }
        io::write_json(ctx, "critical", body, written);
        return written;
    }
    io::File f(ctx.out_dir / "critical.csv", written);
    *f << provenance_line(ctx.config, "sweep-critical") << '\n'
       << "n_molecules,huang_rhys,rabi_single,rabi_collective,omega_x,dipole_fraction_x,status,message\n";
    for (const auto& r : rows) {
        *f << r.n_molecules << ',' << io::num(r.huang_rhys) << ',';
        if (r.ok)
            *f << io::num(r.result.rabi_single) << ',' << io::num(r.result.rabi_collective) << ','
               << io::num(r.result.omega) << ',' << io::num(r.dipole_fraction) << ",ok,\n";
        else {
            std::string msg = r.message;
            for (char& ch : msg)
                if (ch == ',' || ch == '\n') ch = ';';
            *f << ",,,,error," << msg << '\n';
        }
    }
    f.close();
    return written;
}

// ------------------------------- sweep-ilp ----------------------------------

inline std::vector<double> ilp_pump_grid(const RunConfig& c) {
    std::vector<double> g;
    const auto n = static_cast<std::size_t>(std::floor((c.ilp_max - c.ilp_min) / c.ilp_step + 1e-9)) + 1;
    if (c.ilp_max < c.ilp_min || n == 0) throw ConfigError("sweep-ilp: empty sweep range");
    for (std::size_t i = 0; i < n; ++i) g.push_back((c.ilp_min + static_cast<double>(i) * c.ilp_step) * c.model.vib_freq);
    return g;
}

inline std::vector<std::filesystem::path> run_sweep_ilp(const RunContext& ctx) {
    prepare_output(ctx);
    const RunConfig& c = ctx.config;
    if (c.ilp_channels.empty()) throw ConfigError("sweep-ilp: empty ilp_channels");
    const auto wp = ilp_pump_grid(c);
    ModelParams p = c.effective_model();
    for (int k : c.ilp_channels) p.nu_max_ground = std::max(p.nu_max_ground, k);
    const EigenSystem es = solve(p, c.solver);
    const auto family = ilp_curve(es, wp, c.sigma_p, c.ilp_channels, c.lineshape, ctx.threads);

    std::vector<std::filesystem::path> written;
    if (ctx.format == OutputFormat::Json) {
        io::json body;
        body["header"] = io::header_json(ctx, "sweep-ilp");
        body["omega_lp"] = es.omega[lower_polariton(es)] / p.vib_freq;
        body["omega_p_over_wv"] = io::json::array();
        for (double w : wp) body["omega_p_over_wv"].push_back(w / p.vib_freq);
        for (std::size_t k = 0; k < family.size(); ++k)
            body["I_lp_nmg" + std::to_string(c.ilp_channels[k])] = family[k].values;
        io::write_json(ctx, "ilp", body, written);
        return written;
    }
    io::File f(ctx.out_dir / "ilp.csv", written);
    *f << provenance_line(c, "sweep-ilp") << '\n' << "omega_p_over_wv";
    for (int k : c.ilp_channels) *f << ",I_lp_nmg" << k;
    *f << '\n';
    for (std::size_t i = 0; i < wp.size(); ++i) {
        *f << io::num(wp[i] / p.vib_freq);
        for (const auto& s : family) *f << ',' << io::num(s.values[i]);
        *f << '\n';
    }
    f.close();
    return written;
}

// ------------------------------ exit codes ----------------------------------

enum ExitCode : int { kExitOk = 0, kExitConfig = 1, kExitNumerical = 2 };

}  // namespace htc
