// spectra.hpp: Lorentzian lineshapes, leakage photoluminescence, conventional and
// bound-mode absorption, the I_LP excitation curve and the LP blue shift.
//
// Frequencies are rotating-frame offsets from omega_00 in the model's energy unit.
// An emission line from eigenstate j into ground channel c (c vibrational quanta left
// in the material) sits at omega_j - c * omega_v.

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "htc/eigensystem.hpp"
#include "htc/parallel.hpp"

namespace htc {

class SpectraError : public std::runtime_error {
public:
    explicit SpectraError(const std::string& what) : std::runtime_error(what) {}
};

struct FrequencyGrid {
    double min{-2.5};
    double max{2.5};
    double step{0.002};

    std::vector<double> points() const {
        if (!(step > 0.0) || !(max > min)) throw SpectraError("grid: need step > 0 and max > min");
        const auto n = static_cast<std::size_t>(std::floor((max - min) / step + 1e-9)) + 1;
        std::vector<double> g(n);
        for (std::size_t i = 0; i < n; ++i) g[i] = min + static_cast<double>(i) * step;
        return g;
    }
};

struct Stick {
    double omega{0.0};
    double strength{0.0};
    std::size_t state{0};  // entry index in the EigenSystem
    int channel{0};        // vibrational quanta of the final ground state
};

struct SpectralSeries {
    std::vector<double> grid;
    std::vector<double> values;
    std::vector<Stick> sticks;

    double max_value() const { return values.empty() ? 0.0 : *std::max_element(values.begin(), values.end()); }

    // Trapezoid rule over the grid.
    double integral() const {
        double s = 0.0;
        for (std::size_t i = 1; i < grid.size(); ++i) s += 0.5 * (values[i] + values[i - 1]) * (grid[i] - grid[i - 1]);
        return s;
    }

    // Linear interpolation; zero outside the grid.
    double at(double w) const {
        if (grid.empty() || w < grid.front() || w > grid.back()) return 0.0;
        auto it = std::lower_bound(grid.begin(), grid.end(), w);
        auto i = static_cast<std::size_t>(it - grid.begin());
        if (i == 0) return values[0];
        const double t = (w - grid[i - 1]) / (grid[i] - grid[i - 1]);
        return (1.0 - t) * values[i - 1] + t * values[i];
    }
};

inline SpectralSeries normalized_to_max(SpectralSeries s) {
    const double m = s.max_value();
    if (m > 0.0)
        for (auto& v : s.values) v /= m;
    return s;
}

inline double lorentzian(double w, double center, double width) {
    const double d = w - center;
    return width / (d * d + width * width);
}

enum class JumpOperator { A, JMinus };

inline JumpOperator parse_jump_operator(const std::string& tag) {
    if (tag == "a") return JumpOperator::A;
    if (tag == "jminus") return JumpOperator::JMinus;
    throw SpectraError("unknown operator tag '" + tag + "' (expected a or jminus)");
}

struct LineshapeOptions {
    double kappa_floor{1e-3};  // minimum half width, units of omega_v (Gamma_j can be 0 or roundoff)
};

inline double coherence_width(const EigenSystem& es, std::size_t j, const LineshapeOptions& opt) {
    return std::max(0.5 * es.gamma[j], opt.kappa_floor * es.params.vib_freq);
}

// S_O^(j)(omega) for a single state of entry j, channels 0..max_channel.
inline SpectralSeries lineshape(const EigenSystem& es, std::size_t j, JumpOperator op, const std::vector<double>& grid,
                                int max_channel = -1, const LineshapeOptions& opt = {}) {
    if (j >= es.size()) throw SpectraError("lineshape: state index out of range");
    if (max_channel < 0) max_channel = es.nu_max_ground;
    if (max_channel > es.nu_max_ground) throw SpectraError("lineshape: channel beyond ground truncation");
    const Eigen::MatrixXd& ch = op == JumpOperator::A ? es.a_channels : es.jm_channels;
    const double width = coherence_width(es, j, opt);
    SpectralSeries s;
    s.grid = grid;
    s.values.assign(grid.size(), 0.0);
    for (int c = 0; c <= max_channel; ++c) {
        const double w = ch(static_cast<Eigen::Index>(j), c);
        if (w <= 0.0) continue;
        const double center = es.omega[j] - c * es.params.vib_freq;
        for (std::size_t g = 0; g < grid.size(); ++g) s.values[g] += w * lorentzian(grid[g], center, width);
        s.sticks.push_back({center, w, j, c});
    }
    return s;
}

// ----------------------------- populations ---------------------------------

struct PopulationModel {
    enum class Kind { UniformWindow, Gaussian, Delta };
    Kind kind{Kind::UniformWindow};
    double window_min{-std::numeric_limits<double>::infinity()};
    double window_max{1.3};  // units of omega_v
    double center{0.0};      // Gaussian, units of omega_v
    double width{0.5};       // Gaussian standard deviation, units of omega_v
    std::size_t target{0};   // Delta

    static PopulationModel uniform(double lo, double hi) {
        PopulationModel p;
        p.kind = Kind::UniformWindow;
        p.window_min = lo;
        p.window_max = hi;
        return p;
    }
    static PopulationModel gaussian(double center, double width) {
        PopulationModel p;
        p.kind = Kind::Gaussian;
        p.center = center;
        p.width = width;
        return p;
    }
    static PopulationModel delta(std::size_t target) {
        PopulationModel p;
        p.kind = Kind::Delta;
        p.target = target;
        return p;
    }

    // Total population of every entry (all its partner states together); sums to one.
    // Every state is weighted equally, i.e. rho_j = d_j / M for a uniform window.
    std::vector<double> weights(const EigenSystem& es) const {
        std::vector<double> w(es.size(), 0.0);
        const double wv = es.params.vib_freq;
        switch (kind) {
            case Kind::UniformWindow:
                for (std::size_t j = 0; j < es.size(); ++j)
                    if (es.omega[j] >= window_min * wv && es.omega[j] <= window_max * wv) w[j] = es.multiplicity[j];
                break;
            case Kind::Gaussian:
                if (!(width > 0.0)) throw SpectraError("population: Gaussian width must be > 0");
                for (std::size_t j = 0; j < es.size(); ++j) {
                    const double d = (es.omega[j] - center * wv) / (width * wv);
                    w[j] = es.multiplicity[j] * std::exp(-0.5 * d * d);
                }
                break;
            case Kind::Delta:
                if (target >= es.size()) throw SpectraError("population: delta target out of range");
                w[target] = 1.0;
                break;
        }
        double total = 0.0;
        for (double x : w) total += x;
        if (!(total > 0.0)) throw SpectraError("population: no states populated");
        for (double& x : w) x /= total;
        return w;
    }
};

// S_LPL(omega) = sum_j rho_j S_a^(j)(omega), final states with up to nu_max_ground quanta.
inline SpectralSeries lpl_spectrum(const EigenSystem& es, const PopulationModel& pop, const std::vector<double>& grid,
                                   int nu_max_ground, const LineshapeOptions& opt = {}) {
    if (nu_max_ground < 0 || nu_max_ground > es.nu_max_ground)
        throw SpectraError("lpl: nu_max_ground " + std::to_string(nu_max_ground) + " outside computed channels 0.." +
                           std::to_string(es.nu_max_ground));
    const auto rho = pop.weights(es);
    SpectralSeries s;
    s.grid = grid;
    s.values.assign(grid.size(), 0.0);
    for (std::size_t j = 0; j < es.size(); ++j) {
        if (rho[j] <= 0.0) continue;
        const double width = coherence_width(es, j, opt);
        for (int c = 0; c <= nu_max_ground; ++c) {
            const double w = rho[j] * es.a_channels(static_cast<Eigen::Index>(j), c);
            if (w <= 0.0) continue;
            const double center = es.omega[j] - c * es.params.vib_freq;
            for (std::size_t g = 0; g < grid.size(); ++g) s.values[g] += w * lorentzian(grid[g], center, width);
            s.sticks.push_back({center, w, j, c});
        }
    }
    return s;
}

// ------------------------------ absorption ---------------------------------

struct AbsorptionOptions {
    double pump_strength{1.0};  // Omega_p
    double kappa_nr{0.0};       // added to Gamma_j / 2 for the G-j coherence
    double kappa_floor{1e-3};   // minimum half width of the G-j coherence
};

// A(omega_p) = pi |Omega_p|^2 sum_j |<G|a|j>|^2 (kappa_Gj / Gamma_j) F_j / ((omega_p - omega_j)^2 + kappa_Gj^2).
// States with Gamma_j = 0 have F_j = 0 and contribute nothing.
inline SpectralSeries absorption_spectrum(const EigenSystem& es, const std::vector<double>& grid,
                                          const AbsorptionOptions& opt = {}) {
    SpectralSeries s;
    s.grid = grid;
    s.values.assign(grid.size(), 0.0);
    const double pref = std::numbers::pi * opt.pump_strength * opt.pump_strength;
    for (std::size_t j = 0; j < es.size(); ++j) {
        const double gam = es.gamma[j];
        if (!(gam > 0.0)) continue;
        const double kg = std::max(0.5 * gam + opt.kappa_nr, opt.kappa_floor * es.params.vib_freq);
        const double strength = pref * es.multiplicity[j] * es.aG[j] * es.aG[j] * es.f_emission[j] / gam;
        if (strength <= 0.0) continue;
        for (std::size_t g = 0; g < grid.size(); ++g) s.values[g] += strength * lorentzian(grid[g], es.omega[j], kg);
        s.sticks.push_back({es.omega[j], strength, j, 0});
    }
    return s;
}

// Sticks |mu_jG|^2 at omega_j (summed over partners) plus a curve broadened with kappa_Gj,
// or with a fixed width when `broadening` > 0. Curve normalized to max 1.
inline SpectralSeries bound_absorption(const EigenSystem& es, const std::vector<double>& grid, double broadening = 0.0,
                                       const AbsorptionOptions& opt = {}) {
    SpectralSeries s;
    s.grid = grid;
    s.values.assign(grid.size(), 0.0);
    for (std::size_t j = 0; j < es.size(); ++j) {
        const double strength = es.multiplicity[j] * es.mu_G[j] * es.mu_G[j];
        s.sticks.push_back({es.omega[j], strength, j, 0});
        if (strength <= 0.0) continue;
        const double width = broadening > 0.0 ? broadening
                                              : std::max(0.5 * es.gamma[j] + opt.kappa_nr, opt.kappa_floor * es.params.vib_freq);
        for (std::size_t g = 0; g < grid.size(); ++g) s.values[g] += strength * lorentzian(grid[g], es.omega[j], width);
    }
    return normalized_to_max(std::move(s));
}

inline double total_stick_strength(const SpectralSeries& s) {
    double t = 0.0;
    for (const auto& st : s.sticks) t += st.strength;
    return t;
}

// ------------------------ LP-derived quantities ----------------------------

namespace detail {

inline long labelled(const EigenSystem& es, Label l) {
    if (es.label.size() != es.size()) return -1;
    for (std::size_t j = 0; j < es.size(); ++j)
        if (es.label[j] == l) return static_cast<long>(j);
    return -1;
}

// largest zero-phonon photon amplitude on one side of zero
inline std::size_t brightest_photon(const EigenSystem& es, bool above, const char* what) {
    long best = -1;
    for (std::size_t j = 0; j < es.size(); ++j) {
        if (above ? es.omega[j] <= 0.0 : es.omega[j] >= 0.0) continue;
        if (best < 0 || es.aG[j] * es.aG[j] > es.aG[static_cast<std::size_t>(best)] * es.aG[static_cast<std::size_t>(best)])
            best = static_cast<long>(j);
    }
    if (best < 0 || es.aG[static_cast<std::size_t>(best)] == 0.0) throw SpectraError(std::string("no ") + what + " found");
    return static_cast<std::size_t>(best);
}

}  // namespace detail

// The classified LP entry; unlabelled systems fall back to the largest photon amplitude below zero.
inline std::size_t lower_polariton(const EigenSystem& es) {
    const long j = detail::labelled(es, Label::LP);
    return j >= 0 ? static_cast<std::size_t>(j) : detail::brightest_photon(es, false, "lower polariton");
}

inline std::size_t upper_polariton(const EigenSystem& es) {
    const long j = detail::labelled(es, Label::UP);
    return j >= 0 ? static_cast<std::size_t>(j) : detail::brightest_photon(es, true, "upper polariton");
}

// I_LP(omega_p): LPL at omega_LP for Gaussian populations centred at each omega_p, one
// series per ground truncation; the whole family shares one normalization (max 1).
// The decay rates stay those of `es`, so a larger truncation only adds emission channels.
inline std::vector<SpectralSeries> ilp_curve(const EigenSystem& es, const std::vector<double>& omega_p,
                                             double sigma_p, const std::vector<int>& nu_max_ground_list,
                                             const LineshapeOptions& opt = {}, int threads = 1) {
    if (!(sigma_p > 0.0)) throw SpectraError("ilp: sigma_p must be > 0");
    if (nu_max_ground_list.empty()) throw SpectraError("ilp: empty ground-truncation list");
    if (omega_p.empty()) throw SpectraError("ilp: empty pump grid");
    const double w_lp = es.omega[lower_polariton(es)];
    const std::vector<double> at_lp{w_lp};
    std::vector<SpectralSeries> family(nu_max_ground_list.size());
    for (auto& s : family) {
        s.grid = omega_p;
        s.values.assign(omega_p.size(), 0.0);
    }
    parallel_for(omega_p.size(), threads, [&](std::size_t i) {
        const auto pop = PopulationModel::gaussian(omega_p[i] / es.params.vib_freq, sigma_p);
        for (std::size_t k = 0; k < nu_max_ground_list.size(); ++k)
            family[k].values[i] = lpl_spectrum(es, pop, at_lp, nu_max_ground_list[k], opt).values[0];
    });
    double peak = 0.0;
    for (const auto& s : family) peak = std::max(peak, s.max_value());
    if (peak > 0.0)
        for (auto& s : family)
            for (auto& v : s.values) v /= peak;
    return family;
}

struct BlueShift {
    double delta{0.0};          // LPL peak minus absorption peak
    double lpl_peak{0.0};
    double absorption_peak{0.0};
    double omega_lp{0.0};
};

namespace detail {

inline std::size_t region_argmax(const SpectralSeries& s, double lo, double hi, const char* what) {
    long best = -1;
    for (std::size_t i = 0; i < s.grid.size(); ++i) {
        if (s.grid[i] < lo || s.grid[i] > hi) continue;
        if (best < 0 || s.values[i] > s.values[static_cast<std::size_t>(best)]) best = static_cast<long>(i);
    }
    if (best < 0) throw SpectraError(std::string("blue shift: LP region outside the ") + what + " grid");
    const auto b = static_cast<std::size_t>(best);
    if (!(s.values[b] > 0.0)) throw SpectraError(std::string("blue shift: ") + what + " is flat in the LP region");
    const bool left_edge = b == 0 || s.grid[b - 1] < lo;
    const bool right_edge = b + 1 == s.grid.size() || s.grid[b + 1] > hi;
    if (left_edge || right_edge)
        throw SpectraError(std::string("blue shift: ") + what + " has no interior maximum in the LP region");
    return b;
}

}  // namespace detail

// delta_LP = argmax LPL - argmax absorption inside [omega_LP - 0.5 omega_v, omega_LP + 0.5 omega_v].
inline BlueShift lp_blueshift(const SpectralSeries& lpl, const SpectralSeries& absorption, double omega_lp,
                              double vib_freq) {
    const double lo = omega_lp - 0.5 * vib_freq;
    const double hi = omega_lp + 0.5 * vib_freq;
    BlueShift b;
    b.omega_lp = omega_lp;
    b.lpl_peak = lpl.grid[detail::region_argmax(lpl, lo, hi, "LPL")];
    b.absorption_peak = absorption.grid[detail::region_argmax(absorption, lo, hi, "absorption")];
    b.delta = b.lpl_peak - b.absorption_peak;
    return b;
}

inline BlueShift lp_blueshift(const EigenSystem& es, const PopulationModel& pop, const std::vector<double>& grid,
                              int nu_max_ground, const AbsorptionOptions& aopt = {}, const LineshapeOptions& lopt = {}) {
    const auto lpl = lpl_spectrum(es, pop, grid, nu_max_ground, lopt);
    const auto abs = absorption_spectrum(es, grid, aopt);
    return lp_blueshift(lpl, abs, es.omega[lower_polariton(es)], es.params.vib_freq);
}

}  // namespace htc
