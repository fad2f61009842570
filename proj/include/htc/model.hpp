// model.hpp: Parameters, Franck-Condon overlaps and truncated basis enumeration
// for the Holstein-Tavis-Cummings model of N emitters in a single cavity mode.
//
// Energies are measured in the rotating frame of the 0-0 transition: the bare
// molecular resonance sits at zero, a vibrational quantum costs vib_freq.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace htc {

class ModelError : public std::invalid_argument {
public:
    explicit ModelError(const std::string& what) : std::invalid_argument(what) {}
};

// All energies and rates share one unit; vib_freq is omega_v in that unit.
struct ModelParams {
    int n_molecules{1};
    double huang_rhys{1.0};         // lambda^2
    double vib_freq{1.0};           // omega_v
    double rabi_single{0.0};        // Omega, single-molecule vacuum Rabi frequency
    double detuning{0.0};           // Delta = omega_00 - omega_c
    double kappa{0.0};              // empty-cavity photon decay rate
    double gamma_e_collective{0.0}; // N * gamma_e
    int nu_max{4};
    int nu_max_ground{1};
    double dipole_unit{1.0};
    std::size_t basis_cap{200000};

    double lambda() const { return std::sqrt(huang_rhys); }
    double rabi_collective() const { return std::sqrt(static_cast<double>(n_molecules)) * rabi_single; }

    void validate() const {
        if (n_molecules < 1) throw ModelError("n_molecules must be >= 1");
        if (!(vib_freq > 0.0)) throw ModelError("vib_freq must be > 0");
        if (!(huang_rhys >= 0.0)) throw ModelError("huang_rhys must be >= 0");
        if (!(rabi_single >= 0.0)) throw ModelError("rabi_single must be >= 0");
        if (!std::isfinite(detuning)) throw ModelError("detuning must be finite");
        if (!(kappa >= 0.0)) throw ModelError("kappa must be >= 0");
        if (!(gamma_e_collective >= 0.0)) throw ModelError("gamma_e_collective must be >= 0");
        if (nu_max < 0) throw ModelError("nu_max must be >= 0");
        if (nu_max_ground < 0) throw ModelError("nu_max_ground must be >= 0");
        if (!(dipole_unit > 0.0)) throw ModelError("dipole_unit must be > 0");
    }
};

// ----------------------------- Franck-Condon -------------------------------

// <nu|nu~>: overlap of ground-potential eigenstate nu with eigenstate nu~ of the
// excited potential. The excited states are D(-lambda)|nu~> with
// D(a) = exp(a (b^dag - b)), which is where H_M = b^dag b + lambda (b + b^dag)
// puts the excited minimum. With this convention <0|nu~> = e^{-l^2/2} l^nu~ / sqrt(nu~!) >= 0.
inline double fc_overlap(int nu, int nu_tilde, double lambda) {
    if (nu < 0 || nu_tilde < 0) throw ModelError("fc_overlap: negative vibrational quantum number");
    if (lambda < 0.0) throw ModelError("fc_overlap: lambda must be >= 0");
    const double x = lambda * lambda;
    const int lo = std::min(nu, nu_tilde);
    const int k = std::abs(nu - nu_tilde);
    const double log_ratio = 0.5 * (std::lgamma(lo + 1.0) - std::lgamma(lo + k + 1.0));
    double sign = 1.0;
    if (nu > nu_tilde && (k % 2 == 1)) sign = -1.0;  // (-lambda)^k for nu >= nu~
    const double power = (k == 0) ? 1.0 : std::pow(lambda, k);
    const double lag = std::assoc_laguerre(static_cast<unsigned>(lo), static_cast<unsigned>(k), x);
    return sign * std::exp(log_ratio - 0.5 * x) * power * lag;
}

// Dense table fc(nu, nu~) for nu <= max_ground, nu~ <= max_excited.
class FranckCondonTable {
public:
    FranckCondonTable() = default;
    FranckCondonTable(double lambda, int max_ground, int max_excited)
        : lambda_(lambda), rows_(max_ground + 1), cols_(max_excited + 1),
          data_(static_cast<std::size_t>(rows_ * cols_)) {
        for (int v = 0; v < rows_; ++v)
            for (int w = 0; w < cols_; ++w) data_[static_cast<std::size_t>(v * cols_ + w)] = fc_overlap(v, w, lambda);
    }

    double operator()(int nu, int nu_tilde) const {
        if (nu < 0 || nu >= rows_ || nu_tilde < 0 || nu_tilde >= cols_)
            throw std::out_of_range("FranckCondonTable: index outside table");
        return data_[static_cast<std::size_t>(nu * cols_ + nu_tilde)];
    }
    double lambda() const { return lambda_; }

private:
    double lambda_{0.0};
    int rows_{0};
    int cols_{0};
    std::vector<double> data_;
};

// ------------------------------- Basis -------------------------------------

enum class StateKind : std::uint8_t { GroundVib = 0, PhotonVib = 1, ExcitonOneParticle = 2, ExcitonTwoParticle = 3 };
enum class Manifold : std::uint8_t { Excitation, Ground };

inline const char* to_string(StateKind k) {
    switch (k) {
        case StateKind::GroundVib: return "GroundVib";
        case StateKind::PhotonVib: return "PhotonVib";
        case StateKind::ExcitonOneParticle: return "ExcitonOneParticle";
        case StateKind::ExcitonTwoParticle: return "ExcitonTwoParticle";
    }
    return "?";
}

// Occupations are sparse (site, quanta) pairs sorted by site, quanta >= 1.
using VibOccupation = std::vector<std::pair<int, int>>;

inline int total_quanta(const VibOccupation& occ) {
    int t = 0;
    for (const auto& [site, q] : occ) t += q;
    return t;
}

struct BasisState {
    StateKind kind{StateKind::GroundVib};
    int photon{0};
    std::optional<int> exciton_site;
    std::optional<int> exciton_vib;
    std::optional<int> spectator_site;
    std::optional<int> spectator_vib;
    VibOccupation ground_vib_occupations;  // GroundVib and PhotonVib only

    // Quanta in ground-state potentials plus quanta in the displaced potential.
    int vib_quanta() const {
        return total_quanta(ground_vib_occupations) + exciton_vib.value_or(0) + spectator_vib.value_or(0);
    }
    int excitation_number() const { return kind == StateKind::GroundVib ? 0 : 1; }

    // Canonical encoding; lexicographic order on it defines basis order.
    std::vector<int> key() const {
        std::vector<int> k{static_cast<int>(kind)};
        if (kind == StateKind::GroundVib) k.push_back(total_quanta(ground_vib_occupations));
        k.push_back(exciton_site.value_or(-1));
        k.push_back(exciton_vib.value_or(-1));
        k.push_back(spectator_site.value_or(-1));
        k.push_back(spectator_vib.value_or(-1));
        for (const auto& [site, q] : ground_vib_occupations) {
            k.push_back(site);
            k.push_back(q);
        }
        return k;
    }

    static BasisState ground(VibOccupation occ) {
        BasisState s;
        s.kind = StateKind::GroundVib;
        s.ground_vib_occupations = std::move(occ);
        return s;
    }
    static BasisState photon_vib(VibOccupation occ) {
        BasisState s;
        s.kind = StateKind::PhotonVib;
        s.photon = 1;
        s.ground_vib_occupations = std::move(occ);
        return s;
    }
    static BasisState exciton(int site, int vib) {
        BasisState s;
        s.kind = StateKind::ExcitonOneParticle;
        s.exciton_site = site;
        s.exciton_vib = vib;
        return s;
    }
    static BasisState two_particle(int site, int vib, int spectator, int spectator_vib) {
        if (spectator == site) throw ModelError("two-particle state: spectator must differ from exciton site");
        if (spectator_vib < 1) throw ModelError("two-particle state: spectator needs >= 1 quantum");
        BasisState s;
        s.kind = StateKind::ExcitonTwoParticle;
        s.exciton_site = site;
        s.exciton_vib = vib;
        s.spectator_site = spectator;
        s.spectator_vib = spectator_vib;
        return s;
    }
};

class Basis {
public:
    Basis() = default;

    Basis(std::vector<BasisState> states, Manifold manifold) : manifold_(manifold) {
        std::sort(states.begin(), states.end(),
                  [](const BasisState& a, const BasisState& b) { return a.key() < b.key(); });
        states_ = std::move(states);
        for (std::size_t i = 0; i < states_.size(); ++i) {
            auto [it, inserted] = index_.emplace(states_[i].key(), i);
            if (!inserted) throw ModelError("Basis: duplicate state");
        }
    }

    std::size_t size() const { return states_.size(); }
    Manifold manifold() const { return manifold_; }
    const BasisState& operator[](std::size_t i) const { return states_[i]; }
    const std::vector<BasisState>& states() const { return states_; }

    // FNV-1a over the canonical keys; identifies the basis a matrix was built on.
    std::uint64_t fingerprint() const {
        std::uint64_t h = 1469598103934665603ULL;
        auto mix = [&h](std::uint64_t x) {
            for (int b = 0; b < 8; ++b) {
                h ^= (x >> (8 * b)) & 0xffULL;
                h *= 1099511628211ULL;
            }
        };
        mix(static_cast<std::uint64_t>(manifold_));
        for (const auto& s : states_) {
            for (int v : s.key()) mix(static_cast<std::uint64_t>(static_cast<std::int64_t>(v)));
            mix(0xfeedULL);
        }
        return h;
    }

    std::optional<std::size_t> find(const BasisState& s) const {
        auto it = index_.find(s.key());
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

private:
    std::vector<BasisState> states_;
    std::map<std::vector<int>, std::size_t> index_;
    Manifold manifold_{Manifold::Excitation};
};

inline std::size_t excitation_basis_count(int n, int nu_max) {
    const auto N = static_cast<std::size_t>(n);
    const auto v = static_cast<std::size_t>(nu_max);
    return (1 + N * v) + N * (v + 1) + N * (N - 1) * (v + 1) * v;
}

inline Basis enumerate_excitation_basis(const ModelParams& p) {
    p.validate();
    const int N = p.n_molecules;
    const int vmax = p.nu_max;
    const std::size_t count = excitation_basis_count(N, vmax);
    if (count > p.basis_cap)
        throw ModelError("excitation basis size " + std::to_string(count) + " exceeds cap " +
                         std::to_string(p.basis_cap));

    std::vector<BasisState> states;
    states.reserve(count);
    states.push_back(BasisState::photon_vib({}));
    for (int m = 0; m < N; ++m)
        for (int v = 1; v <= vmax; ++v) states.push_back(BasisState::photon_vib({{m, v}}));
    for (int n = 0; n < N; ++n)
        for (int w = 0; w <= vmax; ++w) states.push_back(BasisState::exciton(n, w));
    for (int n = 0; n < N; ++n)
        for (int w = 0; w <= vmax; ++w)
            for (int m = 0; m < N; ++m) {
                if (m == n) continue;
                for (int v = 1; v <= vmax; ++v) states.push_back(BasisState::two_particle(n, w, m, v));
            }
    return Basis(std::move(states), Manifold::Excitation);
}

namespace detail {

// Distribute up to `budget` quanta over sites [site, n), appending each configuration.
inline void ground_configurations(int site, int n, int budget, VibOccupation& current,
                                  std::vector<BasisState>& out, std::size_t cap) {
    if (out.size() > cap) throw ModelError("ground basis size exceeds cap " + std::to_string(cap));
    out.push_back(BasisState::ground(current));
    for (int s = site; s < n; ++s) {
        for (int q = 1; q <= budget; ++q) {
            current.emplace_back(s, q);
            ground_configurations(s + 1, n, budget - q, current, out, cap);
            current.pop_back();
        }
    }
}

}  // namespace detail

// Closed form: sum_{k=0..K} C(N,k) C(K,k) counts compositions of <= K quanta with k occupied sites.
inline std::size_t ground_basis_count(int n, int nu_max_ground) {
    std::size_t total = 0;
    for (int k = 0; k <= std::min(n, nu_max_ground); ++k) {
        double c = std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0));
        double d = std::exp(std::lgamma(nu_max_ground + 1.0) - std::lgamma(k + 1.0) -
                            std::lgamma(nu_max_ground - k + 1.0));
        total += static_cast<std::size_t>(std::llround(c * d));
    }
    return total;
}

inline Basis enumerate_ground_basis(const ModelParams& p) {
    p.validate();
    const std::size_t count = ground_basis_count(p.n_molecules, p.nu_max_ground);
    if (count > p.basis_cap)
        throw ModelError("ground basis size " + std::to_string(count) + " exceeds cap " +
                         std::to_string(p.basis_cap));
    std::vector<BasisState> states;
    states.reserve(count);
    VibOccupation current;
    detail::ground_configurations(0, p.n_molecules, p.nu_max_ground, current, states, p.basis_cap);
    return Basis(std::move(states), Manifold::Ground);
}

}  // namespace htc
