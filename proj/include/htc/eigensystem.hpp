// eigensystem.hpp: Diagonalization, per-eigenstate observables and classification.
//
// An EigenSystem is a list of entries sorted by energy. An entry is one eigenstate, or
// (symmetry route) a set of `multiplicity` symmetry partners that share every observable.
// Per-state quantities are stored; sums over states weight each entry by its multiplicity.

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "htc/hamiltonian.hpp"
#include "htc/model.hpp"
#include "htc/symmetry.hpp"

namespace htc {

class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

// ------------------------------ diagonalize ---------------------------------

struct Spectrum {
    Eigen::VectorXd values;   // ascending
    Eigen::MatrixXd vectors;  // orthonormal columns
};

// Full dense symmetric eigendecomposition. Each eigenvector is sign-fixed so that
// its largest-magnitude component is positive.
inline Spectrum diagonalize(const Eigen::MatrixXd& h) {
    if (h.rows() != h.cols()) throw NumericalError("diagonalize: matrix is not square");
    const auto n = h.rows();
    Spectrum s;
    if (n == 0) return s;
    const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
    const double asym = (h - h.transpose()).cwiseAbs().maxCoeff();
    if (!h.allFinite() || asym > 1e-12 * scale) {
        std::ostringstream os;
        os << "diagonalize: matrix not finite/symmetric (dim " << n << ", max |H - H^T| = " << asym << ")";
        throw NumericalError(os.str());
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h);
    if (solver.info() != Eigen::Success) {
        std::ostringstream os;
        os << "diagonalize: eigensolver did not converge (dim " << n << ", max|H| " << scale << ")";
        throw NumericalError(os.str());
    }
    s.values = solver.eigenvalues();
    s.vectors = solver.eigenvectors();
    for (Eigen::Index j = 0; j < n; ++j) {
        Eigen::Index imax = 0;
        s.vectors.col(j).cwiseAbs().maxCoeff(&imax);
        if (s.vectors(imax, j) < 0.0) s.vectors.col(j) *= -1.0;
    }
    return s;
}

inline Spectrum diagonalize(const HtcMatrix& h) { return diagonalize(h.dense()); }

// Consecutive eigenvalues closer than tol belong to one cluster; returns [begin, end) ranges.
inline std::vector<std::pair<Eigen::Index, Eigen::Index>> clusters(const Eigen::VectorXd& sorted, double tol) {
    std::vector<std::pair<Eigen::Index, Eigen::Index>> out;
    Eigen::Index b = 0;
    for (Eigen::Index i = 1; i <= sorted.size(); ++i) {
        if (i == sorted.size() || sorted(i) - sorted(i - 1) > tol) {
            out.emplace_back(b, i);
            b = i;
        }
    }
    return out;
}

namespace detail {

inline void fix_signs(Spectrum& s, Eigen::Index b, Eigen::Index e) {
    for (Eigen::Index j = b; j < e; ++j) {
        Eigen::Index imax = 0;
        s.vectors.col(j).cwiseAbs().maxCoeff(&imax);
        if (s.vectors(imax, j) < 0.0) s.vectors.col(j) *= -1.0;
    }
}

inline void rotate_cluster(Spectrum& s, Eigen::Index b, Eigen::Index e, const Eigen::MatrixXd& t) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (t + t.transpose()));
    s.vectors.middleCols(b, e - b) = s.vectors.middleCols(b, e - b) * es.eigenvectors();
}

}  // namespace detail

// Inside each degenerate cluster rotate the eigenvectors so that they diagonalize
// `tie` (restricted to the cluster). Makes per-state observables well defined when
// levels cross exactly, e.g. the bare photon and the 0-0 exciton at Omega = 0.
inline void resolve_degeneracies(Spectrum& s, const Eigen::MatrixXd& tie, double tol) {
    for (auto [b, e] : clusters(s.values, tol)) {
        if (e - b < 2) continue;
        const Eigen::MatrixXd v = s.vectors.middleCols(b, e - b);
        detail::rotate_cluster(s, b, e, v.transpose() * tie * v);
        detail::fix_signs(s, b, e);
    }
}

// Two-stage version. First diagonalize the decay operator inside the cluster, so each
// state decays with a single rate (secular limit); `decay(V)` returns V^T Gamma V.
// States that also share that rate are then split by `tie`.
template <class DecayFn>
void resolve_degeneracies(Spectrum& s, DecayFn&& decay, const Eigen::MatrixXd& tie, double tol) {
    for (auto [b, e] : clusters(s.values, tol)) {
        if (e - b < 2) continue;
        Eigen::MatrixXd g = decay(Eigen::MatrixXd(s.vectors.middleCols(b, e - b)));
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ges(0.5 * (g + g.transpose()));
        s.vectors.middleCols(b, e - b) = s.vectors.middleCols(b, e - b) * ges.eigenvectors();
        const Eigen::VectorXd rates = ges.eigenvalues();
        const double scale = std::max(1.0, rates.cwiseAbs().maxCoeff());
        for (auto [rb, re] : clusters(rates, 1e-10 * scale)) {
            if (re - rb < 2) continue;
            const Eigen::MatrixXd v = s.vectors.middleCols(b + rb, re - rb);
            detail::rotate_cluster(s, b + rb, b + re, v.transpose() * tie * v);
        }
        detail::fix_signs(s, b, e);
    }
}

// ------------------------------ EigenSystem ---------------------------------

enum class Label { LP, UP, X, Xb, Y, BrightOther, ReservoirDark };

inline const char* to_string(Label l) {
    switch (l) {
        case Label::LP: return "LP";
        case Label::UP: return "UP";
        case Label::X: return "X";
        case Label::Xb: return "Xb";
        case Label::Y: return "Y";
        case Label::BrightOther: return "BrightOther";
        case Label::ReservoirDark: return "ReservoirDark";
    }
    return "?";
}

struct EigenSystem {
    ModelParams params;
    int nu_max_ground{0};
    std::vector<double> omega;
    std::vector<int> multiplicity;
    std::vector<int> degeneracy;            // cluster size (in states) at tolerance degeneracy_tol
    std::vector<Sector> sector;
    Eigen::MatrixXd a_channels;             // entries x (nu_max_ground+1): sum_{i: nu_i = c} |<i|a|j>|^2
    Eigen::MatrixXd jm_channels;            // same for J_-
    std::vector<double> aG;                 // <G|a|j>
    std::vector<double> mu_G;               // <G|mu|j> = sqrt(N) <G|J_-|j> dipole_unit
    std::vector<double> gamma;              // kappa sum|a|^2 + N gamma_e sum|J_-|^2
    std::vector<double> f_emission;         // N sum|J_-|^2
    std::vector<double> photon_weight;      // <a^dag a>
    std::vector<double> symmetric_weight;   // projection on the totally symmetric subspace
    std::vector<Label> label;
    Eigen::MatrixXd vectors;                // site-basis vector per entry (columns), empty for pair sectors
    std::vector<int> vector_index;          // column in `vectors`, -1 if none
    double degeneracy_tol{1e-8};

    std::size_t size() const { return omega.size(); }
    int total_states() const { return std::accumulate(multiplicity.begin(), multiplicity.end(), 0); }
    double dipole_fraction(std::size_t j) const {
        const double mu = params.dipole_unit;
        return mu_G[j] * mu_G[j] / (params.n_molecules * mu * mu);
    }
};

enum class SolverRoute { Auto, Site, Symmetry };

inline const char* to_string(SolverRoute r) {
    switch (r) {
        case SolverRoute::Auto: return "auto";
        case SolverRoute::Site: return "site";
        case SolverRoute::Symmetry: return "symmetry";
    }
    return "?";
}

namespace detail {

struct RawEntry {
    double omega{0.0};
    int multiplicity{1};
    Sector sector{Sector::Unresolved};
    Eigen::VectorXd a_ch;
    Eigen::VectorXd jm_ch;
    double aG{0.0};
    double mu_G{0.0};
    double photon_weight{0.0};
    double symmetric_weight{0.0};
    int vector_col{-1};
};

inline Eigen::VectorXd photon_mask(const Basis& basis) {
    Eigen::VectorXd m(static_cast<Eigen::Index>(basis.size()));
    for (std::size_t k = 0; k < basis.size(); ++k) m(static_cast<Eigen::Index>(k)) = basis[k].photon;
    return m;
}

// Observables of a normalized site-basis vector.
inline RawEntry observe(const Eigen::VectorXd& x, const ModelParams& p, const JumpMatrices& jumps,
                        const std::vector<int>& channel, const Eigen::VectorXd& photon,
                        const Eigen::MatrixXd& sym_basis) {
    RawEntry e;
    const int nc = p.nu_max_ground + 1;
    const Eigen::VectorXd ya = jumps.a_matrix * x;
    const Eigen::VectorXd yj = jumps.jminus_matrix * x;
    e.a_ch = channel_weights(ya, channel, nc);
    e.jm_ch = channel_weights(yj, channel, nc);
    e.aG = ya(0);
    e.mu_G = std::sqrt(static_cast<double>(p.n_molecules)) * p.dipole_unit * yj(0);
    e.photon_weight = x.cwiseAbs2().dot(photon);
    e.symmetric_weight = (sym_basis.transpose() * x).squaredNorm();
    return e;
}

// V^T (kappa a^dag a + N gamma_e J_+ J_-) V over the truncated ground space, with the
// same normalization as EigenSystem::gamma.
inline auto decay_in(const JumpMatrices& jumps, const ModelParams& p) {
    return [&jumps, kappa = p.kappa, gam = p.gamma_e_collective](const Eigen::MatrixXd& v) {
        const Eigen::MatrixXd av = jumps.a_matrix * v;
        const Eigen::MatrixXd jv = jumps.jminus_matrix * v;
        return Eigen::MatrixXd(kappa * av.transpose() * av + gam * jv.transpose() * jv);
    };
}

inline EigenSystem assemble(const ModelParams& p, std::vector<RawEntry> raw, Eigen::MatrixXd vectors, double tol) {
    std::stable_sort(raw.begin(), raw.end(), [](const RawEntry& a, const RawEntry& b) { return a.omega < b.omega; });
    EigenSystem es;
    es.params = p;
    es.nu_max_ground = p.nu_max_ground;
    es.degeneracy_tol = tol;
    const auto n = raw.size();
    const int nc = p.nu_max_ground + 1;
    es.a_channels.resize(static_cast<Eigen::Index>(n), nc);
    es.jm_channels.resize(static_cast<Eigen::Index>(n), nc);
    es.vectors.resize(vectors.rows(), vectors.cols());
    int next_col = 0;
    for (std::size_t j = 0; j < n; ++j) {
        auto& r = raw[j];
        const auto row = static_cast<Eigen::Index>(j);
        es.omega.push_back(r.omega);
        es.multiplicity.push_back(r.multiplicity);
        es.sector.push_back(r.sector);
        es.a_channels.row(row) = r.a_ch.cwiseMax(0.0).transpose();
        es.jm_channels.row(row) = r.jm_ch.cwiseMax(0.0).transpose();
        es.aG.push_back(r.aG);
        es.mu_G.push_back(r.mu_G);
        es.photon_weight.push_back(r.photon_weight);
        es.symmetric_weight.push_back(r.symmetric_weight);
        if (r.vector_col >= 0) {
            es.vectors.col(next_col) = vectors.col(r.vector_col);
            es.vector_index.push_back(next_col++);
        } else {
            es.vector_index.push_back(-1);
        }
    }
    es.vectors.conservativeResize(Eigen::NoChange, next_col);
    es.degeneracy.assign(n, 1);
    Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(es.omega.data(), static_cast<Eigen::Index>(n));
    for (auto [b, e] : clusters(w, tol)) {
        int d = 0;
        for (auto j = b; j < e; ++j) d += es.multiplicity[static_cast<std::size_t>(j)];
        for (auto j = b; j < e; ++j) es.degeneracy[static_cast<std::size_t>(j)] = d;
    }
    es.label.assign(n, Label::BrightOther);
    const double N = p.n_molecules;
    for (std::size_t j = 0; j < n; ++j) {
        const double sa = es.a_channels.row(static_cast<Eigen::Index>(j)).sum();
        const double sj = es.jm_channels.row(static_cast<Eigen::Index>(j)).sum();
        es.gamma.push_back(p.kappa * sa + p.gamma_e_collective * sj);
        es.f_emission.push_back(N * sj);
    }
    return es;
}

}  // namespace detail

// Observables for a full site-basis spectrum. Degenerate clusters are first rotated to
// diagonalize the decay operator, then photon number plus half the symmetric projector.
inline EigenSystem derive_observables(Spectrum spectrum, const JumpMatrices& jumps, const ModelParams& p,
                                      const Basis& excitation, const Basis& ground, double degeneracy_tol = 1e-8) {
    if (jumps.excitation_id != excitation.fingerprint() || jumps.ground_id != ground.fingerprint())
        throw ModelError("derive_observables: jump matrices built on different bases");
    if (spectrum.vectors.rows() != static_cast<Eigen::Index>(excitation.size()))
        throw ModelError("derive_observables: spectrum dimension does not match basis");
    const double tol = degeneracy_tol * p.vib_freq;
    const Eigen::VectorXd photon = detail::photon_mask(excitation);
    const SectorBasis sym = symmetric_sector(p, excitation);
    Eigen::MatrixXd tie = 0.5 * sym.vectors * sym.vectors.transpose();
    tie.diagonal() += photon;
    resolve_degeneracies(spectrum, detail::decay_in(jumps, p), tie, tol);

    const auto channel = ground_channels(ground);
    std::vector<detail::RawEntry> raw;
    raw.reserve(static_cast<std::size_t>(spectrum.values.size()));
    for (Eigen::Index j = 0; j < spectrum.values.size(); ++j) {
        auto e = detail::observe(spectrum.vectors.col(j), p, jumps, channel, photon, sym.vectors);
        e.omega = spectrum.values(j);
        e.multiplicity = 1;
        e.sector = Sector::Unresolved;
        e.vector_col = static_cast<int>(j);
        raw.push_back(std::move(e));
    }
    return detail::assemble(p, std::move(raw), std::move(spectrum.vectors), tol);
}

// Projected block H_s = V^T H V for a sector basis V.
inline Eigen::MatrixXd sector_hamiltonian(const HtcMatrix& h, const SectorBasis& sb) {
    const Eigen::MatrixXd hv = h.entries * sb.vectors;
    Eigen::MatrixXd hs = sb.vectors.transpose() * hv;
    return 0.5 * (hs + hs.transpose());
}

// Same observables from the permutation-sector decomposition; cost independent of the
// N(N-1)-sized two-particle space apart from sparse products.
inline EigenSystem solve_by_symmetry(const ModelParams& p, const Basis& excitation, const Basis& ground,
                                     const HtcMatrix& h, const JumpMatrices& jumps, double degeneracy_tol = 1e-8) {
    if (h.basis_id != excitation.fingerprint()) throw ModelError("solve_by_symmetry: Hamiltonian basis mismatch");
    const double tol = degeneracy_tol * p.vib_freq;
    const Eigen::VectorXd photon = detail::photon_mask(excitation);
    const auto channel = ground_channels(ground);
    const SectorBasis sym = symmetric_sector(p, excitation);
    const SectorBasis std_sector = standard_sector(p, excitation);

    std::vector<detail::RawEntry> raw;
    std::vector<Eigen::VectorXd> cols;
    for (const SectorBasis* sb : {&sym, &std_sector}) {
        if (sb->vectors.cols() == 0) continue;
        Spectrum block = diagonalize(sector_hamiltonian(h, *sb));
        Eigen::MatrixXd tie = Eigen::MatrixXd::Zero(sb->vectors.cols(), sb->vectors.cols());
        for (std::size_t c = 0; c < sb->photon.size(); ++c) tie(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(c)) = sb->photon[c];
        const auto decay = detail::decay_in(jumps, p);
        resolve_degeneracies(block, [&](const Eigen::MatrixXd& v) { return decay(Eigen::MatrixXd(sb->vectors * v)); }, tie, tol);
        const Eigen::MatrixXd site = sb->vectors * block.vectors;
        for (Eigen::Index j = 0; j < block.values.size(); ++j) {
            auto e = detail::observe(site.col(j), p, jumps, channel, photon, sym.vectors);
            e.omega = block.values(j);
            e.multiplicity = sb->degeneracy;
            e.sector = sb->sector;
            e.vector_col = static_cast<int>(cols.size());
            cols.push_back(site.col(j));
            raw.push_back(std::move(e));
        }
    }
    for (const auto& lvl : pair_sector_levels(p, excitation, ground, jumps)) {
        detail::RawEntry e;
        e.omega = lvl.energy;
        e.multiplicity = lvl.degeneracy;
        e.sector = lvl.sector;
        e.a_ch = Eigen::VectorXd::Zero(p.nu_max_ground + 1);
        e.jm_ch = lvl.jm_channels;
        raw.push_back(std::move(e));
    }
    Eigen::MatrixXd vectors(static_cast<Eigen::Index>(excitation.size()), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t c = 0; c < cols.size(); ++c) vectors.col(static_cast<Eigen::Index>(c)) = cols[c];
    return detail::assemble(p, std::move(raw), std::move(vectors), tol);
}

// ------------------------------- classify -----------------------------------

struct ClassifyThresholds {
    double eps_dark{1e-4};        // fraction of total oscillator strength / photon weight
    double eps_emit{1e-6};
    double symmetric_min{0.5};
    double xb_center{0.4};        // units of omega_v
    double xb_halfwidth{0.25};
    double xb_dipole_max{0.05};   // "weakly bright": eps_dark <= |mu|^2/(N mu^2) < this
};

namespace detail {

inline bool weakly_bright_symmetric(const EigenSystem& es, std::size_t j, const ClassifyThresholds& t) {
    const double dip = es.dipole_fraction(j);
    return es.symmetric_weight[j] > t.symmetric_min && dip >= t.eps_dark && dip < t.xb_dipole_max &&
           std::abs(es.omega[j] / es.params.vib_freq - t.xb_center) <= t.xb_halfwidth;
}

}  // namespace detail

// An Xb candidate is never promoted to UP: near 0.4 omega_v the weakly bright vibronic
// polariton can carry more zero-phonon photon weight than either upper branch state.
inline std::vector<Label> classify(const EigenSystem& es, const ClassifyThresholds& t = {}) {
    const std::size_t n = es.size();
    std::vector<Label> labels(n, Label::BrightOther);
    const bool vibronic = es.params.huang_rhys > 0.0;

    long lp = -1, up = -1;
    auto a2 = [&](long j) { return es.aG[static_cast<std::size_t>(j)] * es.aG[static_cast<std::size_t>(j)]; };
    for (std::size_t j = 0; j < n; ++j) {
        const long jj = static_cast<long>(j);
        if (a2(jj) < t.eps_dark || es.dipole_fraction(j) < t.eps_dark) continue;  // polaritons are bright both ways
        if (es.omega[j] < 0.0 && (lp < 0 || a2(jj) > a2(lp))) lp = jj;
        if (es.omega[j] > 0.0 && !(vibronic && detail::weakly_bright_symmetric(es, j, t)) &&
            (up < 0 || a2(jj) > a2(up)))
            up = jj;
    }

    for (std::size_t j = 0; j < n; ++j) {
        if (static_cast<long>(j) == lp) { labels[j] = Label::LP; continue; }
        if (static_cast<long>(j) == up) { labels[j] = Label::UP; continue; }
        const double dip = es.dipole_fraction(j);
        const double f = es.f_emission[j];
        const auto row = static_cast<Eigen::Index>(j);
        const double vib_photon = es.a_channels.row(row).sum() - es.a_channels(row, 0);
        if (es.symmetric_weight[j] > t.symmetric_min) {
            // interference-dark: photon amplitude on G survives while the dipole cancels
            if (vibronic && dip < t.eps_dark && a2(static_cast<long>(j)) >= t.eps_dark && f > t.eps_emit)
                labels[j] = Label::X;
            else if (vibronic && detail::weakly_bright_symmetric(es, j, t))
                labels[j] = Label::Xb;
        } else if (vibronic && dip < t.eps_dark && a2(static_cast<long>(j)) < t.eps_dark && vib_photon > t.eps_emit) {
            labels[j] = Label::Y;
        } else if (f < t.eps_emit && es.photon_weight[j] < t.eps_emit) {
            labels[j] = Label::ReservoirDark;
        }
    }
    return labels;
}

// --------------------------- convenience driver -----------------------------

struct SolveOptions {
    SolverRoute route{SolverRoute::Auto};
    std::size_t site_route_max_dim{1200};
    double degeneracy_tol{1e-8};
    ClassifyThresholds thresholds{};
};

inline SolverRoute resolve_route(const ModelParams& p, const SolveOptions& opt) {
    if (opt.route != SolverRoute::Auto) return opt.route;
    return excitation_basis_count(p.n_molecules, p.nu_max) <= opt.site_route_max_dim ? SolverRoute::Site
                                                                                      : SolverRoute::Symmetry;
}

// Basis, Hamiltonian, jumps, diagonalization, observables and labels in one call.
inline EigenSystem solve(const ModelParams& p, const SolveOptions& opt = {}) {
    p.validate();
    const Basis exc = enumerate_excitation_basis(p);
    const Basis gnd = enumerate_ground_basis(p);
    const HtcMatrix h = build_hamiltonian(p, exc);
    const JumpMatrices jumps = build_jump_matrices(p, exc, gnd);
    EigenSystem es = resolve_route(p, opt) == SolverRoute::Site
                         ? derive_observables(diagonalize(h), jumps, p, exc, gnd, opt.degeneracy_tol)
                         : solve_by_symmetry(p, exc, gnd, h, jumps, opt.degeneracy_tol);
    es.label = classify(es, opt.thresholds);
    return es;
}

// Copy restricted to ground channels 0..k (decay rates and emission strengths recomputed).
inline EigenSystem truncate_ground(const EigenSystem& es, int k) {
    if (k < 0 || k > es.nu_max_ground)
        throw ModelError("truncate_ground: channel " + std::to_string(k) + " outside 0.." +
                         std::to_string(es.nu_max_ground));
    EigenSystem out = es;
    out.nu_max_ground = k;
    out.params.nu_max_ground = k;
    out.a_channels = es.a_channels.leftCols(k + 1);
    out.jm_channels = es.jm_channels.leftCols(k + 1);
    for (std::size_t j = 0; j < out.size(); ++j) {
        const auto row = static_cast<Eigen::Index>(j);
        const double sa = out.a_channels.row(row).sum();
        const double sj = out.jm_channels.row(row).sum();
        out.gamma[j] = es.params.kappa * sa + es.params.gamma_e_collective * sj;
        out.f_emission[j] = es.params.n_molecules * sj;
    }
    return out;
}

}  // namespace htc
