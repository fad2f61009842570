// symmetry.hpp: Permutation-symmetry sectors of the truncated excitation manifold.
//
// H, a and J_- commute with relabelling of the molecules, so the excitation manifold
// splits into isotypic components of S_N:
//   Symmetric          [N]        multiplicity 1, photon + one- and two-particle states
//   Standard           [N-1,1]    degeneracy N-1, photon + one- and two-particle states
//   PairSymmetric      [N-2,2]    degeneracy N(N-3)/2, two-particle states only
//   PairAntisymmetric  [N-2,1,1]  degeneracy (N-1)(N-2)/2, two-particle states only
// The last two carry no photon and no one-particle exciton, so V_a cannot reach them:
// they are exact eigenstates at (nu~ + nu) omega_v. For the first two we keep one
// partner of the irrep (standard partner c = (e_0 - e_1)/sqrt 2), which is enough
// because every operator used downstream commutes with S_N (Schur's lemma).

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <string>
#include <vector>

#include "htc/hamiltonian.hpp"
#include "htc/model.hpp"

namespace htc {

enum class Sector { Symmetric, Standard, PairSymmetric, PairAntisymmetric, Unresolved };

inline const char* to_string(Sector s) {
    switch (s) {
        case Sector::Symmetric: return "symmetric";
        case Sector::Standard: return "standard";
        case Sector::PairSymmetric: return "pair_symmetric";
        case Sector::PairAntisymmetric: return "pair_antisymmetric";
        case Sector::Unresolved: return "site";
    }
    return "?";
}

// Orthonormal columns spanning one partner of a sector, expressed in the site basis.
struct SectorBasis {
    Sector sector{Sector::Symmetric};
    int degeneracy{1};
    Eigen::MatrixXd vectors;
    std::vector<int> photon;  // 1 where the column is a pure photon state
};

// Two-particle states of one (nu~, nu) pair that belong to an H-decoupled sector.
struct PairSectorLevel {
    Sector sector{Sector::PairSymmetric};
    int exciton_vib{0};
    int spectator_vib{1};
    int degeneracy{0};
    double energy{0.0};
    Eigen::VectorXd jm_channels;  // per-state sum_{i: nu_i = c} |<i|J_-|state>|^2
};

namespace detail {

inline std::size_t require(const Basis& b, const BasisState& s) {
    auto i = b.find(s);
    if (!i) throw ModelError("symmetry: state missing from basis");
    return *i;
}

// Standard-irrep partner coefficients, sum zero, unit norm.
inline double partner(int site) {
    if (site == 0) return 1.0 / std::sqrt(2.0);
    if (site == 1) return -1.0 / std::sqrt(2.0);
    return 0.0;
}

}  // namespace detail

inline SectorBasis symmetric_sector(const ModelParams& p, const Basis& basis) {
    const int N = p.n_molecules;
    const int vmax = p.nu_max;
    const auto dim = static_cast<Eigen::Index>(basis.size());
    std::vector<Eigen::VectorXd> cols;
    std::vector<int> photon;

    auto push = [&](Eigen::VectorXd v, int is_photon) {
        v.normalize();
        cols.push_back(std::move(v));
        photon.push_back(is_photon);
    };

    Eigen::VectorXd v = Eigen::VectorXd::Zero(dim);
    v(static_cast<Eigen::Index>(detail::require(basis, BasisState::photon_vib({})))) = 1.0;
    push(v, 1);
    for (int nu = 1; nu <= vmax; ++nu) {
        v.setZero();
        for (int m = 0; m < N; ++m) v(static_cast<Eigen::Index>(detail::require(basis, BasisState::photon_vib({{m, nu}})))) = 1.0;
        push(v, 1);
    }
    for (int w = 0; w <= vmax; ++w) {
        v.setZero();
        for (int n = 0; n < N; ++n) v(static_cast<Eigen::Index>(detail::require(basis, BasisState::exciton(n, w)))) = 1.0;
        push(v, 0);
    }
    if (N >= 2) {
        for (int w = 0; w <= vmax; ++w)
            for (int nu = 1; nu <= vmax; ++nu) {
                v.setZero();
                for (int n = 0; n < N; ++n)
                    for (int m = 0; m < N; ++m)
                        if (m != n)
                            v(static_cast<Eigen::Index>(detail::require(basis, BasisState::two_particle(n, w, m, nu)))) = 1.0;
                push(v, 0);
            }
    }

    SectorBasis sb;
    sb.sector = Sector::Symmetric;
    sb.degeneracy = 1;
    sb.vectors.resize(dim, static_cast<Eigen::Index>(cols.size()));
    for (std::size_t c = 0; c < cols.size(); ++c) sb.vectors.col(static_cast<Eigen::Index>(c)) = cols[c];
    sb.photon = std::move(photon);
    return sb;
}

namespace detail {

// A = sum_m c_m sum_{n != m} |e_n nu~, g_m nu>   (copy labelled by the spectator)
// B = sum_n c_n sum_{m != n} |e_n nu~, g_m nu>   (copy labelled by the exciton)
inline void pair_copies(const ModelParams& p, const Basis& basis, int w, int nu, Eigen::VectorXd& a,
                        Eigen::VectorXd& b) {
    const int N = p.n_molecules;
    a.setZero(static_cast<Eigen::Index>(basis.size()));
    b.setZero(static_cast<Eigen::Index>(basis.size()));
    for (int n = 0; n < N; ++n)
        for (int m = 0; m < N; ++m) {
            if (m == n) continue;
            const auto k = static_cast<Eigen::Index>(require(basis, BasisState::two_particle(n, w, m, nu)));
            a(k) += partner(m);
            b(k) += partner(n);
        }
}

}  // namespace detail

// Empty (zero columns) for N = 1.
inline SectorBasis standard_sector(const ModelParams& p, const Basis& basis) {
    const int N = p.n_molecules;
    const int vmax = p.nu_max;
    const auto dim = static_cast<Eigen::Index>(basis.size());
    SectorBasis sb;
    sb.sector = Sector::Standard;
    sb.degeneracy = N - 1;
    if (N < 2) {
        sb.vectors.resize(dim, 0);
        return sb;
    }
    std::vector<Eigen::VectorXd> cols;
    std::vector<int> photon;
    Eigen::VectorXd v = Eigen::VectorXd::Zero(dim);
    for (int nu = 1; nu <= vmax; ++nu) {
        v.setZero();
        for (int m = 0; m < 2; ++m)
            v(static_cast<Eigen::Index>(detail::require(basis, BasisState::photon_vib({{m, nu}})))) = detail::partner(m);
        cols.push_back(v);
        photon.push_back(1);
    }
    for (int w = 0; w <= vmax; ++w) {
        v.setZero();
        for (int n = 0; n < 2; ++n)
            v(static_cast<Eigen::Index>(detail::require(basis, BasisState::exciton(n, w)))) = detail::partner(n);
        cols.push_back(v);
        photon.push_back(0);
    }
    Eigen::VectorXd a, b;
    for (int w = 0; w <= vmax; ++w)
        for (int nu = 1; nu <= vmax; ++nu) {
            detail::pair_copies(p, basis, w, nu, a, b);
            if (N >= 3) {
                cols.push_back((a + b).normalized());
                photon.push_back(0);
            }
            cols.push_back((a - b).normalized());
            photon.push_back(0);
        }
    sb.vectors.resize(dim, static_cast<Eigen::Index>(cols.size()));
    for (std::size_t c = 0; c < cols.size(); ++c) sb.vectors.col(static_cast<Eigen::Index>(c)) = cols[c];
    sb.photon = std::move(photon);
    return sb;
}

// Ground-state channel (total vibrational quanta) of every ground basis state.
inline std::vector<int> ground_channels(const Basis& ground) {
    std::vector<int> ch(ground.size());
    for (std::size_t i = 0; i < ground.size(); ++i) ch[i] = ground[i].vib_quanta();
    return ch;
}

// Per-channel weights sum_{i in c} y_i^2.
inline Eigen::VectorXd channel_weights(const Eigen::VectorXd& y, const std::vector<int>& channel, int n_channels) {
    Eigen::VectorXd w = Eigen::VectorXd::Zero(n_channels);
    for (Eigen::Index i = 0; i < y.size(); ++i) w(channel[static_cast<std::size_t>(i)]) += y(i) * y(i);
    return w;
}

// Levels of the [N-2,2] and [N-2,1,1] sectors. Their J_- channel weights follow from traces
// over the (nu~, nu) pair space, split by the swap (n,m) -> (m,n), minus the symmetric and
// standard parts that live in the same pair space.
inline std::vector<PairSectorLevel> pair_sector_levels(const ModelParams& p, const Basis& basis, const Basis& ground,
                                                       const JumpMatrices& jumps) {
    const int N = p.n_molecules;
    std::vector<PairSectorLevel> out;
    if (N < 3) return out;
    const int n_sym = N * (N - 3) / 2;
    const int n_anti = (N - 1) * (N - 2) / 2;
    const auto channel = ground_channels(ground);
    const int nc = p.nu_max_ground + 1;
    const double inv_total = 1.0 / std::sqrt(static_cast<double>(N) * (N - 1));

    for (int w = 0; w <= p.nu_max; ++w)
        for (int nu = 1; nu <= p.nu_max; ++nu) {
            Eigen::VectorXd tr = Eigen::VectorXd::Zero(nc);
            Eigen::VectorXd tr_swap = Eigen::VectorXd::Zero(nc);
            Eigen::VectorXd sym = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(basis.size()));
            for (int n = 0; n < N; ++n)
                for (int m = 0; m < N; ++m) {
                    if (m == n) continue;
                    const auto k = static_cast<Eigen::Index>(detail::require(basis, BasisState::two_particle(n, w, m, nu)));
                    const auto ks = static_cast<Eigen::Index>(detail::require(basis, BasisState::two_particle(m, w, n, nu)));
                    sym(k) = inv_total;
                    const Eigen::VectorXd y = jumps.jminus_matrix.col(k);
                    const Eigen::VectorXd ys = jumps.jminus_matrix.col(ks);
                    for (Eigen::Index i = 0; i < y.size(); ++i) {
                        const int c = channel[static_cast<std::size_t>(i)];
                        tr(c) += y(i) * y(i);
                        tr_swap(c) += y(i) * ys(i);
                    }
                }
            Eigen::VectorXd a, b;
            detail::pair_copies(p, basis, w, nu, a, b);
            const Eigen::VectorXd s_plus = (a + b).normalized();
            const Eigen::VectorXd s_minus = (a - b).normalized();
            auto weights = [&](const Eigen::VectorXd& x) {
                return channel_weights(jumps.jminus_matrix * x, channel, nc);
            };

            PairSectorLevel ps;
            ps.exciton_vib = w;
            ps.spectator_vib = nu;
            ps.energy = (w + nu) * p.vib_freq;
            if (n_sym > 0) {
                ps.sector = Sector::PairSymmetric;
                ps.degeneracy = n_sym;
                ps.jm_channels = (0.5 * (tr + tr_swap) - weights(sym) - (N - 1) * weights(s_plus)) / n_sym;
                out.push_back(ps);
            }
            ps.sector = Sector::PairAntisymmetric;
            ps.degeneracy = n_anti;
            ps.jm_channels = (0.5 * (tr - tr_swap) - (N - 1) * weights(s_minus)) / n_anti;
            out.push_back(ps);
        }
    return out;
}

}  // namespace htc
