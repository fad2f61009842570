// hamiltonian.hpp: HTC Hamiltonian on the truncated one-excitation manifold and
// the jump operators (photon annihilation, collective lowering) into the ground manifold.

#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "htc/model.hpp"

namespace htc {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor>;
using Triplet = Eigen::Triplet<double>;

struct HtcMatrix {
    std::size_t dim{0};
    SparseMatrix entries;
    std::uint64_t basis_id{0};

    Eigen::MatrixXd dense() const { return Eigen::MatrixXd(entries); }
};

struct JumpMatrices {
    SparseMatrix a_matrix;       // <ground_i| a |excitation_k>
    SparseMatrix jminus_matrix;  // <ground_i| J_- |excitation_k>, mu = sqrt(N) (J_- + J_+)
    std::uint64_t excitation_id{0};
    std::uint64_t ground_id{0};
};

inline FranckCondonTable make_fc_table(const ModelParams& p) {
    const int vib = std::max(p.nu_max, p.nu_max_ground);
    return FranckCondonTable(p.lambda(), vib, p.nu_max);
}

// Diagonal energy of a basis state in the rotating frame of omega_00.
inline double diagonal_energy(const BasisState& s, const ModelParams& p) {
    return s.vib_quanta() * p.vib_freq - (s.photon == 1 ? p.detuning : 0.0);
}

// H = H_C + H_M + V_a. In the displaced excited-state basis H_M is diagonal, so the
// only off-diagonal elements come from V_a = (Omega/2) sum_n (|g_n><e_n| a^dag + h.c.):
// a photon state couples to every exciton state reached by flipping one molecule,
// weighted by the Franck-Condon overlap of that molecule's vibrational state.
inline HtcMatrix build_hamiltonian(const ModelParams& p, const Basis& basis) {
    p.validate();
    if (basis.manifold() != Manifold::Excitation)
        throw ModelError("build_hamiltonian: basis is not an excitation-manifold basis");
    if (basis.size() != excitation_basis_count(p.n_molecules, p.nu_max))
        throw ModelError("build_hamiltonian: basis does not match params (size " + std::to_string(basis.size()) +
                         ")");

    const auto fc = make_fc_table(p);
    const double g = 0.5 * p.rabi_single;
    const int N = p.n_molecules;

    std::vector<Triplet> trips;
    trips.reserve(basis.size() * 4);
    auto couple = [&](std::size_t k, const BasisState& target, double amp) {
        auto j = basis.find(target);
        if (!j) throw ModelError("build_hamiltonian: coupled state missing from basis");
        const double v = g * amp;
        trips.emplace_back(static_cast<int>(k), static_cast<int>(*j), v);
        trips.emplace_back(static_cast<int>(*j), static_cast<int>(k), v);
    };

    for (std::size_t k = 0; k < basis.size(); ++k) {
        const auto& s = basis[k];
        trips.emplace_back(static_cast<int>(k), static_cast<int>(k), diagonal_energy(s, p));
        if (s.kind != StateKind::PhotonVib || g == 0.0) continue;
        const auto& occ = s.ground_vib_occupations;
        for (int n = 0; n < N; ++n) {
            for (int w = 0; w <= p.nu_max; ++w) {
                if (occ.empty()) {
                    couple(k, BasisState::exciton(n, w), fc(0, w));
                } else {
                    const auto [m, v] = occ.front();
                    if (n == m)
                        couple(k, BasisState::exciton(n, w), fc(v, w));
                    else
                        couple(k, BasisState::two_particle(n, w, m, v), fc(0, w));
                }
            }
        }
    }

    HtcMatrix h;
    h.dim = basis.size();
    h.entries.resize(static_cast<int>(h.dim), static_cast<int>(h.dim));
    h.entries.setFromTriplets(trips.begin(), trips.end());
    h.entries.makeCompressed();
    h.basis_id = basis.fingerprint();
    return h;
}

inline JumpMatrices build_jump_matrices(const ModelParams& p, const Basis& excitation, const Basis& ground) {
    p.validate();
    if (excitation.manifold() != Manifold::Excitation || ground.manifold() != Manifold::Ground)
        throw ModelError("build_jump_matrices: basis manifolds mismatch");
    if (ground.size() != ground_basis_count(p.n_molecules, p.nu_max_ground) ||
        excitation.size() != excitation_basis_count(p.n_molecules, p.nu_max))
        throw ModelError("build_jump_matrices: basis does not match params");

    const auto fc = make_fc_table(p);
    const double norm = 1.0 / std::sqrt(static_cast<double>(p.n_molecules));
    const int gmax = p.nu_max_ground;

    std::vector<Triplet> a_trips;
    std::vector<Triplet> j_trips;
    auto to_ground = [&](VibOccupation occ) -> std::optional<std::size_t> {
        std::sort(occ.begin(), occ.end());
        if (total_quanta(occ) > gmax) return std::nullopt;
        return ground.find(BasisState::ground(std::move(occ)));
    };

    for (std::size_t k = 0; k < excitation.size(); ++k) {
        const auto& s = excitation[k];
        const int col = static_cast<int>(k);
        if (s.kind == StateKind::PhotonVib) {
            if (auto i = to_ground(s.ground_vib_occupations)) a_trips.emplace_back(static_cast<int>(*i), col, 1.0);
            continue;
        }
        const int n = *s.exciton_site;
        const int w = *s.exciton_vib;
        VibOccupation rest;
        if (s.kind == StateKind::ExcitonTwoParticle) rest.emplace_back(*s.spectator_site, *s.spectator_vib);
        for (int v = 0; v <= gmax; ++v) {
            VibOccupation occ = rest;
            if (v > 0) occ.emplace_back(n, v);
            if (auto i = to_ground(std::move(occ))) j_trips.emplace_back(static_cast<int>(*i), col, norm * fc(v, w));
        }
    }

    JumpMatrices jm;
    const int rows = static_cast<int>(ground.size());
    const int cols = static_cast<int>(excitation.size());
    jm.a_matrix.resize(rows, cols);
    jm.a_matrix.setFromTriplets(a_trips.begin(), a_trips.end());
    jm.jminus_matrix.resize(rows, cols);
    jm.jminus_matrix.setFromTriplets(j_trips.begin(), j_trips.end());
    jm.excitation_id = excitation.fingerprint();
    jm.ground_id = ground.fingerprint();
    return jm;
}

// Plain-text dump: a comment line, then one "row col value" triplet per stored entry.
inline void write_triplets(std::ostream& os, const SparseMatrix& m, const std::string& comment = {}) {
    os << "# rows=" << m.rows() << " cols=" << m.cols() << " nnz=" << m.nonZeros();
    if (!comment.empty()) os << ' ' << comment;
    os << '\n';
    os << std::setprecision(17);
    for (int c = 0; c < m.outerSize(); ++c)
        for (SparseMatrix::InnerIterator it(m, c); it; ++it) os << it.row() << ' ' << it.col() << ' ' << it.value() << '\n';
}

}  // namespace htc
