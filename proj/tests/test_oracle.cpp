#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "htc/eigensystem.hpp"
#include "htc/spectra.hpp"
#include "oracle/brute_force.hpp"

using namespace htc;

namespace {

struct Case {
    int n;
    int vmax;
    double l2;
    double rabi;
    double detuning;
};

ModelParams params(const Case& c) {
    ModelParams p;
    p.n_molecules = c.n;
    p.nu_max = c.vmax;
    p.nu_max_ground = c.vmax;
    p.huang_rhys = c.l2;
    p.rabi_single = c.rabi;
    p.detuning = c.detuning;
    p.kappa = 0.9;
    p.gamma_e_collective = 3.0;
    p.dipole_unit = 1.0;
    return p;
}

const std::vector<Case>& cases() {
    static const std::vector<Case> c = {
        {1, 2, 1.0, 1.7, 0.0}, {1, 1, 0.5, 0.8, 0.2}, {2, 2, 1.0, 1.6, 0.0},
        {2, 1, 0.3, 1.1, -0.1}, {3, 2, 1.0, 1.3, 0.0}, {3, 2, 0.5, 0.9, 0.15},
    };
    return c;
}

int levels_for(int n) { return n == 3 ? 20 : 28; }

// running max of |d| that keeps NaN
void worst(double& acc, double d) {
    if (!(std::abs(d) <= acc)) acc = std::abs(d);
}

}  // namespace

TEST(Oracle, HamiltonianEntrywise) {
    for (const auto& c : cases()) {
        const ModelParams p = params(c);
        const Basis b = enumerate_excitation_basis(p);
        const oracle::BruteForce bf(p, levels_for(c.n));
        const Eigen::MatrixXd ref = bf.hamiltonian(b);
        const Eigen::MatrixXd lib = build_hamiltonian(p, b).dense();
        EXPECT_LE((ref - lib).cwiseAbs().maxCoeff(), 1e-12) << c.n << ' ' << c.vmax << ' ' << c.l2;
        // the embedded basis is orthonormal
        const Eigen::MatrixXd e = bf.embed(b);
        EXPECT_LE((e.transpose() * e - Eigen::MatrixXd::Identity(e.cols(), e.cols())).cwiseAbs().maxCoeff(), 1e-12);
    }
}

TEST(Oracle, JumpOperatorsEntrywise) {
    for (const auto& c : cases()) {
        const ModelParams p = params(c);
        const Basis exc = enumerate_excitation_basis(p);
        const Basis gnd = enumerate_ground_basis(p);
        const oracle::BruteForce bf(p, levels_for(c.n));
        const JumpMatrices j = build_jump_matrices(p, exc, gnd);
        EXPECT_LE((bf.a_matrix(gnd, exc) - Eigen::MatrixXd(j.a_matrix)).cwiseAbs().maxCoeff(), 1e-12) << c.n;
        EXPECT_LE((bf.jminus_matrix(gnd, exc) - Eigen::MatrixXd(j.jminus_matrix)).cwiseAbs().maxCoeff(), 1e-12) << c.n;
    }
}

TEST(Oracle, EigenvaluesAndSpectra) {
    const auto grid = FrequencyGrid{-3.5, 2.5, 0.01}.points();
    for (const auto& c : cases()) {
        const ModelParams p = params(c);
        const Basis exc = enumerate_excitation_basis(p);
        const Basis gnd = enumerate_ground_basis(p);
        const oracle::BruteForce bf(p, levels_for(c.n));
        std::vector<int> channel;
        for (std::size_t i = 0; i < gnd.size(); ++i) channel.push_back(gnd[i].vib_quanta());
        const int nmg = p.nu_max_ground;
        const auto ref = oracle::spectra(p, bf.hamiltonian(exc), bf.a_matrix(gnd, exc), bf.jminus_matrix(gnd, exc),
                                         channel, grid, nmg);
        EXPECT_EQ(ref.bright_in_cluster, 0);

        for (auto route : {SolverRoute::Site, SolverRoute::Symmetry}) {
            SolveOptions o;
            o.route = route;
            const EigenSystem es = solve(p, o);
            std::vector<double> w;
            for (std::size_t j = 0; j < es.size(); ++j)
                w.insert(w.end(), static_cast<std::size_t>(es.multiplicity[j]), es.omega[j]);
            std::sort(w.begin(), w.end());
            ASSERT_EQ(w.size(), ref.energies.size());
            for (std::size_t k = 0; k < w.size(); ++k) EXPECT_NEAR(w[k], ref.energies[k], 1e-9);

            const auto abs = absorption_spectrum(es, grid);
            const auto lpl = lpl_spectrum(es, PopulationModel::uniform(-100, 100), grid, nmg);
            const auto bound = bound_absorption(es, grid);
            double da = 0.0, dl = 0.0, db = 0.0;
            for (std::size_t g = 0; g < grid.size(); ++g) {
                worst(da, abs.values[g] - ref.absorption[g]);
                worst(dl, lpl.values[g] - ref.lpl[g]);
                worst(db, bound.values[g] - ref.bound[g]);
            }
            EXPECT_LE(da, 1e-9) << c.n << ' ' << to_string(route);
            EXPECT_LE(dl, 1e-9) << c.n << ' ' << to_string(route);
            EXPECT_LE(db, 1e-9) << c.n << ' ' << to_string(route);
        }
    }
}
