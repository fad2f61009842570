#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "htc/critical.hpp"
#include "htc/spectra.hpp"

using namespace htc;

namespace {

ModelParams params(int n, double l2, double rabi_collective, int vmax, int gmax) {
    ModelParams p;
    p.n_molecules = n;
    p.huang_rhys = l2;
    p.rabi_single = rabi_collective / std::sqrt(static_cast<double>(n));
    p.nu_max = vmax;
    p.nu_max_ground = gmax;
    p.kappa = 0.9;
    p.gamma_e_collective = 3.0;
    return p;
}

std::vector<double> grid(double lo, double hi, double step) { return FrequencyGrid{lo, hi, step}.points(); }

}  // namespace

TEST(Lineshape, LorentzianIntegratesToPi) {
    const auto g = grid(-400.0, 400.0, 0.005);
    SpectralSeries s;
    s.grid = g;
    for (double w : g) s.values.push_back(lorentzian(w, 0.3, 0.45));
    EXPECT_NEAR(s.integral() / std::numbers::pi, 1.0, 2e-3);
    EXPECT_NEAR(lorentzian(0.3, 0.3, 0.45), 1.0 / 0.45, 1e-15);
}

TEST(Lineshape, SingleStateAreaMatchesChannelWeights) {
    const EigenSystem es = solve(params(3, 1.0, 2.4, 3, 2));
    const auto g = grid(-300.0, 300.0, 0.005);
    for (std::size_t j = 0; j < es.size(); j += 7) {
        const auto s = lineshape(es, j, JumpOperator::A, g);
        const double expect = std::numbers::pi * es.a_channels.row(static_cast<Eigen::Index>(j)).sum();
        if (expect < 1e-6 || coherence_width(es, j, {}) < 0.05) continue;  // unresolved on this grid
        EXPECT_NEAR(s.integral() / expect, 1.0, 0.02) << j;
        for (double v : s.values) EXPECT_GE(v, 0.0);
    }
    EXPECT_THROW(lineshape(es, es.size(), JumpOperator::A, g), SpectraError);
    EXPECT_THROW(lineshape(es, 0, JumpOperator::A, g, 3), SpectraError);
    EXPECT_EQ(parse_jump_operator("jminus"), JumpOperator::JMinus);
    EXPECT_THROW(parse_jump_operator("b"), SpectraError);
}

TEST(Lineshape, ZeroRateUsesFloor) {
    ModelParams p = params(2, 1.0, 2.0, 2, 1);
    p.kappa = 0.0;
    p.gamma_e_collective = 0.0;
    const EigenSystem es = solve(p);
    LineshapeOptions o;
    o.kappa_floor = 0.01;
    EXPECT_DOUBLE_EQ(coherence_width(es, 0, o), 0.01);
}

TEST(TavisCummingsSpectra, PolaritonDoublet) {
    const double g = 1.6;
    const EigenSystem es = solve(params(6, 0.0, g, 0, 0));
    const auto lp = lower_polariton(es), up = upper_polariton(es);
    EXPECT_NEAR(es.omega[lp], -g / 2, 1e-12);
    EXPECT_NEAR(es.omega[up], g / 2, 1e-12);
    // superradiant emission: F = N/2 for each polariton
    EXPECT_NEAR(es.f_emission[lp], 3.0, 1e-12);
    EXPECT_NEAR(es.gamma[lp], (0.9 + 3.0) / 2, 1e-12);

    const auto w = grid(-2.5, 2.5, 0.002);
    const auto a = absorption_spectrum(es, w);
    ASSERT_EQ(a.sticks.size(), 2u);
    for (const auto& st : a.sticks) EXPECT_NEAR(st.strength, std::numbers::pi * 0.5 * 3.0 / 1.95, 1e-12);
    const double expect = std::numbers::pi * 0.5 * 3.0 / 1.95 * (lorentzian(0.3, -0.8, 0.975) + lorentzian(0.3, 0.8, 0.975));
    EXPECT_NEAR(a.at(0.3), expect, 1e-12);
    EXPECT_NEAR(a.at(0.3), a.at(-0.3), 1e-12);

    const auto b = bound_absorption(es, w);
    double total = 0.0;
    for (const auto& st : b.sticks) {
        if (st.strength < 1e-14) continue;
        EXPECT_NEAR(st.strength, 3.0, 1e-12);  // N mu^2 / 2
        total += st.strength;
    }
    EXPECT_NEAR(total, 6.0, 1e-12);
    EXPECT_NEAR(b.max_value(), 1.0, 1e-15);

    const auto l = lpl_spectrum(es, PopulationModel::delta(lp), w, 0);
    ASSERT_EQ(l.sticks.size(), 1u);
    EXPECT_NEAR(l.sticks[0].strength, 0.5, 1e-12);
}

// Bare photon with no light-matter coupling never reaches the emitters: F = 0.
TEST(Absorption, UncoupledPhotonDoesNotAbsorb) {
    const EigenSystem es = solve(params(3, 1.0, 0.0, 2, 1));
    const auto a = absorption_spectrum(es, grid(-2, 2, 0.01));
    EXPECT_EQ(a.max_value(), 0.0);
    EXPECT_TRUE(a.sticks.empty());
}

TEST(Absorption, AreaIsPiTimesStickSum) {
    const EigenSystem es = solve(params(4, 1.0, 2.4, 3, 1));
    const auto a = absorption_spectrum(es, grid(-600, 600, 0.01));
    EXPECT_NEAR(a.integral() / (std::numbers::pi * total_stick_strength(a)), 1.0, 0.01);
    AbsorptionOptions o;
    o.pump_strength = 2.0;
    const auto a2 = absorption_spectrum(es, grid(-2, 2, 0.01), o);
    const auto a1 = absorption_spectrum(es, grid(-2, 2, 0.01));
    for (std::size_t i = 0; i < a1.values.size(); ++i) EXPECT_NEAR(a2.values[i], 4.0 * a1.values[i], 1e-12);
}

TEST(Absorption, NonRadiativeDephasingBroadens) {
    const EigenSystem es = solve(params(4, 1.0, 2.4, 3, 1));
    AbsorptionOptions o;
    o.kappa_nr = 0.2;
    const auto w = grid(-2.5, 2.5, 0.002);
    EXPECT_LT(absorption_spectrum(es, w, o).max_value(), absorption_spectrum(es, w).max_value());
}

TEST(BoundAbsorption, StickSumRule) {
    const ModelParams p = params(5, 1.0, 2.4, 4, 1);
    const EigenSystem es = solve(p);
    double poisson = 0.0, term = std::exp(-1.0);
    for (int n = 0; n <= 4; ++n) {
        if (n > 0) term /= n;
        poisson += term;
    }
    EXPECT_NEAR(total_stick_strength(bound_absorption(es, grid(-2, 2, 0.01))) / 5.0, poisson, 1e-10);
    EXPECT_NEAR(bound_absorption(es, grid(-2, 2, 0.01), 0.05).max_value(), 1.0, 1e-15);
}

TEST(Populations, NormalizedAndMultiplicityWeighted) {
    const EigenSystem es = solve(params(6, 1.0, 2.4, 3, 1));
    for (const auto& pop : {PopulationModel::uniform(-10, 1.3), PopulationModel::gaussian(0.0, 0.5),
                            PopulationModel::delta(3)}) {
        const auto w = pop.weights(es);
        double s = 0.0;
        for (double x : w) {
            EXPECT_GE(x, 0.0);
            s += x;
        }
        EXPECT_NEAR(s, 1.0, 1e-12);
    }
    const auto w = PopulationModel::uniform(-10, 10).weights(es);
    for (std::size_t j = 0; j < es.size(); ++j) EXPECT_NEAR(w[j], es.multiplicity[j] / double(es.total_states()), 1e-14);
    EXPECT_THROW(PopulationModel::uniform(-10, -9).weights(es), SpectraError);
    EXPECT_THROW(PopulationModel::delta(es.size()).weights(es), SpectraError);
    EXPECT_THROW(PopulationModel::gaussian(0, 0).weights(es), SpectraError);
}

TEST(Lpl, ChannelsAddIndependently) {
    const EigenSystem es = solve(params(4, 1.0, 2.4, 3, 2));
    const auto w = grid(-3, 2, 0.01);
    const auto pop = PopulationModel::uniform(-10, 1.3);
    const auto l0 = lpl_spectrum(es, pop, w, 0);
    const auto l1 = lpl_spectrum(es, pop, w, 1);
    const auto l2 = lpl_spectrum(es, pop, w, 2);
    for (std::size_t i = 0; i < w.size(); ++i) {
        EXPECT_GE(l1.values[i], l0.values[i] - 1e-14);
        EXPECT_GE(l2.values[i], l1.values[i] - 1e-14);
    }
    double c1 = 0.0;
    for (const auto& st : l1.sticks)
        if (st.channel == 1) c1 += st.strength;
    EXPECT_NEAR(total_stick_strength(l1) - total_stick_strength(l0), c1, 1e-12);
    EXPECT_THROW(lpl_spectrum(es, pop, w, 3), SpectraError);
}

// Channel-c emission of the N = 1 dark state against amplitudes read straight off its
// eigenvector: <g, c, 0|a|X> is the |g, c, 1> component.
TEST(Lpl, SingleMoleculeDarkStateLines) {
    ModelParams p = params(1, 1.0, 1.0, 4, 3);
    p.rabi_single = find_critical_coupling(p, {1.0, 3.0}).rabi_single;
    const EigenSystem es = solve(p, {SolverRoute::Site});
    std::size_t x = 0;
    for (std::size_t j = 0; j < es.size(); ++j)
        if (std::abs(es.omega[j]) < std::abs(es.omega[x])) x = j;

    const Basis b = enumerate_excitation_basis(p);
    const Spectrum s = diagonalize(build_hamiltonian(p, b));
    Eigen::Index k = 0;
    s.values.cwiseAbs().minCoeff(&k);
    const auto l = lpl_spectrum(es, PopulationModel::delta(x), grid(-3.5, 0.5, 0.01), 3);
    ASSERT_EQ(l.sticks.size(), 4u);
    for (const auto& st : l.sticks) {
        const auto photon = st.channel == 0 ? BasisState::photon_vib({}) : BasisState::photon_vib({{0, st.channel}});
        const double amp = s.vectors(static_cast<Eigen::Index>(*b.find(photon)), k);
        EXPECT_NEAR(st.strength, amp * amp, 1e-12) << st.channel;
        EXPECT_NEAR(st.omega, s.values(k) - st.channel, 1e-12);
    }
}

TEST(Lpl, GridRefinementLeavesCurveUnchanged) {
    const EigenSystem es = solve(params(4, 1.0, 2.4, 3, 1));
    const auto pop = PopulationModel::uniform(-10, 1.3);
    const auto coarse = lpl_spectrum(es, pop, grid(-2.5, 2.5, 0.004), 1);
    const auto fine = lpl_spectrum(es, pop, grid(-2.5, 2.5, 0.002), 1);
    for (std::size_t i = 0; i < coarse.grid.size(); ++i) EXPECT_NEAR(coarse.values[i], fine.values[2 * i], 1e-12);
    EXPECT_NEAR(coarse.integral() / fine.integral(), 1.0, 5e-3);
}

TEST(BlueShift, VanishesWithoutDisplacement) {
    ModelParams p = params(6, 0.0, 1.6, 2, 1);
    p.kappa = 0.05;
    p.gamma_e_collective = 0.1;
    const EigenSystem es = solve(p);
    const auto b = lp_blueshift(es, PopulationModel::uniform(-10, 1.3), grid(-2.5, 2.5, 0.002), 1);
    EXPECT_NEAR(b.delta, 0.0, 0.01);
    EXPECT_NEAR(b.omega_lp, -0.8, 1e-12);
}

TEST(BlueShift, SmallWithoutVibrationalChannels) {
    ModelParams p = params(20, 1.0, 2.4, 4, 0);
    p.rabi_single = find_critical_coupling_collective(p, 1.0, 4.0).rabi_single;
    const EigenSystem es = solve(p);
    const auto b = lp_blueshift(es, PopulationModel::uniform(-10, 1.3), grid(-2.5, 2.5, 0.002), 0);
    EXPECT_NEAR(b.delta, 0.0, 0.01);
}

TEST(BlueShift, RegionErrors) {
    SpectralSeries flat;
    flat.grid = grid(-1, 1, 0.1);
    flat.values.assign(flat.grid.size(), 0.0);
    EXPECT_THROW(lp_blueshift(flat, flat, 0.0, 1.0), SpectraError);
    EXPECT_THROW(lp_blueshift(flat, flat, 5.0, 1.0), SpectraError);
    SpectralSeries ramp = flat;
    for (std::size_t i = 0; i < ramp.grid.size(); ++i) ramp.values[i] = ramp.grid[i] + 2.0;
    EXPECT_THROW(lp_blueshift(ramp, ramp, 0.0, 1.0), SpectraError);
}

TEST(Ilp, NormalizedFamilyWithChannelDominance) {
    const EigenSystem es = solve(params(5, 1.0, 2.4, 3, 2));
    const auto wp = grid(-2, 2, 0.05);
    const auto fam = ilp_curve(es, wp, 0.5, {0, 1, 2}, {}, 3);
    ASSERT_EQ(fam.size(), 3u);
    double peak = 0.0;
    for (std::size_t i = 0; i < wp.size(); ++i) {
        for (const auto& s : fam) {
            EXPECT_GE(s.values[i], 0.0);
            EXPECT_LE(s.values[i], 1.0 + 1e-15);
            peak = std::max(peak, s.values[i]);
        }
        EXPECT_GE(fam[1].values[i], fam[0].values[i] - 1e-14);
        EXPECT_GE(fam[2].values[i], fam[1].values[i] - 1e-14);
    }
    EXPECT_NEAR(peak, 1.0, 1e-15);
    // threading does not change results
    const auto serial = ilp_curve(es, wp, 0.5, {0, 1, 2});
    for (std::size_t k = 0; k < 3; ++k)
        for (std::size_t i = 0; i < wp.size(); ++i) EXPECT_EQ(serial[k].values[i], fam[k].values[i]);
    EXPECT_THROW(ilp_curve(es, wp, 0.0, {0}), SpectraError);
    EXPECT_THROW(ilp_curve(es, {}, 0.5, {0}), SpectraError);
}
