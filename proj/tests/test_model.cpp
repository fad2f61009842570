#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <vector>

#include "htc/model.hpp"

using namespace htc;

namespace {

// Normalized Hermite functions by the three-term recursion.
std::vector<double> hermite_functions(double x, int nmax) {
    std::vector<double> psi(static_cast<std::size_t>(nmax) + 1);
    psi[0] = std::pow(M_PI, -0.25) * std::exp(-0.5 * x * x);
    if (nmax >= 1) psi[1] = std::sqrt(2.0) * x * psi[0];
    for (int n = 2; n <= nmax; ++n)
        psi[static_cast<std::size_t>(n)] = std::sqrt(2.0 / n) * x * psi[static_cast<std::size_t>(n - 1)] -
                                           std::sqrt((n - 1.0) / n) * psi[static_cast<std::size_t>(n - 2)];
    return psi;
}

// <nu|nu~> as an overlap integral; the excited potential sits at x = -sqrt(2) lambda.
double overlap_quadrature(int nu, int nu_tilde, double lambda) {
    const double shift = std::sqrt(2.0) * lambda;
    const double h = 1e-3;
    const int nmax = std::max(nu, nu_tilde);
    double s = 0.0;
    for (double x = -25.0; x <= 25.0; x += h) {
        const auto a = hermite_functions(x, nmax);
        const auto b = hermite_functions(x + shift, nmax);
        s += a[static_cast<std::size_t>(nu)] * b[static_cast<std::size_t>(nu_tilde)];
    }
    return s * h;
}

std::size_t choose(int n, int k) {
    if (k < 0 || k > n) return 0;
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return static_cast<std::size_t>(std::llround(r));
}

}  // namespace

TEST(FranckCondon, ZeroDisplacementIsIdentity) {
    for (int a = 0; a < 6; ++a)
        for (int b = 0; b < 6; ++b) EXPECT_DOUBLE_EQ(fc_overlap(a, b, 0.0), a == b ? 1.0 : 0.0);
}

TEST(FranckCondon, GroundGroundAtUnitHuangRhys) {
    EXPECT_NEAR(fc_overlap(0, 0, 1.0), std::exp(-0.5), 1e-15);
    EXPECT_NEAR(fc_overlap(0, 0, 1.0), 0.60653, 1e-5);
}

TEST(FranckCondon, OneOneVanishesAtUnitHuangRhys) {
    EXPECT_NEAR(fc_overlap(1, 1, 1.0), 0.0, 1e-15);
    for (double l : {0.3, 0.7, 1.4}) EXPECT_NEAR(fc_overlap(1, 1, l), (1 - l * l) * std::exp(-0.5 * l * l), 1e-14);
}

TEST(FranckCondon, PoissonProgressionFromVibrationlessGround) {
    for (double l : {0.4, 1.0, 1.7}) {
        double fact = 1.0;
        for (int n = 0; n < 10; ++n) {
            if (n > 0) fact *= n;
            EXPECT_NEAR(fc_overlap(0, n, l), std::exp(-0.5 * l * l) * std::pow(l, n) / std::sqrt(fact), 1e-14);
            EXPECT_GE(fc_overlap(0, n, l), 0.0);
        }
    }
}

TEST(FranckCondon, MatchesQuadratureOracle) {
    for (double l : {0.5, 1.0, std::sqrt(2.0)})
        for (int a = 0; a <= 5; ++a)
            for (int b = 0; b <= 5; ++b) EXPECT_NEAR(fc_overlap(a, b, l), overlap_quadrature(a, b, l), 1e-10) << a << ' ' << b << ' ' << l;
}

TEST(FranckCondon, Completeness) {
    double s = 0.0;
    for (int n = 0; n <= 30; ++n) s += fc_overlap(0, n, 1.0) * fc_overlap(0, n, 1.0);
    EXPECT_NEAR(s, 1.0, 1e-12);
}

TEST(FranckCondon, RowsAndColumnsOrthonormal) {
    for (double l : {0.3, 1.0}) {
        for (int a = 0; a <= 4; ++a)
            for (int b = 0; b <= 4; ++b) {
                const int top = 10 * std::max(a, b) + 20;
                double cols = 0.0, rows = 0.0;
                for (int n = 0; n <= top; ++n) {
                    cols += fc_overlap(n, a, l) * fc_overlap(n, b, l);
                    rows += fc_overlap(a, n, l) * fc_overlap(b, n, l);
                }
                EXPECT_NEAR(cols, a == b ? 1.0 : 0.0, 1e-10);
                EXPECT_NEAR(rows, a == b ? 1.0 : 0.0, 1e-10);
            }
    }
}

TEST(FranckCondon, RejectsNegativeQuantumNumbers) {
    EXPECT_THROW(fc_overlap(-1, 0, 1.0), ModelError);
    EXPECT_THROW(fc_overlap(0, -2, 1.0), ModelError);
}

TEST(FranckCondon, TableMatchesFunction) {
    FranckCondonTable t(0.8, 3, 4);
    for (int a = 0; a <= 3; ++a)
        for (int b = 0; b <= 4; ++b) EXPECT_DOUBLE_EQ(t(a, b), fc_overlap(a, b, 0.8));
}

TEST(ModelParams, Validation) {
    ModelParams p;
    EXPECT_NO_THROW(p.validate());
    p.n_molecules = 0;
    EXPECT_THROW(p.validate(), ModelError);
    p = {};
    p.vib_freq = 0.0;
    EXPECT_THROW(p.validate(), ModelError);
    p = {};
    p.kappa = -0.1;
    EXPECT_THROW(p.validate(), ModelError);
}

TEST(ExcitationBasis, SmallCounts) {
    ModelParams p;
    p.n_molecules = 1;
    p.nu_max = 2;
    EXPECT_EQ(enumerate_excitation_basis(p).size(), 6u);
    p.n_molecules = 2;
    p.nu_max = 1;
    EXPECT_EQ(enumerate_excitation_basis(p).size(), 11u);
    EXPECT_EQ(excitation_basis_count(20, 4), 7781u);
}

TEST(ExcitationBasis, CountFormulaExhaustive) {
    for (int n = 1; n <= 6; ++n)
        for (int v = 0; v <= 4; ++v) {
            ModelParams p;
            p.n_molecules = n;
            p.nu_max = v;
            const Basis b = enumerate_excitation_basis(p);
            const std::size_t expect = static_cast<std::size_t>((1 + n * v) + n * (v + 1) + n * (n - 1) * (v + 1) * v);
            EXPECT_EQ(b.size(), expect) << n << ' ' << v;
            std::size_t ph = 0, one = 0, two = 0;
            for (const auto& s : b.states()) {
                EXPECT_EQ(s.excitation_number(), 1);
                if (s.kind == StateKind::PhotonVib) ++ph;
                if (s.kind == StateKind::ExcitonOneParticle) ++one;
                if (s.kind == StateKind::ExcitonTwoParticle) {
                    ++two;
                    EXPECT_NE(*s.spectator_site, *s.exciton_site);
                    EXPECT_GE(*s.spectator_vib, 1);
                }
            }
            EXPECT_EQ(ph, static_cast<std::size_t>(1 + n * v));
            EXPECT_EQ(one, static_cast<std::size_t>(n * (v + 1)));
            EXPECT_EQ(two, static_cast<std::size_t>(n * (n - 1) * (v + 1) * v));
        }
}

TEST(ExcitationBasis, FullN20Enumeration) {
    ModelParams p;
    p.n_molecules = 20;
    EXPECT_EQ(enumerate_excitation_basis(p).size(), 7781u);
}

TEST(ExcitationBasis, IndexRoundTripAndDeterminism) {
    ModelParams p;
    p.n_molecules = 4;
    p.nu_max = 3;
    const Basis a = enumerate_excitation_basis(p);
    const Basis b = enumerate_excitation_basis(p);
    EXPECT_EQ(a.fingerprint(), b.fingerprint());
    std::set<std::vector<int>> keys;
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a.find(a[i]).value(), i);
        EXPECT_EQ(a[i].key(), b[i].key());
        keys.insert(a[i].key());
        if (i > 0) {
            EXPECT_LT(a[i - 1].key(), a[i].key());
        }
    }
    EXPECT_EQ(keys.size(), a.size());
}

TEST(ExcitationBasis, CapGuard) {
    ModelParams p;
    p.n_molecules = 20;
    p.basis_cap = 7780;
    EXPECT_THROW(enumerate_excitation_basis(p), ModelError);
}

TEST(BasisState, TwoParticleInvariants) {
    EXPECT_THROW(BasisState::two_particle(1, 0, 1, 1), ModelError);
    EXPECT_THROW(BasisState::two_particle(0, 0, 1, 0), ModelError);
}

TEST(GroundBasis, Counts) {
    ModelParams p;
    p.n_molecules = 20;
    p.nu_max_ground = 0;
    EXPECT_EQ(enumerate_ground_basis(p).size(), 1u);
    p.nu_max_ground = 1;
    EXPECT_EQ(enumerate_ground_basis(p).size(), 21u);
    p.nu_max_ground = 2;
    EXPECT_EQ(enumerate_ground_basis(p).size(), 231u);
}

TEST(GroundBasis, CountFormulaAndAbsoluteGroundFirst) {
    for (int n = 1; n <= 6; ++n)
        for (int k = 0; k <= 4; ++k) {
            ModelParams p;
            p.n_molecules = n;
            p.nu_max_ground = k;
            const Basis g = enumerate_ground_basis(p);
            std::size_t expect = 0;
            for (int j = 0; j <= std::min(n, k); ++j) expect += choose(n, j) * choose(k, j);
            EXPECT_EQ(g.size(), expect);
            EXPECT_EQ(g[0].vib_quanta(), 0);
            EXPECT_EQ(g[0].kind, StateKind::GroundVib);
            for (const auto& s : g.states()) {
                EXPECT_LE(s.vib_quanta(), k);
                EXPECT_EQ(s.excitation_number(), 0);
            }
        }
}
