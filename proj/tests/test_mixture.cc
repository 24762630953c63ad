#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "qpmix/errors.h"
#include "qpmix/mixture.h"

using namespace qpmix;

namespace {

constexpr double kPi = std::numbers::pi;

// Solves sum_k g_k (1 + cos phi_k, sin phi_k, 1 - cos phi_k) = (1 + cos t, sin t, 1 - cos t)
// with phi_k = t + eps + offset_k by Gaussian elimination with partial pivoting.
std::array<double, 3> solve_system(double eps, double a, double b, double theta = 0.3) {
    const double phi[3] = {theta + eps, theta + eps + a, theta + eps + b};
    double m[3][4];
    for (int k = 0; k < 3; ++k) {
        m[0][k] = 1 + std::cos(phi[k]);
        m[1][k] = std::sin(phi[k]);
        m[2][k] = 1 - std::cos(phi[k]);
    }
    m[0][3] = 1 + std::cos(theta);
    m[1][3] = std::sin(theta);
    m[2][3] = 1 - std::cos(theta);
    for (int c = 0; c < 3; ++c) {
        int piv = c;
        for (int r = c + 1; r < 3; ++r) {
            if (std::abs(m[r][c]) > std::abs(m[piv][c])) piv = r;
        }
        for (int k = 0; k < 4; ++k) std::swap(m[c][k], m[piv][k]);
        for (int r = 0; r < 3; ++r) {
            if (r == c) continue;
            double f = m[r][c] / m[c][c];
            for (int k = c; k < 4; ++k) m[r][k] -= f * m[c][k];
        }
    }
    return {m[0][3] / m[0][0], m[1][3] / m[1][1], m[2][3] / m[2][2]};
}

}  // namespace

TEST(Mixture, GeneralMatchesLinearSolve) {
    GammaTriple g = gamma_general(0.1, -kPi / 4, kPi);
    auto want = solve_system(0.1, -kPi / 4, kPi);
    EXPECT_NEAR(g.gamma1, want[0], 1e-12);
    EXPECT_NEAR(g.gamma2, want[1], 1e-12);
    EXPECT_NEAR(g.gamma3, want[2], 1e-12);
    EXPECT_NEAR(g.gamma1, 0.876993, 1e-6);
    EXPECT_NEAR(g.gamma2, 0.141186, 1e-6);
    EXPECT_NEAR(g.gamma3, -0.018179, 1e-6);
    EXPECT_NEAR(g.gamma1 + g.gamma2 + g.gamma3, 1, 1e-12);
}

TEST(Mixture, ZeroEpsilonIsIdentityMixture) {
    for (auto [a, b] : {std::pair{-kPi / 4, kPi}, std::pair{1.0, 2.5}, std::pair{4.0, 0.7}}) {
        GammaTriple g = gamma_general(0, a, b);
        EXPECT_NEAR(g.gamma1, 1, 1e-15);
        EXPECT_NEAR(g.gamma2, 0, 1e-15);
        EXPECT_NEAR(g.gamma3, 0, 1e-15);
        EXPECT_NEAR(g.one_norm, 1, 1e-15);
    }
}

TEST(Mixture, RandomOffsetsSatisfySystem) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> ang(0.2, 2 * kPi - 0.2);
    std::uniform_real_distribution<double> eps(-0.5, 0.5);
    int checked = 0;
    while (checked < 200) {
        double a = ang(rng), b = ang(rng), e = eps(rng);
        if (std::abs(a - b) < 0.2) continue;
        GammaTriple g = gamma_general(e, a, b);
        auto want = solve_system(e, a, b, e * 3);
        for (int i = 0; i < 3; ++i) ASSERT_NEAR(g.gamma(i + 1), want[i], 1e-9 * std::max(1.0, std::abs(want[i])));
        ASSERT_LT(linear_system_residual(g, 0.4), 1e-10);
        ASSERT_NEAR(g.gamma1 + g.gamma2 + g.gamma3, 1, 1e-12);
        ASSERT_NEAR(g.one_norm, std::abs(g.gamma1) + std::abs(g.gamma2) + std::abs(g.gamma3), 1e-15);
        ASSERT_GE(g.one_norm, 1 - 1e-15);
        ++checked;
    }
}

TEST(Mixture, FixedCliffordAnglesCase) {
    // eps = -theta with offsets pi/2 and pi puts the three channels at 0, pi/2, pi.
    for (double theta : {0.1, 0.5, 1.0, -0.4}) {
        GammaTriple g = gamma_general(-theta, kPi / 2, kPi);
        EXPECT_NEAR(g.gamma1, (1 + std::cos(theta) - std::sin(theta)) / 2, 1e-12);
        EXPECT_NEAR(g.gamma2, std::sin(theta), 1e-12);
        EXPECT_NEAR(g.gamma3, (1 - std::cos(theta) - std::sin(theta)) / 2, 1e-12);
    }
}

TEST(Mixture, DegenerateOffsetsNamed) {
    try {
        gamma_general(0.1, 0, kPi);
        FAIL();
    } catch (const DegenerateDecompositionError &e) {
        EXPECT_NE(std::string(e.what()).find("csc(A/2)"), std::string::npos);
    }
    try {
        gamma_general(0.1, 1.0, 2 * kPi);
        FAIL();
    } catch (const DegenerateDecompositionError &e) {
        EXPECT_NE(std::string(e.what()).find("csc(B/2)"), std::string::npos);
    }
    try {
        gamma_general(0.1, 1.0, 1.0 + 1e-10);
        FAIL();
    } catch (const DegenerateDecompositionError &e) {
        EXPECT_NE(std::string(e.what()).find("A-B"), std::string::npos);
    }
}

TEST(Mixture, DefaultChoice) {
    GammaTriple g0 = gamma_default(0);
    EXPECT_EQ(g0.gamma1, 1);
    EXPECT_EQ(g0.one_norm, 1);

    GammaTriple g = gamma_default(0.1);
    EXPECT_DOUBLE_EQ(g.offset_a, -kPi / 4);
    EXPECT_DOUBLE_EQ(g.offset_b, kPi);
    EXPECT_NEAR(g.gamma2, std::sqrt(2.0) * std::sin(0.1), 1e-12);
    EXPECT_NEAR(g.one_norm, 1.03636, 5e-6);
    EXPECT_NEAR(g.one_norm, one_norm_closed_form(0.1), 1e-12);

    GammaTriple n = gamma_default(-0.1);
    EXPECT_DOUBLE_EQ(n.offset_a, kPi / 4);
    EXPECT_NEAR(n.one_norm, g.one_norm, 1e-12);
    auto want = solve_system(-0.1, kPi / 4, kPi);
    EXPECT_NEAR(n.gamma1, want[0], 1e-12);
    EXPECT_NEAR(n.gamma2, want[1], 1e-12);
    EXPECT_NEAR(n.gamma3, want[2], 1e-12);

    EXPECT_THROW(gamma_default(0.4), OutOfRegimeError);
    EXPECT_THROW(gamma_default(-0.4), OutOfRegimeError);
    EXPECT_NO_THROW(gamma_default(0.5, 0.6));
}

TEST(Mixture, SmallEpsilonProbabilities) {
    GammaTriple g = gamma_default(0.001);
    auto want = solve_system(0.001, -kPi / 4, kPi);
    double norm = std::abs(want[0]) + std::abs(want[1]) + std::abs(want[2]);
    for (int i = 1; i <= 3; ++i) EXPECT_NEAR(g.probability(i), std::abs(want[i - 1]) / norm, 1e-12);
    EXPECT_NEAR(g.probability(2), 0.00141, 1e-5);
}

TEST(Mixture, OneNormClosedForm) {
    EXPECT_NEAR(one_norm_closed_form(0), 1, 1e-15);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> eps(-kPi / 8 + 1e-6, kPi / 8 - 1e-6);
    for (int k = 0; k < 100; ++k) {
        double e = eps(rng);
        EXPECT_NEAR(gamma_default(e).one_norm, one_norm_closed_form(e), 1e-10) << e;
    }
    for (double e : {1e-4, 1e-3, 5e-3}) {
        double slope = std::log(one_norm_closed_form(e)) / e;
        EXPECT_NEAR(slope, 0.414, 0.01 * 0.414) << e;
    }
    // Second order: ln|g|_1 = tan(pi/8) e - sec^2(pi/8) e^2 / 2 + O(e^3).
    const double t = std::tan(kPi / 8), sec2 = 1 + t * t;
    for (double e : {1e-3, 1e-2, 3e-2}) {
        EXPECT_NEAR(std::log(one_norm_closed_form(e)), t * e - sec2 * e * e / 2, std::pow(e, 3)) << e;
    }
}

TEST(Mixture, BranchSamplingFrequencies) {
    GammaTriple g = gamma_default(0.1);
    Rng rng(2024);
    const int n = 1000000;
    std::array<int, 4> counts{};
    for (int k = 0; k < n; ++k) {
        BranchDraw d = sample_branch(g, rng);
        counts[d.index]++;
        ASSERT_EQ(d.sign, g.gamma(d.index) < 0 ? -1 : 1);
        ASSERT_EQ(d.angle_offset, g.offset(d.index));
        if (d.index == 3) ASSERT_EQ(d.sign, -1);
    }
    double p2 = 0.141186 / 1.03637;
    EXPECT_NEAR(counts[2], n * p2, 4 * std::sqrt(n * p2 * (1 - p2)));

    // Pearson chi-square with 2 degrees of freedom; 13.8 is the p = 0.001 cutoff.
    double chi2 = 0;
    for (int i = 1; i <= 3; ++i) {
        double e = n * g.probability(i);
        chi2 += (counts[i] - e) * (counts[i] - e) / e;
    }
    EXPECT_LT(chi2, 13.8);

    GammaTriple g0 = gamma_default(0);
    for (int k = 0; k < 1000; ++k) {
        BranchDraw d = sample_branch(g0, rng);
        ASSERT_EQ(d.index, 1);
        ASSERT_EQ(d.sign, 1);
        ASSERT_EQ(d.angle_offset, 0);
    }
}

TEST(Mixture, ZeroWeightBranchNeverDrawn) {
    // gamma3 vanishes at eps = pi/4 for the default offsets.
    GammaTriple g = gamma_general(kPi / 4, -kPi / 4, kPi);
    EXPECT_NEAR(g.gamma3, 0, 1e-15);
    g.gamma3 = 0;
    Rng rng(1);
    for (int k = 0; k < 100000; ++k) ASSERT_NE(sample_branch(g, rng).index, 3);
}

TEST(Mixture, FourTermWeights) {
    auto w0 = four_term_weights(0.7, 0);
    EXPECT_DOUBLE_EQ(w0[0].angle, 0.7);
    EXPECT_DOUBLE_EQ(w0[0].weight, 1);
    for (int k = 1; k < 4; ++k) EXPECT_NEAR(w0[k].weight, 0, 1e-15);

    auto wpi = four_term_weights(0.7, kPi);
    EXPECT_NEAR(wpi[0].weight, 0, 1e-15);
    EXPECT_NEAR(wpi[1].weight, 1, 1e-15);
    EXPECT_NEAR(wpi[2].weight, 0, 1e-15);
    EXPECT_NEAR(wpi[3].weight, 0, 1e-15);

    auto w = four_term_weights(0.3, 0.2);
    EXPECT_NEAR(w[0].weight, 0.990033, 5e-7);
    EXPECT_NEAR(w[1].weight, 0.009967, 5e-7);
    EXPECT_NEAR(w[2].weight, -0.099335, 5e-7);
    EXPECT_NEAR(w[3].weight, 0.099335, 5e-7);
    EXPECT_NEAR(w[0].angle, 0.5, 1e-15);
    EXPECT_NEAR(w[1].angle, 0.5 + kPi, 1e-15);
    EXPECT_NEAR(w[2].angle, 0.5 + kPi / 2, 1e-15);
    EXPECT_NEAR(w[3].angle, 0.5 - kPi / 2, 1e-15);
    double sum = 0;
    for (const auto &t : w) sum += t.weight;
    EXPECT_NEAR(sum, 1, 1e-15);
}

TEST(Mixture, ScanAbShape) {
    AbScan scan = scan_ab(0.05, 40);
    EXPECT_EQ(scan.cells.size(), 1600u);
    EXPECT_NEAR(scan.cell_width, 2 * kPi / 40, 1e-15);
    ASSERT_TRUE(scan.global_minimum.one_norm.has_value());
    EXPECT_GE(*scan.global_minimum.one_norm, 1);
    GammaTriple def = gamma_general(0.05, 2 * kPi - kPi / 4, kPi);
    EXPECT_GE(def.one_norm, *scan.global_minimum.one_norm);
    for (const auto &c : scan.column_minima) EXPECT_LT(c.b, c.a);

    std::ostringstream ss;
    write_ab_csv(ss, scan);
    std::string text = ss.str();
    EXPECT_EQ(text.substr(0, 13), "A,B,one_norm\n");
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 1601);
}

TEST(Mixture, ScanAbMarksSingularCells) {
    // An even grid puts the A = B diagonal on cell centres.
    AbScan scan = scan_ab(0.05, 20);
    size_t absent = 0;
    for (const auto &c : scan.cells) {
        if (!c.one_norm) {
            ++absent;
            EXPECT_NEAR(c.a, c.b, 1e-12);
        }
    }
    EXPECT_EQ(absent, 20u);
}

TEST(Mixture, ScanAbSmallEpsilonFlat) {
    AbScan scan = scan_ab(1e-9, 20);
    for (const auto &c : scan.cells) {
        if (c.one_norm) EXPECT_NEAR(*c.one_norm, 1, 1e-5);
    }
}
