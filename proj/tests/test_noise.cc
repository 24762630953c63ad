#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "dense.h"
#include "qpmix/errors.h"
#include "qpmix/noise.h"
#include "qpmix/oracle.h"

using namespace qpmix;

namespace {

constexpr double kPi = std::numbers::pi;

dense::Mat to_dense(const Mat2 &m) {
    dense::Mat out(2, 2);
    out << m[0], m[1], m[2], m[3];
    return out;
}

Mat2 from_dense(const dense::Mat &m) { return {m(0, 0), m(0, 1), m(1, 0), m(1, 1)}; }

// Distance between two unitaries after removing the best global phase.
double phase_free_distance(const dense::Mat &a, const dense::Mat &b) {
    dense::cd overlap = (b.adjoint() * a).trace();
    dense::cd phase = std::abs(overlap) > 0 ? overlap / std::abs(overlap) : 1.0;
    return (a - phase * b).operatorNorm();
}

dense::Mat euler(double ex, double ey, double ez) {
    return dense::expm_rotation(dense::pauli1('Z'), ez) * dense::expm_rotation(dense::pauli1('Y'), ey) *
           dense::expm_rotation(dense::pauli1('X'), ex);
}

dense::Mat superop(const dense::Mat &u) { return Eigen::kroneckerProduct(u.conjugate(), u).eval(); }

}  // namespace

TEST(Noise, BuildUnstructured) {
    Unstructured a = build_unstructured(0.001, {1, 0, 0});
    EXPECT_EQ(a.eps_x, 0.001);
    EXPECT_EQ(a.eps_y, 0);
    EXPECT_EQ(a.eps_z, 0);

    const double r = 1 / std::sqrt(3.0);
    Unstructured b = build_unstructured(0.001, {r, r, r});
    EXPECT_NEAR(b.eps_x, 5.7735e-4, 1e-8);
    EXPECT_NEAR(b.eps_y, 5.7735e-4, 1e-8);
    EXPECT_NEAR(b.eps_z, 5.7735e-4, 1e-8);

    Rng rng(4);
    for (int k = 0; k < 100; ++k) {
        Unstructured c = build_unstructured(0.02, random_direction(rng));
        EXPECT_NEAR(c.eps_x * c.eps_x + c.eps_y * c.eps_y + c.eps_z * c.eps_z, 0.02 * 0.02, 1e-12);
    }
    EXPECT_THROW(build_unstructured(0.01, {1, 1, 0}), ArgumentError);
}

TEST(Noise, RandomDirectionIsIsotropic) {
    Rng rng(8);
    const int n = 100000;
    double mz = 0, mz2 = 0;
    for (int k = 0; k < n; ++k) {
        auto d = random_direction(rng);
        ASSERT_NEAR(d[0] * d[0] + d[1] * d[1] + d[2] * d[2], 1, 1e-12);
        mz += d[2];
        mz2 += d[2] * d[2];
    }
    EXPECT_NEAR(mz / n, 0, 4 * std::sqrt(1.0 / 3 / n));
    EXPECT_NEAR(mz2 / n, 1.0 / 3, 0.01);
}

TEST(Noise, ModelQueries) {
    EXPECT_EQ(error_kind(NoError{}), "none");
    EXPECT_EQ(error_kind(ConstantOverRotation{0.1}), "constant");
    EXPECT_EQ(error_kind(UniformOverRotation{0.1}), "uniform");
    EXPECT_EQ(error_kind(Unstructured{0, 0, 0.1}), "unstructured");
    EXPECT_EQ(nominal_epsilon(ConstantOverRotation{0.1}), 0.1);
    EXPECT_EQ(nominal_epsilon(UniformOverRotation{0.002}), 0.002);
    EXPECT_EQ(nominal_epsilon(Unstructured{0.1, 0.2, 0.3}), 0.3);
    EXPECT_TRUE(is_stochastic(UniformOverRotation{0.1}));
    EXPECT_FALSE(is_stochastic(Unstructured{0.1, 0.2, 0.3}));
}

TEST(Noise, UniformDraws) {
    Rng rng(12);
    const int n = 100000;
    double sum = 0;
    for (int k = 0; k < n; ++k) {
        ResolvedError e = resolve_error(UniformOverRotation{0.001}, rng);
        ASSERT_GE(e.along, -0.001);
        ASSERT_LE(e.along, 0.003);
        sum += e.along;
    }
    // Uniform on a width-4e-3 interval has sd 4e-3 / sqrt(12).
    EXPECT_NEAR(sum / n, 0.001, 4 * 0.004 / std::sqrt(12.0 * n));
}

TEST(Noise, ApplyError) {
    dense::Vec psi = dense::random_state(2, 17);
    Rng rng(1);
    PauliString z1 = PauliString::single(2, 1, 'Z');

    StateVector s = dense::from_vec(psi);
    apply_error(s, NoError{}, z1, rng);
    EXPECT_LT((dense::to_vec(s) - psi).cwiseAbs().maxCoeff(), 1e-15);

    StateVector a = dense::from_vec(psi);
    apply_pauli_rotation(a, z1, 0.4);
    apply_error(a, ConstantOverRotation{0.01}, z1, rng);
    StateVector b = dense::from_vec(psi);
    apply_pauli_rotation(b, z1, 0.41);
    EXPECT_LT((dense::to_vec(a) - dense::to_vec(b)).cwiseAbs().maxCoeff(), 1e-12);

    // Over-rotation commutes with the gate.
    StateVector c = dense::from_vec(psi);
    apply_error(c, ConstantOverRotation{0.01}, z1, rng);
    apply_pauli_rotation(c, z1, 0.4);
    EXPECT_LT((dense::to_vec(a) - dense::to_vec(c)).cwiseAbs().maxCoeff(), 1e-12);

    StateVector u = dense::from_vec(psi);
    apply_error(u, Unstructured{0.01, 0.02, 0.03}, z1, rng);
    dense::Mat e1 = euler(0.01, 0.02, 0.03);
    dense::Mat full = Eigen::kroneckerProduct(e1, dense::Mat::Identity(2, 2)).eval();
    EXPECT_LT((dense::to_vec(u) - full * psi).cwiseAbs().maxCoeff(), 1e-12);

    EXPECT_THROW(apply_error(u, Unstructured{0.01, 0, 0}, PauliString::from_str("ZZ"), rng), UnsupportedError);
}

TEST(Noise, ExtractPureZ) {
    const double theta = 0.37;
    ErrorAngles a = extract_error_angles(theta, from_dense(dense::expm_rotation(dense::pauli1('Z'), theta + 0.003)));
    EXPECT_NEAR(a.eps_x, 0, 1e-12);
    EXPECT_NEAR(a.eps_y, 0, 1e-12);
    EXPECT_NEAR(a.eps_z, 0.003, 1e-12);

    ErrorAngles b = extract_error_angles(theta, from_dense(dense::expm_rotation(dense::pauli1('Z'), theta)));
    EXPECT_NEAR(b.eps_x, 0, 1e-12);
    EXPECT_NEAR(b.eps_y, 0, 1e-12);
    EXPECT_NEAR(b.eps_z, 0, 1e-12);

    // A global phase on V is ignored.
    dense::Mat v = std::exp(dense::cd(0, 0.9)) * dense::expm_rotation(dense::pauli1('Z'), theta - 0.002);
    ErrorAngles c = extract_error_angles(theta, from_dense(v));
    EXPECT_NEAR(c.eps_z, -0.002, 1e-12);
}

TEST(Noise, ExtractY) {
    const double theta = 1.1;
    dense::Mat v = dense::expm_rotation(dense::pauli1('Y'), 1e-3) * dense::expm_rotation(dense::pauli1('Z'), theta);
    ErrorAngles a = extract_error_angles(theta, from_dense(v));
    EXPECT_NEAR(a.eps_y, 1e-3, 1e-6);
    EXPECT_NEAR(a.eps_x, 0, 1e-6);
    EXPECT_NEAR(a.eps_z, 0, 1e-6);
    dense::Mat rebuilt = euler(a.eps_x, a.eps_y, a.eps_z);
    dense::Mat u_err = v * dense::expm_rotation(dense::pauli1('Z'), theta).adjoint();
    EXPECT_LT(phase_free_distance(rebuilt, u_err), 10 * 1e-6);
}

TEST(Noise, ExtractRoundTrip) {
    Rng rng(99);
    for (int k = 0; k < 100; ++k) {
        double ex = (uniform01(rng) - 0.5) * 0.1;
        double ey = (uniform01(rng) - 0.5) * 0.1;
        double ez = (uniform01(rng) - 0.5) * 0.1;
        double theta = (uniform01(rng) - 0.5) * 2 * kPi;
        dense::Mat u_err = euler(ex, ey, ez);
        dense::Mat v = u_err * dense::expm_rotation(dense::pauli1('Z'), theta);
        ErrorAngles a = extract_error_angles(theta, from_dense(v));
        double m = std::max({std::abs(a.eps_x), std::abs(a.eps_y), std::abs(a.eps_z)});
        EXPECT_LT(phase_free_distance(euler(a.eps_x, a.eps_y, a.eps_z), u_err), std::max(10 * m * m, 1e-12));
        // The ZYX Euler form is exact, so the input angles come back.
        EXPECT_NEAR(a.eps_x, ex, 1e-10);
        EXPECT_NEAR(a.eps_y, ey, 1e-10);
        EXPECT_NEAR(a.eps_z, ez, 1e-10);
    }
}

TEST(Noise, ExtractErrors) {
    Mat2 bad{1, 0, 0, 2};
    EXPECT_THROW(extract_error_angles(0.1, bad), ArgumentError);
    dense::Mat far = dense::expm_rotation(dense::pauli1('X'), 2.0) * dense::expm_rotation(dense::pauli1('Z'), 0.1);
    EXPECT_THROW(extract_error_angles(0.1, from_dense(far)), OutOfRegimeError);
}

TEST(Noise, OperatorDistance) {
    for (double e : {1e-3, 1e-2, 0.1}) {
        dense::Mat u = dense::expm_rotation(dense::pauli1('X'), e);
        EXPECT_NEAR((dense::Mat::Identity(2, 2) - u).operatorNorm(), unstructured_operator_distance(e), 1e-12);
        // Half-angle convention: 2 sin(|eps|/4) versus |eps|/2 to leading order.
        EXPECT_NEAR(unstructured_operator_distance(e), e / 2, e * e * e / 50);
    }
}

TEST(Noise, TwirlDraws) {
    Rng rng(5);
    PauliString z = PauliString::single(3, 2, 'Z');
    const int n = 100000;
    int zs = 0;
    for (int k = 0; k < n; ++k) {
        TwirlDraw d = sample_twirl(z, rng);
        ASSERT_TRUE(commutes(d.sigma, z));
        if (!d.sigma.is_identity()) {
            ASSERT_EQ(d.sigma, z);
            ++zs;
        }
    }
    EXPECT_NEAR(zs, n / 2, 4 * std::sqrt(n * 0.25));
    EXPECT_THROW(sample_twirl(PauliString::from_str("ZZ"), rng), UnsupportedError);
}

TEST(Noise, TwirlAverageIsZRotation) {
    for (double eps : {1e-3, 1e-2, 5e-2}) {
        Rng rng(static_cast<uint64_t>(eps * 1e6));
        for (int k = 0; k < 20; ++k) {
            Unstructured e = build_unstructured(eps, random_direction(rng));
            dense::Mat u = euler(e.eps_x, e.eps_y, e.eps_z);
            dense::Mat zp = dense::pauli1('Z');
            dense::Mat avg = (superop(u) + superop(zp * u * zp)) / 2;
            dense::Mat target = superop(dense::expm_rotation(zp, e.eps_z));
            double xy = e.eps_x * e.eps_x + e.eps_y * e.eps_y;
            EXPECT_LE((avg - target).cwiseAbs().maxCoeff(), 4 * xy + 1e-15);
        }
        // Pure XY error twirls to within 2(ex^2 + ey^2) of the identity channel.
        dense::Mat u = euler(eps / std::sqrt(2.0), eps / std::sqrt(2.0), 0);
        dense::Mat zp = dense::pauli1('Z');
        dense::Mat avg = (superop(u) + superop(zp * u * zp)) / 2;
        EXPECT_LE((avg - dense::Mat::Identity(4, 4)).cwiseAbs().maxCoeff(), 2 * eps * eps);
    }
}

TEST(Noise, Mat2Helpers) {
    for (char axis : {'X', 'Y', 'Z'}) {
        Mat2 r = rotation_matrix(axis, 0.3);
        EXPECT_LT((to_dense(r) - dense::expm_rotation(dense::pauli1(axis), 0.3)).cwiseAbs().maxCoeff(), 1e-14);
        Mat2 id = mat2_mul(r, mat2_adjoint(r));
        EXPECT_NEAR(std::abs(id[0] - 1.0), 0, 1e-15);
        EXPECT_NEAR(std::abs(id[1]), 0, 1e-15);
    }
    EXPECT_THROW(rotation_matrix('Q', 0.1), ArgumentError);
}
