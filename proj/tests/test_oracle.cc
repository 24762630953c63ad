#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "dense.h"
#include "qpmix/errors.h"
#include "qpmix/estimator.h"
#include "qpmix/oracle.h"

using namespace qpmix;
namespace o = qpmix::oracle;

namespace {

constexpr double kPi = std::numbers::pi;

o::Matrix ket0_density() {
    o::Matrix rho = o::Matrix::Zero(2, 2);
    rho(0, 0) = 1;
    return rho;
}

}  // namespace

TEST(Oracle, DensePauliMatchesHelper) {
    for (const char *s : {"X", "Y", "Z", "XY", "ZIY", "YYX"}) {
        EXPECT_LT((o::dense_pauli(PauliString::from_str(s)) - dense::pauli(s)).cwiseAbs().maxCoeff(), 1e-15) << s;
    }
    EXPECT_LT((o::dense_rotation(PauliString::from_str("XZ"), 0.3) - dense::expm_rotation(dense::pauli("XZ"), 0.3))
                  .cwiseAbs()
                  .maxCoeff(),
              1e-13);
    EXPECT_THROW(o::dense_pauli(PauliString(7)), CapacityError);
}

TEST(Oracle, ChannelOfUnitary) {
    o::Superoperator id = o::channel_of_unitary(o::Matrix::Identity(2, 2));
    EXPECT_LT((id.matrix - o::Matrix::Identity(4, 4)).cwiseAbs().maxCoeff(), 1e-15);

    o::Superoperator rz = o::rotation_channel(PauliString::from_str("Z"), kPi);
    o::Superoperator z = o::channel_of_unitary(dense::pauli1('Z'));
    EXPECT_LT((rz.matrix - z.matrix).cwiseAbs().maxCoeff(), 1e-15);

    const double theta = 0.8;
    o::Matrix out = o::apply(o::rotation_channel(PauliString::from_str("X"), theta), ket0_density());
    EXPECT_NEAR(out(0, 0).real(), std::pow(std::cos(theta / 2), 2), 1e-15);
    EXPECT_NEAR(out(1, 1).real(), std::pow(std::sin(theta / 2), 2), 1e-15);

    // Column stacking: vec(U rho U^dag) = (conj(U) kron U) vec(rho) for a random rho.
    o::Matrix u = dense::expm_rotation(dense::pauli("XY"), 0.4) * dense::expm_rotation(dense::pauli("ZI"), 1.1);
    o::Matrix rho = o::Matrix::Random(4, 4);
    EXPECT_LT((o::apply(o::channel_of_unitary(u), rho) - u * rho * u.adjoint()).cwiseAbs().maxCoeff(), 1e-14);

    o::Matrix bad = o::Matrix::Identity(2, 2) * 1.1;
    EXPECT_THROW(o::channel_of_unitary(bad), ArgumentError);
    EXPECT_THROW(o::channel_of_unitary(o::Matrix::Identity(8, 8)), ArgumentError);
}

TEST(Oracle, Identities) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> th(-kPi, kPi);
    std::uniform_real_distribution<double> ep(-0.3, 0.3);
    for (int k = 0; k < 50; ++k) {
        double theta = th(rng), eps = ep(rng);
        GammaTriple g = gamma_default(eps);
        EXPECT_LT(o::verify_mixture_identity(theta, eps, g.offset_a, g.offset_b), 1e-12);
        EXPECT_LT(o::verify_four_term_identity(theta, eps), 1e-12);
        EXPECT_LT(o::verify_two_term_unitary_identity(theta, eps), 1e-12);
        EXPECT_LT(o::verify_cross_term_identity(theta, eps), 1e-12);
        EXPECT_LT(o::verify_identity_special_case(theta), 1e-12);
        EXPECT_LT(o::verify_mixture_identity(PauliString::from_str("XY"), theta, g), 1e-12);
    }
    EXPECT_EQ(o::verify_mixture_identity(0.3, 0, -kPi / 4, kPi), 0);
    EXPECT_LT(o::verify_identity_special_case(kPi / 2), 1e-15);
    // The special case is the four-term rule at eps = -theta.
    EXPECT_LT(o::verify_four_term_identity(kPi / 2, -kPi / 2), 1e-15);
}

TEST(Oracle, CrossTermsAreAChannelDifference) {
    // The sum of the two shifted channels does not reproduce the cross terms.
    const PauliString z = PauliString::from_str("Z");
    const double phi = 0.9;
    o::Matrix a = o::dense_rotation(z, phi), b = o::dense_rotation(z, phi + kPi);
    o::Matrix lhs = o::sandwich(a, b).matrix + o::sandwich(b, a).matrix;
    o::Matrix sum = o::rotation_channel(z, phi + kPi / 2).matrix + o::rotation_channel(z, phi - kPi / 2).matrix;
    EXPECT_GT((lhs - sum).cwiseAbs().maxCoeff(), 0.5);
}

TEST(Oracle, TwirledPtmCommutesWithZ) {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> ang(-0.5, 0.5);
    const PauliString z = PauliString::from_str("Z");
    Eigen::Matrix4d zptm = o::pauli_transfer_matrix(o::channel_of_unitary(dense::pauli1('Z')));
    for (int k = 0; k < 20; ++k) {
        o::Matrix u = dense::expm_rotation(dense::pauli1('Z'), ang(rng)) *
                      dense::expm_rotation(dense::pauli1('Y'), ang(rng)) *
                      dense::expm_rotation(dense::pauli1('X'), ang(rng));
        Eigen::Matrix4d r = o::pauli_transfer_matrix(o::twirled_channel(u, z));
        EXPECT_LT((r * zptm - zptm * r).cwiseAbs().maxCoeff(), 1e-12);
        // Blocks coupling {I, Z} to {X, Y} vanish after the twirl.
        for (int i : {0, 3}) {
            for (int j : {1, 2}) {
                EXPECT_LT(std::abs(r(i, j)), 1e-12);
                EXPECT_LT(std::abs(r(j, i)), 1e-12);
            }
        }
        Eigen::Matrix4d raw = o::pauli_transfer_matrix(o::channel_of_unitary(u));
        EXPECT_GT((raw * zptm - zptm * raw).cwiseAbs().maxCoeff(), 1e-6);
    }
}

TEST(Oracle, SingleRotationHandEnumeration) {
    const double theta = 0.6, eps = 0.1;
    CircuitSpec c{1, {FixedGate::single(GateKind::H, 0), ParamRotation{PauliString::from_str("Z"), theta}}};
    c = attach_errors(c, ConstantOverRotation{eps}, Mitigation::mixture);
    PauliString x = PauliString::from_str("X");
    GammaTriple g = gamma_default(eps);
    double hand = 0;
    for (int i = 1; i <= 3; ++i) hand += g.gamma(i) * std::cos(theta + eps + g.offset(i));
    EXPECT_NEAR(hand, std::cos(theta), 1e-12);
    auto both = o::exact_mixture_expectation(c, x);
    EXPECT_NEAR(both.enumerated, std::cos(theta), 1e-12);
    EXPECT_NEAR(both.density_matrix, std::cos(theta), 1e-12);
}

TEST(Oracle, FourRotationsTwoQubits) {
    CircuitSpec base{2,
                     {FixedGate::single(GateKind::H, 0), FixedGate::single(GateKind::H, 1),
                      ParamRotation{PauliString::from_str("ZI"), 0.3}, FixedGate::cnot(0, 1),
                      ParamRotation{PauliString::from_str("IZ"), 0.5}, FixedGate::single(GateKind::H, 0),
                      ParamRotation{PauliString::from_str("ZI"), -0.8}, FixedGate::cnot(1, 0),
                      ParamRotation{PauliString::from_str("IZ"), 1.2}, FixedGate::single(GateKind::H, 1)}};
    PauliString zz = PauliString::all_z(2);
    for (Mitigation m : {Mitigation::mixture, Mitigation::mixture_plus_twirl}) {
        CircuitSpec c = attach_errors(base, ConstantOverRotation{0.05}, m);
        auto both = o::exact_mixture_expectation(c, zz);
        double ideal = exact_ideal_expectation(c, zz);
        EXPECT_NEAR(both.enumerated, ideal, 1e-10);
        EXPECT_NEAR(both.density_matrix, ideal, 1e-10);
        EXPECT_NEAR(o::dense_ideal_expectation(c, zz), ideal, 1e-12);
    }
    // Unmitigated paths agree with the state-vector noisy value.
    CircuitSpec off = attach_errors(base, ConstantOverRotation{0.05}, Mitigation::off);
    EXPECT_NEAR(o::enumerate_mixture_expectation(off, zz), exact_noisy_expectation(off, zz), 1e-12);
}

TEST(Oracle, TwirledPureXYError) {
    CircuitSpec base = compile_to_rz(build_trotter_ising(2, 1, 0.7));
    PauliString zz = PauliString::all_z(2);
    for (double eps : {0.01, 0.05}) {
        Unstructured e = build_unstructured(eps, {1 / std::sqrt(2.0), 1 / std::sqrt(2.0), 0});
        CircuitSpec c = attach_errors(base, e, Mitigation::mixture_plus_twirl);
        double ideal = exact_ideal_expectation(c, zz);
        double dm = o::density_matrix_mixture_expectation(c, zz);
        EXPECT_NEAR(o::enumerate_mixture_expectation(c, zz), dm, 1e-10);
        EXPECT_LE(std::abs(dm - ideal), 4 * (e.eps_x * e.eps_x + e.eps_y * e.eps_y));
    }
}

TEST(Oracle, PathsAgreeOnLargerCircuits) {
    CircuitSpec c = attach_errors(compile_to_rz(build_trotter_ising(3, 1, 1.0)), Unstructured{0.02, -0.01, 0.04},
                                  Mitigation::mixture_plus_twirl);
    PauliString o3 = PauliString::all_z(3);
    // nu = 6 twirled mixtures: 6^6 assignments.
    auto both = o::exact_mixture_expectation(c, o3);
    EXPECT_NEAR(both.enumerated, both.density_matrix, 1e-10);
}

TEST(Oracle, Limits) {
    CircuitSpec many = attach_errors(compile_to_rz(build_trotter_ising(2, 3, 1.0)), ConstantOverRotation{0.01},
                                     Mitigation::mixture);
    ASSERT_GT(many.nu(), 8u);
    EXPECT_THROW(o::enumerate_mixture_expectation(many, PauliString::all_z(2)), CapacityError);
    EXPECT_NO_THROW(o::density_matrix_mixture_expectation(many, PauliString::all_z(2)));
    CircuitSpec wide{7, {}};
    EXPECT_THROW(o::density_matrix_mixture_expectation(wide, PauliString::all_z(7)), CapacityError);
    CircuitSpec uni = attach_errors(build_trotter_ising(2, 1, 1.0), UniformOverRotation{0.01}, Mitigation::mixture);
    EXPECT_THROW(o::density_matrix_mixture_expectation(uni, PauliString::all_z(2)), UnsupportedError);
}

TEST(Oracle, DensityMatrixInvariants) {
    CircuitSpec c = attach_errors(compile_to_rz(build_trotter_ising(3, 2, 1.0)), ConstantOverRotation{0.1},
                                  Mitigation::mixture_plus_twirl);
    o::DensityMatrix rho = o::DensityMatrix::zero(3);
    EXPECT_NEAR(std::abs(rho.trace() - 1.0), 0, 1e-15);
    rho.apply_unitary(o::dense_fixed_gate(FixedGate::single(GateKind::H, 0), 3));
    rho.apply_weighted({{1.2, o::dense_rotation(PauliString::from_str("ZII"), 0.3)},
                        {-0.2, o::dense_rotation(PauliString::from_str("ZII"), 0.3 + kPi)}});
    EXPECT_NEAR(std::abs(rho.trace() - 1.0), 0, 1e-12);
    EXPECT_LT(rho.hermiticity_error(), 1e-12);
}
