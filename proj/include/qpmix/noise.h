#pragma once

#include <array>
#include <complex>
#include <string>
#include <variant>

#include "qpmix/pauli.h"
#include "qpmix/rng.h"
#include "qpmix/statevec.h"

namespace qpmix {

struct NoError {
    bool operator==(const NoError &) const = default;
};

/// Every gate is over-rotated by the same known angle along its own generator.
struct ConstantOverRotation {
    double epsilon;
    bool operator==(const ConstantOverRotation &) const = default;
};

/// Per-gate over-rotation drawn from U[lo_factor*epsilon0, hi_factor*epsilon0];
/// only epsilon0 is assumed known to the mitigation.
struct UniformOverRotation {
    double epsilon0;
    double lo_factor = -1;
    double hi_factor = 3;
    bool operator==(const UniformOverRotation &) const = default;
};

/// U' = Rz(eps_z) Ry(eps_y) Rx(eps_x) applied after an Rz gate.
struct Unstructured {
    double eps_x;
    double eps_y;
    double eps_z;
    bool operator==(const Unstructured &) const = default;
};

using ErrorModel = std::variant<NoError, ConstantOverRotation, UniformOverRotation, Unstructured>;

/// Short label: "none", "constant", "uniform", "unstructured".
std::string error_kind(const ErrorModel &model);

/// Angle the mixture coefficients are built from: eps, eps0 (the mean), or eps_z.
double nominal_epsilon(const ErrorModel &model);

/// True when resolving the model consumes randomness.
bool is_stochastic(const ErrorModel &model);

/// eps * direction. Throws ArgumentError unless |direction| = 1 within 1e-10.
Unstructured build_unstructured(double epsilon, const std::array<double, 3> &direction);

/// Uniformly distributed unit 3-vector.
std::array<double, 3> random_direction(Rng &rng);

/// ||I - U'|| for U' a rotation by |eps| (half-angle convention): 2 sin(|eps|/4).
double unstructured_operator_distance(double epsilon);

/// Concrete error angles for one gate.
struct ResolvedError {
    /// Over-rotation along the gate's generator (constant/uniform models).
    double along = 0;
    /// Off-generator components (unstructured model); applied X, then Y, then Z.
    double eps_x = 0;
    double eps_y = 0;
    double eps_z = 0;
    bool unstructured = false;
};

/// Draws the per-gate angles (only the uniform model uses rng).
ResolvedError resolve_error(const ErrorModel &model, Rng &rng);

/// Applies the error unitary U' that follows an ideal rotation about target_pauli.
void apply_error(StateVector &state, const ErrorModel &model, const PauliString &target_pauli, Rng &rng);

using Mat2 = std::array<std::complex<double>, 4>;  ///< row-major

Mat2 mat2_mul(const Mat2 &a, const Mat2 &b);
Mat2 mat2_adjoint(const Mat2 &a);
/// exp(-i theta/2 sigma) for axis in {'X', 'Y', 'Z'}.
Mat2 rotation_matrix(char axis, double theta);

struct ErrorAngles {
    double eps_x;
    double eps_y;
    double eps_z;
};

/// Error angles of approx = U' Rz(ideal_theta) with U' = Rz(eps_z) Ry(eps_y) Rx(eps_x)
/// up to global phase. Throws ArgumentError for non-unitary input and
/// OutOfRegimeError when ||I - U'|| (phase-optimal) exceeds 0.5.
ErrorAngles extract_error_angles(double ideal_theta, const Mat2 &approx);

/// A sampled twirl element from {I, P}.
struct TwirlDraw {
    PauliString sigma;
};

/// Uniform draw over the commuting subgroup of a single-qubit generator.
TwirlDraw sample_twirl(const PauliString &generator, Rng &rng);

}  // namespace qpmix
