#include "qpmix/noise.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "qpmix/errors.h"

namespace qpmix {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

using cd = std::complex<double>;

}  // namespace

std::string error_kind(const ErrorModel &model) {
    return std::visit(overloaded{
                          [](const NoError &) { return std::string("none"); },
                          [](const ConstantOverRotation &) { return std::string("constant"); },
                          [](const UniformOverRotation &) { return std::string("uniform"); },
                          [](const Unstructured &) { return std::string("unstructured"); },
                      },
                      model);
}

double nominal_epsilon(const ErrorModel &model) {
    return std::visit(overloaded{
                          [](const NoError &) { return 0.0; },
                          [](const ConstantOverRotation &m) { return m.epsilon; },
                          [](const UniformOverRotation &m) { return m.epsilon0; },
                          [](const Unstructured &m) { return m.eps_z; },
                      },
                      model);
}

bool is_stochastic(const ErrorModel &model) {
    return std::holds_alternative<UniformOverRotation>(model);
}

Unstructured build_unstructured(double epsilon, const std::array<double, 3> &direction) {
    double norm = std::sqrt(direction[0] * direction[0] + direction[1] * direction[1] + direction[2] * direction[2]);
    if (std::abs(norm - 1) > 1e-10) {
        throw ArgumentError("build_unstructured: direction must be a unit vector, |eta| = " + std::to_string(norm));
    }
    return Unstructured{epsilon * direction[0], epsilon * direction[1], epsilon * direction[2]};
}

std::array<double, 3> random_direction(Rng &rng) {
    double z = 2 * uniform01(rng) - 1;
    double phi = 2 * std::numbers::pi * uniform01(rng);
    double r = std::sqrt(std::max(0.0, 1 - z * z));
    std::array<double, 3> v{r * std::cos(phi), r * std::sin(phi), z};
    double norm = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
    return {v[0] / norm, v[1] / norm, v[2] / norm};
}

double unstructured_operator_distance(double epsilon) {
    return 2 * std::sin(std::abs(epsilon) / 4);
}

ResolvedError resolve_error(const ErrorModel &model, Rng &rng) {
    ResolvedError out;
    std::visit(overloaded{
                   [](const NoError &) {},
                   [&](const ConstantOverRotation &m) { out.along = m.epsilon; },
                   [&](const UniformOverRotation &m) {
                       double u = uniform01(rng);
                       out.along = m.epsilon0 * (m.lo_factor + (m.hi_factor - m.lo_factor) * u);
                   },
                   [&](const Unstructured &m) {
                       out.unstructured = true;
                       out.eps_x = m.eps_x;
                       out.eps_y = m.eps_y;
                       out.eps_z = m.eps_z;
                   },
               },
               model);
    return out;
}

void apply_error(StateVector &state, const ErrorModel &model, const PauliString &target_pauli, Rng &rng) {
    if (std::holds_alternative<Unstructured>(model) && target_pauli.weight() != 1) {
        throw UnsupportedError("unstructured error is only defined for single-qubit generators, got " +
                               target_pauli.str());
    }
    ResolvedError e = resolve_error(model, rng);
    if (!e.unstructured) {
        if (e.along != 0) {
            apply_pauli_rotation(state, target_pauli, e.along);
        }
        return;
    }
    size_t q = target_pauli.support().front();
    size_t n = target_pauli.n_qubits();
    apply_pauli_rotation(state, PauliString::single(n, q, 'X'), e.eps_x);
    apply_pauli_rotation(state, PauliString::single(n, q, 'Y'), e.eps_y);
    apply_pauli_rotation(state, PauliString::single(n, q, 'Z'), e.eps_z);
}

Mat2 mat2_mul(const Mat2 &a, const Mat2 &b) {
    return {a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3], a[2] * b[0] + a[3] * b[2],
            a[2] * b[1] + a[3] * b[3]};
}

Mat2 mat2_adjoint(const Mat2 &a) {
    return {std::conj(a[0]), std::conj(a[2]), std::conj(a[1]), std::conj(a[3])};
}

Mat2 rotation_matrix(char axis, double theta) {
    double c = std::cos(theta / 2);
    double s = std::sin(theta / 2);
    switch (axis) {
        case 'X':
            return {cd(c, 0), cd(0, -s), cd(0, -s), cd(c, 0)};
        case 'Y':
            return {cd(c, 0), cd(-s, 0), cd(s, 0), cd(c, 0)};
        case 'Z':
            return {cd(c, -s), cd(0, 0), cd(0, 0), cd(c, s)};
    }
    throw ArgumentError(std::string("rotation_matrix: bad axis ") + axis);
}

ErrorAngles extract_error_angles(double ideal_theta, const Mat2 &approx) {
    Mat2 check = mat2_mul(approx, mat2_adjoint(approx));
    double dev = std::max({std::abs(check[0] - 1.0), std::abs(check[1]), std::abs(check[2]), std::abs(check[3] - 1.0)});
    if (dev > 1e-10) {
        throw ArgumentError("extract_error_angles: input is not unitary (deviation " + std::to_string(dev) + ")");
    }
    Mat2 u = mat2_mul(approx, mat2_adjoint(rotation_matrix('Z', ideal_theta)));
    // Project onto SU(2) with non-negative real trace; the remaining sign/phase is global.
    cd det = u[0] * u[3] - u[1] * u[2];
    cd root = std::sqrt(det);
    for (auto &x : u) {
        x /= root;
    }
    if ((u[0] + u[3]).real() < 0) {
        for (auto &x : u) {
            x = -x;
        }
    }
    double half_cos = std::clamp((u[0] + u[3]).real() / 2, -1.0, 1.0);
    double alpha = 2 * std::acos(half_cos);
    double distance = 2 * std::sin(alpha / 4);
    if (distance > 0.5) {
        throw OutOfRegimeError("extract_error_angles: ||I - U'|| = " + std::to_string(distance) +
                               " exceeds the small-angle regime (0.5)");
    }
    // SO(3) image: R_ij = Tr(sigma_i U sigma_j U^dag) / 2.
    const std::array<Mat2, 3> sigma{{
        {cd(0), cd(1), cd(1), cd(0)},
        {cd(0), cd(0, -1), cd(0, 1), cd(0)},
        {cd(1), cd(0), cd(0), cd(-1)},
    }};
    Mat2 ud = mat2_adjoint(u);
    double r[3][3];
    for (int i = 0; i < 3; i++) {
        for (int j = 0; j < 3; j++) {
            Mat2 m = mat2_mul(sigma[i], mat2_mul(u, mat2_mul(sigma[j], ud)));
            r[i][j] = ((m[0] + m[3]) / 2.0).real();
        }
    }
    // R = Rz(a) Ry(b) Rx(c)
    ErrorAngles out;
    out.eps_y = std::asin(std::clamp(-r[2][0], -1.0, 1.0));
    out.eps_z = std::atan2(r[1][0], r[0][0]);
    out.eps_x = std::atan2(r[2][1], r[2][2]);
    return out;
}

TwirlDraw sample_twirl(const PauliString &generator, Rng &rng) {
    if (generator.weight() != 1) {
        throw UnsupportedError("sample_twirl: only single-qubit generators are twirled, got " + generator.str());
    }
    bool flip = (rng() >> 63) != 0;
    return TwirlDraw{flip ? generator : PauliString(generator.n_qubits())};
}

}  // namespace qpmix
