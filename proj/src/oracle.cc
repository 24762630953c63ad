#include "qpmix/oracle.h"

#include <unsupported/Eigen/KroneckerProduct>

#include <cmath>
#include <numbers>
#include <utility>
#include <variant>
#include <vector>

#include "qpmix/errors.h"

namespace qpmix::oracle {

namespace {

using cd = std::complex<double>;
constexpr cd kI{0, 1};
constexpr double kPi = std::numbers::pi;

Matrix single_pauli(char axis) {
    Matrix m(2, 2);
    switch (axis) {
        case 'X':
            m << 0, 1, 1, 0;
            break;
        case 'Y':
            m << 0, -kI, kI, 0;
            break;
        case 'Z':
            m << 1, 0, 0, -1;
            break;
        default:
            m = Matrix::Identity(2, 2);
    }
    return m;
}

Matrix single_gate(GateKind kind) {
    const double r = 1 / std::sqrt(2.0);
    Matrix m(2, 2);
    switch (kind) {
        case GateKind::H:
            m << r, r, r, -r;
            break;
        case GateKind::S:
            m << 1, 0, 0, kI;
            break;
        case GateKind::Sdg:
            m << 1, 0, 0, -kI;
            break;
        case GateKind::T:
            m << 1, 0, 0, std::polar(1.0, kPi / 4);
            break;
        case GateKind::Tdg:
            m << 1, 0, 0, std::polar(1.0, -kPi / 4);
            break;
        case GateKind::X:
            return single_pauli('X');
        case GateKind::Y:
            return single_pauli('Y');
        case GateKind::Z:
            return single_pauli('Z');
        case GateKind::CNOT:
            throw ArgumentError("single_gate: CNOT is two-qubit");
    }
    return m;
}

// Embeds a one-qubit matrix on qubit q of n (qubit 0 is the rightmost factor).
Matrix embed(const Matrix &m, size_t q, size_t n) {
    Matrix out = Matrix::Identity(1, 1);
    for (size_t k = n; k-- > 0;) {
        Matrix f = k == q ? m : Matrix::Identity(2, 2);
        out = Eigen::kroneckerProduct(out, f).eval();
    }
    return out;
}

void check_oracle_size(size_t n) {
    if (n == 0 || n > DensityMatrix::kMaxQubits) {
        throw CapacityError("oracle: " + std::to_string(n) + " qubits outside [1, " +
                            std::to_string(DensityMatrix::kMaxQubits) + "]");
    }
}

struct Step {
    std::vector<std::pair<double, Matrix>> terms;
};

Matrix error_unitary(const ParamRotation &r, size_t n) {
    return std::visit(
        [&](const auto &m) -> Matrix {
            using T = std::decay_t<decltype(m)>;
            const PauliString &p = r.generator;
            if constexpr (std::is_same_v<T, NoError>) {
                return dense_rotation(p, r.theta);
            } else if constexpr (std::is_same_v<T, ConstantOverRotation>) {
                return dense_rotation(p, r.theta + m.epsilon);
            } else if constexpr (std::is_same_v<T, UniformOverRotation>) {
                throw UnsupportedError("oracle: stochastic error model has no exact reference");
            } else {
                if (p.weight() != 1) {
                    throw UnsupportedError("oracle: unstructured error on multi-qubit generator " + p.str());
                }
                size_t q = p.support().front();
                Matrix e = dense_rotation(PauliString::single(n, q, 'Z'), m.eps_z) *
                           dense_rotation(PauliString::single(n, q, 'Y'), m.eps_y) *
                           dense_rotation(PauliString::single(n, q, 'X'), m.eps_x);
                return e * dense_rotation(p, r.theta);
            }
        },
        r.error);
}

// Every op becomes a weighted list of Kraus-like unitaries; adjacent
// single-term steps are multiplied together.
std::vector<Step> build_steps(const CircuitSpec &circuit, size_t *randomized) {
    const size_t n = circuit.n_qubits;
    std::vector<Step> steps;
    size_t count = 0;
    auto push = [&](Step s) {
        if (s.terms.size() == 1 && !steps.empty() && steps.back().terms.size() == 1) {
            auto &[w, u] = steps.back().terms.front();
            w *= s.terms.front().first;
            u = (s.terms.front().second * u).eval();
        } else {
            steps.push_back(std::move(s));
        }
    };
    for (const auto &op : circuit.ops) {
        if (const auto *g = std::get_if<FixedGate>(&op)) {
            push(Step{{{1.0, dense_fixed_gate(*g, n)}}});
            continue;
        }
        const auto &r = std::get<ParamRotation>(op);
        Matrix noisy = error_unitary(r, n);
        std::vector<std::pair<double, Matrix>> core;
        if (uses_mixture(r.mitigation)) {
            GammaTriple g = gamma_default(nominal_epsilon(r.error));
            for (int i = 1; i <= 3; ++i) {
                if (g.gamma(i) != 0) {
                    core.emplace_back(g.gamma(i), dense_rotation(r.generator, g.offset(i)) * noisy);
                }
            }
        } else {
            core.emplace_back(1.0, noisy);
        }
        Step s;
        if (uses_twirl(r.mitigation)) {
            const auto group = commuting_subgroup(r.generator);
            const double w = 1.0 / static_cast<double>(group.size());
            for (const auto &sigma : group) {
                Matrix ps = dense_pauli(sigma);
                for (const auto &[g, k] : core) {
                    s.terms.emplace_back(w * g, ps * k * ps);
                }
            }
        } else {
            s.terms = std::move(core);
        }
        if (r.mitigation != Mitigation::off) {
            ++count;
        }
        push(std::move(s));
    }
    if (randomized != nullptr) {
        *randomized = count;
    }
    return steps;
}

double observable_value(const Vector &psi, const Matrix &o) { return (psi.adjoint() * o * psi)(0, 0).real(); }

}  // namespace

Matrix dense_pauli(const PauliString &p) {
    check_oracle_size(p.n_qubits());
    Matrix out = Matrix::Identity(1, 1);
    for (size_t k = p.n_qubits(); k-- > 0;) {
        out = Eigen::kroneckerProduct(out, single_pauli(p.at(k))).eval();
    }
    return out;
}

Matrix dense_rotation(const PauliString &p, double theta) {
    const auto d = Eigen::Index{1} << p.n_qubits();
    return std::cos(theta / 2) * Matrix::Identity(d, d) - kI * std::sin(theta / 2) * dense_pauli(p);
}

Matrix dense_fixed_gate(const FixedGate &gate, size_t n_qubits) {
    check_oracle_size(n_qubits);
    if (gate.kind != GateKind::CNOT) {
        return embed(single_gate(gate.kind), gate.q0, n_qubits);
    }
    const auto d = Eigen::Index{1} << n_qubits;
    Matrix m = Matrix::Zero(d, d);
    for (Eigen::Index k = 0; k < d; ++k) {
        Eigen::Index target = (k >> gate.q0) & 1 ? k ^ (Eigen::Index{1} << gate.q1) : k;
        m(target, k) = 1;
    }
    return m;
}

Superoperator channel_of_unitary(const Matrix &u) {
    if (u.rows() != u.cols() || (u.rows() != 2 && u.rows() != 4)) {
        throw ArgumentError("channel_of_unitary: expected a 2x2 or 4x4 matrix");
    }
    double err = (u.adjoint() * u - Matrix::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff();
    if (err > 1e-9) {
        throw ArgumentError("channel_of_unitary: matrix is not unitary (deviation " + std::to_string(err) + ")");
    }
    return sandwich(u, u);
}

Superoperator sandwich(const Matrix &a, const Matrix &b) {
    return Superoperator{Eigen::kroneckerProduct(b.conjugate(), a).eval()};
}

Superoperator rotation_channel(const PauliString &p, double theta) {
    return channel_of_unitary(dense_rotation(p, theta));
}

Vector vectorize(const Matrix &rho) { return Eigen::Map<const Vector>(rho.data(), rho.size()); }

Matrix unvectorize(const Vector &v) {
    auto d = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(v.size()))));
    return Eigen::Map<const Matrix>(v.data(), d, d);
}

Matrix apply(const Superoperator &s, const Matrix &rho) { return unvectorize(s.matrix * vectorize(rho)); }

double max_entry_distance(const Matrix &a, const Matrix &b) { return (a - b).cwiseAbs().maxCoeff(); }

double verify_mixture_identity(const PauliString &p, double theta, const GammaTriple &g) {
    Matrix sum = Matrix::Zero(1, 1);
    for (int i = 1; i <= 3; ++i) {
        Matrix term = g.gamma(i) * rotation_channel(p, theta + g.epsilon + g.offset(i)).matrix;
        sum = sum.size() == 1 ? term : (sum + term).eval();
    }
    return max_entry_distance(sum, rotation_channel(p, theta).matrix);
}

double verify_mixture_identity(double theta, double epsilon, double offset_a, double offset_b) {
    return verify_mixture_identity(PauliString::from_str("Z"), theta, gamma_general(epsilon, offset_a, offset_b));
}

double verify_four_term_identity(double theta, double epsilon) {
    const PauliString z = PauliString::from_str("Z");
    Matrix sum = Matrix::Zero(4, 4);
    for (const auto &t : four_term_weights(theta, epsilon)) {
        sum += t.weight * rotation_channel(z, t.angle).matrix;
    }
    return max_entry_distance(sum, rotation_channel(z, theta).matrix);
}

double verify_identity_special_case(double theta) {
    const PauliString z = PauliString::from_str("Z");
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    Matrix sum = (1 + c) / 2 * rotation_channel(z, 0).matrix + s / 2 * rotation_channel(z, kPi / 2).matrix -
                 s / 2 * rotation_channel(z, -kPi / 2).matrix + (1 - c) / 2 * rotation_channel(z, kPi).matrix;
    return max_entry_distance(sum, rotation_channel(z, theta).matrix);
}

double verify_two_term_unitary_identity(double theta, double epsilon) {
    const PauliString z = PauliString::from_str("Z");
    Matrix lhs = std::cos(epsilon / 2) * dense_rotation(z, theta + epsilon) -
                 std::sin(epsilon / 2) * dense_rotation(z, theta + epsilon + kPi);
    return max_entry_distance(lhs, dense_rotation(z, theta));
}

double verify_cross_term_identity(double theta, double epsilon) {
    const PauliString z = PauliString::from_str("Z");
    const double phi = theta + epsilon;
    Matrix a = dense_rotation(z, phi);
    Matrix b = dense_rotation(z, phi + kPi);
    Matrix lhs = sandwich(a, b).matrix + sandwich(b, a).matrix;
    Matrix rhs = rotation_channel(z, phi + kPi / 2).matrix - rotation_channel(z, phi - kPi / 2).matrix;
    return max_entry_distance(lhs, rhs);
}

Superoperator twirled_channel(const Matrix &u, const PauliString &generator) {
    const auto group = commuting_subgroup(generator);
    Matrix sum = Matrix::Zero(u.rows() * u.rows(), u.rows() * u.rows());
    for (const auto &sigma : group) {
        Matrix ps = dense_pauli(sigma);
        sum += channel_of_unitary(ps * u * ps).matrix;
    }
    return Superoperator{sum / static_cast<double>(group.size())};
}

Eigen::Matrix4d pauli_transfer_matrix(const Superoperator &s) {
    if (s.dim() != 4) {
        throw ArgumentError("pauli_transfer_matrix: single-qubit superoperator expected");
    }
    static const char kAxes[] = {'I', 'X', 'Y', 'Z'};
    Eigen::Matrix4d r;
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            r(i, j) = (single_pauli(kAxes[i]) * oracle::apply(s, single_pauli(kAxes[j]))).trace().real() / 2;
        }
    }
    return r;
}

DensityMatrix DensityMatrix::zero(size_t n_qubits) {
    check_oracle_size(n_qubits);
    DensityMatrix out;
    out.n_qubits_ = n_qubits;
    const auto d = Eigen::Index{1} << n_qubits;
    out.rho_ = Matrix::Zero(d, d);
    out.rho_(0, 0) = 1;
    return out;
}

void DensityMatrix::apply_unitary(const Matrix &u) { rho_ = u * rho_ * u.adjoint(); }

void DensityMatrix::apply_weighted(const std::vector<std::pair<double, Matrix>> &terms) {
    Matrix next = Matrix::Zero(rho_.rows(), rho_.cols());
    for (const auto &[w, k] : terms) {
        next += w * (k * rho_ * k.adjoint());
    }
    rho_ = std::move(next);
}

double DensityMatrix::expectation(const PauliString &o) const {
    if (o.n_qubits() != n_qubits_) {
        throw ArgumentError("DensityMatrix::expectation: observable size mismatch");
    }
    return (dense_pauli(o) * rho_).trace().real();
}

double DensityMatrix::hermiticity_error() const { return (rho_ - rho_.adjoint()).cwiseAbs().maxCoeff(); }

double enumerate_mixture_expectation(const CircuitSpec &circuit, const PauliString &observable) {
    check_oracle_size(circuit.n_qubits);
    if (observable.n_qubits() != circuit.n_qubits) {
        throw ArgumentError("enumerate_mixture_expectation: observable size mismatch");
    }
    size_t randomized = 0;
    const auto steps = build_steps(circuit, &randomized);
    if (randomized > 8) {
        throw CapacityError("enumerate_mixture_expectation: " + std::to_string(randomized) +
                            " randomized rotations exceed the limit of 8");
    }
    const Matrix o = dense_pauli(observable);
    const auto d = Eigen::Index{1} << circuit.n_qubits;
    Vector psi0 = Vector::Zero(d);
    psi0(0) = 1;

    // Depth-first over branch assignments; the prefix state is shared.
    double total = 0;
    auto recurse = [&](auto &self, size_t depth, const Vector &psi, double weight) -> void {
        if (depth == steps.size()) {
            total += weight * observable_value(psi, o);
            return;
        }
        for (const auto &[w, k] : steps[depth].terms) {
            self(self, depth + 1, k * psi, weight * w);
        }
    };
    recurse(recurse, 0, psi0, 1.0);
    return total;
}

double density_matrix_mixture_expectation(const CircuitSpec &circuit, const PauliString &observable) {
    DensityMatrix rho = DensityMatrix::zero(circuit.n_qubits);
    for (const auto &step : build_steps(circuit, nullptr)) {
        rho.apply_weighted(step.terms);
    }
    return rho.expectation(observable);
}

MixtureExpectation exact_mixture_expectation(const CircuitSpec &circuit, const PauliString &observable) {
    return {enumerate_mixture_expectation(circuit, observable),
            density_matrix_mixture_expectation(circuit, observable)};
}

double dense_ideal_expectation(const CircuitSpec &circuit, const PauliString &observable) {
    return density_matrix_mixture_expectation(strip_errors(circuit), observable);
}

}  // namespace qpmix::oracle
