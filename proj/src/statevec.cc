#include "qpmix/statevec.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>

#include "qpmix/errors.h"

namespace qpmix {

namespace {

constexpr complex kI{0.0, 1.0};

void check_qubit(const StateVector &state, uint32_t q) {
    if (q >= state.n_qubits()) {
        throw ArgumentError("qubit index " + std::to_string(q) + " out of range for " +
                            std::to_string(state.n_qubits()) + "-qubit state");
    }
}

void check_sizes(const StateVector &state, const PauliString &p) {
    if (p.n_qubits() != state.n_qubits()) {
        throw ArgumentError("Pauli string " + p.str() + " does not match " + std::to_string(state.n_qubits()) +
                            "-qubit state");
    }
}

/// i^k for k mod 4.
complex i_pow(int k) {
    switch (k & 3) {
        case 0:
            return {1, 0};
        case 1:
            return {0, 1};
        case 2:
            return {-1, 0};
        default:
            return {0, -1};
    }
}

double sign_of(uint64_t k, uint64_t z) {
    return (std::popcount(k & z) & 1) ? -1.0 : 1.0;
}

/// Visits every index whose bit `q` is clear; `f(k)` handles the pair (k, k | 1<<q).
template <typename F>
void for_each_pair(size_t n, uint32_t q, F &&f) {
    uint64_t half = uint64_t{1} << (n - 1);
    uint64_t low = (uint64_t{1} << q) - 1;
    for (uint64_t j = 0; j < half; j++) {
        uint64_t k = ((j & ~low) << 1) | (j & low);
        f(k);
    }
}

void apply_diag(StateVector &state, uint32_t q, complex d1) {
    auto amps = state.amplitudes();
    uint64_t bit = uint64_t{1} << q;
    for (uint64_t k = 0; k < amps.size(); k++) {
        if (k & bit) {
            amps[k] *= d1;
        }
    }
}

}  // namespace

const char *gate_name(GateKind kind) {
    switch (kind) {
        case GateKind::H:
            return "H";
        case GateKind::S:
            return "S";
        case GateKind::Sdg:
            return "SDG";
        case GateKind::T:
            return "T";
        case GateKind::Tdg:
            return "TDG";
        case GateKind::X:
            return "X";
        case GateKind::Y:
            return "Y";
        case GateKind::Z:
            return "Z";
        case GateKind::CNOT:
            return "CNOT";
    }
    return "?";
}

FixedGate FixedGate::single(GateKind kind, uint32_t q) {
    if (kind == GateKind::CNOT) {
        throw ArgumentError("CNOT needs two qubits");
    }
    return FixedGate{kind, q, 0};
}

FixedGate FixedGate::cnot(uint32_t control, uint32_t target) {
    if (control == target) {
        throw ArgumentError("CNOT control and target must differ");
    }
    return FixedGate{GateKind::CNOT, control, target};
}

std::string FixedGate::str() const {
    std::string out = gate_name(kind);
    out += " " + std::to_string(q0);
    if (is_two_qubit()) {
        out += " " + std::to_string(q1);
    }
    return out;
}

StateVector StateVector::zero(size_t n_qubits) {
    if (n_qubits == 0 || n_qubits > kMaxQubits) {
        throw CapacityError("state vector supports 1.." + std::to_string(kMaxQubits) + " qubits, got " +
                            std::to_string(n_qubits));
    }
    std::vector<complex> amps(size_t{1} << n_qubits);
    amps[0] = 1.0;
    return StateVector(n_qubits, std::move(amps));
}

StateVector StateVector::from_amplitudes(std::vector<complex> amplitudes) {
    size_t size = amplitudes.size();
    if (size < 2 || !std::has_single_bit(size)) {
        throw ArgumentError("amplitude count must be a power of two >= 2");
    }
    size_t n = std::countr_zero(size);
    if (n > kMaxQubits) {
        throw CapacityError("too many qubits: " + std::to_string(n));
    }
    return StateVector(n, std::move(amplitudes));
}

double StateVector::norm_squared() const {
    double total = 0;
    for (const auto &a : amps_) {
        total += std::norm(a);
    }
    return total;
}

void apply_pauli_rotation(StateVector &state, const PauliString &p, double theta) {
    check_sizes(state, p);
    double c = std::cos(theta / 2);
    double s = std::sin(theta / 2);
    auto amps = state.amplitudes();
    uint64_t x = p.x_mask();
    uint64_t z = p.z_mask();
    // P|k> = i^{#Y} (-1)^{|k & z|} |k ^ x>
    complex f = -kI * s * i_pow(p.num_y());
    if (x == 0) {
        complex plus = c + f;
        complex minus = c - f;
        for (uint64_t k = 0; k < amps.size(); k++) {
            amps[k] *= sign_of(k, z) > 0 ? plus : minus;
        }
        return;
    }
    uint32_t hb = 63 - std::countl_zero(x);
    for_each_pair(state.n_qubits(), hb, [&](uint64_t k) {
        uint64_t k2 = k ^ x;
        complex a = amps[k];
        complex b = amps[k2];
        amps[k] = c * a + f * sign_of(k2, z) * b;
        amps[k2] = c * b + f * sign_of(k, z) * a;
    });
}

void apply_pauli(StateVector &state, const PauliString &p) {
    check_sizes(state, p);
    auto amps = state.amplitudes();
    uint64_t x = p.x_mask();
    uint64_t z = p.z_mask();
    complex phase = i_pow(p.num_y());
    if (x == 0) {
        for (uint64_t k = 0; k < amps.size(); k++) {
            amps[k] *= phase * sign_of(k, z);
        }
        return;
    }
    uint32_t hb = 63 - std::countl_zero(x);
    for_each_pair(state.n_qubits(), hb, [&](uint64_t k) {
        uint64_t k2 = k ^ x;
        complex a = amps[k];
        amps[k] = phase * sign_of(k2, z) * amps[k2];
        amps[k2] = phase * sign_of(k, z) * a;
    });
}

void apply_fixed_gate(StateVector &state, const FixedGate &gate) {
    check_qubit(state, gate.q0);
    auto amps = state.amplitudes();
    uint64_t bit = uint64_t{1} << gate.q0;
    size_t n = state.n_qubits();
    switch (gate.kind) {
        case GateKind::H: {
            const double r = std::numbers::sqrt2 / 2;
            for_each_pair(n, gate.q0, [&](uint64_t k) {
                complex a = amps[k];
                complex b = amps[k | bit];
                amps[k] = r * (a + b);
                amps[k | bit] = r * (a - b);
            });
            break;
        }
        case GateKind::S:
            apply_diag(state, gate.q0, kI);
            break;
        case GateKind::Sdg:
            apply_diag(state, gate.q0, -kI);
            break;
        case GateKind::T:
            apply_diag(state, gate.q0, std::polar(1.0, std::numbers::pi / 4));
            break;
        case GateKind::Tdg:
            apply_diag(state, gate.q0, std::polar(1.0, -std::numbers::pi / 4));
            break;
        case GateKind::Z:
            apply_diag(state, gate.q0, -1.0);
            break;
        case GateKind::X:
            for_each_pair(n, gate.q0, [&](uint64_t k) { std::swap(amps[k], amps[k | bit]); });
            break;
        case GateKind::Y:
            for_each_pair(n, gate.q0, [&](uint64_t k) {
                complex a = amps[k];
                amps[k] = -kI * amps[k | bit];
                amps[k | bit] = kI * a;
            });
            break;
        case GateKind::CNOT: {
            check_qubit(state, gate.q1);
            if (gate.q0 == gate.q1) {
                throw ArgumentError("CNOT control and target must differ");
            }
            uint64_t tbit = uint64_t{1} << gate.q1;
            for_each_pair(n, gate.q1, [&](uint64_t k) {
                if (k & bit) {
                    std::swap(amps[k], amps[k | tbit]);
                }
            });
            break;
        }
    }
}

void apply_single_qubit(StateVector &state, uint32_t q, const std::array<complex, 4> &m) {
    check_qubit(state, q);
    auto amps = state.amplitudes();
    uint64_t bit = uint64_t{1} << q;
    for_each_pair(state.n_qubits(), q, [&](uint64_t k) {
        complex a = amps[k];
        complex b = amps[k | bit];
        amps[k] = m[0] * a + m[1] * b;
        amps[k | bit] = m[2] * a + m[3] * b;
    });
}

std::array<complex, 4> fixed_gate_matrix(GateKind kind) {
    const double r = std::numbers::sqrt2 / 2;
    switch (kind) {
        case GateKind::H:
            return {r, r, r, -r};
        case GateKind::S:
            return {1, 0, 0, kI};
        case GateKind::Sdg:
            return {1, 0, 0, -kI};
        case GateKind::T:
            return {1, 0, 0, std::polar(1.0, std::numbers::pi / 4)};
        case GateKind::Tdg:
            return {1, 0, 0, std::polar(1.0, -std::numbers::pi / 4)};
        case GateKind::Z:
            return {1, 0, 0, -1};
        case GateKind::X:
            return {0, 1, 1, 0};
        case GateKind::Y:
            return {0, -kI, kI, 0};
        case GateKind::CNOT:
            break;
    }
    throw ArgumentError("fixed_gate_matrix: not a single-qubit gate");
}

double expectation_pauli(const StateVector &state, const PauliString &o) {
    check_sizes(state, o);
    auto amps = state.amplitudes();
    uint64_t x = o.x_mask();
    uint64_t z = o.z_mask();
    complex total = 0;
    for (uint64_t k = 0; k < amps.size(); k++) {
        uint64_t src = k ^ x;
        total += std::conj(amps[k]) * sign_of(src, z) * amps[src];
    }
    total *= i_pow(o.num_y());
    if (std::abs(total.imag()) > 1e-9) {
        throw std::logic_error("expectation_pauli: imaginary residue " + std::to_string(total.imag()));
    }
    return total.real();
}

BasisSampler::BasisSampler(const StateVector &state) {
    auto amps = state.amplitudes();
    cumulative_.resize(amps.size());
    double acc = 0;
    for (size_t k = 0; k < amps.size(); k++) {
        acc += std::norm(amps[k]);
        cumulative_[k] = acc;
    }
}

uint64_t BasisSampler::sample(Rng &rng) const {
    double u = uniform01(rng) * cumulative_.back();
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    if (it == cumulative_.end()) {
        --it;
    }
    return static_cast<uint64_t>(it - cumulative_.begin());
}

int sample_z_parity(const StateVector &state, Rng &rng) {
    BasisSampler sampler(state);
    uint64_t all = state.size() - 1;
    return parity_of(sampler.sample(rng), all);
}

}  // namespace qpmix
