#pragma once

#include <bit>
#include <array>
#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "qpmix/pauli.h"
#include "qpmix/rng.h"

namespace qpmix {

using complex = std::complex<double>;

enum class GateKind : uint8_t { H, S, Sdg, T, Tdg, X, Y, Z, CNOT };

/// Name used in circuit dumps ("H", "S", "SDG", "T", "TDG", "X", "Y", "Z", "CNOT").
const char *gate_name(GateKind kind);

/// A non-parameterized gate. CNOT uses (control, target) = (q0, q1).
struct FixedGate {
    GateKind kind;
    uint32_t q0;
    uint32_t q1 = 0;

    static FixedGate single(GateKind kind, uint32_t q);
    static FixedGate cnot(uint32_t control, uint32_t target);

    bool is_two_qubit() const { return kind == GateKind::CNOT; }
    std::string str() const;
    bool operator==(const FixedGate &) const = default;
};

/// Dense 2^n amplitude vector. Norm is never renormalized; drift is checked by tests.
class StateVector {
   public:
    /// 2^26 amplitudes = 1 GiB.
    static constexpr size_t kMaxQubits = 26;

    /// |0...0> on n qubits.
    static StateVector zero(size_t n_qubits);
    static StateVector from_amplitudes(std::vector<complex> amplitudes);

    size_t n_qubits() const { return n_qubits_; }
    size_t size() const { return amps_.size(); }
    std::span<const complex> amplitudes() const { return amps_; }
    std::span<complex> amplitudes() { return amps_; }
    complex operator[](size_t k) const { return amps_[k]; }

    double norm_squared() const;

   private:
    StateVector(size_t n, std::vector<complex> amps) : n_qubits_(n), amps_(std::move(amps)) {}
    size_t n_qubits_;
    std::vector<complex> amps_;
};

inline StateVector init_zero(size_t n_qubits) { return StateVector::zero(n_qubits); }

/// Applies exp(-i theta/2 P) as cos(theta/2) psi - i sin(theta/2) P psi.
void apply_pauli_rotation(StateVector &state, const PauliString &p, double theta);
/// Applies the Pauli operator itself (no phase tracking beyond P = i^{#Y} X^x Z^z).
void apply_pauli(StateVector &state, const PauliString &p);
void apply_fixed_gate(StateVector &state, const FixedGate &gate);
/// Applies a row-major 2x2 matrix to qubit q.
void apply_single_qubit(StateVector &state, uint32_t q, const std::array<std::complex<double>, 4> &m);
/// Row-major matrix of a single-qubit fixed gate; throws ArgumentError for CNOT.
std::array<std::complex<double>, 4> fixed_gate_matrix(GateKind kind);

/// <psi|O|psi>; throws if the imaginary residue exceeds 1e-9.
double expectation_pauli(const StateVector &state, const PauliString &o);

/// Draws computational-basis outcomes from |amplitude|^2. Built once per state and
/// reused for every shot on that state.
class BasisSampler {
   public:
    explicit BasisSampler(const StateVector &state);
    uint64_t sample(Rng &rng) const;

   private:
    std::vector<double> cumulative_;
};

/// Tr[O E_b] for diagonal O = Z-string with mask z_mask: (-1)^{popcount(b & z_mask)}.
inline int parity_of(uint64_t basis_index, uint64_t z_mask) {
    return (std::popcount(basis_index & z_mask) & 1) ? -1 : 1;
}

/// One measurement of Z^{(x)N}: samples b with probability |psi_b|^2 and returns its parity.
int sample_z_parity(const StateVector &state, Rng &rng);

}  // namespace qpmix
