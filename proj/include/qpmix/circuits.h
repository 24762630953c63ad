#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "qpmix/mixture.h"
#include "qpmix/noise.h"
#include "qpmix/pauli.h"
#include "qpmix/rng.h"
#include "qpmix/statevec.h"

namespace qpmix {

enum class Mitigation : uint8_t {
    off,
    mixture,
    mixture_plus_twirl,
    /// Twirl without the signed mixture (weight 1); a comparison arm.
    twirl,
};

/// "off", "mix", "mix+twirl", "twirl".
const char *mitigation_name(Mitigation m);
/// Accepts the short names above and "mixture", "mixture_plus_twirl".
Mitigation parse_mitigation(std::string_view text);
bool uses_mixture(Mitigation m);
bool uses_twirl(Mitigation m);

/// exp(-i theta/2 P) carrying its error model and mitigation policy.
struct ParamRotation {
    PauliString generator;
    double theta;
    ErrorModel error = NoError{};
    Mitigation mitigation = Mitigation::off;
};

using GateOp = std::variant<FixedGate, ParamRotation>;

struct CircuitSpec {
    size_t n_qubits = 0;
    std::vector<GateOp> ops;

    /// Number of parameterized rotations.
    size_t nu() const;
};

/// First-order Trotter circuit for H = h sum Y_i + J sum X_i X_{i+1} (periodic):
/// each of the L steps is a layer of R_y(2hT/L) followed by R_xx(2JT/L) on bonds
/// (0,1), (1,2), ..., (N-1,0).
CircuitSpec build_trotter_ising(size_t n_qubits, size_t steps, double time, double h = 1, double j = 1);

/// Lowers R_y and R_xx to Clifford frames around single-qubit R_z:
///   R_y(t)      -> SDG, H, RZ(t), H, S
///   R_xx(t)_ij  -> H_i, H_j, CNOT_ij, RZ_j(t), CNOT_ij, H_i, H_j
/// Existing single-qubit R_z gates pass through.
CircuitSpec compile_to_rz(const CircuitSpec &circuit);

/// Sets the error model and policy on every rotation; Clifford frame gates stay ideal.
CircuitSpec attach_errors(const CircuitSpec &circuit, const ErrorModel &model, Mitigation policy);

/// Same circuit with every error removed and mitigation off.
CircuitSpec strip_errors(const CircuitSpec &circuit);

enum class OpRole : uint8_t { frame, gate, error, twirl, correction };

struct Rotation {
    PauliString generator;
    double angle;
};

struct ConcreteOp {
    std::variant<FixedGate, Rotation> op;
    OpRole role;
};

/// One realization drawn from the signed circuit mixture.
struct SampledInstance {
    std::vector<ConcreteOp> ops;
    int sign = 1;           ///< sign of Gamma_L
    double weight = 1;      ///< Gamma_c, product of per-gate one-norms
    size_t t_insertions = 0;  ///< branch-2 draws (one T or T^dag each)
    size_t z_insertions = 0;  ///< branch-3 draws (a Pauli)
};

/// Resolves error draws, mixture branches and twirls for every rotation. For each
/// rotation the time order is: twirl sigma, noisy gate R(theta + along-axis error),
/// off-axis error (X, Y, Z), branch correction, twirl sigma.
SampledInstance sample_instance(const CircuitSpec &circuit, Rng &rng);

void apply_op(StateVector &state, const ConcreteOp &op);
StateVector run_instance(size_t n_qubits, const SampledInstance &instance);
/// Evolves |0> through the circuit without any errors.
StateVector run_ideal(const CircuitSpec &circuit);
/// Evolves |0> through one error realization with mitigation ignored.
StateVector run_noisy(const CircuitSpec &circuit, Rng &rng);

/// One gate per line, e.g. "H 0", "CNOT 0 1", "RZ 0 0.066667 eps=0.003 policy=mix+twirl".
void dump_circuit(std::ostream &out, const CircuitSpec &circuit);
std::string dump_circuit(const CircuitSpec &circuit);
/// Concrete ops with a trailing role tag, e.g. "TDG 3 role=correction".
void dump_instance(std::ostream &out, const SampledInstance &instance);

}  // namespace qpmix
