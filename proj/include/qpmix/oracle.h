#pragma once

// Exact dense-matrix references. Nothing here goes through the state-vector
// kernels, so these routines can check them.

#include <Eigen/Dense>

#include "qpmix/circuits.h"
#include "qpmix/mixture.h"
#include "qpmix/pauli.h"

namespace qpmix::oracle {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

/// Dense 2^n x 2^n matrix of a Pauli string; basis index bit q is qubit q.
Matrix dense_pauli(const PauliString &p);
/// cos(theta/2) I - i sin(theta/2) P.
Matrix dense_rotation(const PauliString &p, double theta);
Matrix dense_fixed_gate(const FixedGate &gate, size_t n_qubits);

/// Linear map on column-stacked vec(rho): vec(A rho B^dag) = (conj(B) kron A) vec(rho).
struct Superoperator {
    Matrix matrix;
    size_t dim() const { return static_cast<size_t>(matrix.rows()); }
};

/// rho -> U rho U^dag for a 2x2 or 4x4 unitary. Throws ArgumentError otherwise.
Superoperator channel_of_unitary(const Matrix &u);
/// rho -> A rho B^dag (not a channel in general; used for the cross terms).
Superoperator sandwich(const Matrix &a, const Matrix &b);
Superoperator rotation_channel(const PauliString &p, double theta);

Vector vectorize(const Matrix &rho);
Matrix unvectorize(const Vector &v);
Matrix apply(const Superoperator &s, const Matrix &rho);

double max_entry_distance(const Matrix &a, const Matrix &b);

/// max-entry | sum_i gamma_i R(theta+eps+offset_i) - R(theta) | over 4x4 superoperators
/// for the triple gamma_general(eps, A, B), using generator p (default single-qubit Z).
double verify_mixture_identity(double theta, double epsilon, double offset_a, double offset_b);
double verify_mixture_identity(const PauliString &p, double theta, const GammaTriple &g);
/// Same check for the four-channel decomposition.
double verify_four_term_identity(double theta, double epsilon);
/// Four-channel decomposition at eps = -theta: angles 0, pi/2, -pi/2, pi.
double verify_identity_special_case(double theta);
/// cos(e/2) R(t+e) - sin(e/2) R(t+e+pi) vs R(t) as 2x2 matrices.
double verify_two_term_unitary_identity(double theta, double epsilon);
/// R(t+e)(.)R^dag(t+e+pi) + R(t+e+pi)(.)R^dag(t+e) vs the channel difference
/// R(t+e+pi/2) - R(t+e-pi/2).
double verify_cross_term_identity(double theta, double epsilon);

/// (1/2) sum over sigma in {I, P} of the channel of sigma U sigma^dag.
Superoperator twirled_channel(const Matrix &u, const PauliString &generator);
/// Single-qubit Pauli transfer matrix R_ij = Tr(P_i S(P_j)) / 2 with order I, X, Y, Z.
Eigen::Matrix4d pauli_transfer_matrix(const Superoperator &s);

/// Hermitian unit-trace 2^n x 2^n matrix; positivity is not enforced because
/// signed-mixture intermediates may leave the positive cone.
class DensityMatrix {
   public:
    static constexpr size_t kMaxQubits = 6;
    static DensityMatrix zero(size_t n_qubits);
    size_t n_qubits() const { return n_qubits_; }
    const Matrix &matrix() const { return rho_; }

    void apply_unitary(const Matrix &u);
    /// rho -> sum_k w_k K_k rho K_k^dag.
    void apply_weighted(const std::vector<std::pair<double, Matrix>> &terms);
    double expectation(const PauliString &o) const;
    std::complex<double> trace() const { return rho_.trace(); }
    double hermiticity_error() const;

   private:
    size_t n_qubits_ = 0;
    Matrix rho_;
};

struct MixtureExpectation {
    double enumerated;
    double density_matrix;
};

/// Exhaustive sum over every branch and twirl assignment of Gamma_L <O>_L.
/// Limited to 8 randomized rotations and DensityMatrix::kMaxQubits qubits.
double enumerate_mixture_expectation(const CircuitSpec &circuit, const PauliString &observable);
/// Gate-by-gate signed-mixture map on a dense density matrix (n <= 6).
double density_matrix_mixture_expectation(const CircuitSpec &circuit, const PauliString &observable);
/// Both routes. Only deterministic error models are accepted.
MixtureExpectation exact_mixture_expectation(const CircuitSpec &circuit, const PauliString &observable);
/// <O> of the error-free circuit by dense unitary evolution.
double dense_ideal_expectation(const CircuitSpec &circuit, const PauliString &observable);

}  // namespace qpmix::oracle
