#pragma once

#include <cstdint>
#include <vector>

#include "qpmix/circuits.h"
#include "qpmix/pauli.h"

namespace qpmix {

/// Shots per sampled instance used throughout the experiments.
constexpr size_t kDefaultShotsPerInstance = 100;

struct EstimatorResult {
    double mean = 0;
    /// Gamma_c * sign(Gamma_L) * parity, one per shot, instance-major.
    std::vector<double> weighted_samples;
    /// Per-shot parity Tr[O E_b] in {-1, +1}.
    std::vector<int8_t> parities;
    /// Per-instance sign(Gamma_L) and Gamma_c.
    std::vector<int8_t> instance_signs;
    std::vector<double> instance_weights;
    std::vector<uint32_t> instance_t_insertions;
    size_t total_shots = 0;         ///< S
    size_t shots_per_instance = 0;  ///< s
    size_t n_instances = 0;         ///< N_c = S / s
    /// Sample standard deviation of weighted_samples (n - 1 denominator).
    double empirical_std = 0;
    /// Gamma_c^2 ||O||^2 for the circuit's nominal error angles.
    double variance_bound = 1;
    uint64_t seed = 0;

    /// empirical_std / sqrt(S).
    double standard_error() const;
    /// Standard deviation of the N_c instance means over sqrt(N_c). Shots of one
    /// instance share the sampled circuit, so this is the error bar of the mean
    /// when instances differ; equals standard_error() for s = 1.
    double instance_standard_error() const;
    double mean_t_insertions() const;
};

struct EstimateOptions {
    size_t total_shots = 100000;
    size_t shots_per_instance = kDefaultShotsPerInstance;
    uint64_t seed = 0;
    /// Worker threads; 0 means hardware concurrency.
    size_t threads = 1;
};

/// Monte-Carlo estimate of <O> for the ideal circuit: samples N_c = S/s instances of
/// the signed mixture, draws s parities from each, and weights every shot by
/// Gamma_c sign(Gamma_L). Instance i uses rng stream (seed, i), so the result is
/// independent of the thread count. O must be a Z-type Pauli string.
EstimatorResult estimate(const CircuitSpec &circuit, const PauliString &observable, const EstimateOptions &options);

/// Plain sampling of the noisy circuit (mitigation forced off, weight 1).
/// Stochastic error models are redrawn every shots_per_instance shots.
EstimatorResult estimate_unmitigated(const CircuitSpec &circuit, const PauliString &observable,
                                     const EstimateOptions &options);

/// Gamma_c = product of per-gate one-norms over rotations whose policy uses the mixture.
double circuit_one_norm(const CircuitSpec &circuit);

/// Shots sufficient for accuracy delta: e^{0.83|eps| nu} ||O||^2 / delta^2.
double shot_bound(double epsilon, size_t nu, double delta, double op_norm = 1);

/// ||gamma(eps)||_1^{2 nu} ||O||^2.
double variance_bound(double epsilon, size_t nu, double op_norm = 1);
/// First-order form e^{0.83|eps| nu} ||O||^2.
double variance_bound_exponential(double epsilon, size_t nu, double op_norm = 1);

/// Expected T insertions per mitigated rotation, |gamma2| / ||gamma||_1.
double t_overhead(double epsilon);

/// Exact <O> of |0> evolved through the ideal circuit.
double exact_ideal_expectation(const CircuitSpec &circuit, const PauliString &observable);
/// Exact <O> of the noisy circuit (deterministic error models only).
double exact_noisy_expectation(const CircuitSpec &circuit, const PauliString &observable);

}  // namespace qpmix
