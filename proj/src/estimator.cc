#include "qpmix/estimator.h"

#include <atomic>
#include <cmath>
#include <numbers>
#include <thread>

#include "qpmix/errors.h"
#include "qpmix/mixture.h"

namespace qpmix {

namespace {

/// Neumaier-compensated running sum.
class CompensatedSum {
   public:
    void add(double x) {
        double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) {
            comp_ += (sum_ - t) + x;
        } else {
            comp_ += (x - t) + sum_;
        }
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

   private:
    double sum_ = 0;
    double comp_ = 0;
};

/// True when every instance would be identical (no branch, twirl or error draws).
bool is_deterministic(const CircuitSpec &circuit) {
    for (const auto &op : circuit.ops) {
        if (const auto *r = std::get_if<ParamRotation>(&op)) {
            if (r->mitigation != Mitigation::off || is_stochastic(r->error)) {
                return false;
            }
        }
    }
    return true;
}

void check_inputs(const CircuitSpec &circuit, const PauliString &observable, const EstimateOptions &opt) {
    if (observable.n_qubits() != circuit.n_qubits) {
        throw ArgumentError("estimate: observable " + observable.str() + " does not match " +
                            std::to_string(circuit.n_qubits) + "-qubit circuit");
    }
    if (!observable.is_diagonal()) {
        throw UnsupportedError("estimate: only Z-type (diagonal) observables can be sampled, got " + observable.str());
    }
    if (opt.total_shots == 0 || opt.shots_per_instance == 0) {
        throw ArgumentError("estimate: shot counts must be positive");
    }
    if (opt.total_shots % opt.shots_per_instance != 0) {
        throw ArgumentError("estimate: shots per instance (" + std::to_string(opt.shots_per_instance) +
                            ") must divide total shots (" + std::to_string(opt.total_shots) + ")");
    }
    if (circuit.n_qubits > StateVector::kMaxQubits) {
        throw CapacityError("estimate: " + std::to_string(circuit.n_qubits) + " qubits exceeds the " +
                            std::to_string(StateVector::kMaxQubits) + "-qubit state vector limit");
    }
}

}  // namespace

double EstimatorResult::standard_error() const {
    return total_shots == 0 ? 0 : empirical_std / std::sqrt(static_cast<double>(total_shots));
}

double EstimatorResult::instance_standard_error() const {
    if (n_instances < 2 || shots_per_instance == 0) {
        return 0;
    }
    std::vector<double> means(n_instances, 0.0);
    for (size_t i = 0; i < n_instances; i++) {
        CompensatedSum sum;
        for (size_t k = 0; k < shots_per_instance; k++) {
            sum.add(weighted_samples[i * shots_per_instance + k]);
        }
        means[i] = sum.value() / static_cast<double>(shots_per_instance);
    }
    CompensatedSum sq;
    for (double m : means) {
        sq.add((m - mean) * (m - mean));
    }
    double nc = static_cast<double>(n_instances);
    return std::sqrt(sq.value() / (nc - 1) / nc);
}

double EstimatorResult::mean_t_insertions() const {
    if (instance_t_insertions.empty()) {
        return 0;
    }
    double total = 0;
    for (auto t : instance_t_insertions) {
        total += t;
    }
    return total / static_cast<double>(instance_t_insertions.size());
}

double circuit_one_norm(const CircuitSpec &circuit) {
    double gamma_c = 1;
    for (const auto &op : circuit.ops) {
        if (const auto *r = std::get_if<ParamRotation>(&op)) {
            if (uses_mixture(r->mitigation)) {
                gamma_c *= gamma_default(nominal_epsilon(r->error)).one_norm;
            }
        }
    }
    return gamma_c;
}

EstimatorResult estimate(const CircuitSpec &circuit, const PauliString &observable, const EstimateOptions &opt) {
    check_inputs(circuit, observable, opt);
    const size_t s = opt.shots_per_instance;
    const size_t n_instances = opt.total_shots / s;
    const uint64_t z_mask = observable.z_mask();

    EstimatorResult result;
    result.total_shots = opt.total_shots;
    result.shots_per_instance = s;
    result.n_instances = n_instances;
    result.seed = opt.seed;
    result.weighted_samples.resize(opt.total_shots);
    result.parities.resize(opt.total_shots);
    result.instance_signs.resize(n_instances);
    result.instance_weights.resize(n_instances);
    result.instance_t_insertions.resize(n_instances);
    double gamma_c = circuit_one_norm(circuit);
    result.variance_bound = gamma_c * gamma_c;

    // Deterministic circuits consume no randomness while sampling an instance, so a
    // single shared evolution yields the same samples as evolving per instance.
    std::optional<BasisSampler> shared;
    std::optional<SampledInstance> shared_instance;
    if (is_deterministic(circuit)) {
        Rng unused = derive_stream(opt.seed, 0);
        shared_instance = sample_instance(circuit, unused);
        shared.emplace(run_instance(circuit.n_qubits, *shared_instance));
    }

    auto run_one = [&](size_t i) {
        Rng rng = derive_stream(opt.seed, i);
        std::optional<SampledInstance> local;
        std::optional<BasisSampler> local_sampler;
        const SampledInstance *inst;
        const BasisSampler *sampler;
        if (shared) {
            inst = &*shared_instance;
            sampler = &*shared;
        } else {
            local = sample_instance(circuit, rng);
            local_sampler.emplace(run_instance(circuit.n_qubits, *local));
            inst = &*local;
            sampler = &*local_sampler;
        }
        double w = inst->weight * inst->sign;
        for (size_t k = 0; k < s; k++) {
            int parity = parity_of(sampler->sample(rng), z_mask);
            result.parities[i * s + k] = static_cast<int8_t>(parity);
            result.weighted_samples[i * s + k] = w * parity;
        }
        result.instance_signs[i] = static_cast<int8_t>(inst->sign);
        result.instance_weights[i] = inst->weight;
        result.instance_t_insertions[i] = static_cast<uint32_t>(inst->t_insertions);
    };

    size_t threads = opt.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : opt.threads;
    threads = std::min(threads, n_instances);
    if (threads <= 1) {
        for (size_t i = 0; i < n_instances; i++) {
            run_one(i);
        }
    } else {
        std::atomic<size_t> next{0};
        std::vector<std::jthread> pool;
        for (size_t t = 0; t < threads; t++) {
            pool.emplace_back([&] {
                for (size_t i = next++; i < n_instances; i = next++) {
                    run_one(i);
                }
            });
        }
    }

    CompensatedSum sum;
    for (double x : result.weighted_samples) {
        sum.add(x);
    }
    result.mean = sum.value() / static_cast<double>(opt.total_shots);
    CompensatedSum sq;
    for (double x : result.weighted_samples) {
        double d = x - result.mean;
        sq.add(d * d);
    }
    double denom = opt.total_shots > 1 ? static_cast<double>(opt.total_shots - 1) : 1.0;
    result.empirical_std = std::sqrt(sq.value() / denom);
    return result;
}

EstimatorResult estimate_unmitigated(const CircuitSpec &circuit, const PauliString &observable,
                                     const EstimateOptions &options) {
    CircuitSpec noisy = circuit;
    for (auto &op : noisy.ops) {
        if (auto *r = std::get_if<ParamRotation>(&op)) {
            r->mitigation = Mitigation::off;
        }
    }
    return estimate(noisy, observable, options);
}

double shot_bound(double epsilon, size_t nu, double delta, double op_norm) {
    return std::exp(0.83 * std::abs(epsilon) * static_cast<double>(nu)) * op_norm * op_norm / (delta * delta);
}

double variance_bound(double epsilon, size_t nu, double op_norm) {
    return std::pow(one_norm_closed_form(epsilon), 2.0 * static_cast<double>(nu)) * op_norm * op_norm;
}

double variance_bound_exponential(double epsilon, size_t nu, double op_norm) {
    return std::exp(0.83 * std::abs(epsilon) * static_cast<double>(nu)) * op_norm * op_norm;
}

double t_overhead(double epsilon) {
    constexpr double kPi = std::numbers::pi;
    double a = std::abs(epsilon);
    return std::numbers::sqrt2 * std::cos(kPi / 8) * std::sin(a) / std::cos(a - kPi / 8);
}

double exact_ideal_expectation(const CircuitSpec &circuit, const PauliString &observable) {
    return expectation_pauli(run_ideal(circuit), observable);
}

double exact_noisy_expectation(const CircuitSpec &circuit, const PauliString &observable) {
    for (const auto &op : circuit.ops) {
        if (const auto *r = std::get_if<ParamRotation>(&op)) {
            if (is_stochastic(r->error)) {
                throw UnsupportedError("exact_noisy_expectation: stochastic error models have no single noisy value");
            }
        }
    }
    Rng unused(0);
    return expectation_pauli(run_noisy(circuit, unused), observable);
}

}  // namespace qpmix
