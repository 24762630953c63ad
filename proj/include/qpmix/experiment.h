#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qpmix/circuits.h"
#include "qpmix/estimator.h"
#include "qpmix/mixture.h"
#include "qpmix/noise.h"
#include "qpmix/rng.h"

namespace qpmix {

enum class ExperimentKind {
    constant_overrotation,
    uniform_overrotation,
    unstructured_modeled,
    unstructured_modeled_sweep,
    external_synthesis_angles,
    ab_scan,
    instance_count_study,
};

const char *experiment_name(ExperimentKind kind);
ExperimentKind parse_experiment_kind(std::string_view text);

/// Estimation arms. `exact` samples the error-free circuit, `noisy` the uncorrected one.
enum class Arm { exact, noisy, mixture, mixture_twirl, twirl };

/// "exact", "noisy", "mixture", "mixture+twirl", "twirl".
const char *arm_name(Arm arm);
Arm parse_arm(std::string_view text);

struct HistogramSpec {
    size_t resample_size = 10000;
    size_t n_resamples = 10000;
    size_t bins = 50;
};

/// One entry of an externally supplied synthesis table: the approximation of
/// R_z(theta), either as error angles or as the 2x2 unitary itself.
struct SynthesisEntry {
    std::optional<double> theta;  ///< empty: applies to every rotation
    std::optional<std::array<double, 3>> angles;
    std::optional<Mat2> unitary;
};

struct ExperimentConfig {
    ExperimentKind experiment = ExperimentKind::constant_overrotation;
    size_t N = 8;
    size_t L = 10;
    double T = 1;
    double h = 1;
    double J = 1;

    // "error" section
    double epsilon = 0;  ///< constant angle, or unstructured magnitude
    double epsilon0 = 0;
    double lo_factor = -1;
    double hi_factor = 3;
    std::optional<std::array<double, 3>> direction;  ///< unstructured; random when absent
    std::optional<std::array<double, 3>> eps_xyz;    ///< unstructured angles given directly
    std::vector<SynthesisEntry> synthesis;

    size_t S = 100000;
    size_t s = kDefaultShotsPerInstance;
    uint64_t seed = 0;
    size_t threads = 1;
    std::vector<double> time_sweep;
    std::vector<Arm> arms;  ///< empty: default_arms(experiment)
    std::optional<HistogramSpec> histogram = HistogramSpec{};
    bool write_samples = true;
    double delta = 0.01;  ///< target accuracy for the reported shot_bound
    size_t grid = 200;    ///< ab_scan
    std::vector<size_t> s_sweep;  ///< instance_count_study
    std::string output_dir = "out";
};

/// Parses JSON text. Errors are ConfigError naming the offending field path.
ExperimentConfig parse_config(std::string_view json_text);
ExperimentConfig load_config(const std::filesystem::path &path);
void validate(const ExperimentConfig &config);

std::vector<Arm> default_arms(ExperimentKind kind);

/// Error model of a single-model experiment; `point` selects the random
/// direction stream of sweep experiments.
ErrorModel experiment_error_model(const ExperimentConfig &config, size_t point = 0);

/// Compiled Trotter circuit with errors attached and mitigation off.
CircuitSpec experiment_circuit(const ExperimentConfig &config, double time, size_t steps, size_t point = 0);

/// Same circuit with every rotation's policy replaced.
CircuitSpec with_mitigation(const CircuitSpec &circuit, Mitigation policy);

/// Unstructured error per rotation looked up from the synthesis table by angle.
CircuitSpec attach_synthesis_errors(const CircuitSpec &circuit, const std::vector<SynthesisEntry> &table);

struct Histogram {
    std::vector<double> edges;  ///< bins + 1 values
    std::vector<size_t> counts;
    double center = 0;  ///< mean of the batch means
    double bin_width = 0;
};

/// Bootstrap batch means (drawn with replacement) binned into equal-width bins over
/// their observed range. Throws ArgumentError with fewer than resample_size samples.
Histogram resample_histogram(std::span<const double> weighted_samples, const HistogramSpec &spec, Rng &rng);

void write_samples_csv(std::ostream &out, const EstimatorResult &result);
void write_histogram_csv(std::ostream &out, const Histogram &hist);
/// weighted_value column of a samples.csv stream.
std::vector<double> read_weighted_values(std::istream &in);

struct ArmResult {
    Arm arm;
    /// Infinite-shot value (exact and noisy arms, deterministic errors only).
    std::optional<double> exact_value;
    EstimatorResult estimate;
    /// Shots for accuracy `delta` (arms that use the mixture).
    std::optional<double> shot_bound;
    std::optional<Histogram> histogram;
};

struct PointResult {
    double time = 0;
    size_t steps = 0;
    size_t nu = 0;
    std::string error_kind;
    double nominal_epsilon = 0;
    std::vector<ArmResult> arms;

    const ArmResult &arm(Arm a) const;
};

/// Runs every requested arm on one noisy circuit. Arm k uses estimator seed
/// derived from (seed, k).
PointResult run_point(const ExperimentConfig &config, const CircuitSpec &noisy_circuit, uint64_t seed);

struct InstanceCountRow {
    size_t n_instances;
    double mean;
    double std_error;
};

/// Fixed S, sweep of s (N_c = S / s), mixture arm under a constant over-rotation.
std::vector<InstanceCountRow> instance_count_study(const ExperimentConfig &config);
void write_instance_count_csv(std::ostream &out, const std::vector<InstanceCountRow> &rows);

struct RunSummary {
    std::vector<PointResult> points;
    std::optional<AbScan> scan;
    std::vector<InstanceCountRow> instance_counts;
    std::filesystem::path output_dir;
};

/// Executes the experiment and writes results.json plus per-arm samples.csv and
/// histogram.csv under config.output_dir (per-point subdirectories for sweeps).
RunSummary run(const ExperimentConfig &config);

/// JSON object for one estimate: mean, empirical_std, standard_error,
/// variance_bound, S, s, n_instances, seed, mean_t_insertions, weighted_samples_path.
std::string estimator_result_json(const EstimatorResult &result, const std::string &samples_path);

}  // namespace qpmix
