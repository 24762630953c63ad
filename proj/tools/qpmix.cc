// Command-line front end for the experiment harness.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <random>

#include "qpmix/errors.h"
#include "qpmix/experiment.h"
#include "qpmix/mixture.h"
#include "qpmix/oracle.h"

namespace {

using namespace qpmix;

struct Common {
    std::optional<uint64_t> seed;
    std::optional<size_t> threads;
    std::optional<std::string> out;
};

int cmd_run(const std::string &config_path, const Common &common) {
    ExperimentConfig config = load_config(config_path);
    if (common.seed) config.seed = *common.seed;
    if (common.threads) config.threads = *common.threads;
    if (common.out) config.output_dir = *common.out;
    RunSummary s = run(config);
    std::printf("%s: wrote %s\n", experiment_name(config.experiment), (s.output_dir / "results.json").c_str());
    for (const auto &p : s.points) {
        std::printf("T=%g L=%zu nu=%zu\n", p.time, p.steps, p.nu);
        for (const auto &a : p.arms) {
            std::printf("  %-14s mean=% .6f  se=%.6f  inst_se=%.6f", arm_name(a.arm), a.estimate.mean,
                        a.estimate.standard_error(), a.estimate.instance_standard_error());
            if (a.exact_value) std::printf("  exact=% .6f", *a.exact_value);
            std::printf("\n");
        }
    }
    return 0;
}

int cmd_scan_ab(double epsilon, size_t grid, const Common &common) {
    AbScan scan = scan_ab(epsilon, grid);
    if (common.out) {
        std::filesystem::create_directories(*common.out);
        auto path = std::filesystem::path(*common.out) / "ab_scan.csv";
        std::ofstream f(path);
        write_ab_csv(f, scan);
        const auto &m = scan.global_minimum;
        std::printf("minimum one_norm=%.10f at A=%.6f B=%.6f; wrote %s\n", m.one_norm.value_or(NAN), m.a, m.b,
                    path.c_str());
    } else {
        write_ab_csv(std::cout, scan);
    }
    return 0;
}

int cmd_oracle_check(const Common &common) {
    std::mt19937_64 rng(common.seed.value_or(0));
    std::uniform_real_distribution<double> theta_dist(-std::numbers::pi, std::numbers::pi);
    std::uniform_real_distribution<double> eps_dist(-0.35, 0.35);
    double worst_three = 0, worst_four = 0, worst_two = 0, worst_cross = 0, worst_special = 0, worst_sys = 0;
    for (int k = 0; k < 100; ++k) {
        double theta = theta_dist(rng);
        double eps = eps_dist(rng);
        GammaTriple g = gamma_default(eps);
        worst_three = std::max(worst_three, oracle::verify_mixture_identity(theta, eps, g.offset_a, g.offset_b));
        worst_four = std::max(worst_four, oracle::verify_four_term_identity(theta, eps));
        worst_two = std::max(worst_two, oracle::verify_two_term_unitary_identity(theta, eps));
        worst_cross = std::max(worst_cross, oracle::verify_cross_term_identity(theta, eps));
        worst_special = std::max(worst_special, oracle::verify_identity_special_case(theta));
        worst_sys = std::max(worst_sys, linear_system_residual(g, theta));
    }
    struct Row {
        const char *name;
        double value;
        double tol;
    } rows[] = {
        {"three-term mixture", worst_three, 1e-12},   {"four-term channel", worst_four, 1e-12},
        {"two-term unitary", worst_two, 1e-12},       {"cross terms", worst_cross, 1e-12},
        {"fixed-angle special case", worst_special, 1e-12}, {"linear system", worst_sys, 1e-10},
    };
    bool ok = true;
    for (const auto &r : rows) {
        bool pass = r.value < r.tol;
        ok = ok && pass;
        std::printf("%-26s max residual %.3e  %s\n", r.name, r.value, pass ? "ok" : "FAIL");
    }
    return ok ? 0 : 1;
}

int cmd_histogram(const std::string &samples_path, size_t resample_size, size_t n_resamples, size_t bins,
                  const Common &common) {
    std::ifstream in(samples_path);
    if (!in) throw ArgumentError("cannot open " + samples_path);
    std::vector<double> values = read_weighted_values(in);
    HistogramSpec spec{resample_size, n_resamples, bins};
    Rng rng = derive_stream(common.seed.value_or(0), 0);
    Histogram h = resample_histogram(values, spec, rng);
    if (common.out) {
        std::filesystem::create_directories(*common.out);
        auto path = std::filesystem::path(*common.out) / "histogram.csv";
        std::ofstream f(path);
        write_histogram_csv(f, h);
        std::printf("center=%.8f bin_width=%.8f; wrote %s\n", h.center, h.bin_width, path.c_str());
    } else {
        write_histogram_csv(std::cout, h);
    }
    return 0;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"qpmix: quasi-probability mixtures for coherent-error mitigation"};
    app.require_subcommand(1);
    Common common;
    app.add_option("--seed", common.seed, "Master RNG seed (overrides the config)");
    app.add_option("--threads", common.threads, "Worker threads, 0 for all cores (overrides the config)");
    app.add_option("--out", common.out, "Output directory");

    std::string config_path;
    auto *run = app.add_subcommand("run", "Run an experiment from a JSON config");
    run->add_option("config", config_path, "Config file")->required();

    double epsilon = 0.05;
    size_t grid = 200;
    auto *scan = app.add_subcommand("scan-ab", "One-norm of the coefficients over the (A, B) plane");
    scan->add_option("--epsilon", epsilon, "Over-rotation angle")->required();
    scan->add_option("--grid", grid, "Grid steps per axis")->check(CLI::PositiveNumber);

    auto *oracle_check = app.add_subcommand("oracle-check", "Check the decompositions against dense matrices");

    std::string samples_path;
    size_t resample_size = 10000, n_resamples = 10000, bins = 50;
    auto *hist = app.add_subcommand("histogram", "Bootstrap histogram of a samples.csv");
    hist->add_option("samples", samples_path, "samples.csv")->required();
    hist->add_option("--resample-size", resample_size)->check(CLI::PositiveNumber);
    hist->add_option("--resamples", n_resamples)->check(CLI::PositiveNumber);
    hist->add_option("--bins", bins)->check(CLI::PositiveNumber);

    // Global flags are also accepted after the subcommand.
    for (auto *sub : {run, scan, oracle_check, hist}) {
        sub->fallthrough();
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        return app.exit(e);
    }

    try {
        if (*run) return cmd_run(config_path, common);
        if (*scan) return cmd_scan_ab(epsilon, grid, common);
        if (*oracle_check) return cmd_oracle_check(common);
        if (*hist) return cmd_histogram(samples_path, resample_size, n_resamples, bins, common);
    } catch (const std::exception &e) {
        std::fprintf(stderr, "qpmix: error: %s\n", e.what());
        return 2;
    }
    return 1;
}
