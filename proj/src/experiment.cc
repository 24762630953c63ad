#include "qpmix/experiment.h"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "qpmix/errors.h"

namespace qpmix {

using nlohmann::json;

namespace {

constexpr double kPi = std::numbers::pi;

std::string fmt17(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

// Typed field access with the dotted path in every error message.
class Fields {
   public:
    Fields(const json &obj, std::string path) : obj_(obj), path_(std::move(path)) {
        if (!obj_.is_object()) {
            throw ConfigError(path_ + ": expected an object");
        }
    }

    bool has(const char *key) const { return obj_.contains(key) && !obj_.at(key).is_null(); }
    std::string path(const char *key) const { return path_.empty() ? key : path_ + "." + key; }
    const json &raw(const char *key) const { return obj_.at(key); }

    double number(const char *key, double fallback) const {
        if (!has(key)) return fallback;
        const json &v = obj_.at(key);
        if (!v.is_number()) throw ConfigError(path(key) + ": expected a number");
        double x = v.get<double>();
        if (!std::isfinite(x)) throw ConfigError(path(key) + ": must be finite");
        return x;
    }

    size_t count(const char *key, size_t fallback) const {
        if (!has(key)) return fallback;
        return as_count(obj_.at(key), path(key));
    }

    std::string text(const char *key, const std::string &fallback) const {
        if (!has(key)) return fallback;
        const json &v = obj_.at(key);
        if (!v.is_string()) throw ConfigError(path(key) + ": expected a string");
        return v.get<std::string>();
    }

    std::optional<std::array<double, 3>> triple(const char *key) const {
        if (!has(key)) return std::nullopt;
        return as_triple(obj_.at(key), path(key));
    }

    void reject_unknown(const std::set<std::string> &known) const {
        for (const auto &[k, v] : obj_.items()) {
            if (!known.contains(k)) throw ConfigError(path(k.c_str()) + ": unknown field");
        }
    }

    static size_t as_count(const json &v, const std::string &where) {
        if (v.is_number_unsigned()) return v.get<size_t>();
        if (v.is_number_float()) {
            double x = v.get<double>();
            if (x >= 0 && x == std::floor(x) && x < 1e18) return static_cast<size_t>(x);
        }
        if (v.is_number_integer() && v.get<int64_t>() >= 0) return static_cast<size_t>(v.get<int64_t>());
        throw ConfigError(where + ": expected a non-negative integer");
    }

    static std::array<double, 3> as_triple(const json &v, const std::string &where) {
        if (!v.is_array() || v.size() != 3) throw ConfigError(where + ": expected an array of 3 numbers");
        std::array<double, 3> out{};
        for (size_t i = 0; i < 3; ++i) {
            if (!v[i].is_number()) throw ConfigError(where + "[" + std::to_string(i) + "]: expected a number");
            out[i] = v[i].get<double>();
        }
        return out;
    }

   private:
    const json &obj_;
    std::string path_;
};

Mat2 parse_unitary(const json &v, const std::string &where) {
    if (!v.is_array() || v.size() != 4) {
        throw ConfigError(where + ": expected 4 row-major entries, each [re, im]");
    }
    Mat2 m{};
    for (size_t i = 0; i < 4; ++i) {
        const json &e = v[i];
        std::string at = where + "[" + std::to_string(i) + "]";
        if (e.is_number()) {
            m[i] = e.get<double>();
        } else if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()) {
            m[i] = {e[0].get<double>(), e[1].get<double>()};
        } else {
            throw ConfigError(at + ": expected a number or [re, im]");
        }
    }
    return m;
}

std::string arm_dir(Arm arm) {
    std::string name = arm_name(arm);
    std::replace(name.begin(), name.end(), '+', '_');
    return name;
}

Mitigation arm_policy(Arm arm) {
    switch (arm) {
        case Arm::mixture:
            return Mitigation::mixture;
        case Arm::mixture_twirl:
            return Mitigation::mixture_plus_twirl;
        case Arm::twirl:
            return Mitigation::twirl;
        default:
            return Mitigation::off;
    }
}

uint64_t arm_seed(uint64_t seed, size_t k) { return splitmix64(seed + 0x9E37ULL * (k + 1)); }

double max_nominal_epsilon(const CircuitSpec &circuit) {
    double eps = 0;
    for (const auto &op : circuit.ops) {
        if (const auto *r = std::get_if<ParamRotation>(&op)) {
            double e = nominal_epsilon(r->error);
            if (std::abs(e) > std::abs(eps)) eps = e;
        }
    }
    return eps;
}

std::vector<std::pair<double, size_t>> time_points(const ExperimentConfig &c) {
    std::vector<double> times = c.time_sweep;
    if (times.empty() && c.experiment == ExperimentKind::unstructured_modeled_sweep) {
        for (int k = 1; k <= 10; ++k) times.push_back(c.T * k / 10);
    }
    if (times.empty()) return {{c.T, c.L}};
    std::vector<std::pair<double, size_t>> out;
    for (double t : times) {
        auto steps = static_cast<long>(std::lround(static_cast<double>(c.L) * t / c.T));
        out.emplace_back(t, static_cast<size_t>(std::max(1L, steps)));
    }
    return out;
}

void write_file(const std::filesystem::path &path, const std::string &content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot write " + path.string());
    f << content;
}

json histogram_json(const Histogram &h, const std::string &path) {
    return {{"center", h.center}, {"bin_width", h.bin_width}, {"bins", h.counts.size()}, {"path", path}};
}

json point_json(const ExperimentConfig &config, const PointResult &p, const std::filesystem::path &dir,
                const std::filesystem::path &root) {
    json arms = json::object();
    std::optional<double> exact;
    for (const auto &a : p.arms) {
        if (a.arm == Arm::exact) exact = a.exact_value;
    }
    for (const auto &a : p.arms) {
        std::string sub = std::filesystem::relative(dir / arm_dir(a.arm), root).generic_string();
        json e;
        e["exact_value"] = a.exact_value ? json(*a.exact_value) : json(nullptr);
        std::string samples = config.write_samples ? sub + "/samples.csv" : "";
        e["estimate"] = json::parse(estimator_result_json(a.estimate, samples));
        if (a.shot_bound) {
            e["shot_bound"] = *a.shot_bound;
            e["delta"] = config.delta;
            if (exact) {
                double err = std::abs(a.estimate.mean - *exact);
                e["achieved_error"] = err;
                e["shot_bound_at_achieved_error"] =
                    err > 0 ? shot_bound(p.nominal_epsilon, p.nu, err) : std::numeric_limits<double>::infinity();
            }
        }
        if (a.histogram) e["histogram"] = histogram_json(*a.histogram, sub + "/histogram.csv");
        arms[arm_name(a.arm)] = std::move(e);
    }
    return {{"T", p.time},        {"L", p.steps},
            {"nu", p.nu},         {"error_kind", p.error_kind},
            {"nominal_epsilon", p.nominal_epsilon}, {"arms", std::move(arms)}};
}

void write_point_files(const ExperimentConfig &config, const PointResult &p, const std::filesystem::path &dir) {
    for (const auto &a : p.arms) {
        auto sub = dir / arm_dir(a.arm);
        std::filesystem::create_directories(sub);
        if (config.write_samples) {
            std::ostringstream ss;
            write_samples_csv(ss, a.estimate);
            write_file(sub / "samples.csv", ss.str());
        }
        if (a.histogram) {
            std::ostringstream ss;
            write_histogram_csv(ss, *a.histogram);
            write_file(sub / "histogram.csv", ss.str());
        }
    }
}

}  // namespace

const char *experiment_name(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::constant_overrotation:
            return "constant_overrotation";
        case ExperimentKind::uniform_overrotation:
            return "uniform_overrotation";
        case ExperimentKind::unstructured_modeled:
            return "unstructured_modeled";
        case ExperimentKind::unstructured_modeled_sweep:
            return "unstructured_modeled_sweep";
        case ExperimentKind::external_synthesis_angles:
            return "external_synthesis_angles";
        case ExperimentKind::ab_scan:
            return "ab_scan";
        case ExperimentKind::instance_count_study:
            return "instance_count_study";
    }
    return "?";
}

ExperimentKind parse_experiment_kind(std::string_view text) {
    for (int k = 0; k <= static_cast<int>(ExperimentKind::instance_count_study); ++k) {
        auto kind = static_cast<ExperimentKind>(k);
        if (text == experiment_name(kind)) return kind;
    }
    throw ConfigError("experiment: unknown kind '" + std::string(text) + "'");
}

const char *arm_name(Arm arm) {
    switch (arm) {
        case Arm::exact:
            return "exact";
        case Arm::noisy:
            return "noisy";
        case Arm::mixture:
            return "mixture";
        case Arm::mixture_twirl:
            return "mixture+twirl";
        case Arm::twirl:
            return "twirl";
    }
    return "?";
}

Arm parse_arm(std::string_view text) {
    for (Arm a : {Arm::exact, Arm::noisy, Arm::mixture, Arm::mixture_twirl, Arm::twirl}) {
        if (text == arm_name(a)) return a;
    }
    if (text == "mixture_twirl") return Arm::mixture_twirl;
    throw ConfigError("unknown arm '" + std::string(text) + "'");
}

std::vector<Arm> default_arms(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::unstructured_modeled:
        case ExperimentKind::unstructured_modeled_sweep:
        case ExperimentKind::external_synthesis_angles:
            return {Arm::exact, Arm::noisy, Arm::mixture, Arm::mixture_twirl};
        default:
            return {Arm::exact, Arm::noisy, Arm::mixture};
    }
}

ExperimentConfig parse_config(std::string_view json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error &e) {
        throw ConfigError(std::string("config: invalid JSON: ") + e.what());
    }
    Fields f(doc, "");
    f.reject_unknown({"experiment", "N", "L", "T", "h", "J", "error", "S", "s", "seed", "threads", "time_sweep",
                      "arms", "histogram", "write_samples", "delta", "grid", "s_sweep", "output_dir"});
    if (!f.has("experiment")) throw ConfigError("experiment: required field missing");

    ExperimentConfig c;
    c.experiment = parse_experiment_kind(f.text("experiment", ""));
    c.N = f.count("N", c.N);
    c.L = f.count("L", c.L);
    c.T = f.number("T", c.T);
    c.h = f.number("h", c.h);
    c.J = f.number("J", c.J);
    c.S = f.count("S", c.S);
    c.s = f.count("s", c.s);
    c.seed = f.count("seed", c.seed);
    c.threads = f.count("threads", c.threads);
    c.delta = f.number("delta", c.delta);
    c.grid = f.count("grid", c.grid);
    c.output_dir = f.text("output_dir", c.output_dir);

    if (f.has("write_samples")) {
        if (!f.raw("write_samples").is_boolean()) throw ConfigError("write_samples: expected a boolean");
        c.write_samples = f.raw("write_samples").get<bool>();
    }
    if (f.has("error")) {
        Fields e(f.raw("error"), "error");
        e.reject_unknown({"epsilon", "epsilon0", "lo_factor", "hi_factor", "direction", "eps", "synthesis"});
        c.epsilon = e.number("epsilon", c.epsilon);
        c.epsilon0 = e.number("epsilon0", c.epsilon0);
        c.lo_factor = e.number("lo_factor", c.lo_factor);
        c.hi_factor = e.number("hi_factor", c.hi_factor);
        c.direction = e.triple("direction");
        c.eps_xyz = e.triple("eps");
        if (e.has("synthesis")) {
            const json &table = e.raw("synthesis");
            if (!table.is_array()) throw ConfigError("error.synthesis: expected an array");
            for (size_t i = 0; i < table.size(); ++i) {
                std::string at = "error.synthesis[" + std::to_string(i) + "]";
                Fields entry(table[i], at);
                entry.reject_unknown({"theta", "angles", "unitary"});
                SynthesisEntry s;
                if (entry.has("theta")) s.theta = entry.number("theta", 0);
                s.angles = entry.triple("angles");
                if (entry.has("unitary")) s.unitary = parse_unitary(entry.raw("unitary"), at + ".unitary");
                if (s.angles.has_value() == s.unitary.has_value()) {
                    throw ConfigError(at + ": exactly one of angles, unitary is required");
                }
                c.synthesis.push_back(s);
            }
        }
    }
    if (f.has("time_sweep")) {
        const json &v = f.raw("time_sweep");
        if (!v.is_array()) throw ConfigError("time_sweep: expected an array");
        for (size_t i = 0; i < v.size(); ++i) {
            if (!v[i].is_number()) throw ConfigError("time_sweep[" + std::to_string(i) + "]: expected a number");
            c.time_sweep.push_back(v[i].get<double>());
        }
    }
    if (f.has("s_sweep")) {
        const json &v = f.raw("s_sweep");
        if (!v.is_array()) throw ConfigError("s_sweep: expected an array");
        for (size_t i = 0; i < v.size(); ++i) {
            c.s_sweep.push_back(Fields::as_count(v[i], "s_sweep[" + std::to_string(i) + "]"));
        }
    }
    if (f.has("arms")) {
        const json &v = f.raw("arms");
        if (!v.is_array()) throw ConfigError("arms: expected an array");
        for (size_t i = 0; i < v.size(); ++i) {
            std::string at = "arms[" + std::to_string(i) + "]";
            if (!v[i].is_string()) throw ConfigError(at + ": expected a string");
            try {
                c.arms.push_back(parse_arm(v[i].get<std::string>()));
            } catch (const ConfigError &e) {
                throw ConfigError(at + ": " + e.what());
            }
        }
    }
    if (f.has("histogram")) {
        const json &v = f.raw("histogram");
        if (v.is_boolean()) {
            if (!v.get<bool>()) c.histogram.reset();
        } else {
            Fields hf(v, "histogram");
            hf.reject_unknown({"resample_size", "n_resamples", "bins"});
            HistogramSpec h;
            h.resample_size = hf.count("resample_size", h.resample_size);
            h.n_resamples = hf.count("n_resamples", h.n_resamples);
            h.bins = hf.count("bins", h.bins);
            c.histogram = h;
        }
    }
    validate(c);
    return c;
}

ExperimentConfig load_config(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        return parse_config(ss.str());
    } catch (const ConfigError &e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

void validate(const ExperimentConfig &c) {
    if (c.experiment == ExperimentKind::ab_scan) {
        if (c.grid == 0) throw ConfigError("grid: must be positive");
        return;
    }
    if (c.N == 0 || c.N > StateVector::kMaxQubits) {
        throw ConfigError("N: must be in [1, " + std::to_string(StateVector::kMaxQubits) + "]");
    }
    if (c.L == 0) throw ConfigError("L: must be positive");
    if (!(c.T > 0)) throw ConfigError("T: must be positive");
    if (c.S == 0) throw ConfigError("S: must be positive");
    if (c.s == 0) throw ConfigError("s: must be positive");
    if (c.S % c.s != 0) throw ConfigError("s: must divide S");
    if (!(c.delta > 0)) throw ConfigError("delta: must be positive");
    for (size_t i = 0; i < c.time_sweep.size(); ++i) {
        if (!(c.time_sweep[i] > 0)) throw ConfigError("time_sweep[" + std::to_string(i) + "]: must be positive");
    }
    for (size_t i = 0; i < c.s_sweep.size(); ++i) {
        if (c.s_sweep[i] == 0 || c.S % c.s_sweep[i] != 0) {
            throw ConfigError("s_sweep[" + std::to_string(i) + "]: must be positive and divide S");
        }
    }
    if (c.histogram) {
        const auto &h = *c.histogram;
        if (h.resample_size == 0 || h.n_resamples == 0 || h.bins == 0) {
            throw ConfigError("histogram: all sizes must be positive");
        }
        if (h.resample_size > c.S) throw ConfigError("histogram.resample_size: exceeds S");
    }
    if (c.experiment == ExperimentKind::uniform_overrotation && !(c.lo_factor <= c.hi_factor)) {
        throw ConfigError("error.lo_factor: must not exceed error.hi_factor");
    }
    if (c.experiment == ExperimentKind::external_synthesis_angles && c.synthesis.empty()) {
        throw ConfigError("error.synthesis: required for external_synthesis_angles");
    }
}

ErrorModel experiment_error_model(const ExperimentConfig &c, size_t point) {
    switch (c.experiment) {
        case ExperimentKind::constant_overrotation:
        case ExperimentKind::instance_count_study:
        case ExperimentKind::ab_scan:
            return ConstantOverRotation{c.epsilon};
        case ExperimentKind::uniform_overrotation:
            return UniformOverRotation{c.epsilon0, c.lo_factor, c.hi_factor};
        case ExperimentKind::unstructured_modeled:
        case ExperimentKind::unstructured_modeled_sweep: {
            if (c.eps_xyz) {
                const auto &e = *c.eps_xyz;
                return Unstructured{e[0], e[1], e[2]};
            }
            if (c.direction) {
                try {
                    return build_unstructured(c.epsilon, *c.direction);
                } catch (const ArgumentError &e) {
                    throw ConfigError(std::string("error.direction: ") + e.what());
                }
            }
            Rng rng = derive_stream(splitmix64(c.seed ^ 0xD12EC7ULL), point);
            return build_unstructured(c.epsilon, random_direction(rng));
        }
        case ExperimentKind::external_synthesis_angles:
            return NoError{};
    }
    return NoError{};
}

CircuitSpec experiment_circuit(const ExperimentConfig &c, double time, size_t steps, size_t point) {
    CircuitSpec base = compile_to_rz(build_trotter_ising(c.N, steps, time, c.h, c.J));
    if (c.experiment == ExperimentKind::external_synthesis_angles) {
        return attach_synthesis_errors(base, c.synthesis);
    }
    return attach_errors(base, experiment_error_model(c, point), Mitigation::off);
}

CircuitSpec with_mitigation(const CircuitSpec &circuit, Mitigation policy) {
    CircuitSpec out = circuit;
    for (auto &op : out.ops) {
        if (auto *r = std::get_if<ParamRotation>(&op)) r->mitigation = policy;
    }
    return out;
}

CircuitSpec attach_synthesis_errors(const CircuitSpec &circuit, const std::vector<SynthesisEntry> &table) {
    CircuitSpec out = circuit;
    for (auto &op : out.ops) {
        auto *r = std::get_if<ParamRotation>(&op);
        if (r == nullptr) continue;
        const PauliString &p = r->generator;
        if (p.weight() != 1 || p.at(p.support().front()) != 'Z') {
            throw ConfigError("error.synthesis: rotation on " + p.str() + " is not a single-qubit Rz");
        }
        const SynthesisEntry *match = nullptr;
        for (const auto &e : table) {
            if (!e.theta || std::abs(*e.theta - r->theta) < 1e-9) {
                match = &e;
                break;
            }
        }
        if (match == nullptr) {
            throw ConfigError("error.synthesis: no entry for theta=" + fmt17(r->theta));
        }
        if (match->angles) {
            const auto &a = *match->angles;
            r->error = Unstructured{a[0], a[1], a[2]};
        } else {
            ErrorAngles a = extract_error_angles(r->theta, *match->unitary);
            r->error = Unstructured{a.eps_x, a.eps_y, a.eps_z};
        }
    }
    return out;
}

Histogram resample_histogram(std::span<const double> samples, const HistogramSpec &spec, Rng &rng) {
    if (spec.resample_size == 0 || spec.n_resamples == 0 || spec.bins == 0) {
        throw ArgumentError("resample_histogram: sizes must be positive");
    }
    if (samples.size() < spec.resample_size) {
        throw ArgumentError("resample_histogram: " + std::to_string(samples.size()) + " samples, need at least " +
                            std::to_string(spec.resample_size));
    }
    const auto n = static_cast<double>(samples.size());
    std::vector<double> means(spec.n_resamples);
    for (auto &m : means) {
        double sum = 0;
        for (size_t k = 0; k < spec.resample_size; ++k) {
            auto idx = static_cast<size_t>(uniform01(rng) * n);
            sum += samples[idx];
        }
        m = sum / static_cast<double>(spec.resample_size);
    }
    auto [lo_it, hi_it] = std::minmax_element(means.begin(), means.end());
    const double lo = *lo_it;
    const double hi = *hi_it;

    Histogram h;
    h.bin_width = (hi - lo) / static_cast<double>(spec.bins);
    h.edges.resize(spec.bins + 1);
    for (size_t b = 0; b <= spec.bins; ++b) {
        h.edges[b] = b == spec.bins ? hi : lo + h.bin_width * static_cast<double>(b);
    }
    h.counts.assign(spec.bins, 0);
    double total = 0;
    for (double m : means) {
        size_t b = h.bin_width > 0 ? static_cast<size_t>((m - lo) / h.bin_width) : 0;
        h.counts[std::min(b, spec.bins - 1)]++;
        total += m;
    }
    h.center = total / static_cast<double>(means.size());
    return h;
}

void write_samples_csv(std::ostream &out, const EstimatorResult &r) {
    out << "instance_index,shot_index,sign,weight,parity,weighted_value\n";
    const size_t s = r.shots_per_instance;
    for (size_t i = 0; i < r.weighted_samples.size(); ++i) {
        size_t inst = i / s;
        out << inst << ',' << i % s << ',' << static_cast<int>(r.instance_signs[inst]) << ','
            << fmt17(r.instance_weights[inst]) << ',' << static_cast<int>(r.parities[i]) << ','
            << fmt17(r.weighted_samples[i]) << '\n';
    }
}

void write_histogram_csv(std::ostream &out, const Histogram &h) {
    out << "bin_left,bin_right,count\n";
    for (size_t b = 0; b < h.counts.size(); ++b) {
        out << fmt17(h.edges[b]) << ',' << fmt17(h.edges[b + 1]) << ',' << h.counts[b] << '\n';
    }
}

std::vector<double> read_weighted_values(std::istream &in) {
    std::string line;
    if (!std::getline(in, line)) throw ArgumentError("samples: empty input");
    std::vector<std::string> header;
    {
        std::stringstream ss(line);
        std::string col;
        while (std::getline(ss, col, ',')) {
            if (!col.empty() && col.back() == '\r') col.pop_back();
            header.push_back(col);
        }
    }
    auto it = std::find(header.begin(), header.end(), "weighted_value");
    if (it == header.end()) throw ArgumentError("samples: no weighted_value column");
    const auto col = static_cast<size_t>(it - header.begin());
    std::vector<double> values;
    size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        for (size_t k = 0; k <= col; ++k) {
            if (!std::getline(ss, cell, ',')) {
                throw ArgumentError("samples: line " + std::to_string(line_no) + " has too few columns");
            }
        }
        try {
            size_t used = 0;
            values.push_back(std::stod(cell, &used));
        } catch (const std::exception &) {
            throw ArgumentError("samples: line " + std::to_string(line_no) + ": bad number '" + cell + "'");
        }
    }
    return values;
}

const ArmResult &PointResult::arm(Arm a) const {
    for (const auto &r : arms) {
        if (r.arm == a) return r;
    }
    throw ArgumentError(std::string("no arm ") + arm_name(a) + " in result");
}

PointResult run_point(const ExperimentConfig &config, const CircuitSpec &noisy, uint64_t seed) {
    const PauliString obs = PauliString::all_z(noisy.n_qubits);
    PointResult p;
    p.nu = noisy.nu();
    p.nominal_epsilon = max_nominal_epsilon(noisy);
    for (const auto &op : noisy.ops) {
        if (const auto *r = std::get_if<ParamRotation>(&op)) {
            p.error_kind = error_kind(r->error);
            break;
        }
    }
    const auto arms = config.arms.empty() ? default_arms(config.experiment) : config.arms;
    bool stochastic = false;
    for (const auto &op : noisy.ops) {
        if (const auto *r = std::get_if<ParamRotation>(&op)) stochastic = stochastic || is_stochastic(r->error);
    }
    for (size_t k = 0; k < arms.size(); ++k) {
        EstimateOptions opt;
        opt.total_shots = config.S;
        opt.shots_per_instance = config.s;
        opt.seed = arm_seed(seed, static_cast<size_t>(arms[k]));
        opt.threads = config.threads;

        ArmResult a{arms[k], std::nullopt, {}, std::nullopt, std::nullopt};
        switch (arms[k]) {
            case Arm::exact:
                a.exact_value = exact_ideal_expectation(noisy, obs);
                a.estimate = estimate(strip_errors(noisy), obs, opt);
                break;
            case Arm::noisy:
                if (!stochastic) a.exact_value = exact_noisy_expectation(noisy, obs);
                a.estimate = estimate_unmitigated(noisy, obs, opt);
                break;
            default: {
                Mitigation policy = arm_policy(arms[k]);
                a.estimate = estimate(with_mitigation(noisy, policy), obs, opt);
                if (uses_mixture(policy)) a.shot_bound = shot_bound(p.nominal_epsilon, p.nu, config.delta);
            }
        }
        if (config.histogram && a.estimate.weighted_samples.size() >= config.histogram->resample_size) {
            Rng rng = derive_stream(opt.seed, 0xB1A5ULL);
            a.histogram = resample_histogram(a.estimate.weighted_samples, *config.histogram, rng);
        }
        p.arms.push_back(std::move(a));
    }
    return p;
}

std::vector<InstanceCountRow> instance_count_study(const ExperimentConfig &config) {
    std::vector<size_t> sweep = config.s_sweep;
    if (sweep.empty()) {
        for (size_t s : {1, 2, 5, 10, 20, 50, 100, 200, 500, 1000, 2000, 5000, 10000, 20000, 50000}) {
            if (config.S % s == 0) sweep.push_back(s);
        }
    }
    CircuitSpec circuit = with_mitigation(experiment_circuit(config, config.T, config.L), Mitigation::mixture);
    const PauliString obs = PauliString::all_z(config.N);
    std::vector<InstanceCountRow> rows;
    for (size_t s : sweep) {
        EstimateOptions opt;
        opt.total_shots = config.S;
        opt.shots_per_instance = s;
        opt.seed = arm_seed(config.seed, s);
        opt.threads = config.threads;
        EstimatorResult r = estimate(circuit, obs, opt);
        rows.push_back({r.n_instances, r.mean, r.standard_error()});
    }
    std::sort(rows.begin(), rows.end(), [](const auto &a, const auto &b) { return a.n_instances < b.n_instances; });
    return rows;
}

void write_instance_count_csv(std::ostream &out, const std::vector<InstanceCountRow> &rows) {
    out << "N_c,mean,std\n";
    for (const auto &r : rows) {
        out << r.n_instances << ',' << fmt17(r.mean) << ',' << fmt17(r.std_error) << '\n';
    }
}

std::string estimator_result_json(const EstimatorResult &r, const std::string &samples_path) {
    json j{{"mean", r.mean},
           {"empirical_std", r.empirical_std},
           {"standard_error", r.standard_error()},
           {"instance_standard_error", r.instance_standard_error()},
           {"variance_bound", r.variance_bound},
           {"S", r.total_shots},
           {"s", r.shots_per_instance},
           {"n_instances", r.n_instances},
           {"seed", r.seed},
           {"mean_t_insertions", r.mean_t_insertions()},
           {"weighted_samples_path", samples_path.empty() ? json(nullptr) : json(samples_path)}};
    return j.dump();
}

RunSummary run(const ExperimentConfig &config) {
    validate(config);
    RunSummary summary;
    summary.output_dir = config.output_dir;
    const auto &root = summary.output_dir;
    std::filesystem::create_directories(root);
    json results{{"experiment", experiment_name(config.experiment)}, {"seed", config.seed}};

    if (config.experiment == ExperimentKind::ab_scan) {
        AbScan scan = scan_ab(config.epsilon, config.grid);
        std::ostringstream ss;
        write_ab_csv(ss, scan);
        write_file(root / "ab_scan.csv", ss.str());
        std::ostringstream cm;
        cm << "A,B,one_norm\n";
        for (const auto &c : scan.column_minima) {
            cm << fmt17(c.a) << ',' << fmt17(c.b) << ',' << fmt17(c.one_norm.value_or(NAN)) << '\n';
        }
        write_file(root / "column_minima.csv", cm.str());
        const double a_def = 2 * kPi - kPi / 4;
        GammaTriple def = gamma_general(config.epsilon, a_def, kPi);
        results["epsilon"] = config.epsilon;
        results["grid"] = config.grid;
        results["global_minimum"] = {{"A", scan.global_minimum.a},
                                     {"B", scan.global_minimum.b},
                                     {"one_norm", scan.global_minimum.one_norm.value_or(NAN)}};
        results["default_point"] = {{"A", a_def}, {"B", kPi}, {"one_norm", def.one_norm}};
        results["ab_scan_path"] = "ab_scan.csv";
        results["column_minima_path"] = "column_minima.csv";
        summary.scan = std::move(scan);
    } else if (config.experiment == ExperimentKind::instance_count_study) {
        summary.instance_counts = instance_count_study(config);
        std::ostringstream ss;
        write_instance_count_csv(ss, summary.instance_counts);
        write_file(root / "instance_count.csv", ss.str());
        json rows = json::array();
        for (const auto &r : summary.instance_counts) {
            rows.push_back({{"N_c", r.n_instances}, {"mean", r.mean}, {"std", r.std_error}});
        }
        results["epsilon"] = config.epsilon;
        results["S"] = config.S;
        results["rows"] = std::move(rows);
        results["instance_count_path"] = "instance_count.csv";
    } else {
        const auto points = time_points(config);
        const bool single = points.size() == 1;
        json pts = json::array();
        for (size_t i = 0; i < points.size(); ++i) {
            auto [t, steps] = points[i];
            CircuitSpec circuit = experiment_circuit(config, t, steps, i);
            PointResult p = run_point(config, circuit, single ? config.seed : splitmix64(config.seed + i));
            p.time = t;
            p.steps = steps;
            std::filesystem::path dir = single ? root : root / ("point_" + std::to_string(i));
            write_point_files(config, p, dir);
            pts.push_back(point_json(config, p, dir, root));
            summary.points.push_back(std::move(p));
        }
        results["N"] = config.N;
        results["points"] = std::move(pts);
    }
    write_file(root / "results.json", results.dump(2) + "\n");
    return summary;
}

}  // namespace qpmix
