#include "qpmix/circuits.h"

#include <bit>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <optional>
#include <sstream>

#include "qpmix/errors.h"

namespace qpmix {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr double kPi = std::numbers::pi;

bool is_single_z(const PauliString &p) {
    return p.weight() == 1 && p.at(p.support().front()) == 'Z';
}

GateKind pauli_gate(char axis) {
    switch (axis) {
        case 'X':
            return GateKind::X;
        case 'Y':
            return GateKind::Y;
        default:
            return GateKind::Z;
    }
}

std::string fmt(const char *spec, double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), spec, v);
    return buf;
}

std::string rotation_head(const PauliString &p) {
    std::string name = "R";
    std::string qubits;
    for (size_t q : p.support()) {
        name += p.at(q);
        qubits += " " + std::to_string(q);
    }
    if (p.is_identity()) {
        name += "I";
    }
    return name + qubits;
}

/// Caches the last coefficient set; consecutive rotations almost always share epsilon.
class GammaCache {
   public:
    const GammaTriple &get(double epsilon) {
        if (!valid_ || epsilon != epsilon_) {
            gamma_ = gamma_default(epsilon);
            epsilon_ = epsilon;
            valid_ = true;
        }
        return gamma_;
    }

   private:
    bool valid_ = false;
    double epsilon_ = 0;
    GammaTriple gamma_;
};

}  // namespace

const char *mitigation_name(Mitigation m) {
    switch (m) {
        case Mitigation::off:
            return "off";
        case Mitigation::mixture:
            return "mix";
        case Mitigation::mixture_plus_twirl:
            return "mix+twirl";
        case Mitigation::twirl:
            return "twirl";
    }
    return "?";
}

Mitigation parse_mitigation(std::string_view text) {
    if (text == "off" || text == "none") return Mitigation::off;
    if (text == "mix" || text == "mixture") return Mitigation::mixture;
    if (text == "mix+twirl" || text == "mixture_plus_twirl") return Mitigation::mixture_plus_twirl;
    if (text == "twirl") return Mitigation::twirl;
    throw ArgumentError("unknown mitigation policy \"" + std::string(text) + "\"");
}

bool uses_mixture(Mitigation m) {
    return m == Mitigation::mixture || m == Mitigation::mixture_plus_twirl;
}

bool uses_twirl(Mitigation m) {
    return m == Mitigation::mixture_plus_twirl || m == Mitigation::twirl;
}

size_t CircuitSpec::nu() const {
    size_t count = 0;
    for (const auto &op : ops) {
        count += std::holds_alternative<ParamRotation>(op);
    }
    return count;
}

CircuitSpec build_trotter_ising(size_t n_qubits, size_t steps, double time, double h, double j) {
    if (n_qubits < 2) {
        throw ArgumentError("build_trotter_ising: need at least 2 qubits for the periodic coupling");
    }
    if (steps < 1) {
        throw ArgumentError("build_trotter_ising: need at least one Trotter step");
    }
    CircuitSpec circuit;
    circuit.n_qubits = n_qubits;
    double dt = time / static_cast<double>(steps);
    for (size_t step = 0; step < steps; step++) {
        for (size_t q = 0; q < n_qubits; q++) {
            circuit.ops.emplace_back(ParamRotation{PauliString::single(n_qubits, q, 'Y'), 2 * h * dt});
        }
        for (size_t q = 0; q < n_qubits; q++) {
            size_t next = (q + 1) % n_qubits;
            uint64_t bits = (uint64_t{1} << q) | (uint64_t{1} << next);
            circuit.ops.emplace_back(ParamRotation{PauliString(n_qubits, bits, 0), 2 * j * dt});
        }
    }
    return circuit;
}

CircuitSpec compile_to_rz(const CircuitSpec &circuit) {
    CircuitSpec out;
    out.n_qubits = circuit.n_qubits;
    auto fixed = [&](GateKind k, size_t q) { out.ops.emplace_back(FixedGate::single(k, static_cast<uint32_t>(q))); };
    for (const auto &op : circuit.ops) {
        if (const auto *g = std::get_if<FixedGate>(&op)) {
            out.ops.push_back(*g);
            continue;
        }
        const auto &r = std::get<ParamRotation>(op);
        const PauliString &p = r.generator;
        auto support = p.support();
        if (is_single_z(p)) {
            out.ops.push_back(r);
        } else if (p.weight() == 1 && p.at(support[0]) == 'Y') {
            size_t q = support[0];
            fixed(GateKind::Sdg, q);
            fixed(GateKind::H, q);
            out.ops.emplace_back(ParamRotation{PauliString::single(p.n_qubits(), q, 'Z'), r.theta, r.error, r.mitigation});
            fixed(GateKind::H, q);
            fixed(GateKind::S, q);
        } else if (p.weight() == 2 && p.z_mask() == 0) {
            // Bond order follows the Trotter builder: the wrap bond (N-1, 0) keeps
            // its control on N-1.
            size_t a = support[0];
            size_t b = support[1];
            if (b == p.n_qubits() - 1 && a == 0) {
                std::swap(a, b);
            }
            fixed(GateKind::H, a);
            fixed(GateKind::H, b);
            out.ops.emplace_back(FixedGate::cnot(static_cast<uint32_t>(a), static_cast<uint32_t>(b)));
            out.ops.emplace_back(ParamRotation{PauliString::single(p.n_qubits(), b, 'Z'), r.theta, r.error, r.mitigation});
            out.ops.emplace_back(FixedGate::cnot(static_cast<uint32_t>(a), static_cast<uint32_t>(b)));
            fixed(GateKind::H, a);
            fixed(GateKind::H, b);
        } else {
            throw CompileError("compile_to_rz: no Clifford+Rz lowering for generator " + p.str());
        }
    }
    return out;
}

CircuitSpec attach_errors(const CircuitSpec &circuit, const ErrorModel &model, Mitigation policy) {
    CircuitSpec out = circuit;
    for (auto &op : out.ops) {
        auto *r = std::get_if<ParamRotation>(&op);
        if (r == nullptr) {
            continue;
        }
        if (std::holds_alternative<Unstructured>(model) && !is_single_z(r->generator)) {
            throw ArgumentError("attach_errors: unstructured error needs a compiled (single-qubit Rz) circuit; got " +
                                r->generator.str());
        }
        if (uses_twirl(policy) && r->generator.weight() != 1) {
            throw ArgumentError(std::string("attach_errors: policy ") + mitigation_name(policy) +
                                " requires single-qubit generators; got " + r->generator.str());
        }
        r->error = model;
        r->mitigation = policy;
    }
    return out;
}

CircuitSpec strip_errors(const CircuitSpec &circuit) {
    CircuitSpec out = circuit;
    for (auto &op : out.ops) {
        if (auto *r = std::get_if<ParamRotation>(&op)) {
            r->error = NoError{};
            r->mitigation = Mitigation::off;
        }
    }
    return out;
}

SampledInstance sample_instance(const CircuitSpec &circuit, Rng &rng) {
    SampledInstance inst;
    inst.ops.reserve(circuit.ops.size() * 3);
    GammaCache cache;
    for (const auto &op : circuit.ops) {
        if (const auto *g = std::get_if<FixedGate>(&op)) {
            inst.ops.push_back({*g, OpRole::frame});
            continue;
        }
        const auto &r = std::get<ParamRotation>(op);
        const PauliString &p = r.generator;

        std::optional<FixedGate> twirl;
        if (uses_twirl(r.mitigation)) {
            TwirlDraw draw = sample_twirl(p, rng);
            if (!draw.sigma.is_identity()) {
                size_t q = p.support().front();
                twirl = FixedGate::single(pauli_gate(p.at(q)), static_cast<uint32_t>(q));
            }
        }
        if (twirl) {
            inst.ops.push_back({*twirl, OpRole::twirl});
        }

        ResolvedError e = resolve_error(r.error, rng);
        if (e.unstructured && p.weight() != 1) {
            throw UnsupportedError("unstructured error on multi-qubit generator " + p.str());
        }
        inst.ops.push_back({Rotation{p, r.theta + e.along}, OpRole::gate});
        if (e.unstructured) {
            size_t q = p.support().front();
            const std::array<std::pair<char, double>, 3> parts{{{'X', e.eps_x}, {'Y', e.eps_y}, {'Z', e.eps_z}}};
            for (auto [axis, angle] : parts) {
                if (angle != 0) {
                    inst.ops.push_back({Rotation{PauliString::single(p.n_qubits(), q, axis), angle}, OpRole::error});
                }
            }
        }

        if (uses_mixture(r.mitigation)) {
            double eps = nominal_epsilon(r.error);
            if (!std::isfinite(eps)) {
                throw ConfigError("sample_instance: rotation on " + p.str() + " has no resolvable epsilon");
            }
            const GammaTriple &gam = cache.get(eps);
            BranchDraw branch = sample_branch(gam, rng);
            inst.sign *= branch.sign;
            inst.weight *= gam.one_norm;
            if (branch.index != 1) {
                if (branch.index == 2) {
                    inst.t_insertions++;
                } else {
                    inst.z_insertions++;
                }
                if (is_single_z(p)) {
                    uint32_t q = static_cast<uint32_t>(p.support().front());
                    GateKind kind = branch.index == 3 ? GateKind::Z
                                    : branch.angle_offset < 0 ? GateKind::Tdg
                                                              : GateKind::T;
                    inst.ops.push_back({FixedGate::single(kind, q), OpRole::correction});
                } else {
                    inst.ops.push_back({Rotation{p, branch.angle_offset}, OpRole::correction});
                }
            }
        }

        if (twirl) {
            inst.ops.push_back({*twirl, OpRole::twirl});
        }
    }
    return inst;
}

void apply_op(StateVector &state, const ConcreteOp &op) {
    std::visit(overloaded{
                   [&](const FixedGate &g) { apply_fixed_gate(state, g); },
                   [&](const Rotation &r) { apply_pauli_rotation(state, r.generator, r.angle); },
               },
               op.op);
}

StateVector run_instance(size_t n_qubits, const SampledInstance &instance) {
    StateVector state = StateVector::zero(n_qubits);
    // Runs of single-qubit ops are multiplied into one 2x2 per qubit and applied
    // when a multi-qubit op touches that qubit.
    std::vector<std::optional<Mat2>> pending(n_qubits);
    auto flush = [&](uint32_t q) {
        if (pending[q]) {
            apply_single_qubit(state, q, *pending[q]);
            pending[q].reset();
        }
    };
    auto push = [&](uint32_t q, const Mat2 &m) { pending[q] = pending[q] ? mat2_mul(m, *pending[q]) : m; };
    for (const auto &op : instance.ops) {
        if (const auto *g = std::get_if<FixedGate>(&op.op)) {
            if (g->kind != GateKind::CNOT && g->q0 < n_qubits) {
                push(g->q0, fixed_gate_matrix(g->kind));
                continue;
            }
            if (g->q0 < n_qubits) flush(g->q0);
            if (g->q1 < n_qubits) flush(g->q1);
        } else {
            const auto &r = std::get<Rotation>(op.op);
            const uint64_t support = r.generator.x_mask() | r.generator.z_mask();
            if (r.generator.n_qubits() == n_qubits && std::popcount(support) == 1) {
                auto q = static_cast<uint32_t>(std::countr_zero(support));
                push(q, rotation_matrix(r.generator.at(q), r.angle));
                continue;
            }
            for (uint32_t q = 0; q < n_qubits; q++) {
                if (support >> q & 1) flush(q);
            }
        }
        apply_op(state, op);
    }
    for (uint32_t q = 0; q < n_qubits; q++) flush(q);
    return state;
}

StateVector run_ideal(const CircuitSpec &circuit) {
    StateVector state = StateVector::zero(circuit.n_qubits);
    for (const auto &op : circuit.ops) {
        std::visit(overloaded{
                       [&](const FixedGate &g) { apply_fixed_gate(state, g); },
                       [&](const ParamRotation &r) { apply_pauli_rotation(state, r.generator, r.theta); },
                   },
                   op);
    }
    return state;
}

StateVector run_noisy(const CircuitSpec &circuit, Rng &rng) {
    StateVector state = StateVector::zero(circuit.n_qubits);
    for (const auto &op : circuit.ops) {
        std::visit(overloaded{
                       [&](const FixedGate &g) { apply_fixed_gate(state, g); },
                       [&](const ParamRotation &r) {
                           apply_pauli_rotation(state, r.generator, r.theta);
                           apply_error(state, r.error, r.generator, rng);
                       },
                   },
                   op);
    }
    return state;
}

void dump_circuit(std::ostream &out, const CircuitSpec &circuit) {
    for (const auto &op : circuit.ops) {
        if (const auto *g = std::get_if<FixedGate>(&op)) {
            out << g->str() << '\n';
            continue;
        }
        const auto &r = std::get<ParamRotation>(op);
        out << rotation_head(r.generator) << ' ' << fmt("%.6f", r.theta);
        std::visit(overloaded{
                       [&](const NoError &) {},
                       [&](const ConstantOverRotation &m) { out << " eps=" << fmt("%g", m.epsilon); },
                       [&](const UniformOverRotation &m) {
                           out << " eps0=" << fmt("%g", m.epsilon0) << " lo=" << fmt("%g", m.lo_factor)
                               << " hi=" << fmt("%g", m.hi_factor);
                       },
                       [&](const Unstructured &m) {
                           out << " ex=" << fmt("%g", m.eps_x) << " ey=" << fmt("%g", m.eps_y)
                               << " ez=" << fmt("%g", m.eps_z);
                       },
                   },
                   r.error);
        if (r.mitigation != Mitigation::off) {
            out << " policy=" << mitigation_name(r.mitigation);
        }
        out << '\n';
    }
}

std::string dump_circuit(const CircuitSpec &circuit) {
    std::ostringstream ss;
    dump_circuit(ss, circuit);
    return ss.str();
}

void dump_instance(std::ostream &out, const SampledInstance &instance) {
    static constexpr const char *kRoles[] = {"frame", "gate", "error", "twirl", "correction"};
    for (const auto &op : instance.ops) {
        std::visit(overloaded{
                       [&](const FixedGate &g) { out << g.str(); },
                       [&](const Rotation &r) { out << rotation_head(r.generator) << ' ' << fmt("%.6f", r.angle); },
                   },
                   op.op);
        out << " role=" << kRoles[static_cast<int>(op.role)] << '\n';
    }
}

}  // namespace qpmix
