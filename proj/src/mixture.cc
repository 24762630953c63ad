#include "qpmix/mixture.h"

#include <cmath>
#include <iomanip>
#include <limits>

#include "qpmix/errors.h"

namespace qpmix {

namespace {

constexpr double kPi = std::numbers::pi;

/// Distance from x to the nearest multiple of 2*pi.
double distance_to_period(double x) {
    double r = std::remainder(x, 2 * kPi);
    return std::abs(r);
}

void check_factor(double angle, double tol, const char *name) {
    if (distance_to_period(angle) < tol) {
        throw DegenerateDecompositionError(std::string("gamma_general: csc(") + name +
                                           "/2) diverges; " + name + " = " + std::to_string(angle) +
                                           " is a multiple of 2*pi");
    }
}

}  // namespace

double GammaTriple::gamma(int i) const {
    switch (i) {
        case 1:
            return gamma1;
        case 2:
            return gamma2;
        case 3:
            return gamma3;
    }
    throw ArgumentError("branch index must be 1, 2 or 3");
}

double GammaTriple::offset(int i) const {
    switch (i) {
        case 1:
            return 0;
        case 2:
            return offset_a;
        case 3:
            return offset_b;
    }
    throw ArgumentError("branch index must be 1, 2 or 3");
}

double GammaTriple::probability(int i) const {
    return std::abs(gamma(i)) / one_norm;
}

GammaTriple gamma_general(double epsilon, double offset_a, double offset_b, double tol) {
    check_factor(offset_a, tol, "A");
    check_factor(offset_b, tol, "B");
    check_factor(offset_a - offset_b, tol, "A-B");
    double csc_a = 1 / std::sin(offset_a / 2);
    double csc_b = 1 / std::sin(offset_b / 2);
    double csc_ab = 1 / std::sin((offset_a - offset_b) / 2);
    double s_e = std::sin(epsilon / 2);
    double s_ae = std::sin((offset_a + epsilon) / 2);
    double s_be = std::sin((offset_b + epsilon) / 2);

    GammaTriple g;
    g.epsilon = epsilon;
    g.offset_a = offset_a;
    g.offset_b = offset_b;
    g.gamma1 = csc_a * csc_b * s_ae * s_be;
    g.gamma2 = csc_a * csc_ab * s_e * s_be;
    g.gamma3 = -csc_ab * csc_b * s_e * s_ae;
    g.one_norm = std::abs(g.gamma1) + std::abs(g.gamma2) + std::abs(g.gamma3);
    return g;
}

GammaTriple gamma_default(double epsilon, double max_abs_epsilon) {
    if (!(std::abs(epsilon) < max_abs_epsilon)) {
        throw OutOfRegimeError("gamma_default: |epsilon| = " + std::to_string(std::abs(epsilon)) +
                               " is outside the supported range (< " + std::to_string(max_abs_epsilon) + ")");
    }
    double a = epsilon >= 0 ? -kPi / 4 : kPi / 4;
    return gamma_general(epsilon, a, kPi);
}

double one_norm_closed_form(double epsilon) {
    return std::cos(std::abs(epsilon) - kPi / 8) / std::cos(kPi / 8);
}

double linear_system_residual(const GammaTriple &g, double theta) {
    double base = theta + g.epsilon;
    std::array<double, 3> angles{base, base + g.offset_a, base + g.offset_b};
    std::array<double, 3> gam = g.gammas();
    std::array<double, 3> lhs{0, 0, 0};
    for (int j = 0; j < 3; j++) {
        lhs[0] += (1 + std::cos(angles[j])) * gam[j];
        lhs[1] += std::sin(angles[j]) * gam[j];
        lhs[2] += (1 - std::cos(angles[j])) * gam[j];
    }
    double r0 = std::abs(lhs[0] - (1 + std::cos(theta)));
    double r1 = std::abs(lhs[1] - std::sin(theta));
    double r2 = std::abs(lhs[2] - (1 - std::cos(theta)));
    return std::max({r0, r1, r2});
}

BranchDraw sample_branch(const GammaTriple &g, Rng &rng) {
    double u = uniform01(rng) * g.one_norm;
    int index = 3;
    double acc = 0;
    for (int i = 1; i <= 2; i++) {
        acc += std::abs(g.gamma(i));
        if (u < acc) {
            index = i;
            break;
        }
    }
    // A zero-weight branch 3 can only be reached by rounding; fall back to the last
    // branch that carries weight.
    while (index > 1 && g.gamma(index) == 0) {
        index--;
    }
    return BranchDraw{index, g.gamma(index) < 0 ? -1 : 1, g.offset(index)};
}

std::array<WeightedAngle, 4> four_term_weights(double theta, double epsilon) {
    double c = std::cos(epsilon / 2);
    double s = std::sin(epsilon / 2);
    double base = theta + epsilon;
    return {{
        {base, c * c},
        {base + kPi, s * s},
        {base + kPi / 2, -c * s},
        {base - kPi / 2, c * s},
    }};
}

AbScan scan_ab(double epsilon, size_t grid_steps, double tol) {
    if (grid_steps == 0) {
        throw ArgumentError("scan_ab: grid_steps must be positive");
    }
    AbScan scan;
    scan.epsilon = epsilon;
    scan.grid_steps = grid_steps;
    scan.cell_width = 2 * kPi / static_cast<double>(grid_steps);
    scan.global_minimum = {0, 0, std::nullopt};
    scan.cells.reserve(grid_steps * grid_steps);
    for (size_t i = 0; i < grid_steps; i++) {
        double a = (static_cast<double>(i) + 0.5) * scan.cell_width;
        std::optional<AbCell> column_best;
        for (size_t j = 0; j < grid_steps; j++) {
            double b = (static_cast<double>(j) + 0.5) * scan.cell_width;
            AbCell cell{a, b, std::nullopt};
            try {
                cell.one_norm = gamma_general(epsilon, a, b, tol).one_norm;
            } catch (const DegenerateDecompositionError &) {
            }
            scan.cells.push_back(cell);
            if (!cell.one_norm || !(a > b)) {
                continue;
            }
            if (!column_best || *cell.one_norm < *column_best->one_norm) {
                column_best = cell;
            }
        }
        if (column_best) {
            scan.column_minima.push_back(*column_best);
            if (!scan.global_minimum.one_norm || *column_best->one_norm < *scan.global_minimum.one_norm) {
                scan.global_minimum = *column_best;
            }
        }
    }
    return scan;
}

void write_ab_csv(std::ostream &out, const AbScan &scan) {
    out << "A,B,one_norm\n";
    out << std::setprecision(17);
    for (const auto &cell : scan.cells) {
        out << cell.a << ',' << cell.b << ',';
        if (cell.one_norm) {
            out << *cell.one_norm;
        } else {
            out << "nan";
        }
        out << '\n';
    }
}

}  // namespace qpmix
