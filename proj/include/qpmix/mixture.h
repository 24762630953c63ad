#pragma once

#include <array>
#include <numbers>
#include <optional>
#include <ostream>
#include <vector>

#include "qpmix/rng.h"

namespace qpmix {

/// Signed weights expressing the ideal rotation channel R(theta) as
///
///     gamma1 R(theta+eps) + gamma2 R(theta+eps+A) + gamma3 R(theta+eps+B)
///
/// where R(.) are the channels the hardware actually implements when asked for
/// theta, theta+A and theta+B under over-rotation eps.
struct GammaTriple {
    double gamma1 = 1;
    double gamma2 = 0;
    double gamma3 = 0;
    double epsilon = 0;
    double offset_a = 0;
    double offset_b = 0;
    double one_norm = 1;

    /// gamma_i for i in {1, 2, 3}.
    double gamma(int i) const;
    /// Angle added to the noisy gate for branch i: 0, A or B.
    double offset(int i) const;
    /// |gamma_i| / ||gamma||_1.
    double probability(int i) const;
    std::array<double, 3> gammas() const { return {gamma1, gamma2, gamma3}; }
};

struct BranchDraw {
    int index;  ///< 1, 2 or 3
    int sign;   ///< sign of gamma_index
    double angle_offset;
};

constexpr double kDefaultSingularTolerance = 1e-8;
constexpr double kDefaultMaxEpsilon = std::numbers::pi / 8;

/// Closed-form solution of the 3x3 system for arbitrary offsets (A, B).
/// Throws DegenerateDecompositionError when A, B or A-B is within `tol` of a
/// multiple of 2*pi (a csc factor diverges).
GammaTriple gamma_general(double epsilon, double offset_a, double offset_b,
                          double tol = kDefaultSingularTolerance);

/// The T-friendly choice A = -sign(eps) pi/4, B = pi. Throws OutOfRegimeError when
/// |eps| >= max_abs_epsilon.
GammaTriple gamma_default(double epsilon, double max_abs_epsilon = kDefaultMaxEpsilon);

/// sec(pi/8) cos(|eps| - pi/8), the one-norm of gamma_default for |eps| < pi/8.
double one_norm_closed_form(double epsilon);

/// Max-abs residual of the linear system the triple solves, evaluated at rotation
/// angle theta (the system is theta-independent in exact arithmetic).
double linear_system_residual(const GammaTriple &g, double theta);

BranchDraw sample_branch(const GammaTriple &g, Rng &rng);

/// One (angle, weight) term of the four-channel decomposition.
struct WeightedAngle {
    double angle;
    double weight;
};

/// cos^2(e/2) R(t+e) + sin^2(e/2) R(t+e+pi) - cos(e/2) sin(e/2) [R(t+e+pi/2) - R(t+e-pi/2)].
std::array<WeightedAngle, 4> four_term_weights(double theta, double epsilon);

struct AbCell {
    double a;
    double b;
    std::optional<double> one_norm;  ///< empty on singular lines
};

struct AbScan {
    double epsilon;
    size_t grid_steps;
    double cell_width;
    std::vector<AbCell> cells;  ///< row-major in A, then B
    /// For each A column with at least one valid B < A: the minimizing cell.
    std::vector<AbCell> column_minima;
    AbCell global_minimum;  ///< over the A > B half-plane
};

/// ||gamma||_1 on a grid_steps x grid_steps cell-centred grid over (0, 2pi)^2.
AbScan scan_ab(double epsilon, size_t grid_steps, double tol = kDefaultSingularTolerance);

/// CSV with header "A,B,one_norm"; singular cells carry "nan".
void write_ab_csv(std::ostream &out, const AbScan &scan);

}  // namespace qpmix
