#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>

#include "tl/intmat.hpp"
#include "tl/presentation.hpp"

namespace tl {

using Mat2 = Eigen::Matrix2d;

// Element of the universal cover of PSL(2,R): a unimodular matrix acting on
// R/Z through theta -> [cos(pi theta) : sin(pi theta)], together with the
// value at 0 of a chosen lift to R.
struct LiftedElement {
    Mat2 matrix = Mat2::Identity();
    double base = 0.0;
};

enum class IsometryType { elliptic, parabolic, hyperbolic, central };
const char* to_string(IsometryType t);

struct LiftError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Angle of the line through v, as a point of R/Z in [0, 1).
double circle_coordinate(const Eigen::Vector2d& v);
Mat2 sign_normalized(const Mat2& a);

LiftedElement center_power(long k);
// Lift with base in [0, 1).
LiftedElement canonical_lift(const Mat2& a);
double lifted_eval(const LiftedElement& g, double x);
LiftedElement lifted_compose(const LiftedElement& g, const LiftedElement& h);
LiftedElement lifted_inverse(const LiftedElement& g);
LiftedElement lifted_power(const LiftedElement& g, long n);
IsometryType isometry_type(const Mat2& a, double tol = 1e-12);
double translation_number(const LiftedElement& g);

struct LiftedRep {
    std::vector<LiftedElement> gens;
};

LiftedRep canonical_lifts(const std::vector<Mat2>& matrices);
LiftedElement evaluate(const LiftedRep& rep, const Word& w);

struct EulerData {
    IntVector defects;
    IntMatrix exponent_matrix;
    std::size_t generators = 0;
    bool solvable = false;
    std::optional<IntVector> adjustment;
};

EulerData euler_defects(const LiftedRep& rep, const Presentation& p);
EulerData solve_lift(EulerData e);
// Multiplies each generator lift by s^n[g] with no homomorphism check.
LiftedRep shift_generators(const LiftedRep& rep, const IntVector& n);
// As above, but n must vanish on every abelianized relator.
LiftedRep shift_lift(const LiftedRep& rep, const IntVector& phi, const Presentation& p);

}  // namespace tl
