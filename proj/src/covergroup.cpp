#include "tl/covergroup.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/LU>

#include "tl/presentation.hpp"

namespace tl {

namespace {

constexpr double pi = std::numbers::pi;

double frac01(double x)
{
    double f = x - std::floor(x);
    return f >= 1.0 ? 0.0 : f;
}

Mat2 adjugate(const Mat2& a)
{
    Mat2 r;
    r << a(1, 1), -a(0, 1), -a(1, 0), a(0, 0);
    return r;
}

}  // namespace

const char* to_string(IsometryType t)
{
    switch (t) {
    case IsometryType::elliptic: return "elliptic";
    case IsometryType::parabolic: return "parabolic";
    case IsometryType::hyperbolic: return "hyperbolic";
    case IsometryType::central: return "central";
    }
    return "?";
}

double circle_coordinate(const Eigen::Vector2d& v) { return frac01(std::atan2(v(1), v(0)) / pi); }

Mat2 sign_normalized(const Mat2& a)
{
    const double scale = a.cwiseAbs().maxCoeff();
    for (int i = 0; i < 4; ++i) {
        const double x = a(i / 2, i % 2);
        if (std::abs(x) > 1e-12 * scale) return x < 0 ? Mat2(-a) : a;
    }
    return a;
}

LiftedElement center_power(long k) { return {Mat2::Identity(), static_cast<double>(k)}; }

LiftedElement canonical_lift(const Mat2& a)
{
    const Mat2 m = sign_normalized(a);
    return {m, circle_coordinate(m.col(0))};
}

double lifted_eval(const LiftedElement& g, double x)
{
    const double m = std::floor(x);
    const double t = x - m;
    const Eigen::Vector2d w0 = g.matrix.col(0);
    const Eigen::Vector2d wt = g.matrix * Eigen::Vector2d(std::cos(pi * t), std::sin(pi * t));
    // swept angle from f(0) to f(t), in [0, pi)
    const double swept = std::atan2(std::sin(pi * t) * g.matrix.determinant(), w0.dot(wt));
    return m + g.base + swept / pi;
}

LiftedElement lifted_compose(const LiftedElement& g, const LiftedElement& h)
{
    return {sign_normalized(g.matrix * h.matrix), lifted_eval(g, h.base)};
}

LiftedElement lifted_inverse(const LiftedElement& g)
{
    const Mat2 inv = sign_normalized(adjugate(g.matrix) / g.matrix.determinant());
    const double c = circle_coordinate(inv.col(0));
    return {inv, c - std::round(lifted_eval(g, c))};
}

LiftedElement lifted_power(const LiftedElement& g, long n)
{
    LiftedElement base = n < 0 ? lifted_inverse(g) : g;
    unsigned long e = n < 0 ? static_cast<unsigned long>(-n) : static_cast<unsigned long>(n);
    LiftedElement acc = center_power(0);
    while (e) {
        if (e & 1u) acc = lifted_compose(acc, base);
        base = lifted_compose(base, base);
        e >>= 1u;
    }
    return acc;
}

IsometryType isometry_type(const Mat2& a, double tol)
{
    const double t = std::abs(a.trace());
    if (t > 2.0 + tol) return IsometryType::hyperbolic;
    if (t >= 2.0 - tol) {
        const Mat2 s = a.trace() > 0 ? Mat2(a - Mat2::Identity()) : Mat2(a + Mat2::Identity());
        return s.cwiseAbs().maxCoeff() < 1e-9 ? IsometryType::central : IsometryType::parabolic;
    }
    return IsometryType::elliptic;
}

double translation_number(const LiftedElement& g)
{
    const Mat2& a = g.matrix;
    switch (isometry_type(a)) {
    case IsometryType::central: return std::round(g.base);
    case IsometryType::hyperbolic:
    case IsometryType::parabolic: {
        const double tr = a.trace();
        const double disc = std::sqrt(std::max(tr * tr - 4.0, 0.0));
        const double lam = (tr + (tr >= 0 ? disc : -disc)) / 2.0;
        const Eigen::Vector2d v1(a(0, 1), lam - a(0, 0));
        const Eigen::Vector2d v2(lam - a(1, 1), a(1, 0));
        const double theta = circle_coordinate(v1.norm() >= v2.norm() ? v1 : v2);
        return std::round(lifted_eval(g, theta) - theta);
    }
    case IsometryType::elliptic: break;
    }
    const double c = std::clamp(a.trace() / 2.0, -1.0, 1.0);
    const double phi = std::acos(c) / pi;
    const double frac = a(1, 0) > 0 ? phi : 1.0 - phi;
    LiftedElement h = g;
    const int squarings = 4;
    for (int i = 0; i < squarings; ++i) h = lifted_compose(h, h);
    const double est = lifted_eval(h, 0.0) / (1 << squarings);
    return std::round(est - frac) + frac;
}

LiftedRep canonical_lifts(const std::vector<Mat2>& matrices)
{
    LiftedRep r;
    for (const auto& m : matrices) r.gens.push_back(canonical_lift(m));
    return r;
}

LiftedElement evaluate(const LiftedRep& rep, const Word& w)
{
    LiftedElement acc = center_power(0);
    std::vector<LiftedElement> inv(rep.gens.size());
    std::vector<bool> have(rep.gens.size(), false);
    for (auto l : w) {
        const auto g = static_cast<std::size_t>(l.gen);
        if (l.exp > 0) {
            acc = lifted_compose(acc, rep.gens[g]);
        } else {
            if (!have[g]) {
                inv[g] = lifted_inverse(rep.gens[g]);
                have[g] = true;
            }
            acc = lifted_compose(acc, inv[g]);
        }
    }
    return acc;
}

EulerData euler_defects(const LiftedRep& rep, const Presentation& p)
{
    EulerData e;
    e.exponent_matrix = exponent_matrix(p);
    e.generators = static_cast<std::size_t>(p.rank);
    for (const auto& r : p.relators) {
        const auto g = evaluate(rep, r);
        if (isometry_type(g.matrix, 1e-6) != IsometryType::central ||
            (g.matrix - Mat2::Identity()).cwiseAbs().maxCoeff() > 1e-6)
            throw LiftError("relator image is not central; representation does not satisfy relators");
        const double n = std::round(g.base);
        if (std::abs(g.base - n) > 0.1) throw LiftError("relator defect is not near an integer");
        e.defects.push_back(static_cast<std::int64_t>(n));
    }
    return e;
}

EulerData solve_lift(EulerData e)
{
    IntVector rhs(e.defects.size());
    for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] = -e.defects[i];
    e.adjustment = solve_integer(e.exponent_matrix, e.generators, rhs);
    e.solvable = e.adjustment.has_value();
    return e;
}

LiftedRep shift_generators(const LiftedRep& rep, const IntVector& n)
{
    LiftedRep r = rep;
    for (std::size_t g = 0; g < r.gens.size(); ++g) r.gens[g].base += static_cast<double>(n[g]);
    return r;
}

LiftedRep shift_lift(const LiftedRep& rep, const IntVector& phi, const Presentation& p)
{
    for (const auto& row : exponent_matrix(p)) {
        std::int64_t s = 0;
        for (std::size_t g = 0; g < row.size(); ++g) s += row[g] * phi[g];
        if (s != 0) throw LiftError("shift vector is not a homomorphism: nonzero on a relator");
    }
    return shift_generators(rep, phi);
}

}  // namespace tl
