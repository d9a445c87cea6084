#pragma once

#include <complex>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "tl/presentation.hpp"

namespace tl {

using BigInt = boost::multiprecision::cpp_int;

// Laurent polynomial sum c_i t^(offset + i).
struct LaurentPoly {
    int offset = 0;
    std::vector<BigInt> coeffs;

    bool is_zero() const { return coeffs.empty(); }
    int degree() const { return offset + static_cast<int>(coeffs.size()) - 1; }
    BigInt at_one() const;
    std::string to_string() const;
    bool operator==(const LaurentPoly&) const = default;
};

LaurentPoly make_poly(std::vector<BigInt> coeffs, int offset = 0);
LaurentPoly operator+(const LaurentPoly& a, const LaurentPoly& b);
LaurentPoly operator-(const LaurentPoly& a, const LaurentPoly& b);
LaurentPoly operator*(const LaurentPoly& a, const LaurentPoly& b);
LaurentPoly monomial(const BigInt& c, int e);

// Shift to lowest exponent 0 and make the leading coefficient positive.
LaurentPoly normalized(LaurentPoly p);
LaurentPoly derivative(const LaurentPoly& p);
BigInt content(const LaurentPoly& p);
// gcd in Z[t] of normalized inputs, content included.
LaurentPoly poly_gcd(LaurentPoly a, LaurentPoly b);
// Exact quotient a / b in Z[t]; throws if b does not divide a.
LaurentPoly exact_quotient(const LaurentPoly& a, const LaurentPoly& b);

struct UnitCircleRoot {
    std::complex<double> value;
    double argument = 0.0;  // in (-pi, pi]
    int multiplicity = 1;
    bool simple = true;
};

struct AlexanderPoint {
    double x = 0.0;  // in [0, k)
    bool multiple = false;
    bool excluded = false;  // xi^k = 1
    double argument = 0.0;
};

// Fox derivative of relator r by generator g, pushed to Z[t^(+-1)].
LaurentPoly fox_derivative(const Word& r, int g, const HomologyData& h);
LaurentPoly alexander_polynomial(const Presentation& p, const HomologyData& h);
std::vector<UnitCircleRoot> unit_circle_roots(const LaurentPoly& d, double tol = 1e-9);
std::vector<AlexanderPoint> alexander_points(const std::vector<UnitCircleRoot>& roots, int k,
                                             double tol = 1e-9);
bool lspace_form_check(const LaurentPoly& d);

}  // namespace tl
