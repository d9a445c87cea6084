#include "tl/alexander.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "tl/bigfloat.hpp"

namespace tl {

namespace {

void trim(LaurentPoly& p)
{
    while (!p.coeffs.empty() && p.coeffs.back() == 0) p.coeffs.pop_back();
    std::size_t lead = 0;
    while (lead < p.coeffs.size() && p.coeffs[lead] == 0) ++lead;
    if (lead) {
        p.coeffs.erase(p.coeffs.begin(), p.coeffs.begin() + static_cast<long>(lead));
        p.offset += static_cast<int>(lead);
    }
    if (p.coeffs.empty()) p.offset = 0;
}

BigInt big_gcd(BigInt a, BigInt b)
{
    a = abs(a);
    b = abs(b);
    while (b != 0) {
        BigInt r = a % b;
        a = b;
        b = r;
    }
    return a;
}

LaurentPoly scaled(LaurentPoly p, const BigInt& c)
{
    for (auto& x : p.coeffs) x *= c;
    trim(p);
    return p;
}

LaurentPoly primitive(LaurentPoly p)
{
    if (p.is_zero()) return p;
    const BigInt c = content(p);
    for (auto& x : p.coeffs) x /= c;
    return normalized(p);
}

// Pseudo-remainder of a by b (both with offset 0).
LaurentPoly pseudo_remainder(LaurentPoly a, const LaurentPoly& b)
{
    const auto db = b.coeffs.size() - 1;
    const BigInt& lb = b.coeffs.back();
    while (!a.is_zero() && a.coeffs.size() - 1 >= db) {
        const BigInt la = a.coeffs.back();
        const auto shift = a.coeffs.size() - 1 - db;
        for (auto& x : a.coeffs) x *= lb;
        for (std::size_t i = 0; i <= db; ++i) a.coeffs[shift + i] -= la * b.coeffs[i];
        a.offset = 0;
        while (!a.coeffs.empty() && a.coeffs.back() == 0) a.coeffs.pop_back();
    }
    trim(a);
    return a;
}

BigComplex horner(const LaurentPoly& p, const BigComplex& z)
{
    BigComplex v(z.bits());
    for (auto it = p.coeffs.rbegin(); it != p.coeffs.rend(); ++it) {
        v = v * z;
        BigFloat c(z.bits());
        const std::string s = it->str();
        mpfr_set_str(c.get(), s.c_str(), 10, MPFR_RNDN);
        v.re += c;
    }
    for (int e = 0; e < p.offset; ++e) v = v * z;
    for (int e = p.offset; e < 0; ++e) v = v / z;
    return v;
}

LaurentPoly subdeterminant(const std::vector<std::vector<LaurentPoly>>& m, std::vector<int> rows,
                           std::vector<int> cols)
{
    if (rows.empty()) return make_poly({1});
    LaurentPoly acc;
    const int r = rows.front();
    rows.erase(rows.begin());
    for (std::size_t c = 0; c < cols.size(); ++c) {
        const auto& entry = m[static_cast<std::size_t>(r)][static_cast<std::size_t>(cols[c])];
        if (entry.is_zero()) continue;
        auto rest = cols;
        rest.erase(rest.begin() + static_cast<long>(c));
        auto term = entry * subdeterminant(m, rows, rest);
        acc = (c % 2 == 0) ? acc + term : acc - term;
    }
    return acc;
}

void combinations(int n, int r, int start, std::vector<int>& cur, std::vector<std::vector<int>>& out)
{
    if (static_cast<int>(cur.size()) == r) {
        out.push_back(cur);
        return;
    }
    for (int i = start; i < n; ++i) {
        cur.push_back(i);
        combinations(n, r, i + 1, cur, out);
        cur.pop_back();
    }
}

}  // namespace

LaurentPoly make_poly(std::vector<BigInt> coeffs, int offset)
{
    LaurentPoly p{offset, std::move(coeffs)};
    trim(p);
    return p;
}

LaurentPoly monomial(const BigInt& c, int e) { return make_poly({c}, e); }

BigInt LaurentPoly::at_one() const
{
    BigInt s = 0;
    for (const auto& c : coeffs) s += c;
    return s;
}

std::string LaurentPoly::to_string() const
{
    if (is_zero()) return "0";
    std::string s;
    for (int i = static_cast<int>(coeffs.size()) - 1; i >= 0; --i) {
        const BigInt& c = coeffs[static_cast<std::size_t>(i)];
        if (c == 0) continue;
        const int e = offset + i;
        const BigInt a = abs(c);
        if (s.empty())
            s += c < 0 ? "-" : "";
        else
            s += c < 0 ? " - " : " + ";
        if (a != 1 || e == 0) s += a.str();
        if (e != 0) {
            s += "t";
            if (e != 1) s += "^" + std::to_string(e);
        }
    }
    return s;
}

LaurentPoly operator+(const LaurentPoly& a, const LaurentPoly& b)
{
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    const int lo = std::min(a.offset, b.offset);
    const int hi = std::max(a.degree(), b.degree());
    std::vector<BigInt> c(static_cast<std::size_t>(hi - lo + 1), BigInt(0));
    for (std::size_t i = 0; i < a.coeffs.size(); ++i) c[static_cast<std::size_t>(a.offset - lo) + i] += a.coeffs[i];
    for (std::size_t i = 0; i < b.coeffs.size(); ++i) c[static_cast<std::size_t>(b.offset - lo) + i] += b.coeffs[i];
    return make_poly(std::move(c), lo);
}

LaurentPoly operator-(const LaurentPoly& a, const LaurentPoly& b) { return a + scaled(b, -1); }

LaurentPoly operator*(const LaurentPoly& a, const LaurentPoly& b)
{
    if (a.is_zero() || b.is_zero()) return {};
    std::vector<BigInt> c(a.coeffs.size() + b.coeffs.size() - 1, BigInt(0));
    for (std::size_t i = 0; i < a.coeffs.size(); ++i)
        for (std::size_t j = 0; j < b.coeffs.size(); ++j) c[i + j] += a.coeffs[i] * b.coeffs[j];
    return make_poly(std::move(c), a.offset + b.offset);
}

LaurentPoly normalized(LaurentPoly p)
{
    trim(p);
    if (p.is_zero()) return p;
    p.offset = 0;
    if (p.coeffs.back() < 0)
        for (auto& x : p.coeffs) x = -x;
    return p;
}

LaurentPoly derivative(const LaurentPoly& p)
{
    if (p.offset != 0) throw std::invalid_argument("derivative expects an ordinary polynomial");
    std::vector<BigInt> c;
    for (std::size_t i = 1; i < p.coeffs.size(); ++i) c.push_back(p.coeffs[i] * static_cast<long>(i));
    return make_poly(std::move(c));
}

BigInt content(const LaurentPoly& p)
{
    BigInt g = 0;
    for (const auto& c : p.coeffs) g = big_gcd(g, c);
    return g;
}

LaurentPoly poly_gcd(LaurentPoly a, LaurentPoly b)
{
    a = normalized(a);
    b = normalized(b);
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    const BigInt c = big_gcd(content(a), content(b));
    a = primitive(a);
    b = primitive(b);
    if (a.coeffs.size() < b.coeffs.size()) std::swap(a, b);
    while (!b.is_zero()) {
        auto r = pseudo_remainder(a, b);
        a = b;
        b = r.is_zero() ? r : primitive(r);
    }
    return scaled(normalized(a), c);
}

LaurentPoly exact_quotient(const LaurentPoly& a0, const LaurentPoly& b0)
{
    LaurentPoly a = normalized(a0), b = normalized(b0);
    if (b.is_zero()) throw std::invalid_argument("division by zero polynomial");
    if (a.is_zero()) return a;
    if (a.coeffs.size() < b.coeffs.size()) throw std::invalid_argument("inexact polynomial division");
    std::vector<BigInt> q(a.coeffs.size() - b.coeffs.size() + 1, BigInt(0));
    auto r = a.coeffs;
    const auto db = b.coeffs.size() - 1;
    for (std::size_t i = q.size(); i-- > 0;) {
        const BigInt& top = r[i + db];
        if (top % b.coeffs.back() != 0) throw std::invalid_argument("inexact polynomial division");
        q[i] = top / b.coeffs.back();
        for (std::size_t j = 0; j <= db; ++j) r[i + j] -= q[i] * b.coeffs[j];
    }
    for (const auto& x : r)
        if (x != 0) throw std::invalid_argument("inexact polynomial division");
    return make_poly(std::move(q));
}

LaurentPoly fox_derivative(const Word& r, int g, const HomologyData& h)
{
    LaurentPoly acc;
    std::int64_t prefix = 0;
    for (auto l : r) {
        const auto f = h.free_images[static_cast<std::size_t>(l.gen)];
        if (l.exp > 0) {
            if (l.gen == g) acc = acc + monomial(1, static_cast<int>(prefix));
            prefix += f;
        } else {
            prefix -= f;
            if (l.gen == g) acc = acc - monomial(1, static_cast<int>(prefix));
        }
    }
    return acc;
}

LaurentPoly alexander_polynomial(const Presentation& p, const HomologyData& h)
{
    const int n = p.rank;
    const int m = static_cast<int>(p.relators.size());
    std::vector<std::vector<LaurentPoly>> fox(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i)
        for (int g = 0; g < n; ++g)
            fox[static_cast<std::size_t>(i)].push_back(fox_derivative(p.relators[static_cast<std::size_t>(i)], g, h));

    const int size = n - 1;
    if (size == 0) return make_poly({1});
    if (m < size) throw InputError("too few relators for an Alexander matrix");
    std::vector<std::vector<int>> row_sets, col_sets;
    std::vector<int> cur;
    combinations(m, size, 0, cur, row_sets);
    combinations(n, size, 0, cur, col_sets);
    LaurentPoly g;
    for (const auto& rs : row_sets)
        for (const auto& cs : col_sets) {
            auto minor = normalized(subdeterminant(fox, rs, cs));
            if (!minor.is_zero()) g = poly_gcd(g, minor);
        }
    if (g.is_zero()) throw InputError("Alexander matrix is zero (degenerate presentation)");
    return normalized(g);
}

std::vector<UnitCircleRoot> unit_circle_roots(const LaurentPoly& d0, double tol)
{
    const LaurentPoly d = primitive(normalized(d0));
    if (d.is_zero()) throw std::invalid_argument("zero polynomial has no root set");
    std::vector<LaurentPoly> chain{d};
    while (chain.back().coeffs.size() > 1) {
        const auto& f = chain.back();
        chain.push_back(poly_gcd(f, derivative(f)));
        if (chain.back() == f) break;
    }
    const LaurentPoly sqfree = exact_quotient(d, chain.size() > 1 ? chain[1] : make_poly({1}));
    const auto deg = static_cast<Eigen::Index>(sqfree.coeffs.size()) - 1;
    std::vector<UnitCircleRoot> out;
    if (deg < 1) return out;

    Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(deg, deg);
    const double lead = sqfree.coeffs.back().convert_to<double>();
    for (Eigen::Index i = 1; i < deg; ++i) comp(i, i - 1) = 1.0;
    for (Eigen::Index i = 0; i < deg; ++i)
        comp(i, deg - 1) = -sqfree.coeffs[static_cast<std::size_t>(i)].convert_to<double>() / lead;
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(comp, false);

    const mpfr_prec_t bits = 256;
    const LaurentPoly dsq = derivative(sqfree);
    for (Eigen::Index i = 0; i < deg; ++i) {
        std::complex<double> z0 = es.eigenvalues()(i);
        BigComplex z(z0, bits);
        for (int it = 0; it < 60; ++it) {
            const BigComplex step = horner(sqfree, z) / horner(dsq, z);
            z -= step;
            if (magnitude(step) < 1e-70) break;
        }
        const auto zv = z.to_complex();
        if (std::abs(std::abs(zv) - 1.0) >= tol) continue;
        UnitCircleRoot r;
        r.value = zv;
        r.argument = std::arg(zv);
        if (r.argument <= -std::numbers::pi) r.argument += 2 * std::numbers::pi;
        r.multiplicity = 1;
        for (std::size_t m = 1; m < chain.size(); ++m) {
            if (chain[m].coeffs.size() <= 1) break;
            if (magnitude(horner(chain[m], z)) < 1e-50) r.multiplicity = static_cast<int>(m) + 1;
        }
        r.simple = r.multiplicity == 1;
        const bool seen = std::any_of(out.begin(), out.end(), [&](const UnitCircleRoot& o) {
            return std::abs(o.value - r.value) < 1e-12;
        });
        if (!seen) out.push_back(r);
    }
    std::sort(out.begin(), out.end(),
              [](const UnitCircleRoot& a, const UnitCircleRoot& b) { return a.argument < b.argument; });
    return out;
}

std::vector<AlexanderPoint> alexander_points(const std::vector<UnitCircleRoot>& roots, int k, double tol)
{
    if (k < 1) throw std::invalid_argument("k must be positive");
    std::vector<AlexanderPoint> pts;
    for (const auto& r : roots) {
        AlexanderPoint a;
        a.argument = r.argument;
        a.x = std::fmod(k * r.argument / (2 * std::numbers::pi), static_cast<double>(k));
        if (a.x < 0) a.x += k;
        if (a.x >= k) a.x -= k;
        a.multiple = !r.simple;
        a.excluded = std::abs(std::pow(r.value, k) - 1.0) < tol;
        pts.push_back(a);
    }
    std::sort(pts.begin(), pts.end(), [](const AlexanderPoint& a, const AlexanderPoint& b) { return a.x < b.x; });
    return pts;
}

bool lspace_form_check(const LaurentPoly& d0)
{
    const LaurentPoly d = normalized(d0);
    if (d.is_zero()) throw std::invalid_argument("zero polynomial");
    int last = 0;
    for (const auto& c : d.coeffs) {
        if (c == 0) continue;
        if (c != 1 && c != -1) return false;
        const int s = c > 0 ? 1 : -1;
        if (s == last) return false;
        last = s;
    }
    return true;
}

}  // namespace tl
