#include "tl/repvar.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include <Eigen/Dense>
#include <json.hpp>

#include "tl/parallel.hpp"

namespace tl {

namespace {

constexpr double pi = std::numbers::pi;

template <class T>
struct M2 {
    T a, b, c, d;
};

template <class T>
M2<T> operator*(const M2<T>& x, const M2<T>& y)
{
    return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d, x.c * y.a + x.d * y.c, x.c * y.b + x.d * y.d};
}

template <class T>
M2<T> operator+(const M2<T>& x, const M2<T>& y)
{
    return {x.a + y.a, x.b + y.b, x.c + y.c, x.d + y.d};
}

template <class T>
M2<T> identity_like(const T& p)
{
    return {constant_like(p, 1), constant_like(p, 0), constant_like(p, 0), constant_like(p, 1)};
}

template <class T>
M2<T> zero_like(const T& p)
{
    const T z = constant_like(p, 0);
    return {z, z, z, z};
}

template <class T>
struct GenJet {
    M2<T> v, inv;
    std::vector<std::pair<int, M2<T>>> dv, dinv;
};

template <class T>
std::vector<GenJet<T>> generator_jets(const std::vector<T>& x, int rank)
{
    const T zero = constant_like(x[0], 0), one = constant_like(x[0], 1);
    std::vector<GenJet<T>> g(static_cast<std::size_t>(rank));
    {
        const T& s = x[0];
        const T si = one / s;
        const T si2 = si * si;
        g[0].v = {s, one, zero, si};
        g[0].inv = {si, -one, zero, s};
        g[0].dv = {{0, {one, zero, zero, -si2}}};
        g[0].dinv = {{0, {-si2, zero, zero, one}}};
    }
    if (rank >= 2) {
        const T& t = x[1];
        const T& u = x[2];
        const T ti = one / t;
        const T ti2 = ti * ti;
        g[1].v = {t, zero, u, ti};
        g[1].inv = {ti, zero, -u, t};
        g[1].dv = {{1, {one, zero, zero, -ti2}}, {2, {zero, zero, one, zero}}};
        g[1].dinv = {{1, {-ti2, zero, zero, one}}, {2, {zero, zero, -one, zero}}};
    }
    for (int k = 2; k < rank; ++k) {
        const int o = 3 + 4 * (k - 2);
        const auto& p = x[static_cast<std::size_t>(o)];
        const auto& q = x[static_cast<std::size_t>(o + 1)];
        const auto& r = x[static_cast<std::size_t>(o + 2)];
        const auto& w = x[static_cast<std::size_t>(o + 3)];
        auto& j = g[static_cast<std::size_t>(k)];
        j.v = {p, q, r, w};
        j.inv = {w, -q, -r, p};
        j.dv = {{o, {one, zero, zero, zero}},
                {o + 1, {zero, one, zero, zero}},
                {o + 2, {zero, zero, one, zero}},
                {o + 3, {zero, zero, zero, one}}};
        j.dinv = {{o, {zero, zero, zero, one}},
                  {o + 1, {zero, -one, zero, zero}},
                  {o + 2, {zero, zero, -one, zero}},
                  {o + 3, {one, zero, zero, zero}}};
    }
    return g;
}

// Product along a word together with its partial derivatives.
template <class T>
void word_jet(const std::vector<GenJet<T>>& g, const Word& w, int n, bool want_jac, M2<T>& val,
              std::vector<M2<T>>& der, const T& proto)
{
    val = identity_like(proto);
    if (want_jac) der.assign(static_cast<std::size_t>(n), zero_like(proto));
    for (auto l : w) {
        const auto& j = g[static_cast<std::size_t>(l.gen)];
        const M2<T>& m = l.exp > 0 ? j.v : j.inv;
        if (want_jac) {
            for (auto& d : der) d = d * m;
            for (const auto& [k, dm] : (l.exp > 0 ? j.dv : j.dinv))
                der[static_cast<std::size_t>(k)] = der[static_cast<std::size_t>(k)] + val * dm;
        }
        val = val * m;
    }
}

template <class T>
void assemble(const Presentation& p, int n, const std::vector<T>& x, const T& c, const std::vector<int>& signs,
              bool want_jac, bool linear_trace, std::vector<T>& f, std::vector<std::vector<T>>& jac)
{
    const T& proto = x[0];
    const auto g = generator_jets(x, p.rank);
    f.clear();
    jac.clear();
    M2<T> val = identity_like(proto);
    std::vector<M2<T>> der;
    auto push_row = [&](T value, const std::vector<T>& row) {
        f.push_back(std::move(value));
        if (want_jac) jac.push_back(row);
    };
    std::vector<T> row(want_jac ? static_cast<std::size_t>(n) : 0, constant_like(proto, 0));
    for (std::size_t r = 0; r < p.relators.size(); ++r) {
        word_jet(g, p.relators[r], n, want_jac, val, der, proto);
        const T sgn = constant_like(proto, signs[r]);
        auto entry = [&](int e) {
            for (std::size_t k = 0; k < row.size(); ++k) {
                const auto& d = der[k];
                row[k] = e == 0 ? d.a : e == 1 ? d.b : e == 2 ? d.c : d.d;
            }
        };
        entry(0);
        push_row(val.a - sgn, row);
        entry(1);
        push_row(val.b, row);
        entry(2);
        push_row(val.c, row);
        entry(3);
        push_row(val.d - sgn, row);
    }
    for (int k = 2; k < p.rank; ++k) {
        const int o = 3 + 4 * (k - 2);
        const auto& m = g[static_cast<std::size_t>(k)].v;
        if (want_jac) {
            std::fill(row.begin(), row.end(), constant_like(proto, 0));
            row[static_cast<std::size_t>(o)] = m.d;
            row[static_cast<std::size_t>(o + 1)] = -m.c;
            row[static_cast<std::size_t>(o + 2)] = -m.b;
            row[static_cast<std::size_t>(o + 3)] = m.a;
        }
        push_row(m.a * m.d - m.b * m.c - constant_like(proto, 1), row);
    }
    word_jet(g, p.meridian, n, want_jac, val, der, proto);
    const T tr = val.a + val.d;
    if (linear_trace) {
        if (want_jac)
            for (std::size_t k = 0; k < row.size(); ++k) row[k] = der[k].a + der[k].d;
        push_row(tr - c, row);
        return;
    }
    if (want_jac) {
        const T two_tr = constant_like(proto, 2) * tr;
        for (std::size_t k = 0; k < row.size(); ++k) row[k] = two_tr * (der[k].a + der[k].d);
    }
    push_row(tr * tr - c, row);
}

CMat2 to_eigen(const M2<cd>& m)
{
    CMat2 r;
    r << m.a, m.b, m.c, m.d;
    return r;
}

double inf_norm(const Eigen::VectorXcd& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

double max_abs(const std::vector<cd>& x)
{
    double m = 0;
    for (auto v : x) m = std::max(m, std::abs(v));
    return m;
}

double max_abs(const std::vector<BigComplex>& v)
{
    double m = 0;
    for (const auto& e : v) m = std::max(m, magnitude(e));
    return m;
}

double distance(const std::vector<cd>& a, const std::vector<cd>& b)
{
    double m = 0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

cd holonomy_constant(cd z) { return z + 2.0 + 1.0 / z; }

double newton_tol(const std::vector<cd>& x)
{
    const double s = 1.0 + max_abs(x);
    return 1e-11 * s * s;
}

// Uniform double in [0, 1) from raw engine bits, independent of the library's distributions.
double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

enum class Outcome { converged, failed, singular };

Outcome newton(const RepSystem& sys, std::vector<cd>& x, cd z, const std::vector<int>& signs, int iters,
               bool check_condition)
{
    Eigen::VectorXcd f;
    Eigen::MatrixXcd jac;
    double prev = std::numeric_limits<double>::infinity();
    for (int it = 0; it < iters; ++it) {
        sys.residual_jacobian(x, z, signs, f, jac);
        const double r = inf_norm(f);
        if (!std::isfinite(r)) return Outcome::failed;
        if (r < newton_tol(x)) return Outcome::converged;
        if (check_condition && it == 0) {
            Eigen::JacobiSVD<Eigen::MatrixXcd> svd(jac);
            const auto& sv = svd.singularValues();
            if (sv(sv.size() - 1) < 1e-12 * sv(0)) return Outcome::singular;
        }
        if (it > 1 && r > prev) return Outcome::failed;
        prev = r;
        const Eigen::VectorXcd dx = jac.completeOrthogonalDecomposition().solve(-f);
        for (std::size_t i = 0; i < x.size(); ++i) x[i] += dx(static_cast<Eigen::Index>(i));
    }
    sys.residual_jacobian(x, z, signs, f, jac);
    return inf_norm(f) < newton_tol(x) ? Outcome::converged : Outcome::failed;
}

struct SegmentStats {
    int halvings = 0;
    int singular = 0;
};

// Follow a solution from z(0) to z(1) along
//   z(tau) = r(tau) exp(i (theta_a + tau d)) (1 + bulge * 0.5 d sin(pi tau)),
// the bulge keeping the path off the unit circle between grid points.
std::optional<std::vector<cd>> track_segment(const RepSystem& sys, std::vector<cd> x, const std::vector<int>& signs,
                                             double theta_a, double theta_b, double ra, double rb, bool bulge,
                                             cd z_end, const TrackingConfig& cfg, SegmentStats& stats,
                                             int iters = 8, bool check_condition = true)
{
    const double d = theta_b - theta_a;
    auto z_at = [&](double tau) -> cd {
        if (tau >= 1.0) return z_end;
        const double r = ra + (rb - ra) * tau;
        const double b = bulge ? 1.0 + 0.5 * d * std::sin(pi * tau) : 1.0;
        return std::polar(r * b, theta_a + tau * d);
    };
    const double h0 = 0.25;
    const double h_min = h0 / std::ldexp(1.0, cfg.max_halvings);
    double tau = 0.0, h = h0;
    while (tau < 1.0) {
        h = std::min(h, 1.0 - tau);
        const double next = (1.0 - tau - h) < 1e-14 ? 1.0 : tau + h;
        std::vector<cd> y = x;
        const Outcome o = newton(sys, y, z_at(next), signs, iters, check_condition);
        if (o == Outcome::converged && distance(y, x) < 0.1 * (1.0 + max_abs(x))) {
            x = std::move(y);
            tau = next;
            h *= 1.5;
        } else {
            if (o == Outcome::singular) ++stats.singular;
            ++stats.halvings;
            h /= 2;
            if (h < h_min) return std::nullopt;
        }
    }
    return x;
}

cd unit_root(std::int64_t num, std::int64_t den) { return std::polar(1.0, 2 * pi * static_cast<double>(num) / static_cast<double>(den)); }

BigComplex big_unit_root(std::int64_t num, std::int64_t den, mpfr_prec_t bits, double scale)
{
    // exp(i * scale * pi * num / den)
    BigFloat ang = BigFloat::pi(bits);
    ang *= BigFloat(scale * static_cast<double>(num), bits);
    ang /= BigFloat(static_cast<double>(den), bits);
    BigComplex r(bits);
    mpfr_sin_cos(r.im.get(), r.re.get(), ang.get(), MPFR_RNDN);
    return r;
}

BigComplex big_holonomy_constant(const RepPoint& r, mpfr_prec_t bits)
{
    BigComplex z = r.target_den > 0 ? big_unit_root(r.target_num, r.target_den, bits, 2.0) : BigComplex(r.target, bits);
    const BigComplex one({1.0, 0.0}, bits), two({2.0, 0.0}, bits);
    return z + two + one / z;
}

// The root of tr^2 = z + 2 + 1/z nearest to the current trace.
BigComplex big_trace_target(const RepPoint& r, cd trace_now, mpfr_prec_t bits)
{
    BigComplex w = r.target_den > 0 ? big_unit_root(r.target_num, r.target_den, bits, 1.0)
                                    : BigComplex(std::sqrt(r.target), bits);
    const BigComplex one({1.0, 0.0}, bits);
    BigComplex t = w + one / w;
    if (std::abs(t.to_complex() + trace_now) < std::abs(t.to_complex() - trace_now)) t = -t;
    return t;
}

// Solve a small dense complex system by Gaussian elimination with partial pivoting.
std::vector<BigComplex> big_solve(std::vector<std::vector<BigComplex>> a, std::vector<BigComplex> b)
{
    const std::size_t n = b.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        BigFloat best = norm(a[col][col]);
        for (std::size_t r = col + 1; r < n; ++r) {
            BigFloat v = norm(a[r][col]);
            if (best < v) {
                best = v;
                piv = r;
            }
        }
        if (best.is_zero()) throw PolishError("singular normal equations during polishing");
        std::swap(a[col], a[piv]);
        std::swap(b[col], b[piv]);
        for (std::size_t r = col + 1; r < n; ++r) {
            const BigComplex m = a[r][col] / a[col][col];
            for (std::size_t c = col; c < n; ++c) a[r][c] -= m * a[col][c];
            b[r] -= m * b[col];
        }
    }
    std::vector<BigComplex> x(n, BigComplex(b[0].bits()));
    for (std::size_t i = n; i-- > 0;) {
        BigComplex s = b[i];
        for (std::size_t c = i + 1; c < n; ++c) s -= a[i][c] * x[c];
        x[i] = s / a[i][i];
    }
    return x;
}

M2<BigComplex> to_m2(const BigMat2& m) { return {m[0], m[1], m[2], m[3]}; }
BigMat2 from_m2(const M2<BigComplex>& m) { return {m.a, m.b, m.c, m.d}; }

double commutator_residual(const RepSystem& sys, const std::vector<BigMat2>& g)
{
    const auto& p = sys.presentation();
    const BigMat2 c = big_word(g, concat(concat(p.meridian, p.longitude), concat(inverse(p.meridian), inverse(p.longitude))));
    double best = std::numeric_limits<double>::infinity();
    for (double s : {1.0, -1.0}) {
        const BigComplex e({s, 0.0}, c[0].bits());
        best = std::min(best, std::max({magnitude(c[0] - e), magnitude(c[1]), magnitude(c[2]), magnitude(c[3] - e)}));
    }
    return best;
}

// Points on components of positive dimension in the fiber have a rank deficient Jacobian.
bool full_rank(const RepSystem& sys, const std::vector<cd>& x, cd z, const std::vector<int>& signs)
{
    Eigen::VectorXcd f;
    Eigen::MatrixXcd jac;
    sys.residual_jacobian(x, z, signs, f, jac);
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(jac);
    const auto& sv = svd.singularValues();
    return sv(sv.size() - 1) > 1e-8 * sv(0);
}

// All images of a point under sign changes of the generators.
std::vector<std::pair<std::vector<cd>, std::vector<int>>> variants(const RepSystem& sys, const std::vector<cd>& x,
                                                                   const std::vector<int>& signs)
{
    std::vector<std::pair<std::vector<cd>, std::vector<int>>> out{{x, signs}};
    for (int g = 0; g < sys.presentation().rank; ++g) {
        const std::size_t n = out.size();
        for (std::size_t i = 0; i < n; ++i) {
            auto v = out[i];
            sys.flip_generator(g, v.first, v.second);
            out.push_back(std::move(v));
        }
    }
    return out;
}

}  // namespace

void TrackingConfig::validate() const
{
    if (n_samples < 4 || (n_samples & (n_samples - 1)) != 0)
        throw InputError("n_samples must be a power of 2 and at least 4");
    if (polish_bits < 128 || polish_bits > 1024) throw InputError("polish_bits must lie in [128, 1024]");
    if (seed_attempts < 1) throw InputError("seed_attempts must be positive");
    if (!(dedup_tol > 0)) throw InputError("dedup_tol must be positive");
    if (max_halvings < 1) throw InputError("max_halvings must be positive");
}

RepSystem::RepSystem(Presentation p, HomologyData h) : p_(std::move(p)), h_(std::move(h))
{
    if (p_.rank >= 2) {
        unknowns_ = 3 + 4 * (p_.rank - 2);
        equations_ = 4 * static_cast<int>(p_.relators.size()) + (p_.rank - 2) + 1;
    }
}

std::vector<std::vector<int>> RepSystem::sign_systems() const
{
    const std::size_t m = p_.relators.size();
    std::vector<std::vector<int>> out;
    for (std::size_t mask = 0; mask < (std::size_t{1} << m); ++mask) {
        std::vector<int> s(m);
        for (std::size_t i = 0; i < m; ++i) s[i] = (mask >> i) & 1u ? -1 : 1;
        out.push_back(std::move(s));
    }
    return out;
}

std::vector<CMat2> RepSystem::generator_matrices(const std::vector<cd>& x) const
{
    const auto g = generator_jets(x, p_.rank);
    std::vector<CMat2> out;
    for (const auto& j : g) out.push_back(to_eigen(j.v));
    return out;
}

std::vector<CMat2> RepSystem::abelian_matrices(cd w) const
{
    std::vector<CMat2> out;
    for (int g = 0; g < p_.rank; ++g) {
        const cd e = std::pow(w, static_cast<double>(h_.free_images[static_cast<std::size_t>(g)]));
        CMat2 m;
        m << e, 0.0, 0.0, 1.0 / e;
        out.push_back(m);
    }
    return out;
}

CMat2 RepSystem::word_matrix(const std::vector<CMat2>& gens, const Word& w) const
{
    CMat2 acc = CMat2::Identity();
    for (auto l : w) {
        const CMat2& m = gens[static_cast<std::size_t>(l.gen)];
        if (l.exp > 0) {
            acc = acc * m;
        } else {
            CMat2 inv;
            inv << m(1, 1), -m(0, 1), -m(1, 0), m(0, 0);
            acc = acc * inv;
        }
    }
    return acc;
}

Eigen::VectorXcd RepSystem::residual(const std::vector<cd>& x, cd z, const std::vector<int>& signs) const
{
    std::vector<cd> f;
    std::vector<std::vector<cd>> jac;
    assemble<cd>(p_, unknowns_, x, holonomy_constant(z), signs, false, false, f, jac);
    return Eigen::Map<Eigen::VectorXcd>(f.data(), static_cast<Eigen::Index>(f.size()));
}

void RepSystem::residual_jacobian(const std::vector<cd>& x, cd z, const std::vector<int>& signs,
                                  Eigen::VectorXcd& f, Eigen::MatrixXcd& jac) const
{
    std::vector<cd> fv;
    std::vector<std::vector<cd>> jv;
    assemble<cd>(p_, unknowns_, x, holonomy_constant(z), signs, true, false, fv, jv);
    f = Eigen::Map<Eigen::VectorXcd>(fv.data(), static_cast<Eigen::Index>(fv.size()));
    jac.resize(static_cast<Eigen::Index>(jv.size()), unknowns_);
    for (std::size_t r = 0; r < jv.size(); ++r)
        for (std::size_t c = 0; c < jv[r].size(); ++c)
            jac(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = jv[r][c];
}

std::vector<BigComplex> RepSystem::residual(const std::vector<BigComplex>& x, const BigComplex& c,
                                            const std::vector<int>& signs) const
{
    std::vector<BigComplex> f;
    std::vector<std::vector<BigComplex>> jac;
    assemble<BigComplex>(p_, unknowns_, x, c, signs, false, true, f, jac);
    return f;
}

std::vector<std::vector<BigComplex>> RepSystem::jacobian(const std::vector<BigComplex>& x, const BigComplex& c,
                                                         const std::vector<int>& signs) const
{
    std::vector<BigComplex> f;
    std::vector<std::vector<BigComplex>> jac;
    assemble<BigComplex>(p_, unknowns_, x, c, signs, true, true, f, jac);
    return jac;
}

void RepSystem::flip_generator(int g, std::vector<cd>& x, std::vector<int>& signs) const
{
    // rho(g) -> -rho(g); for the first generator conjugate by diag(1, -1) to restore the normal form
    if (g == 0) {
        x[0] = -x[0];
        x[2] = -x[2];
        for (int k = 2; k < p_.rank; ++k) {
            const std::size_t o = static_cast<std::size_t>(3 + 4 * (k - 2));
            x[o + 1] = -x[o + 1];
            x[o + 2] = -x[o + 2];
        }
    } else if (g == 1) {
        x[1] = -x[1];
        x[2] = -x[2];
    } else {
        const std::size_t o = static_cast<std::size_t>(3 + 4 * (g - 2));
        for (std::size_t i = 0; i < 4; ++i) x[o + i] = -x[o + i];
    }
    for (std::size_t r = 0; r < p_.relators.size(); ++r) {
        int e = 0;
        for (auto l : p_.relators[r])
            if (l.gen == g) e += l.exp;
        if (e % 2 != 0) signs[r] = -signs[r];
    }
}

void RepSystem::canonicalize(std::vector<cd>& x, std::vector<int>& signs) const
{
    auto negative = [](cd v) { return v.real() < 0 || (v.real() == 0 && v.imag() < 0); };
    if (negative(x[0])) flip_generator(0, x, signs);
    if (negative(x[1])) flip_generator(1, x, signs);
    for (int k = 2; k < p_.rank; ++k) {
        const std::size_t o = static_cast<std::size_t>(3 + 4 * (k - 2));
        double scale = 0;
        for (std::size_t i = 0; i < 4; ++i) scale = std::max(scale, std::abs(x[o + i]));
        for (std::size_t i = 0; i < 4; ++i)
            if (std::abs(x[o + i]) > 1e-8 * scale) {
                if (negative(x[o + i])) flip_generator(k, x, signs);
                break;
            }
    }
}

RepPoint RepSystem::make_point(std::vector<cd> x, std::vector<int> signs, cd z) const
{
    RepPoint r;
    r.params = std::move(x);
    r.signs = std::move(signs);
    r.matrices = generator_matrices(r.params);
    r.residual = inf_norm(residual(r.params, z, r.signs));
    r.target = z;
    r.hmu = holonomy_mu(word_matrix(r.matrices, p_.meridian), z);
    return r;
}

RepPoint RepSystem::abelian_point(std::int64_t phase_num, std::int64_t phase_den) const
{
    RepPoint r;
    r.abelian = true;
    r.phase_num = phase_num;
    r.phase_den = phase_den;
    const cd w = std::polar(1.0, pi * static_cast<double>(phase_num) / static_cast<double>(phase_den));
    r.params = {w};
    r.matrices = abelian_matrices(w);
    r.signs.assign(p_.relators.size(), 1);
    r.target_num = phase_num * h_.k;
    r.target_den = phase_den;
    r.target = unit_root(r.target_num, r.target_den);
    r.hmu = holonomy_mu(word_matrix(r.matrices, p_.meridian), r.target);
    r.residual = std::abs(r.hmu - r.target);
    return r;
}

cd holonomy_mu(const CMat2& mu, std::optional<cd> reference)
{
    const cd tr = mu.trace();
    const cd disc = std::sqrt(tr * tr - 4.0);
    const bool central = (mu - CMat2::Identity()).cwiseAbs().maxCoeff() < 1e-12 ||
                         (mu + CMat2::Identity()).cwiseAbs().maxCoeff() < 1e-12;
    if (central) return 1.0;
    if (std::abs(disc) < 1e-9) return 1.0;
    cd e = (tr + disc) / 2.0;
    if (std::abs(e) < 1.0) e = 1.0 / e;
    const cd h1 = e * e, h2 = 1.0 / h1;
    if (reference) return std::abs(h1 - *reference) <= std::abs(h2 - *reference) ? h1 : h2;
    return h1;
}

cd holonomy_mu(const RepSystem& sys, const RepPoint& r, std::optional<cd> reference)
{
    return holonomy_mu(sys.word_matrix(r.matrices, sys.presentation().meridian), reference);
}

SeedResult seed_fiber(const RepSystem& sys, cd z0, const TrackingConfig& cfg)
{
    SeedResult out;
    out.frame.target = z0;
    out.frame.angle_index = -1;
    const auto& h = sys.homology();
    const double x0 = std::arg(z0) / (2 * pi);
    // abelian points: w = exp(i pi (x0 + m) / k), m = 0..k-1, held in closed form
    for (std::int64_t m = 0; m < h.k; ++m) {
        RepPoint a;
        a.abelian = true;
        const cd w = std::polar(std::pow(std::abs(z0), 1.0 / (2.0 * static_cast<double>(h.k))),
                                pi * (x0 + static_cast<double>(m)) / static_cast<double>(h.k));
        a.params = {w};
        a.phase_num = m;
        a.phase_den = h.k;
        a.matrices = sys.abelian_matrices(w);
        a.signs.assign(sys.presentation().relators.size(), 1);
        a.target = z0;
        a.hmu = holonomy_mu(sys.word_matrix(a.matrices, sys.presentation().meridian), z0);
        a.residual = std::abs(a.hmu - z0);
        a.branch_id = static_cast<int>(out.frame.points.size());
        out.frame.points.push_back(std::move(a));
    }
    if (!sys.trackable()) {
        out.warning_no_nonabelian = false;
        return out;
    }

    std::mt19937_64 rng(cfg.rng_seed);
    const double lo = std::log(0.2), hi = std::log(5.0);
    std::vector<RepPoint> found;
    for (const auto& signs : sys.sign_systems()) {
        for (int a = 0; a < cfg.seed_attempts; ++a) {
            std::vector<cd> x(static_cast<std::size_t>(sys.unknowns()));
            for (auto& v : x) {
                const double r = std::exp(lo + (hi - lo) * uniform01(rng));
                v = std::polar(r, 2 * pi * uniform01(rng));
            }
            if (newton(sys, x, z0, signs, 40, false) != Outcome::converged) continue;
            if (max_abs(x) > 1e6 || std::abs(x[0]) < 1e-6 || std::abs(x[1]) < 1e-6) continue;
            if (!full_rank(sys, x, z0, signs)) {
                ++out.rank_deficient;
                continue;
            }
            std::vector<int> s = signs;
            sys.canonicalize(x, s);
            const bool dup = std::any_of(found.begin(), found.end(), [&](const RepPoint& p) {
                return distance(p.params, x) < cfg.dedup_tol * (1.0 + max_abs(x));
            });
            if (!dup) found.push_back(sys.make_point(std::move(x), std::move(s), z0));
        }
    }
    // order by parameters so branch numbering does not depend on discovery order
    std::sort(found.begin(), found.end(), [](const RepPoint& a, const RepPoint& b) {
        for (std::size_t i = 0; i < a.params.size(); ++i) {
            if (a.params[i].real() != b.params[i].real()) return a.params[i].real() < b.params[i].real();
            if (a.params[i].imag() != b.params[i].imag()) return a.params[i].imag() < b.params[i].imag();
        }
        return false;
    });
    out.nonabelian = static_cast<int>(found.size());
    out.warning_no_nonabelian = found.empty();
    for (auto& p : found) {
        p.branch_id = static_cast<int>(out.frame.points.size());
        out.frame.points.push_back(std::move(p));
    }
    return out;
}

TrackResult track_circle(const RepSystem& sys, const FiberFrame& start, const TrackingConfig& cfg)
{
    cfg.validate();
    const int N = cfg.n_samples;
    TrackResult out;
    const double theta0 = std::arg(start.target);
    const double r0 = std::abs(start.target);
    int j0 = static_cast<int>(std::lround(theta0 * N / (2 * pi)));
    j0 = ((j0 % N) + N) % N;
    // z = 1 and z = -1 are branch points of the trace condition; the main path steps over them
    auto special = [N](int j) { return j % (N / 2) == 0; };
    if (special(j0)) j0 += 1;
    out.start_index = j0;
    const std::int64_t k = sys.homology().k;

    struct Branch {
        RepPoint origin;
        bool on_grid = false;  // origin already lies over z_j0
        std::vector<std::optional<RepPoint>> path;
        std::optional<std::vector<cd>> returned;
        std::vector<TrackingEvent> events;
    };
    std::vector<Branch> branches;
    for (const auto& p : start.points) branches.push_back({p, false, {}, {}, {}});

    auto run = [&](Branch& br) {
        br.path.assign(static_cast<std::size_t>(N), std::nullopt);
        const RepPoint& p0 = br.origin;
        const int bid = p0.branch_id;
        if (p0.abelian) {
            // closed form: phase x = (j0 + s) / N + m over the loop, period k loops
            for (int s = 0; s < N; ++s) {
                const int j = (j0 + s) % N;
                auto pt = sys.abelian_point(static_cast<std::int64_t>(j0 + s) + p0.phase_num * N,
                                            static_cast<std::int64_t>(N) * k);
                pt.branch_id = bid;
                pt.angle_index = j;
                br.path[static_cast<std::size_t>(j)] = std::move(pt);
            }
            return;
        }
        auto record = [&](const std::vector<cd>& x, int j) {
            auto pt = sys.make_point(x, p0.signs, unit_root(j, N));
            pt.target_num = j;
            pt.target_den = N;
            pt.branch_id = bid;
            pt.angle_index = j;
            br.path[static_cast<std::size_t>(j)] = std::move(pt);
        };
        auto note = [&](int j, const SegmentStats& st) {
            if (st.singular) br.events.push_back({bid, j, "singular", st.singular});
            if (st.halvings) br.events.push_back({bid, j, "halving", st.halvings});
        };
        SegmentStats st;
        std::optional<std::vector<cd>> x = p0.params;
        if (!br.on_grid) {
            const double theta_j0 = 2 * pi * j0 / N;
            double tb = theta_j0;
            while (tb - theta0 > pi) tb -= 2 * pi;
            while (theta0 - tb > pi) tb += 2 * pi;
            x = track_segment(sys, p0.params, p0.signs, theta0, tb, r0, 1.0, false, unit_root(j0, N), cfg, st);
            if (!x) {
                br.events.push_back({bid, j0, "dead", 0});
                return;
            }
        }
        int s = 0;
        while (s < N) {
            const int j = (j0 + s) % N;
            record(*x, j);
            int step = 1;
            if (special((j + 1) % N)) {
                st = {};
                const double a = 2 * pi * (j0 + s) / N;
                const auto landed = track_segment(sys, *x, p0.signs, a, a + 2 * pi / N, 1.0, 1.0, false,
                                                  unit_root((j + 1) % N, N), cfg, st, 60, false);
                note((j + 1) % N, st);
                if (landed)
                    record(*landed, (j + 1) % N);
                else
                    br.events.push_back({bid, (j + 1) % N, "landing_failed", 0});
                step = 2;
            }
            st = {};
            const double a = 2 * pi * (j0 + s) / N, c = 2 * pi * (j0 + s + step) / N;
            x = track_segment(sys, *x, p0.signs, a, c, 1.0, 1.0, true, unit_root((j0 + s + step) % N, N), cfg, st);
            note(j, st);
            if (!x) {
                br.events.push_back({bid, (j + step) % N, "dead", 0});
                return;
            }
            s += step;
        }
        br.returned = std::move(x);
    };

    // Returned points, up to sign variants, are matched against the points over z_j0.
    // Unmatched ones are solutions the seeding missed and are traced as new branches.
    auto match = [&](const Branch& br) -> std::pair<int, double> {
        const auto vars = variants(sys, *br.returned, br.origin.signs);
        double best = std::numeric_limits<double>::infinity();
        int arg = -1;
        for (std::size_t c = 0; c < branches.size(); ++c) {
            const auto& path = branches[c].path;
            if (path.empty() || !path[static_cast<std::size_t>(j0)] || branches[c].origin.abelian) continue;
            const auto& q = *path[static_cast<std::size_t>(j0)];
            for (const auto& [vx, vs] : vars) {
                if (vs != q.signs) continue;
                const double d = distance(q.params, vx);
                if (d < best) {
                    best = d;
                    arg = static_cast<int>(c);
                }
            }
        }
        return {arg, best};
    };
    auto close_enough = [&](const Branch& br, double d) { return d < cfg.dedup_tol * (1.0 + max_abs(*br.returned)); };

    const unsigned workers = cfg.workers ? cfg.workers : default_workers();
    std::size_t done = 0;
    for (int round = 0; round < 8 && done < branches.size(); ++round) {
        const std::size_t lo = done, hi = branches.size();
        parallel_for(hi - lo, workers, [&](std::size_t i) { run(branches[lo + i]); });
        done = hi;
        for (std::size_t b = lo; b < hi; ++b) {
            if (branches[b].origin.abelian || !branches[b].returned) continue;
            const auto [arg, d] = match(branches[b]);
            if (arg >= 0 && close_enough(branches[b], d)) continue;
            std::vector<cd> x = *branches[b].returned;
            std::vector<int> sg = branches[b].origin.signs;
            sys.canonicalize(x, sg);
            bool pending = false;
            for (std::size_t c = hi; c < branches.size(); ++c)
                if (branches[c].origin.signs == sg && distance(branches[c].origin.params, x) < cfg.dedup_tol * (1.0 + max_abs(x)))
                    pending = true;
            if (pending) continue;
            RepPoint p = sys.make_point(std::move(x), std::move(sg), unit_root(j0, N));
            p.branch_id = static_cast<int>(branches.size());
            p.angle_index = j0;
            branches.push_back({std::move(p), true, {}, {}, {}});
            ++out.added_branches;
        }
    }

    const std::size_t nb = done;
    out.monodromy.assign(nb, -1);
    std::vector<int> hits(nb, 0);
    for (std::size_t b = 0; b < nb; ++b) {
        const RepPoint& p0 = branches[b].origin;
        if (p0.abelian) {
            const auto m = (p0.phase_num + 1) % k;
            out.monodromy[b] = static_cast<int>(m);
            ++hits[static_cast<std::size_t>(m)];
            continue;
        }
        if (!branches[b].returned) continue;
        const auto [arg, d] = match(branches[b]);
        if (arg >= 0 && arg < static_cast<int>(nb) && close_enough(branches[b], d)) {
            out.monodromy[b] = arg;
            ++hits[static_cast<std::size_t>(arg)];
        }
    }
    for (std::size_t b = 0; b < nb; ++b)
        if (branches[b].returned || branches[b].origin.abelian)
            if (out.monodromy[b] < 0 || hits[b] != 1) out.monodromy_bijective = false;

    int nonabelian = 0;
    std::size_t live = 0;
    for (std::size_t b = 0; b < nb; ++b)
        if (!branches[b].origin.abelian) {
            ++nonabelian;
            if (branches[b].path[static_cast<std::size_t>(j0)]) ++live;
        }
    if (nonabelian > 0 && live == 0)
        throw TrackingError("all " + std::to_string(nonabelian) + " non-abelian branches died before reaching the circle");

    out.frames.resize(static_cast<std::size_t>(N));
    for (int j = 0; j < N; ++j) {
        auto& fr = out.frames[static_cast<std::size_t>(j)];
        fr.angle_index = j;
        fr.target = unit_root(j, N);
        for (std::size_t b = 0; b < nb; ++b) {
            auto& q = branches[b].path[static_cast<std::size_t>(j)];
            if (q)
                fr.points.push_back(std::move(*q));
            else
                fr.dead_branches.push_back(branches[b].origin.branch_id);
        }
    }
    for (std::size_t b = 0; b < nb; ++b) out.events.insert(out.events.end(), branches[b].events.begin(), branches[b].events.end());
    return out;
}

RepPoint polish(const RepSystem& sys, const RepPoint& r, int bits)
{
    if (!(r.residual < 1e-6)) throw PolishError("point residual " + std::to_string(r.residual) + " too large to polish");
    const mpfr_prec_t work = bits + 64;
    const double target = std::ldexp(1.0, 8 - bits);
    RepPoint out = r;
    out.precision_bits = bits;

    if (r.abelian) {
        out.precise = {big_unit_root(r.phase_num, r.phase_den, work, 1.0)};
        const auto g = precise_matrices(sys, out);
        const BigMat2 mu = big_word(g, sys.presentation().meridian);
        const BigComplex tr = big_trace(mu);
        out.residual = magnitude(tr * tr - big_holonomy_constant(out, work));
        out.commutator_residual = commutator_residual(sys, g);
        return out;
    }

    std::vector<BigComplex> x;
    if (!r.precise.empty())
        x = r.precise;
    else
        for (auto v : r.params) x.emplace_back(v, work);
    for (auto& v : x) {
        mpfr_prec_round(v.re.get(), work, MPFR_RNDN);
        mpfr_prec_round(v.im.get(), work, MPFR_RNDN);
    }
    const BigComplex c = big_trace_target(r, sys.word_matrix(r.matrices, sys.presentation().meridian).trace(), work);
    std::vector<double> history;
    const std::size_t n = x.size();
    for (int it = 0; it < 200; ++it) {
        const auto f = sys.residual(x, c, r.signs);
        const double res = max_abs(f);
        history.push_back(res);
        if (res < target) break;
        if (history.size() > 5 && res >= history[history.size() - 6])
            throw PolishError("polishing diverged: residual not decreasing over 5 steps");
        const auto jac = sys.jacobian(x, c, r.signs);
        // normal equations J^H J dx = -J^H f
        std::vector<std::vector<BigComplex>> a(n, std::vector<BigComplex>(n, BigComplex(work)));
        std::vector<BigComplex> rhs(n, BigComplex(work));
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j)
                for (std::size_t e = 0; e < jac.size(); ++e) a[i][j] += conj(jac[e][i]) * jac[e][j];
            for (std::size_t e = 0; e < jac.size(); ++e) rhs[i] -= conj(jac[e][i]) * f[e];
        }
        const auto dx = big_solve(std::move(a), std::move(rhs));
        std::vector<BigComplex> y = x;
        for (std::size_t i = 0; i < n; ++i) y[i] += dx[i];
        // linear convergence signals a double root, where the doubled step is the better one
        if (history.size() > 1 && res > 0.1 * history[history.size() - 2]) {
            std::vector<BigComplex> y2 = x;
            for (std::size_t i = 0; i < n; ++i) y2[i] += dx[i] + dx[i];
            if (max_abs(sys.residual(y2, c, r.signs)) < max_abs(sys.residual(y, c, r.signs))) y = std::move(y2);
        }
        x = std::move(y);
    }
    out.residual = max_abs(sys.residual(x, c, r.signs));
    if (!(out.residual < target)) throw PolishError("polishing did not reach the target residual");
    out.precise = std::move(x);
    for (std::size_t i = 0; i < n; ++i) out.params[i] = out.precise[i].to_complex();
    out.matrices = sys.generator_matrices(out.params);
    out.commutator_residual = commutator_residual(sys, precise_matrices(sys, out));
    return out;
}

std::vector<BigMat2> precise_matrices(const RepSystem& sys, const RepPoint& r)
{
    if (r.precise.empty()) throw PolishError("point has not been polished");
    const auto& p = sys.presentation();
    std::vector<BigMat2> out;
    if (r.abelian) {
        const auto& w = r.precise[0];
        const BigComplex one({1.0, 0.0}, w.bits()), zero(w.bits());
        for (int g = 0; g < p.rank; ++g) {
            const auto f = sys.homology().free_images[static_cast<std::size_t>(g)];
            BigComplex e = one;
            const BigComplex base = f >= 0 ? w : one / w;
            for (std::int64_t i = 0; i < std::abs(f); ++i) e = e * base;
            out.push_back({e, zero, zero, one / e});
        }
        return out;
    }
    const auto jets = generator_jets(r.precise, p.rank);
    for (const auto& j : jets) out.push_back(from_m2(j.v));
    return out;
}

BigMat2 big_product(const BigMat2& x, const BigMat2& y) { return from_m2(to_m2(x) * to_m2(y)); }

BigComplex big_trace(const BigMat2& m) { return m[0] + m[3]; }

BigMat2 big_word(const std::vector<BigMat2>& gens, const Word& w)
{
    const BigComplex& proto = gens.at(0)[0];
    M2<BigComplex> acc = identity_like(proto);
    for (auto l : w) {
        const BigMat2& m = gens[static_cast<std::size_t>(l.gen)];
        if (l.exp > 0)
            acc = acc * to_m2(m);
        else
            acc = acc * M2<BigComplex>{m[3], -m[1], -m[2], m[0]};
    }
    return from_m2(acc);
}

void write_frames(const std::filesystem::path& path, const std::vector<FiberFrame>& frames,
                  const nlohmann::json& header)
{
    std::ofstream out(path);
    if (!out) throw InputError("cannot write " + path.string());
    if (!header.is_null()) out << header.dump() << '\n';
    for (const auto& fr : frames)
        for (const auto& p : fr.points) {
            nlohmann::json j;
            j["angle_index"] = p.angle_index;
            j["branch_id"] = p.branch_id;
            j["abelian"] = p.abelian;
            j["signs"] = p.signs;
            j["bits"] = p.precision_bits;
            if (p.abelian) j["phase"] = {p.phase_num, p.phase_den};
            j["target"] = {p.target_num, p.target_den};
            nlohmann::json params = nlohmann::json::array();
            if (!p.precise.empty())
                for (const auto& v : p.precise) params.push_back({v.re.to_hex(), v.im.to_hex()});
            else
                for (auto v : p.params) params.push_back({BigFloat(v.real(), 53).to_hex(), BigFloat(v.imag(), 53).to_hex()});
            j["params"] = std::move(params);
            out << j.dump() << '\n';
        }
}

std::vector<RepPoint> read_frames(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path.string());
    std::vector<RepPoint> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto j = nlohmann::json::parse(line);
        if (!j.contains("angle_index")) continue;  // header
        RepPoint p;
        p.angle_index = j.at("angle_index").get<int>();
        p.branch_id = j.at("branch_id").get<int>();
        p.abelian = j.at("abelian").get<bool>();
        p.signs = j.at("signs").get<std::vector<int>>();
        p.precision_bits = j.at("bits").get<int>();
        if (p.abelian) {
            p.phase_num = j.at("phase")[0].get<std::int64_t>();
            p.phase_den = j.at("phase")[1].get<std::int64_t>();
        }
        p.target_num = j.at("target")[0].get<std::int64_t>();
        p.target_den = j.at("target")[1].get<std::int64_t>();
        if (p.target_den > 0) p.target = unit_root(p.target_num, p.target_den);
        const mpfr_prec_t bits = std::max(53, p.precision_bits + 64);
        for (const auto& e : j.at("params")) {
            BigComplex v(BigFloat::from_hex(e[0].get<std::string>(), bits), BigFloat::from_hex(e[1].get<std::string>(), bits));
            p.params.push_back(v.to_complex());
            if (p.precision_bits > 53) p.precise.push_back(std::move(v));
        }
        out.push_back(std::move(p));
    }
    return out;
}

}  // namespace tl
