#include "tl/reality.hpp"

#include <cmath>

#include <Eigen/Dense>

namespace tl {

namespace {

CMat2 inverse2(const CMat2& m)
{
    CMat2 r;
    r << m(1, 1), -m(0, 1), -m(1, 0), m(0, 0);
    return r;
}

std::vector<Word> test_words(const Presentation& p)
{
    std::vector<Word> out;
    for (int g = 0; g < p.rank; ++g) out.push_back({{g, 1}});
    for (int g = 0; g < p.rank; ++g)
        for (int h = g + 1; h < p.rank; ++h) out.push_back({{g, 1}, {h, 1}});
    out.push_back(p.meridian);
    out.push_back(p.longitude);
    return out;
}

bool is_central(const CMat2& m, double tol)
{
    return (m - CMat2::Identity()).cwiseAbs().maxCoeff() < tol || (m + CMat2::Identity()).cwiseAbs().maxCoeff() < tol;
}

Mat2 rotation(double phi)
{
    Mat2 r;
    r << std::cos(phi), -std::sin(phi), std::sin(phi), std::cos(phi);
    return r;
}

std::optional<RealRep> circle_form(const std::vector<CMat2>& g)
{
    constexpr double tol = 1e-8;
    for (std::size_t i = 0; i < g.size(); ++i)
        for (std::size_t j = i + 1; j < g.size(); ++j)
            if ((g[i] * g[j] - g[j] * g[i]).cwiseAbs().maxCoeff() > tol) return std::nullopt;
    int pivot = -1;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const cd tr = g[i].trace();
        if (std::abs(tr.imag()) > tol || std::abs(tr.real()) > 2 + tol) return std::nullopt;
        if (pivot < 0 && !is_central(g[i], tol)) {
            if (std::abs(std::abs(tr.real()) - 2) < tol) return std::nullopt;  // parabolic
            pivot = static_cast<int>(i);
        }
    }
    RealRep out;
    out.form = RealForm::circle;
    if (pivot < 0) {
        for (const auto& m : g) out.matrices.push_back(m(0, 0).real() > 0 ? Mat2::Identity() : Mat2(-Mat2::Identity()));
        return out;
    }
    Eigen::ComplexEigenSolver<CMat2> es(g[static_cast<std::size_t>(pivot)]);
    const Eigen::Vector2cd v = es.eigenvectors().col(0);
    for (const auto& m : g) {
        const cd lambda = v.dot(m * v) / v.squaredNorm();
        if (std::abs(std::abs(lambda) - 1) > 1e-6) return std::nullopt;
        out.matrices.push_back(rotation(std::arg(lambda)));
    }
    return out;
}

// Intertwiner C with C g = e_g conj(g) C; returns C normalised to |det C| = 1 and singular value gap.
std::optional<std::pair<CMat2, double>> intertwiner(const std::vector<CMat2>& g, const std::vector<int>& eps)
{
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(4 * static_cast<Eigen::Index>(g.size()), 4);
    for (std::size_t n = 0; n < g.size(); ++n) {
        const CMat2 gc = g[n].conjugate();
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                const auto row = static_cast<Eigen::Index>(4 * n + 2 * i + j);
                for (int k = 0; k < 2; ++k) {
                    a(row, 2 * i + k) += g[n](k, j);
                    a(row, 2 * k + j) -= static_cast<double>(eps[n]) * gc(i, k);
                }
            }
    }
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(a, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double scale = std::max(1.0, sv(0));
    if (sv(3) > 1e-7 * scale) return std::nullopt;
    const Eigen::VectorXcd c = svd.matrixV().col(3);
    CMat2 m;
    m << c(0), c(1), c(2), c(3);
    const double d = std::abs(m.determinant());
    if (d < 1e-12) return std::nullopt;
    m /= std::sqrt(d);
    return std::make_pair(m, sv(2) / scale);
}

}  // namespace

const char* to_string(RealForm f)
{
    switch (f) {
    case RealForm::split: return "split";
    case RealForm::compact: return "compact";
    case RealForm::circle: return "circle";
    case RealForm::twisted: return "twisted";
    }
    return "?";
}

double reality_defect(const RepSystem& sys, const RepPoint& r)
{
    double worst = 0;
    const auto words = test_words(sys.presentation());
    if (!r.precise.empty()) {
        const auto g = precise_matrices(sys, r);
        for (const auto& w : words) {
            const BigComplex tr = big_trace(big_word(g, w));
            const BigComplex t2 = tr * tr;
            worst = std::max(worst, std::abs(t2.im.to_double()) / (1 + magnitude(t2)));
        }
        return worst;
    }
    for (const auto& w : words) {
        const cd tr = sys.word_matrix(r.matrices, w).trace();
        const cd t2 = tr * tr;
        worst = std::max(worst, std::abs(t2.imag()) / (1 + std::abs(t2)));
    }
    return worst;
}

bool is_real_character(const RepSystem& sys, const RepPoint& r, double tol) { return reality_defect(sys, r) < tol; }

RealRep real_form(const std::vector<CMat2>& g)
{
    if (auto c = circle_form(g)) return *c;
    // e_g = +1 for real traces, -1 for imaginary ones; traces near 0 admit both
    std::vector<std::vector<int>> choices(g.size());
    for (std::size_t n = 0; n < g.size(); ++n) {
        const cd tr = g[n].trace();
        if (std::abs(tr) < 1e-6)
            choices[n] = {1, -1};
        else
            choices[n] = {std::abs(tr.imag()) <= std::abs(tr.real()) ? 1 : -1};
    }
    std::vector<int> eps(g.size());
    std::optional<std::pair<CMat2, double>> best;
    std::vector<int> best_eps;
    auto search = [&](auto&& self, std::size_t n) -> void {
        if (n == g.size()) {
            auto c = intertwiner(g, eps);
            if (c && (!best || c->second > best->second)) {
                best = c;
                best_eps = eps;
            }
            return;
        }
        for (int e : choices[n]) {
            eps[n] = e;
            self(self, n + 1);
        }
    };
    search(search, 0);
    if (!best) throw RealityError("intertwiner space is not one dimensional");
    if (best->second < 1e-6) throw RealityError("intertwiner space is degenerate (gap " + std::to_string(best->second) + ")");
    const CMat2& c = best->first;
    const CMat2 cc = c * c.conjugate();
    const cd lambda = cc.trace() / 2.0;
    if ((cc - lambda * CMat2::Identity()).cwiseAbs().maxCoeff() > 1e-8 || std::abs(std::abs(lambda) - 1) > 1e-8 ||
        std::abs(lambda.imag()) > 1e-8)
        throw RealityError("C conj(C) is not a real scalar");
    RealRep out;
    if (lambda.real() < 0) {
        out.form = RealForm::compact;
        return out;
    }
    if (std::any_of(best_eps.begin(), best_eps.end(), [](int e) { return e < 0; })) {
        out.form = RealForm::twisted;
        return out;
    }
    // Q = w I + conj(w) C satisfies conj(Q) C = Q, so Q g Q^-1 is real
    CMat2 q;
    double qd = -1;
    for (cd w : {cd(1, 0), cd(0, 1), cd(1, 2), cd(2, -1)}) {
        const CMat2 cand = w * CMat2::Identity() + std::conj(w) * c;
        const double d = std::abs(cand.determinant());
        if (d > qd) {
            qd = d;
            q = cand;
        }
    }
    q /= std::sqrt(q.determinant());
    const CMat2 qi = inverse2(q);
    out.form = RealForm::split;
    for (const auto& m : g) {
        const CMat2 r = q * m * qi;
        if (r.imag().cwiseAbs().maxCoeff() > 1e-6 * std::max(1.0, r.cwiseAbs().maxCoeff()))
            throw RealityError("conjugated matrix not real");
        out.matrices.push_back(r.real());
    }
    return out;
}

RealRep real_form(const RepSystem& sys, const RepPoint& r)
{
    RealRep out = r.abelian ? *circle_form(sys.abelian_matrices(r.params[0])) : real_form(r.matrices);
    out.branch_id = r.branch_id;
    out.angle_index = r.angle_index;
    return out;
}

Mat2 real_word(const std::vector<Mat2>& gens, const Word& w)
{
    Mat2 acc = Mat2::Identity();
    for (auto l : w) {
        const Mat2& m = gens[static_cast<std::size_t>(l.gen)];
        if (l.exp > 0) {
            acc = acc * m;
        } else {
            Mat2 inv;
            inv << m(1, 1), -m(0, 1), -m(1, 0), m(0, 0);
            acc = acc * inv;
        }
    }
    return acc;
}

PeripheralType classify_matrix(const Mat2& m, double tol)
{
    if ((m - Mat2::Identity()).cwiseAbs().maxCoeff() < tol || (m + Mat2::Identity()).cwiseAbs().maxCoeff() < tol)
        return IsometryType::central;
    const double t2 = m.trace() * m.trace();
    if (std::abs(t2 - 4) < tol) return IsometryType::parabolic;
    return t2 < 4 ? IsometryType::elliptic : IsometryType::hyperbolic;
}

std::pair<PeripheralType, PeripheralType> classify_peripheral(const RealRep& r, const Presentation& p, double tol)
{
    if (r.form != RealForm::split && r.form != RealForm::circle)
        throw RealityError("peripheral classification needs a split or circle form");
    return {classify_matrix(real_word(r.matrices, p.meridian), tol), classify_matrix(real_word(r.matrices, p.longitude), tol)};
}

}  // namespace tl
