#include "tl/intmat.hpp"

#include <cstdlib>
#include <stdexcept>
#include <utility>

namespace tl {

namespace {

IntMatrix identity(std::size_t n)
{
    IntMatrix m(n, IntVector(n, 0));
    for (std::size_t i = 0; i < n; ++i) m[i][i] = 1;
    return m;
}

void swap_rows(IntMatrix& m, std::size_t i, std::size_t j) { std::swap(m[i], m[j]); }

void swap_cols(IntMatrix& m, std::size_t i, std::size_t j)
{
    for (auto& row : m) std::swap(row[i], row[j]);
}

// row_i -= q * row_j
void sub_row(IntMatrix& m, std::size_t i, std::size_t j, std::int64_t q)
{
    for (std::size_t c = 0; c < m[i].size(); ++c) m[i][c] -= q * m[j][c];
}

void sub_col(IntMatrix& m, std::size_t i, std::size_t j, std::int64_t q)
{
    for (auto& row : m) row[i] -= q * row[j];
}

}  // namespace

SmithForm smith_normal_form(const IntMatrix& a, std::size_t cols)
{
    const std::size_t rows = a.size();
    SmithForm f;
    f.D = a;
    for (const auto& r : f.D)
        if (r.size() != cols) throw std::invalid_argument("ragged integer matrix");
    f.U = identity(rows);
    f.V = identity(cols);
    auto& D = f.D;

    std::size_t t = 0;
    while (t < rows && t < cols) {
        // smallest nonzero entry of the trailing block becomes the pivot
        std::size_t pi = rows, pj = cols;
        std::int64_t best = 0;
        for (std::size_t i = t; i < rows; ++i)
            for (std::size_t j = t; j < cols; ++j)
                if (D[i][j] != 0 && (best == 0 || std::llabs(D[i][j]) < best)) {
                    best = std::llabs(D[i][j]);
                    pi = i;
                    pj = j;
                }
        if (best == 0) break;
        swap_rows(D, t, pi);
        swap_rows(f.U, t, pi);
        swap_cols(D, t, pj);
        swap_cols(f.V, t, pj);

        bool dirty = false;
        for (std::size_t i = t + 1; i < rows; ++i) {
            std::int64_t q = D[i][t] / D[t][t];
            if (q != 0) {
                sub_row(D, i, t, q);
                sub_row(f.U, i, t, q);
            }
            if (D[i][t] != 0) dirty = true;
        }
        for (std::size_t j = t + 1; j < cols; ++j) {
            std::int64_t q = D[t][j] / D[t][t];
            if (q != 0) {
                sub_col(D, j, t, q);
                sub_col(f.V, j, t, q);
            }
            if (D[t][j] != 0) dirty = true;
        }
        if (dirty) continue;

        // divisibility: fold an offending row into the pivot row and retry
        bool fixed = true;
        for (std::size_t i = t + 1; i < rows && fixed; ++i)
            for (std::size_t j = t + 1; j < cols; ++j)
                if (D[i][j] % D[t][t] != 0) {
                    sub_row(D, t, i, -1);
                    sub_row(f.U, t, i, -1);
                    fixed = false;
                    break;
                }
        if (!fixed) continue;

        if (D[t][t] < 0) {
            for (auto& x : D[t]) x = -x;
            for (auto& x : f.U[t]) x = -x;
        }
        ++t;
    }
    f.rank = static_cast<int>(t);
    return f;
}

IntVector multiply(const IntMatrix& a, const IntVector& x)
{
    IntVector y(a.size(), 0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < x.size(); ++j) y[i] += a[i][j] * x[j];
    return y;
}

std::optional<IntVector> solve_integer(const IntMatrix& a, std::size_t cols, const IntVector& b)
{
    if (b.size() != a.size()) throw std::invalid_argument("right-hand side has wrong length");
    const auto f = smith_normal_form(a, cols);
    const IntVector c = multiply(f.U, b);
    IntVector y(cols, 0);
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (static_cast<int>(i) < f.rank) {
            const auto d = f.D[i][i];
            if (c[i] % d != 0) return std::nullopt;
            y[i] = c[i] / d;
        } else if (c[i] != 0) {
            return std::nullopt;
        }
    }
    return multiply(f.V, y);
}

}  // namespace tl
