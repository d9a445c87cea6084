#pragma once

#include <cstdint>
#include <optional>
#include <vector>

namespace tl {

using IntMatrix = std::vector<std::vector<std::int64_t>>;
using IntVector = std::vector<std::int64_t>;

// U * A * V = D with U, V unimodular and D diagonal, d_i | d_{i+1}.
struct SmithForm {
    IntMatrix U, D, V;
    int rank = 0;
};

SmithForm smith_normal_form(const IntMatrix& a, std::size_t cols);

// Integer solution of A n = b, if one exists.  Free coordinates are set to 0.
std::optional<IntVector> solve_integer(const IntMatrix& a, std::size_t cols, const IntVector& b);

IntVector multiply(const IntMatrix& a, const IntVector& x);

}  // namespace tl
