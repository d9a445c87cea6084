#pragma once

#include <filesystem>
#include <random>
#include <string>

#include <Eigen/LU>

#include "tl/covergroup.hpp"

namespace test {

inline std::filesystem::path fixture(const std::string& name)
{
    return std::filesystem::path(TL_FIXTURES) / (name + ".json");
}

// Random element of SL(2,R) with entries of moderate size.
inline tl::Mat2 random_sl2(std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    double a = u(rng);
    while (std::abs(a) < 0.2) a = u(rng);
    const double b = u(rng), c = u(rng);
    tl::Mat2 m;
    m << a, b, c, (1 + b * c) / a;
    return m;
}

inline tl::Mat2 rotation(double turns)
{
    // rotation by pi * turns acts on R/Z as a shift by turns
    const double t = 3.14159265358979323846 * turns;
    tl::Mat2 m;
    m << std::cos(t), -std::sin(t), std::sin(t), std::cos(t);
    return m;
}

}  // namespace test
