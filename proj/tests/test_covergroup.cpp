#include <doctest.h>

#include <random>

#include "support.hpp"
#include "tl/covergroup.hpp"
#include "tl/presentation.hpp"

using namespace tl;

namespace {

LiftedElement random_lift(std::mt19937_64& rng)
{
    std::uniform_int_distribution<int> shift(-3, 3);
    return lifted_compose(canonical_lift(test::random_sl2(rng)), center_power(shift(rng)));
}

}  // namespace

TEST_CASE("circle coordinate and canonical lifts")
{
    CHECK(circle_coordinate({1, 0}) == doctest::Approx(0.0));
    CHECK(circle_coordinate({0, 1}) == doctest::Approx(0.5));
    CHECK(circle_coordinate({-1, 0}) == doctest::Approx(0.0));
    std::mt19937_64 rng(7);
    for (int i = 0; i < 200; ++i) {
        const auto g = canonical_lift(test::random_sl2(rng));
        CHECK(g.base >= 0.0);
        CHECK(g.base < 1.0);
    }
}

TEST_CASE("rotations translate by their angle")
{
    for (double t : {0.1, 0.3, 0.5, 0.9}) {
        const auto g = canonical_lift(test::rotation(t));
        CHECK(translation_number(g) == doctest::Approx(t).epsilon(1e-12));
        CHECK(isometry_type(g.matrix) == IsometryType::elliptic);
    }
    CHECK(translation_number(lifted_compose(canonical_lift(test::rotation(0.3)), center_power(2))) ==
          doctest::Approx(2.3));
}

TEST_CASE("isometry types")
{
    Mat2 p;
    p << 1, 1, 0, 1;
    CHECK(isometry_type(p) == IsometryType::parabolic);
    Mat2 h;
    h << 2, 0, 0, 0.5;
    CHECK(isometry_type(h) == IsometryType::hyperbolic);
    CHECK(isometry_type(Mat2::Identity()) == IsometryType::central);
    CHECK(isometry_type(-Mat2::Identity()) == IsometryType::central);
    CHECK(translation_number(canonical_lift(h)) == 0.0);
}

TEST_CASE("lifted maps are increasing and commute with the deck shift")
{
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int i = 0; i < 300; ++i) {
        const auto g = random_lift(rng);
        double x = u(rng), y = u(rng);
        if (x > y) std::swap(x, y);
        if (x == y) continue;
        CHECK(lifted_eval(g, x) < lifted_eval(g, y));
        // exact on the integer part
        CHECK(lifted_eval(g, x + 1) - lifted_eval(g, x) == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("quasimorphism defect at most one")
{
    std::mt19937_64 rng(13);
    double worst = 0;
    for (int i = 0; i < 2000; ++i) {
        const auto g = random_lift(rng), h = random_lift(rng);
        const double d = translation_number(lifted_compose(g, h)) - translation_number(g) - translation_number(h);
        worst = std::max(worst, std::abs(d));
    }
    CHECK(worst <= 1 + 1e-6);
}

TEST_CASE("translation number is a conjugacy invariant")
{
    std::mt19937_64 rng(17);
    for (int i = 0; i < 500; ++i) {
        const auto g = random_lift(rng), h = random_lift(rng);
        const auto c = lifted_compose(lifted_compose(h, g), lifted_inverse(h));
        CHECK(std::abs(translation_number(c) - translation_number(g)) < 1e-9);
    }
}

TEST_CASE("central shifts are exact")
{
    std::mt19937_64 rng(19);
    for (long k = -100; k <= 100; ++k) CHECK(translation_number(center_power(k)) == static_cast<double>(k));
    for (int i = 0; i < 200; ++i) {
        const auto g = random_lift(rng);
        for (long k : {-7L, -1L, 1L, 5L})
            CHECK(translation_number(lifted_compose(g, center_power(k))) - translation_number(g) ==
                  doctest::Approx(static_cast<double>(k)).epsilon(1e-12));
    }
}

TEST_CASE("homomorphism on commuting pairs")
{
    for (double a : {0.1, 0.35, 0.7})
        for (double b : {0.2, 0.45, 0.8}) {
            const auto g = canonical_lift(test::rotation(a));
            const auto h = lifted_compose(canonical_lift(test::rotation(b)), center_power(1));
            const double sum = translation_number(g) + translation_number(h);
            CHECK(std::abs(translation_number(lifted_compose(g, h)) - sum) < 1e-9);
        }
    Mat2 p;
    p << 1, 2, 0, 1;
    const auto g = canonical_lift(p);
    CHECK(std::abs(translation_number(lifted_power(g, 5)) - 5 * translation_number(g)) < 1e-9);
}

TEST_CASE("powers and inverses")
{
    std::mt19937_64 rng(23);
    for (int i = 0; i < 100; ++i) {
        const auto g = random_lift(rng);
        const auto id = lifted_compose(g, lifted_inverse(g));
        CHECK(lifted_eval(id, 0.25) == doctest::Approx(0.25).epsilon(1e-9));
        const auto g3 = lifted_power(g, 3);
        const auto g3b = lifted_compose(g, lifted_compose(g, g));
        CHECK(lifted_eval(g3, 0.1) == doctest::Approx(lifted_eval(g3b, 0.1)).epsilon(1e-9));
    }
}

TEST_CASE("euler defects of an abelian trefoil representation")
{
    const auto p = parse_manifold(test::fixture("trefoil"));
    const Mat2 a = test::rotation(1.0 / 3.0);
    const LiftedRep abelian = canonical_lifts({a, a});
    EulerData e = solve_lift(euler_defects(abelian, p));
    CHECK(e.solvable);
    REQUIRE(e.adjustment.has_value());
    const auto ed = euler_defects(shift_generators(abelian, *e.adjustment), p);
    for (auto d : ed.defects) CHECK(d == 0);
}

TEST_CASE("relators that are not central are rejected")
{
    const auto p = parse_manifold(test::fixture("trefoil"));
    CHECK_THROWS_AS(euler_defects(canonical_lifts({test::rotation(0.2), test::rotation(0.3)}), p), LiftError);
}

TEST_CASE("solvability is invariant under coboundary changes")
{
    const auto p = parse_manifold(test::fixture("trefoil"));
    const LiftedRep base = canonical_lifts({test::rotation(0.2), test::rotation(0.2)});
    const bool verdict = solve_lift(euler_defects(base, p)).solvable;
    std::mt19937_64 rng(29);
    std::uniform_int_distribution<long> shift(-5, 5);
    for (int i = 0; i < 100; ++i) {
        IntVector n{shift(rng), shift(rng)};
        const auto moved = shift_generators(base, n);
        CHECK(solve_lift(euler_defects(moved, p)).solvable == verdict);
    }
}

TEST_CASE("shift_lift moves peripheral translations")
{
    const auto p = parse_manifold(test::fixture("trefoil"));
    const LiftedRep rep = canonical_lifts({test::rotation(0.2), test::rotation(0.2)});
    const auto base = solve_lift(euler_defects(rep, p));
    REQUIRE(base.adjustment);
    const auto lift = shift_generators(rep, *base.adjustment);
    const auto same = shift_lift(lift, {0, 0}, p);
    CHECK(translation_number(evaluate(same, p.meridian)) == translation_number(evaluate(lift, p.meridian)));
    // phi dual to the free generator of H_1 shifts the meridian by one and fixes the longitude
    const auto moved = shift_lift(lift, {1, 1}, p);
    CHECK(translation_number(evaluate(moved, p.meridian)) ==
          doctest::Approx(translation_number(evaluate(lift, p.meridian)) + 1));
    CHECK(translation_number(evaluate(moved, p.longitude)) ==
          doctest::Approx(translation_number(evaluate(lift, p.longitude))));
    CHECK_THROWS(shift_lift(lift, {1, 0}, p));
}
