#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <numbers>
#include <fstream>
#include <sstream>

#include "support.hpp"
#include "tl/locus.hpp"

using namespace tl;

namespace {

LocusSample at(double x, double y, unsigned flags = 0)
{
    LocusSample s;
    s.x = x;
    s.y = y;
    s.flags = flags;
    return s;
}

std::string slurp(const std::filesystem::path& p)
{
    std::ifstream in(p);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

LiftedRep trefoil_abelian(double turns, const Presentation& p)
{
    const auto lift = canonical_lifts({test::rotation(turns), test::rotation(turns)});
    const auto e = solve_lift(euler_defects(lift, p));
    REQUIRE(e.adjustment);
    return shift_generators(lift, *e.adjustment);
}

// A closed loop and its mirror over one turn of the holonomy circle.
LocusInput synthetic_input(bool small)
{
    LocusInput in;
    in.n_samples = 8;
    in.start_index = 1;
    in.k = 1;
    in.monodromy = {0};
    in.assume_small = small;
    in.frames.resize(8);
    for (int j = 0; j < 8; ++j) {
        ClassSamples c;
        c.branches = {0};
        const double t = 2 * std::numbers::pi * j / 8, x = 0.3 + 0.1 * std::cos(t), y = 0.5 + 0.1 * std::sin(t);
        auto s = at(x, y);
        s.branch_id = 0;
        s.angle_index = j;
        auto m = at(-x, -y, flag_mirror);
        m.branch_id = 0;
        m.angle_index = j;
        c.samples = {s, m};
        in.frames[static_cast<std::size_t>(j)].push_back(c);
    }
    return in;
}

}  // namespace

TEST_CASE("normalization examples")
{
    auto a = normalize_sample(at(-0.3, 2), 1);
    CHECK(a.x == doctest::Approx(0.3));
    CHECK(a.y == -2);
    auto b = normalize_sample(at(1.4, -3), 1);
    CHECK(b.x == doctest::Approx(0.4));
    CHECK(b.y == -3);
    auto c = normalize_sample(at(0.5, 0), 1);
    CHECK(c.x == 0.5);
    CHECK(c.y == 0);
    auto d = normalize_sample(at(0, -1), 1);
    CHECK(d.y == 1);
    CHECK(strip_sample(at(-0.25, 1), 3).x == doctest::Approx(2.75));
}

TEST_CASE("normalization is a class function of the symmetry group")
{
    for (double x : {-2.3, -0.7, 0.1, 0.45, 1.2, 2.9})
        for (double y : {-1.5, 0.0, 0.25, 3.0})
            for (std::int64_t k : {1, 2, 3}) {
                const auto n = normalize_sample(at(x, y), k);
                const double kd = static_cast<double>(k);
                CHECK(n.x >= 0);
                CHECK(n.x <= kd / 2);
                const auto t = normalize_sample(at(x + 2 * kd, y), k);
                const auto r = normalize_sample(at(kd - x, -y), k);
                CHECK(t.x == doctest::Approx(n.x));
                CHECK(t.y == doctest::Approx(n.y));
                CHECK(r.x == doctest::Approx(n.x));
                CHECK(r.y == doctest::Approx(n.y));
            }
}

TEST_CASE("pillowcase coordinates")
{
    CHECK(pillowcase_residual(0, 0, 4, 4, 4) == 0.0);
    // abelian: lambda trivial so tr^2(lambda) = 4 and mu lambda ~ mu
    CHECK(pillowcase_residual(1.0 / 6, 0, 3, 4, 3) < 1e-10);
    CHECK(pillowcase_residual(1.0 / 3, 0, 1, 4, 1) < 1e-10);
    CHECK(pillowcase_residual(1.0 / 3 + 0.01, 0, 1, 4, 1) > 1e-3);
    // invariant under the symmetry group
    for (double x : {0.1, 0.37})
        for (double y : {0.2, -1.3}) {
            const double c = 2 * std::cos(std::numbers::pi * x), d = 2 * std::cos(std::numbers::pi * y),
                         e = 2 * std::cos(std::numbers::pi * (x + y));
            CHECK(pillowcase_residual(x + 1, y, c * c, d * d, e * e) < 1e-12);
            CHECK(pillowcase_residual(-x, -y, c * c, d * d, e * e) < 1e-12);
        }
}

TEST_CASE("flags round trip")
{
    for (unsigned f : {0u, 1u, 5u, 0x7fu, unsigned(flag_mirror | flag_parabolic)})
        CHECK(flags_from_string(flags_to_string(f)) == f);
    CHECK_THROWS_AS(flags_from_string("nonsense"), LocusError);
}

TEST_CASE("samples of lifted representations")
{
    const auto p = parse_manifold(test::fixture("trefoil"));
    const auto s = eval_sample(trefoil_abelian(0.3, p), p);
    CHECK(s.x == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(std::abs(s.y) < 1e-12);
    CHECK_FALSE(s.has(flag_parabolic));

    // shifting by the dual of the free generator moves the sample by (k, 0)
    const auto moved = eval_sample(shift_lift(trefoil_abelian(0.3, p), {1, 1}, p), p);
    CHECK(moved.x == doctest::Approx(s.x + 1));
    CHECK(moved.y == doctest::Approx(s.y));

    // central meridian
    LiftedRep c;
    c.gens = {center_power(2), center_power(2)};
    const auto cs = eval_sample(c, p);
    CHECK(cs.x == 2);
    CHECK(cs.has(flag_central));

    Mat2 h;
    h << 2, 0, 0, 0.5;
    CHECK_THROWS_AS(eval_sample(canonical_lifts({h, h}), p), LocusError);
}

TEST_CASE("abelian only input gives the axis")
{
    LocusInput in;
    in.n_samples = 16;
    in.k = 2;
    const auto L = assemble_arcs(in);
    CHECK(L.nodes.empty());
    CHECK(L.edges.empty());
    REQUIRE_FALSE(L.axis.empty());
    CHECK(L.axis.front().x == 0);
    CHECK(L.axis.back().x == 2);
    for (const auto& s : L.axis) {
        CHECK(std::abs(s.y) < 1e-12);
        CHECK(s.has(flag_axis));
        CHECK(s.has(flag_central) == (std::abs(s.x - std::round(s.x)) < 1e-12));
    }
}

TEST_CASE("arcs follow branches and carry the ideal point caveat")
{
    const auto L = assemble_arcs(synthetic_input(false));
    CHECK(L.nodes.size() == 16);
    for (const auto& s : L.nodes) CHECK(s.has(flag_unverified_nonideal));
    CHECK(L.edges.size() == 16);
    for (const auto& e : L.edges) {
        const auto& a = L.nodes[static_cast<std::size_t>(e.a)];
        const auto& b = L.nodes[static_cast<std::size_t>(e.b)];
        CHECK(std::hypot(b.x + e.shift - a.x, b.y - a.y) < 0.2);
    }
    const auto S = assemble_arcs(synthetic_input(true));
    for (const auto& s : S.nodes) CHECK_FALSE(s.has(flag_unverified_nonideal));
    CHECK(symmetry_discrepancy(S.nodes, 1) < 1e-12);
    CHECK_FALSE(S.arcs().empty());
}

TEST_CASE("symmetry discrepancy")
{
    CHECK(symmetry_discrepancy({at(0.3, 1), at(0.7, -1)}, 1) < 1e-15);
    CHECK(symmetry_discrepancy({at(0.3, 1)}, 1) > 0.5);
    CHECK(symmetry_discrepancy({at(0.0, 1), at(0.0, -1)}, 1) < 1e-15);
    CHECK(symmetry_discrepancy({at(0.5, 0.25), at(2.5, -0.25)}, 3) < 1e-15);
}

TEST_CASE("csv export round trips bit exactly")
{
    auto L = assemble_arcs(synthetic_input(true));
    L.nodes[0].x = 0.1 + 0.2;  // not exactly representable in decimal
    const auto path = std::filesystem::temp_directory_path() / "tl_locus.csv";
    export_csv(L, path, "test header");
    const auto back = read_csv(path);
    REQUIRE(back.size() == L.nodes.size() + L.axis.size());
    for (std::size_t i = 0; i < L.nodes.size(); ++i) CHECK(back[i] == L.nodes[i]);
    for (std::size_t i = 0; i < L.axis.size(); ++i) CHECK(back[L.nodes.size() + i] == L.axis[i]);
    CHECK(slurp(path).rfind("# test header\n", 0) == 0);
    std::filesystem::remove(path);
    CHECK_THROWS_AS(export_csv(L, "/nonexistent/dir/x.csv", ""), LocusError);
}

TEST_CASE("svg export")
{
    LocusInput in;
    in.n_samples = 16;
    in.k = 1;
    const auto path = std::filesystem::temp_directory_path() / "tl_locus.svg";
    export_svg(assemble_arcs(in), path, "empty");
    const std::string empty = slurp(path);
    CHECK(empty.find("<svg") != std::string::npos);
    CHECK(empty.find("</svg>") != std::string::npos);
    CHECK(empty.find("empty") != std::string::npos);

    auto s = synthetic_input(true);
    AlexanderPoint a;
    a.x = 1.0 / 6;
    s.alexander = {a};
    export_svg(assemble_arcs(s), path, "arcs");
    const std::string full = slurp(path);
    CHECK(full.find("polyline") != std::string::npos);
    CHECK(full.find("circle") != std::string::npos);
    // deterministic
    export_svg(assemble_arcs(s), path, "arcs");
    CHECK(slurp(path) == full);
    std::filesystem::remove(path);
}
