#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <numbers>

#include "support.hpp"
#include "tl/repvar.hpp"

using namespace tl;

namespace {

RepSystem system_of(const char* name)
{
    auto p = parse_manifold(test::fixture(name));
    auto h = abelianization_data(p);
    return RepSystem(std::move(p), std::move(h));
}

TrackingConfig small_config(int n = 32)
{
    TrackingConfig c;
    c.n_samples = n;
    c.workers = 1;
    return c;
}

const cd z0 = 0.99 * std::exp(cd(0, 0.17));

double unimodularity(const std::vector<CMat2>& g)
{
    double worst = 0;
    for (const auto& m : g) worst = std::max(worst, std::abs(m.determinant() - 1.0));
    return worst;
}

}  // namespace

TEST_CASE("config validation")
{
    TrackingConfig c;
    CHECK_NOTHROW(c.validate());
    c.n_samples = 100;
    CHECK_THROWS_AS(c.validate(), InputError);
    c = {};
    c.polish_bits = 2048;
    CHECK_THROWS_AS(c.validate(), InputError);
    c = {};
    c.seed_attempts = 0;
    CHECK_THROWS_AS(c.validate(), InputError);
}

TEST_CASE("system shape")
{
    const auto t = system_of("trefoil");
    CHECK(t.trackable());
    CHECK(t.unknowns() == 3);
    CHECK(t.equations() == 5);
    const auto w = system_of("trefoil3");
    CHECK(w.unknowns() == 7);
    CHECK_FALSE(system_of("circle").trackable());
}

TEST_CASE("abelian points satisfy the equations exactly")
{
    const auto sys = system_of("m016");
    for (std::int64_t num : {1, 3, 7}) {
        const auto r = sys.abelian_point(num, 16);
        CHECK(r.abelian);
        CHECK(unimodularity(r.matrices) < 1e-14);
        const CMat2 mu = sys.word_matrix(r.matrices, sys.presentation().meridian);
        CHECK(std::abs(mu.trace() * mu.trace() - (r.target + 2.0 + 1.0 / r.target)) < 1e-12);
        const CMat2 la = sys.word_matrix(r.matrices, sys.presentation().longitude);
        CHECK((la - CMat2::Identity()).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("seeding finds non-abelian points")
{
    const auto sys = system_of("trefoil");
    const auto s = seed_fiber(sys, z0, small_config());
    CHECK(s.nonabelian >= 1);
    CHECK_FALSE(s.warning_no_nonabelian);
    for (const auto& p : s.frame.points) {
        CHECK(p.residual < 1e-9);
        CHECK(unimodularity(p.matrices) < 1e-9);
    }
    const auto m = seed_fiber(system_of("m016"), z0, small_config());
    CHECK(m.nonabelian >= 2);
}

TEST_CASE("seeding is deterministic")
{
    const auto sys = system_of("m016");
    const auto a = seed_fiber(sys, z0, small_config());
    const auto b = seed_fiber(sys, z0, small_config());
    REQUIRE(a.frame.points.size() == b.frame.points.size());
    for (std::size_t i = 0; i < a.frame.points.size(); ++i) CHECK(a.frame.points[i].params == b.frame.points[i].params);
}

TEST_CASE("sign variants are solutions")
{
    const auto sys = system_of("trefoil");
    const auto s = seed_fiber(sys, z0, small_config());
    for (const auto& p : s.frame.points) {
        if (p.abelian) continue;
        for (int g = 0; g < 2; ++g) {
            auto x = p.params;
            auto signs = p.signs;
            sys.flip_generator(g, x, signs);
            CHECK(sys.residual(x, z0, signs).cwiseAbs().maxCoeff() < 1e-8);
            auto y = x;
            auto sy = signs;
            sys.canonicalize(y, sy);
            CHECK(sys.residual(y, z0, sy).cwiseAbs().maxCoeff() < 1e-8);
        }
    }
}

TEST_CASE("tracking around the circle")
{
    const auto sys = system_of("trefoil");
    const auto cfg = small_config(32);
    const auto s = seed_fiber(sys, z0, cfg);
    const auto t = track_circle(sys, s.frame, cfg);
    REQUIRE(t.frames.size() == 32);
    CHECK(t.monodromy_bijective);
    for (std::size_t j = 0; j < t.frames.size(); ++j) {
        const cd z = std::exp(cd(0, 2 * std::numbers::pi * static_cast<double>(j) / 32));
        for (const auto& p : t.frames[j].points) {
            CHECK(p.angle_index == static_cast<int>(j));
            CHECK(std::abs(p.target - z) < 1e-12);
            const CMat2 mu = sys.word_matrix(p.matrices, sys.presentation().meridian);
            CHECK(std::abs(mu.trace() * mu.trace() - (z + 2.0 + 1.0 / z)) < 1e-7);
            CHECK(p.commutator_residual < 1e-7);
        }
    }
}

TEST_CASE("monodromy closure on m016")
{
    const auto sys = system_of("m016");
    const auto cfg = small_config(32);
    const auto t = track_circle(sys, seed_fiber(sys, z0, cfg).frame, cfg);
    CHECK(t.monodromy_bijective);
    const auto n = t.monodromy.size();
    std::vector<bool> hit(n, false);
    for (auto m : t.monodromy) {
        REQUIRE(m >= 0);
        REQUIRE(static_cast<std::size_t>(m) < n);
        hit[static_cast<std::size_t>(m)] = true;
    }
    CHECK(std::all_of(hit.begin(), hit.end(), [](bool b) { return b; }));
}

TEST_CASE("polishing reaches the target precision")
{
    const auto sys = system_of("m016");
    const auto cfg = small_config(32);
    const auto t = track_circle(sys, seed_fiber(sys, z0, cfg).frame, cfg);
    for (int j : {0, 5, 16}) {
        for (const auto& p : t.frames[static_cast<std::size_t>(j)].points) {
            const auto q = polish(sys, p, 256);
            CHECK(q.residual < std::ldexp(1.0, 8 - 256));
            CHECK(q.commutator_residual < 1e-60);
            CHECK(q.precision_bits == 256);
            const auto big = precise_matrices(sys, q);
            REQUIRE(big.size() == q.matrices.size());
            for (std::size_t g = 0; g < big.size(); ++g)
                CHECK(std::abs(big[g][0].to_complex() - q.matrices[g](0, 0)) < 1e-12);
        }
    }
}

TEST_CASE("polish rejects bad points")
{
    const auto sys = system_of("trefoil");
    auto r = sys.make_point({cd(1.5, 0.2), cd(0.7, 0.1), cd(0.3, 0.3)}, {1}, z0);
    r.residual = 1.0;
    CHECK_THROWS_AS(polish(sys, r, 256), PolishError);
    CHECK_THROWS_AS(precise_matrices(sys, r), PolishError);
}

TEST_CASE("frames round trip")
{
    const auto sys = system_of("trefoil");
    const auto cfg = small_config(16);
    auto t = track_circle(sys, seed_fiber(sys, z0, cfg).frame, cfg);
    auto& pts = t.frames[3].points;
    for (auto& p : pts) p = polish(sys, p, 256);
    const auto path = std::filesystem::temp_directory_path() / "tl_frames_roundtrip.jsonl";
    write_frames(path, t.frames, {{"config_hash", "test"}});
    const auto back = read_frames(path);
    std::size_t total = 0;
    for (const auto& f : t.frames) total += f.points.size();
    REQUIRE(back.size() == total);
    for (const auto& b : back) {
        if (b.angle_index != 3) continue;
        const auto it = std::find_if(pts.begin(), pts.end(), [&](const RepPoint& p) { return p.branch_id == b.branch_id; });
        REQUIRE(it != pts.end());
        REQUIRE(b.precise.size() == it->precise.size());
        for (std::size_t i = 0; i < b.precise.size(); ++i) {
            CHECK(b.precise[i].re.to_hex() == it->precise[i].re.to_hex());
            CHECK(b.precise[i].im.to_hex() == it->precise[i].im.to_hex());
        }
        CHECK(b.signs == it->signs);
        CHECK(b.abelian == it->abelian);
    }
    std::filesystem::remove(path);
}

TEST_CASE("holonomy parameter")
{
    CMat2 m;
    m << cd(2, 0), cd(0, 0), cd(0, 0), cd(0.5, 0);
    CHECK(std::abs(holonomy_mu(m) - 4.0) < 1e-12);
    CHECK(std::abs(holonomy_mu(m, cd(0.25, 0)) - 0.25) < 1e-12);
}
