#include <doctest.h>

#include <algorithm>
#include <random>

#include "support.hpp"
#include "tl/presentation.hpp"

using namespace tl;

namespace {

Presentation from(const char* text) { return presentation_from_json(nlohmann::json::parse(text)); }

const char* fixtures[] = {"trefoil", "figure8", "m016", "v2503", "v0170", "v1108", "trefoil3", "circle"};

}  // namespace

TEST_CASE("words")
{
    const Word w = parse_word("abAB", 2);
    REQUIRE(w.size() == 4);
    CHECK(w[0] == Letter{0, 1});
    CHECK(w[2] == Letter{0, -1});
    CHECK(to_string(w) == "abAB");
    CHECK(reduce(parse_word("abBA", 2)).empty());
    CHECK(to_string(inverse(w)) == "baBA");
    CHECK_THROWS_AS(parse_word("abc", 2), InputError);
    CHECK_THROWS_AS(parse_word("a1", 2), InputError);
}

TEST_CASE("parse fixtures")
{
    const auto t = parse_manifold(test::fixture("trefoil"));
    CHECK(t.rank == 2);
    CHECK(t.relators.size() == 1);
    CHECK(t.genus == 1);
    CHECK_FALSE(t.assume_small);
    const auto m = parse_manifold(test::fixture("m016"));
    CHECK(m.assume_small);
    CHECK(m.genus == 5);
    for (const char* f : fixtures) CHECK_NOTHROW(parse_manifold(test::fixture(f)));
}

TEST_CASE("schema errors")
{
    CHECK_THROWS_AS(from(R"({"name":"x","generators":2,"relators":["abaBAB"],"longitude":"ab"})"), InputError);
    CHECK_THROWS_AS(from(R"({"name":"x","generators":2,"relators":[],"meridian":"a","longitude":"b"})"), InputError);
    CHECK_THROWS_AS(from(R"({"name":"x","generators":2,"relators":["abx"],"meridian":"a","longitude":"b"})"), InputError);
    CHECK_THROWS_AS(from(R"({"name":"x","generators":2,"relators":["abaBAB"],"meridian":"a","longitude":"b","genus":0})"),
                    InputError);
    CHECK_THROWS_AS(from("[1, 2]"), InputError);
    CHECK_THROWS_AS(parse_manifold("/nonexistent/file.json"), InputError);
}

TEST_CASE("homology of the trefoil")
{
    const auto p = parse_manifold(test::fixture("trefoil"));
    const auto h = abelianization_data(p);
    CHECK(h.free_rank == 1);
    CHECK(h.torsion_order == 1);
    CHECK(h.k == 1);
    CHECK(free_image(h, parse_word("ab", 2)) == 2);
    CHECK(free_image(h, Word{}) == 0);
}

TEST_CASE("homology of the rank one free group")
{
    const auto p = from(R"({"name":"z","generators":1,"relators":[],"meridian":"a","longitude":"aA"})");
    const auto h = abelianization_data(p);
    CHECK(h.free_rank == 1);
    CHECK(h.torsion_order == 1);
    CHECK(h.k == 1);
}

TEST_CASE("torsion and longitude order of the census fixtures")
{
    struct Row {
        const char* name;
        std::int64_t torsion, k;
    };
    for (const Row r : {Row{"v2503", 10, 5}, Row{"v0170", 3, 3}, Row{"v1108", 2, 2}, Row{"m016", 1, 1}, Row{"figure8", 1, 1}}) {
        const auto h = abelianization_data(parse_manifold(test::fixture(r.name)));
        CHECK_MESSAGE(h.torsion_order == r.torsion, r.name);
        CHECK_MESSAGE(h.k == r.k, r.name);
    }
}

TEST_CASE("peripheral images")
{
    for (const char* f : fixtures) {
        const auto p = parse_manifold(test::fixture(f));
        const auto h = abelianization_data(p);
        CHECK_MESSAGE(free_image(h, p.longitude) == 0, f);
        CHECK_MESSAGE(free_image(h, p.meridian) == h.mu_index, f);
        CHECK_MESSAGE(h.mu_index == h.k, f);
    }
}

TEST_CASE("free image is additive")
{
    const auto p = parse_manifold(test::fixture("m016"));
    const auto h = abelianization_data(p);
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<int> letter(0, 3), len(0, 12);
    auto random_word = [&] {
        std::string s;
        for (int i = len(rng); i > 0; --i) s += "abAB"[letter(rng)];
        return parse_word(s, 2);
    };
    for (int i = 0; i < 200; ++i) {
        const Word u = random_word(), v = random_word();
        CHECK(free_image(h, concat(u, v)) == free_image(h, u) + free_image(h, v));
        CHECK(free_image(h, inverse(u)) == -free_image(h, u));
    }
}

TEST_CASE("homology does not depend on relator order")
{
    auto p = parse_manifold(test::fixture("trefoil3"));
    const auto h = abelianization_data(p);
    std::mt19937_64 rng(5);
    for (int i = 0; i < 6; ++i) {
        std::shuffle(p.relators.begin(), p.relators.end(), rng);
        const auto g = abelianization_data(p);
        CHECK(g.torsion_order == h.torsion_order);
        CHECK(g.k == h.k);
        CHECK(g.free_images == h.free_images);
    }
}

TEST_CASE("free rank other than one is rejected")
{
    const auto p = from(R"({"name":"f2","generators":2,"relators":["abAB"],"meridian":"a","longitude":"b"})");
    CHECK_THROWS_AS(abelianization_data(p), InputError);
}
