// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include <Eigen/LU>

#include "tl/alexander.hpp"
#include "tl/covergroup.hpp"
#include "tl/pipeline.hpp"

using namespace tl;
namespace fs = std::filesystem;

namespace {

// tolerances and limits
constexpr int quasimorphism_pairs = 10000;
constexpr double quasimorphism_slack = 1e-6;
constexpr double conjugation_tol = 1e-9;
constexpr long central_range = 100;
constexpr int coboundary_trials = 100;
constexpr double root_tol = 1e-9;
constexpr int m016_samples = 256;
constexpr int m016_bits = 256;
constexpr double interval_lo = -5.8, interval_hi = 20.0;
constexpr double milnor_wood = 9.0;  // fiber genus 5
constexpr double lattice_tol = 1e-3;
constexpr double pillowcase_tol = 1e-6;
constexpr double symmetry_tol = 1e-6;
constexpr int branched_lo = 12, branched_hi = 50;
constexpr double limit_covergroup = 10, limit_euler = 30, limit_alexander = 5, limit_m016 = 600;

const fs::path fixtures = TL_FIXTURES;

int failures = 0;

void report(int n, bool ok, const std::string& detail)
{
    std::printf("criterion %d: %s  %s\n", n, ok ? "PASS" : "FAIL", detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

Mat2 random_sl2(std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    double a = u(rng);
    while (std::abs(a) < 0.2) a = u(rng);
    const double b = u(rng), c = u(rng);
    Mat2 m;
    m << a, b, c, (1 + b * c) / a;
    return m;
}

LiftedElement random_lift(std::mt19937_64& rng)
{
    std::uniform_int_distribution<int> shift(-3, 3);
    return lifted_compose(canonical_lift(random_sl2(rng)), center_power(shift(rng)));
}

void covergroup_criterion()
{
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(20240601);
    double defect = 0, conj = 0;
    for (int i = 0; i < quasimorphism_pairs; ++i) {
        const auto g = random_lift(rng), h = random_lift(rng);
        const double tg = translation_number(g), th = translation_number(h);
        defect = std::max(defect, std::abs(translation_number(lifted_compose(g, h)) - tg - th));
        const auto c = lifted_compose(lifted_compose(h, g), lifted_inverse(h));
        conj = std::max(conj, std::abs(translation_number(c) - tg));
    }
    bool central = true;
    for (long k = -central_range; k <= central_range; ++k)
        central = central && translation_number(center_power(k)) == static_cast<double>(k);
    const double t = seconds_since(t0);
    report(1, defect <= 1 + quasimorphism_slack && conj < conjugation_tol && central && t < limit_covergroup,
           fmt("defect %.9f, conjugation %.2e, central exact %s, %.2fs", defect, conj, central ? "yes" : "no", t));
}

bool coboundary_invariant(const LiftedRep& base, const Presentation& p, std::mt19937_64& rng, bool& verdict)
{
    verdict = solve_lift(euler_defects(base, p)).solvable;
    std::uniform_int_distribution<long> shift(-7, 7);
    for (int i = 0; i < coboundary_trials; ++i) {
        IntVector n(static_cast<std::size_t>(p.rank));
        for (auto& v : n) v = shift(rng);
        if (solve_lift(euler_defects(shift_generators(base, n), p)).solvable != verdict) return false;
    }
    return true;
}

void euler_criterion(const AnalysisResult& m016)
{
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(77);

    // irreducible parabolic trefoil representation
    const auto trefoil = parse_manifold(fixtures / "trefoil.json");
    Mat2 a, b;
    a << 1, 1, 0, 1;
    b << 1, 0, -1, 1;
    bool braid_verdict = false;
    const bool braid = coboundary_invariant(canonical_lifts({a, b}), trefoil, rng, braid_verdict);

    // an obstructed lift: <a | a^2> with a a half turn
    Presentation z2;
    z2.rank = 1;
    z2.relators = {parse_word("aa", 1)};
    bool z2_verdict = true;
    const Mat2 half = (Mat2() << 0, -1, 1, 0).finished();
    const bool obstructed = coboundary_invariant(canonical_lifts({half}), z2, rng, z2_verdict);

    // every real split character on homology solid tori lifts
    int encountered = m016.counts.lifted + m016.counts.unliftable, unliftable = m016.counts.unliftable;
    for (const char* f : {"trefoil", "trefoil3", "figure8"}) {
        RunConfig cfg;
        cfg.input = fixtures / (std::string(f) + ".json");
        cfg.tracking.n_samples = 64;
        cfg.verbose = false;
        const auto r = run_analysis(cfg);
        encountered += r.counts.lifted + r.counts.unliftable;
        unliftable += r.counts.unliftable;
    }
    const double t = seconds_since(t0);
    const bool ok = braid && braid_verdict && obstructed && !z2_verdict && unliftable == 0 && encountered > 0 &&
                    t < limit_euler;
    report(2, ok,
           fmt("coboundary invariant %s/%s, obstructed case unsolvable %s, lifted %d of %d, %.2fs",
               braid ? "yes" : "no", obstructed ? "yes" : "no", z2_verdict ? "no" : "yes",
               encountered - unliftable, encountered, t));
}

void alexander_criterion()
{
    const auto t0 = std::chrono::steady_clock::now();
    auto poly = [](const char* f) {
        const auto p = parse_manifold(fixtures / (std::string(f) + ".json"));
        return normalized(alexander_polynomial(p, abelianization_data(p)));
    };
    const bool trefoil = poly("trefoil").to_string() == "t^2 - t + 1";
    const bool figure8 = poly("figure8").to_string() == "t^2 - 3t + 1";
    bool torsion = true;
    for (const auto& e : fs::directory_iterator(fixtures)) {
        const auto p = parse_manifold(e.path());
        const auto h = abelianization_data(p);
        const BigInt at_one = alexander_polynomial(p, h).at_one();
        torsion = torsion && abs(at_one) == BigInt(h.torsion_order);
    }
    const auto roots = unit_circle_roots(make_poly({1, -1, 1}));
    bool roots_ok = roots.size() == 2;
    for (const auto& r : roots)
        roots_ok = roots_ok && r.simple && std::abs(std::abs(r.argument) - std::numbers::pi / 3) < root_tol;
    const double t = seconds_since(t0);
    report(3, trefoil && figure8 && torsion && roots_ok && t < limit_alexander,
           fmt("trefoil %s, figure-8 %s, torsion %s, roots %s, %.2fs", trefoil ? "ok" : "bad", figure8 ? "ok" : "bad",
               torsion ? "ok" : "bad", roots_ok ? "ok" : "bad", t));
}

RunConfig m016_config(const fs::path& dir)
{
    RunConfig cfg;
    cfg.input = fixtures / "m016.json";
    cfg.tracking.n_samples = m016_samples;
    cfg.tracking.polish_bits = m016_bits;
    cfg.verbose = false;
    cfg.csv = dir / "locus.csv";
    cfg.report = dir / "report.json";
    return cfg;
}

void m016_criteria(const AnalysisResult& r, double t)
{
    bool interval = false;
    for (const auto& s : r.slopes.intervals) interval = interval || s.contains(interval_lo, interval_hi);
    double max_y = 0, lattice = 0;
    int parabolic = 0;
    for (const auto& s : r.locus.nodes) {
        max_y = std::max(max_y, std::abs(s.y));
        if (s.has(flag_parabolic)) {
            ++parabolic;
            lattice = std::max({lattice, std::abs(s.x - std::round(s.x)), std::abs(s.y - std::round(s.y))});
        }
    }
    int geometric = 0, odd = 0;
    for (const auto& p : r.parabolic)
        if (p.geometric) {
            ++geometric;
            const double n = std::round(p.y);
            if (std::abs(p.y - n) < lattice_tol && std::fmod(std::abs(n), 2.0) == 1.0) ++odd;
        }
    std::string best = "none";
    for (const auto& s : r.slopes.intervals)
        if (s.contains(-1.0) || s.contains(1.0)) best = fmt("(%g, %g)", s.lo, s.hi);
    report(4, interval && max_y <= milnor_wood && lattice < lattice_tol && geometric > 0 && odd == geometric &&
                  t < limit_m016,
           fmt("interval %s, max |y| %.4f, parabolic %d within %.1e, geometric odd %d/%d, %.1fs", best.c_str(), max_y,
               parabolic, lattice, odd, geometric, t));
    report(5, r.max_pillowcase < pillowcase_tol, fmt("max pillowcase residual %.3e", r.max_pillowcase));
    const double sym = symmetry_discrepancy(r.locus.nodes, r.homology.k);
    report(6, sym < symmetry_tol && r.symmetry < symmetry_tol,
           fmt("Hausdorff discrepancy %.3e (pipeline %.3e)", sym, r.symmetry));
}

void branched_criterion(const AnalysisResult& r)
{
    std::string missing;
    for (int n = branched_lo; n <= branched_hi; ++n)
        if (branched_cover_check(r.locus, n, r.homology.k).verdict != BranchedVerdict::orderable)
            missing += " " + std::to_string(n);
    report(8, missing.empty(),
           missing.empty() ? fmt("orderable for %d..%d", branched_lo, branched_hi) : "not orderable for" + missing);
}

}  // namespace

int main()
{
    try {
        const auto dir = fs::temp_directory_path() / "tl_acceptance";
        fs::create_directories(dir);
        const auto cfg = m016_config(dir);
        const auto t0 = std::chrono::steady_clock::now();
        const auto m016 = run_analysis(cfg);
        const double t = seconds_since(t0);
        write_outputs(m016, cfg);
        const auto csv1 = slurp(*cfg.csv), report1 = slurp(*cfg.report);

        covergroup_criterion();
        euler_criterion(m016);
        alexander_criterion();
        m016_criteria(m016, t);

        const auto again = run_analysis(cfg);
        write_outputs(again, cfg);
        const bool same_csv = slurp(*cfg.csv) == csv1 && !csv1.empty();
        const bool same_report = slurp(*cfg.report) == report1 && !report1.empty();
        report(7, same_csv && same_report,
               fmt("csv %s, report %s (%zu and %zu bytes)", same_csv ? "identical" : "differs",
                   same_report ? "identical" : "differs", csv1.size(), report1.size()));

        branched_criterion(m016);
    } catch (const std::exception& e) {
        std::printf("acceptance aborted: %s\n", e.what());
        return 1;
    }
    return failures == 0 ? 0 : 1;
}
