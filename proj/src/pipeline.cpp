#include "tl/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "tl/covergroup.hpp"
#include "tl/parallel.hpp"
#include "tl/reality.hpp"

namespace tl {

namespace {

constexpr const char* version = "tl 1.0.0";

class PhaseTimer {
public:
    explicit PhaseTimer(bool on) : on_(on), t_(std::chrono::steady_clock::now()) {}
    void mark(const std::string& phase, const std::string& detail = {})
    {
        const auto now = std::chrono::steady_clock::now();
        if (on_) {
            std::fprintf(stderr, "[%-9s] %7.2fs  %s\n", phase.c_str(),
                         std::chrono::duration<double>(now - t_).count(), detail.c_str());
        }
        t_ = now;
    }

private:
    bool on_;
    std::chrono::steady_clock::time_point t_;
};

std::string read_text(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open " + path.string());
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

// Trace coordinates separating characters: tr^2 of generators and
// tr(g_i) tr(g_j) tr(g_i g_j) for pairs.  All are algebraic integers.
std::vector<cd> char_key(const std::vector<CMat2>& g)
{
    std::vector<cd> key;
    for (const auto& m : g) key.push_back(m.trace() * m.trace());
    for (std::size_t i = 0; i < g.size(); ++i)
        for (std::size_t j = i + 1; j < g.size(); ++j) key.push_back(g[i].trace() * g[j].trace() * (g[i] * g[j]).trace());
    return key;
}

std::vector<BigComplex> big_char_key(const std::vector<BigMat2>& g)
{
    std::vector<BigComplex> key;
    for (const auto& m : g) {
        const BigComplex t = big_trace(m);
        key.push_back(t * t);
    }
    for (std::size_t i = 0; i < g.size(); ++i)
        for (std::size_t j = i + 1; j < g.size(); ++j)
            key.push_back(big_trace(g[i]) * big_trace(g[j]) * big_trace(big_product(g[i], g[j])));
    return key;
}

bool keys_close(const std::vector<cd>& a, const std::vector<cd>& b, double tol)
{
    for (std::size_t i = 0; i < a.size(); ++i)
        if (std::abs(a[i] - b[i]) > tol * (1 + std::abs(a[i]))) return false;
    return true;
}

bool big_close(const BigComplex& a, const BigComplex& b, double tol)
{
    return magnitude(a - b) <= tol * (1 + magnitude(a));
}

bool big_keys_close(const std::vector<BigComplex>& a, const std::vector<BigComplex>& b, double tol)
{
    for (std::size_t i = 0; i < a.size(); ++i)
        if (!big_close(a[i], b[i], tol)) return false;
    return true;
}

enum class Status { pending, polish_failed, nonreal, degenerate, compact, twisted, circle, hyperbolic, unliftable, lifted, merged };

struct ClassJob {
    int j = 0;
    std::vector<int> branches;
    RepPoint rep;
    Status status = Status::pending;
    bool repolished = false;
    std::vector<BigComplex> key;
    double defect = 1;
    std::vector<LocusSample> samples;
    double pillowcase = 0;
    bool geometric = false;
};

std::optional<LocusSample> lifted_sample(const std::vector<Mat2>& m, const Presentation& p, bool& unliftable)
{
    const LiftedRep lift = canonical_lifts(m);
    const EulerData e = solve_lift(euler_defects(lift, p));
    if (!e.solvable || !e.adjustment) {
        unliftable = true;
        return std::nullopt;
    }
    return eval_sample(shift_generators(lift, *e.adjustment), p);
}

void classify_job(const RepSystem& sys, ClassJob& job, const RunConfig& cfg)
{
    const auto& p = sys.presentation();
    RealRep rr;
    try {
        rr = real_form(sys, job.rep);
    } catch (const RealityError&) {
        job.status = Status::degenerate;
        return;
    }
    if (rr.form == RealForm::compact) {
        job.status = Status::compact;
        return;
    }
    if (rr.form == RealForm::twisted) {
        job.status = Status::twisted;
        return;
    }
    if (rr.form == RealForm::circle) {
        job.status = Status::circle;
        return;
    }
    const auto [tm, tl] = classify_peripheral(rr, p, cfg.tol_parabolic);
    if (tm == IsometryType::hyperbolic || tl == IsometryType::hyperbolic) {
        job.status = Status::hyperbolic;
        return;
    }
    const bool parabolic = tm == IsometryType::parabolic || tl == IsometryType::parabolic;

    // the reflection diag(1, -1) reverses the circle and gives the mirror sample
    std::vector<Mat2> mirror;
    for (const auto& m : rr.matrices) {
        Mat2 d = m;
        d(0, 1) = -d(0, 1);
        d(1, 0) = -d(1, 0);
        mirror.push_back(d);
    }
    bool unliftable = false;
    try {
        for (int side = 0; side < 2; ++side) {
            auto s = lifted_sample(side == 0 ? rr.matrices : mirror, p, unliftable);
            if (!s) break;
            s->branch_id = job.rep.branch_id;
            s->angle_index = job.j;
            if (parabolic) s->flags |= flag_parabolic;
            if (side == 1) s->flags |= flag_mirror;
            job.samples.push_back(*s);
        }
    } catch (const LocusError&) {
        job.samples.clear();
        job.status = Status::hyperbolic;
        return;
    } catch (const LiftError&) {
        job.samples.clear();
        job.status = Status::degenerate;
        return;
    }
    if (unliftable) {
        job.samples.clear();
        job.status = Status::unliftable;
        return;
    }

    // pillowcase consistency against the precise traces
    const auto g = precise_matrices(sys, job.rep);
    auto tr2 = [&](const Word& w) {
        const BigComplex t = big_trace(big_word(g, w));
        return (t * t).re.to_double();
    };
    const double t_mu = tr2(p.meridian), t_la = tr2(p.longitude), t_ml = tr2(concat(p.meridian, p.longitude));
    for (const auto& s : job.samples)
        job.pillowcase = std::max(job.pillowcase, pillowcase_residual(s.x, s.y, t_mu, t_la, t_ml));
    job.status = Status::lifted;
}

// Real members of Galois orbits of non-real characters over the z = 1 fiber.
// Orbits are the minimal subsets, closed under conjugation, on which every
// key coordinate has integral elementary symmetric functions.
int mark_geometric(std::vector<ClassJob*>& fiber, int bits, int& orbit_size)
{
    const double tol = std::ldexp(1.0, -bits / 2);
    const std::size_t n = fiber.size();
    std::vector<bool> taken(n, false);
    std::vector<std::vector<std::size_t>> units;
    auto is_real = [&](const ClassJob& c) {
        for (const auto& v : c.key)
            if (std::abs(v.im.to_double()) > tol * (1 + magnitude(v))) return false;
        return true;
    };
    for (std::size_t i = 0; i < n; ++i) {
        if (taken[i]) continue;
        taken[i] = true;
        std::vector<std::size_t> u{i};
        if (!is_real(*fiber[i])) {
            for (std::size_t j = i + 1; j < n; ++j) {
                if (taken[j] || fiber[j]->key.size() != fiber[i]->key.size()) continue;
                bool match = true;
                for (std::size_t c = 0; c < fiber[i]->key.size() && match; ++c)
                    match = big_close(fiber[j]->key[c], conj(fiber[i]->key[c]), tol);
                if (match) {
                    taken[j] = true;
                    u.push_back(j);
                    break;
                }
            }
        }
        units.push_back(u);
    }
    const std::size_t U = units.size();
    if (U == 0 || U > 24) return 0;

    auto integral = [&](const std::vector<std::size_t>& members) {
        const std::size_t coords = fiber[members[0]]->key.size();
        const mpfr_prec_t b = fiber[members[0]]->key[0].bits();
        for (std::size_t c = 0; c < coords; ++c) {
            std::vector<BigComplex> poly{BigComplex({1.0, 0.0}, b)};
            for (auto m : members) {
                const BigComplex& v = fiber[m]->key[c];
                std::vector<BigComplex> next(poly.size() + 1, BigComplex(b));
                for (std::size_t i = 0; i < poly.size(); ++i) {
                    next[i + 1] += poly[i];
                    next[i] -= poly[i] * v;
                }
                poly = std::move(next);
            }
            for (const auto& e : poly) {
                const double scale = std::max(1.0, magnitude(e));
                BigFloat r = e.re;
                mpfr_round(r.get(), e.re.get());
                if (magnitude(BigComplex(e.re - r, e.im)) > tol * scale) return false;
            }
        }
        return true;
    };

    std::vector<bool> used(U, false);
    int marked = 0;
    orbit_size = 0;
    for (std::size_t size = 1; size <= U; ++size) {
        std::vector<std::size_t> idx(size);
        for (std::size_t i = 0; i < size; ++i) idx[i] = i;
        while (true) {
            bool free = true;
            for (auto i : idx) free = free && !used[i];
            if (free) {
                std::vector<std::size_t> members;
                for (auto i : idx) members.insert(members.end(), units[i].begin(), units[i].end());
                if (integral(members)) {
                    bool complex = false;
                    for (auto i : idx) complex = complex || units[i].size() == 2 || !is_real(*fiber[units[i][0]]);
                    for (auto i : idx) used[i] = true;
                    if (complex) {
                        orbit_size += static_cast<int>(members.size());
                        for (auto m : members)
                            if (is_real(*fiber[m])) {
                                fiber[m]->geometric = true;
                                ++marked;
                            }
                    }
                }
            }
            // next combination
            int pos = static_cast<int>(size) - 1;
            while (pos >= 0 && idx[static_cast<std::size_t>(pos)] == U - size + static_cast<std::size_t>(pos)) --pos;
            if (pos < 0) break;
            ++idx[static_cast<std::size_t>(pos)];
            for (std::size_t i = static_cast<std::size_t>(pos) + 1; i < size; ++i) idx[i] = idx[i - 1] + 1;
        }
    }
    return marked;
}

nlohmann::json number(double v)
{
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return v;
}

}  // namespace

std::uint64_t fnv1a(const std::string& s)
{
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string hex64(std::uint64_t v)
{
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

void RunConfig::validate() const
{
    tracking.validate();
    if (sym_range < 0) throw InputError("sym_range must be non-negative");
    if (branched_max < 2) throw InputError("branched bound must be at least 2");
    if (!(tol_real > 0) || !(tol_parabolic > 0)) throw InputError("tolerances must be positive");
}

std::string RunConfig::canonical(const std::string& input_text) const
{
    std::ostringstream s;
    s << version << '\n'
      << "input_fnv " << hex64(fnv1a(input_text)) << '\n'
      << "samples " << tracking.n_samples << '\n'
      << "bits " << tracking.polish_bits << '\n'
      << "attempts " << tracking.seed_attempts << '\n'
      << "seed " << tracking.rng_seed << '\n'
      << "dedup_tol " << tracking.dedup_tol << '\n'
      << "max_halvings " << tracking.max_halvings << '\n'
      << "sym_range " << sym_range << '\n'
      << "branched_max " << branched_max << '\n'
      << "tol_real " << tol_real << '\n'
      << "tol_parabolic " << tol_parabolic << '\n'
      << "assume_small " << (assume_small ? (*assume_small ? "on" : "off") : "input") << '\n';
    return s.str();
}

AnalysisResult run_analysis(const RunConfig& cfg)
{
    cfg.validate();
    PhaseTimer timer(cfg.verbose);
    AnalysisResult res;
    const std::string text = read_text(cfg.input);
    res.canonical_config = cfg.canonical(text);
    res.config_hash = hex64(fnv1a(res.canonical_config));

    Presentation p = parse_manifold(cfg.input);
    if (cfg.assume_small) p.assume_small = *cfg.assume_small;
    res.assume_small = p.assume_small;
    res.presentation = p;
    res.homology = abelianization_data(p);
    const auto& h = res.homology;
    timer.mark("parse", p.name + " rank " + std::to_string(p.rank) + " k " + std::to_string(h.k));

    res.alexander = alexander_polynomial(p, h);
    res.roots = unit_circle_roots(res.alexander);
    res.alexander_points = alexander_points(res.roots, static_cast<int>(h.k));
    res.lspace_form = lspace_form_check(res.alexander);
    timer.mark("alexander", res.alexander.to_string());

    RepSystem sys(p, h);
    TrackingConfig tcfg = cfg.tracking;
    if (tcfg.workers == 0) tcfg.workers = default_workers();
    const int N = tcfg.n_samples;
    const int bits = tcfg.polish_bits;

    TrackResult track;
    if (sys.trackable()) {
        const cd z0 = 0.99 * std::exp(cd(0, 0.17));
        const SeedResult seed = seed_fiber(sys, z0, tcfg);
        res.seeded_nonabelian = seed.nonabelian;
        res.rank_deficient = seed.rank_deficient;
        res.warning_no_nonabelian = seed.warning_no_nonabelian;
        timer.mark("seed", std::to_string(seed.nonabelian) + " non-abelian, " +
                               std::to_string(seed.rank_deficient) + " rank deficient rejected");
        track = track_circle(sys, seed.frame, tcfg);
        res.start_index = track.start_index;
        res.monodromy = track.monodromy;
        res.monodromy_bijective = track.monodromy_bijective;
        res.added_branches = track.added_branches;
        for (const auto& e : track.events) res.events[e.kind] += std::max(1, e.count);
        timer.mark("track", std::to_string(track.frames.size()) + " frames, " + std::to_string(track.added_branches) +
                                " branches added by monodromy");
    }

    // character classes per frame
    std::vector<ClassJob> jobs;
    for (std::size_t j = 0; j < track.frames.size(); ++j) {
        const auto& fr = track.frames[j];
        std::vector<std::vector<cd>> keys;
        std::vector<std::size_t> mine;
        for (const auto& pt : fr.points) {
            if (pt.abelian) continue;
            const auto key = char_key(pt.matrices);
            bool found = false;
            for (std::size_t c = 0; c < keys.size() && !found; ++c)
                if (keys_close(keys[c], key, 1e-6)) {
                    auto& job = jobs[mine[c]];
                    job.branches.push_back(pt.branch_id);
                    if (pt.branch_id < job.rep.branch_id) job.rep = pt;
                    found = true;
                }
            if (found) continue;
            keys.push_back(key);
            mine.push_back(jobs.size());
            ClassJob job;
            job.j = static_cast<int>(j);
            job.branches = {pt.branch_id};
            job.rep = pt;
            jobs.push_back(std::move(job));
        }
    }

    parallel_for(jobs.size(), tcfg.workers, [&](std::size_t i) {
        auto& job = jobs[i];
        try {
            job.rep = polish(sys, job.rep, bits);
            job.defect = reality_defect(sys, job.rep);
            if (job.defect >= cfg.tol_real && job.defect < 1e4 * cfg.tol_real) {
                job.rep = polish(sys, job.rep, std::min(1024, 2 * bits));
                job.defect = reality_defect(sys, job.rep);
                job.repolished = true;
            }
            job.key = big_char_key(precise_matrices(sys, job.rep));
        } catch (const PolishError&) {
            job.status = Status::polish_failed;
        }
    });

    // classes that only agree after polishing
    const double merge_tol = std::ldexp(1.0, -bits / 2);
    for (std::size_t a = 0; a < jobs.size(); ++a) {
        if (jobs[a].status != Status::pending) continue;
        for (std::size_t b = a + 1; b < jobs.size() && jobs[b].j == jobs[a].j; ++b) {
            if (jobs[b].status != Status::pending || !big_keys_close(jobs[a].key, jobs[b].key, merge_tol)) continue;
            jobs[a].branches.insert(jobs[a].branches.end(), jobs[b].branches.begin(), jobs[b].branches.end());
            if (jobs[b].rep.branch_id < jobs[a].rep.branch_id) std::swap(jobs[a].rep, jobs[b].rep);
            jobs[b].status = Status::merged;
        }
    }
    for (auto& job : jobs)
        if (job.status == Status::pending && job.defect >= cfg.tol_real) job.status = Status::nonreal;
    timer.mark("polish", std::to_string(jobs.size()) + " classes at " + std::to_string(bits) + " bits");

    if (cfg.frames) {
        // class representatives are dumped at full precision
        auto frames = track.frames;
        for (const auto& job : jobs) {
            if (job.rep.precise.empty()) continue;
            for (auto& pt : frames[static_cast<std::size_t>(job.j)].points)
                if (pt.branch_id == job.rep.branch_id) pt = job.rep;
        }
        write_frames(*cfg.frames, frames, {{"version", version}, {"config_hash", res.config_hash}});
    }

    parallel_for(jobs.size(), tcfg.workers, [&](std::size_t i) {
        if (jobs[i].status == Status::pending) classify_job(sys, jobs[i], cfg);
    });

    std::vector<ClassJob*> fiber;
    for (auto& job : jobs)
        if (job.j == 0 && job.status != Status::polish_failed && job.status != Status::merged) fiber.push_back(&job);
    res.geometric_real_members = mark_geometric(fiber, bits, res.geometric_orbit_size);

    auto& c = res.counts;
    LocusInput in;
    in.n_samples = N;
    in.start_index = track.start_index;
    in.monodromy = track.monodromy;
    in.k = h.k;
    in.alexander = res.alexander_points;
    in.assume_small = p.assume_small;
    in.frames.resize(track.frames.size());
    for (const auto& job : jobs) {
        if (job.status == Status::merged) continue;
        ++c.classes;
        if (job.status != Status::polish_failed) {
            ++c.polished;
            res.max_polish_residual = std::max(res.max_polish_residual, job.rep.residual);
            res.max_commutator_residual = std::max(res.max_commutator_residual, job.rep.commutator_residual);
        }
        if (job.repolished) ++c.repolished;
        switch (job.status) {
        case Status::polish_failed: ++c.polish_failed; break;
        case Status::nonreal: ++c.nonreal; break;
        case Status::degenerate: ++c.degenerate; break;
        case Status::compact: ++c.compact; break;
        case Status::twisted: ++c.twisted; break;
        case Status::circle: ++c.circle; break;
        case Status::hyperbolic: ++c.hyperbolic; break;
        case Status::unliftable: ++c.unliftable; break;
        case Status::lifted: ++c.lifted; break;
        default: break;
        }
        ClassSamples cs;
        cs.branches = job.branches;
        std::sort(cs.branches.begin(), cs.branches.end());
        cs.samples = job.samples;
        res.max_pillowcase = std::max(res.max_pillowcase, job.pillowcase);
        for (const auto& s : job.samples) {
            if (!s.has(flag_parabolic)) continue;
            ParabolicPoint pp;
            pp.x = s.x;
            pp.y = s.y;
            pp.branch_id = s.branch_id;
            pp.mirror = s.has(flag_mirror);
            pp.geometric = job.geometric;
            const double ry = std::round(s.y);
            pp.odd_y = std::abs(s.y - ry) < 1e-3 && std::fmod(std::abs(ry), 2.0) == 1.0;
            res.parabolic.push_back(pp);
            res.max_parabolic_lattice_distance =
                std::max({res.max_parabolic_lattice_distance, std::abs(s.x - std::round(s.x)), std::abs(s.y - ry)});
        }
        in.frames[static_cast<std::size_t>(job.j)].push_back(std::move(cs));
    }
    timer.mark("reality", std::to_string(c.lifted) + " lifted, " + std::to_string(c.nonreal) + " non-real, " +
                              std::to_string(c.compact) + " compact, " + std::to_string(c.unliftable) + " unliftable");

    res.locus = assemble_arcs(in);
    std::vector<LocusSample> pts;
    for (const auto& s : res.locus.nodes)
        if (!s.has(flag_alexander)) pts.push_back(s);
    res.symmetry = symmetry_discrepancy(pts, h.k);
    for (const auto& s : pts) res.max_abs_y = std::max(res.max_abs_y, std::abs(s.y));
    if (p.genus) {
        res.milnor_wood_bound = std::max(2.0 * *p.genus - 1, 0.0) / static_cast<double>(h.k);
        res.milnor_wood_ok = res.max_abs_y <= res.milnor_wood_bound + 1e-9;
    }
    timer.mark("locus", std::to_string(res.locus.nodes.size()) + " nodes, " + std::to_string(res.locus.edges.size()) +
                            " edges");

    res.slopes = orderable_slopes(res.locus, cfg.sym_range);
    for (int n = 2; n <= cfg.branched_max; ++n) res.branched[n] = branched_cover_check(res.locus, n, h.k);
    timer.mark("order", std::to_string(res.slopes.intervals.size()) + " intervals");
    return res;
}

std::string report_json(const AnalysisResult& r, const RunConfig& cfg)
{
    using nlohmann::json;
    json j;
    j["version"] = version;
    j["config_hash"] = r.config_hash;
    j["config"] = {{"samples", cfg.tracking.n_samples},
                   {"bits", cfg.tracking.polish_bits},
                   {"attempts", cfg.tracking.seed_attempts},
                   {"seed", cfg.tracking.rng_seed},
                   {"dedup_tol", cfg.tracking.dedup_tol},
                   {"max_halvings", cfg.tracking.max_halvings},
                   {"sym_range", cfg.sym_range},
                   {"branched_max", cfg.branched_max},
                   {"tol_real", cfg.tol_real},
                   {"tol_parabolic", cfg.tol_parabolic}};
    j["manifold"] = {{"name", r.presentation.name},
                     {"generators", r.presentation.rank},
                     {"relators", r.presentation.relators.size()},
                     {"k", r.homology.k},
                     {"torsion_order", r.homology.torsion_order},
                     {"assume_small", r.assume_small}};
    if (r.presentation.genus) j["manifold"]["genus"] = *r.presentation.genus;

    json roots = json::array();
    for (const auto& x : r.roots)
        roots.push_back({{"argument", x.argument}, {"multiplicity", x.multiplicity}, {"simple", x.simple}});
    json apts = json::array();
    for (const auto& a : r.alexander_points)
        apts.push_back({{"x", a.x}, {"multiple", a.multiple}, {"excluded", a.excluded}});
    j["alexander"] = {{"polynomial", r.alexander.to_string()},
                      {"unit_circle_roots", roots},
                      {"points", apts},
                      {"lspace_form", r.lspace_form}};

    json ev = json::object();
    for (const auto& [k, v] : r.events) ev[k] = v;
    j["tracking"] = {{"seeded_nonabelian", r.seeded_nonabelian},
                     {"rank_deficient_rejected", r.rank_deficient},
                     {"warning_no_nonabelian", r.warning_no_nonabelian},
                     {"start_index", r.start_index},
                     {"monodromy", r.monodromy},
                     {"monodromy_bijective", r.monodromy_bijective},
                     {"added_branches", r.added_branches},
                     {"events", ev}};
    const auto& c = r.counts;
    j["classes"] = {{"total", c.classes},         {"polished", c.polished},     {"polish_failed", c.polish_failed},
                    {"nonreal", c.nonreal},       {"repolished", c.repolished}, {"compact_excluded", c.compact},
                    {"twisted", c.twisted},       {"circle", c.circle},         {"degenerate", c.degenerate},
                    {"hyperbolic", c.hyperbolic}, {"unliftable", c.unliftable}, {"lifted", c.lifted}};
    j["checks"] = {{"max_polish_residual", r.max_polish_residual},
                   {"max_commutator_residual", r.max_commutator_residual},
                   {"max_pillowcase_residual", r.max_pillowcase},
                   {"symmetry_discrepancy", r.symmetry},
                   {"max_abs_y", r.max_abs_y},
                   {"milnor_wood_ok", r.milnor_wood_ok},
                   {"max_parabolic_lattice_distance", r.max_parabolic_lattice_distance}};
    if (r.milnor_wood_bound >= 0) j["checks"]["milnor_wood_bound"] = r.milnor_wood_bound;

    json par = json::array();
    for (const auto& pp : r.parabolic)
        par.push_back({{"x", pp.x}, {"y", pp.y}, {"branch_id", pp.branch_id}, {"mirror", pp.mirror},
                       {"geometric", pp.geometric}, {"odd_y", pp.odd_y}});
    j["parabolic_points"] = par;
    j["geometric_orbit"] = {{"size", r.geometric_orbit_size}, {"real_members", r.geometric_real_members}};

    j["locus"] = {{"nodes", r.locus.nodes.size()},
                  {"edges", r.locus.edges.size()},
                  {"axis_samples", r.locus.axis.size()},
                  {"dropped_long_edges", r.locus.dropped_long_edges},
                  {"alexander_links", r.locus.alexander_links},
                  {"fold_links", r.locus.fold_links}};

    json iv = json::array();
    for (const auto& s : r.slopes.intervals)
        iv.push_back({{"lo", number(s.lo)},
                      {"hi", number(s.hi)},
                      {"lo_open", s.lo_open},
                      {"hi_open", s.hi_open},
                      {"witness", {s.witness_x, s.witness_y}},
                      {"provenance", s.provenance}});
    j["orderable_slopes"] = {{"intervals", iv}, {"meridional", r.slopes.meridional}};
    json br = json::object();
    for (const auto& [n, b] : r.branched)
        br[std::to_string(n)] = {{"verdict", to_string(b.verdict)}, {"crossings", b.crossings}, {"axis_crossing", b.axis_crossing}};
    j["branched_covers"] = br;
    j["caveats"] = {{"irreducibility_assumed", true},
                    {"unverified_nonideal_used", r.slopes.unverified_nonideal_used}};
    return j.dump(2) + "\n";
}

std::string report_text(const AnalysisResult& r)
{
    std::ostringstream s;
    char buf[256];
    s << r.presentation.name << "  (config " << r.config_hash << ")\n";
    s << "  k = " << r.homology.k << ", |H1 torsion| = " << r.homology.torsion_order << "\n";
    s << "  Alexander polynomial: " << r.alexander.to_string() << "\n";
    for (const auto& x : r.roots) {
        std::snprintf(buf, sizeof buf, "    unit root at argument %+.9f, multiplicity %d%s\n", x.argument, x.multiplicity,
                      x.simple ? " (simple)" : "");
        s << buf;
    }
    s << "  L-space form: " << (r.lspace_form ? "yes" : "no") << "\n";
    const auto& c = r.counts;
    s << "  classes " << c.classes << ": lifted " << c.lifted << ", non-real " << c.nonreal << ", compact " << c.compact
      << ", twisted " << c.twisted << ", unliftable " << c.unliftable << ", hyperbolic " << c.hyperbolic
      << ", polish failures " << c.polish_failed << "\n";
    s << "  locus: " << r.locus.nodes.size() << " nodes, " << r.locus.edges.size() << " edges\n";
    std::snprintf(buf, sizeof buf, "  checks: pillowcase %.2e, symmetry %.2e, max |y| %.4f\n", r.max_pillowcase, r.symmetry,
                  r.max_abs_y);
    s << buf;
    s << "  orderable slopes:\n";
    for (const auto& iv : r.slopes.intervals) {
        if (iv.lo == iv.hi)
            std::snprintf(buf, sizeof buf, "    r = %.6g\n", iv.lo);
        else
            std::snprintf(buf, sizeof buf, "    %c%.6g, %.6g%c\n", iv.lo_open ? '(' : '[', iv.lo, iv.hi, iv.hi_open ? ')' : ']');
        s << buf;
    }
    if (r.slopes.meridional) s << "    r = inf (meridian)\n";
    std::map<std::string, std::vector<int>> by;
    for (const auto& [n, b] : r.branched) by[to_string(b.verdict)].push_back(n);
    s << "  branched covers:";
    for (const auto& [v, ns] : by) {
        s << " " << v << " {";
        for (std::size_t i = 0; i < ns.size(); ++i) {
            std::size_t e = i;
            while (e + 1 < ns.size() && ns[e + 1] == ns[e] + 1) ++e;
            s << (i ? "," : "") << ns[i];
            if (e > i) s << "-" << ns[e];
            i = e;
        }
        s << "}";
    }
    s << "\n  caveats: irreducibility assumed";
    if (r.slopes.unverified_nonideal_used) s << ", non-ideal points not verified";
    s << "\n";
    return s.str();
}

void write_outputs(const AnalysisResult& r, const RunConfig& cfg)
{
    const std::string header = std::string(version) + " " + r.presentation.name + " config " + r.config_hash;
    try {
        if (cfg.csv) export_csv(r.locus, *cfg.csv, header);
        if (cfg.svg) export_svg(r.locus, *cfg.svg, header);
    } catch (const LocusError& e) {
        throw InputError(e.what());
    }
    if (cfg.report) {
        std::ofstream out(*cfg.report, std::ios::binary);
        if (!out) throw InputError("cannot write " + cfg.report->string());
        out << report_json(r, cfg);
        if (!out) throw InputError("write failed for " + cfg.report->string());
    }
}

int run_analyze(const RunConfig& cfg)
{
    try {
        const AnalysisResult r = run_analysis(cfg);
        write_outputs(r, cfg);
        std::cout << report_text(r);
        return 0;
    } catch (const InputError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 3;
    } catch (const TrackingError& e) {
        std::cerr << "tracking failed: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace tl
