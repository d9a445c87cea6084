#include "tl/orderability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace tl {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

struct Point {
    double x, y;
    bool open;  // parabolic endpoints do not witness their own slope
};

void add_segment(std::vector<SlopeInterval>& out, bool& meridional, Point p, Point q, int a, int b)
{
    // the segment must stay away from the origin
    const double cross = p.x * q.y - p.y * q.x;
    const double len = std::hypot(q.x - p.x, q.y - p.y);
    const double dist = len > 0 ? std::abs(cross) / len : std::hypot(p.x, p.y);
    const double t = len > 0 ? -(p.x * (q.x - p.x) + p.y * (q.y - p.y)) / (len * len) : 0.0;
    if (std::hypot(p.x, p.y) < 1e-9 || std::hypot(q.x, q.y) < 1e-9) return;
    if (dist < 1e-9 && t > 0 && t < 1) return;

    auto slope = [](const Point& s) { return -s.y / s.x; };
    SlopeInterval base;
    base.provenance = {a, b};
    if (p.x == 0.0 && q.x == 0.0) {
        meridional = true;
        return;
    }
    if (p.x == 0.0 || q.x == 0.0) {
        // one end on the vertical line: the image is a half line
        const Point& z = p.x == 0.0 ? p : q;
        const Point& o = p.x == 0.0 ? q : p;
        if (!z.open) meridional = true;
        const double r = slope(o);
        // approaching z the slope runs off to the sign of -z.y o.x
        const bool up = -z.y * o.x > 0;
        SlopeInterval s = base;
        s.witness_x = o.x;
        s.witness_y = o.y;
        if (up) {
            s.lo = r;
            s.hi = inf;
            s.lo_open = o.open;
            s.hi_open = true;
        } else {
            s.lo = -inf;
            s.hi = r;
            s.lo_open = true;
            s.hi_open = o.open;
        }
        out.push_back(s);
        return;
    }
    const double r1 = slope(p), r2 = slope(q);
    if (p.x * q.x < 0) {
        // passes over the vertical line: complement of the open range between the end slopes
        meridional = true;
        const bool p_low = r1 <= r2;
        const Point& lo_pt = p_low ? p : q;
        const Point& hi_pt = p_low ? q : p;
        SlopeInterval left = base, right = base;
        left.lo = -inf;
        left.lo_open = true;
        left.hi = std::min(r1, r2);
        left.hi_open = lo_pt.open;
        left.witness_x = lo_pt.x;
        left.witness_y = lo_pt.y;
        right.lo = std::max(r1, r2);
        right.lo_open = hi_pt.open;
        right.hi = inf;
        right.hi_open = true;
        right.witness_x = hi_pt.x;
        right.witness_y = hi_pt.y;
        out.push_back(left);
        out.push_back(right);
        return;
    }
    SlopeInterval s = base;
    const bool p_low = r1 <= r2;
    s.lo = std::min(r1, r2);
    s.hi = std::max(r1, r2);
    s.lo_open = p_low ? p.open : q.open;
    s.hi_open = p_low ? q.open : p.open;
    if (r1 == r2) s.lo_open = s.hi_open = p.open && q.open;
    s.witness_x = p.x;
    s.witness_y = p.y;
    if (s.lo == s.hi && (s.lo_open || s.hi_open)) return;
    out.push_back(s);
}

}  // namespace

bool SlopeInterval::contains(double r) const
{
    if (r < lo || r > hi) return false;
    if (r == lo && lo_open) return false;
    if (r == hi && hi_open) return false;
    return true;
}

bool SlopeInterval::contains(double a, double b) const { return lo <= a && hi >= b; }

std::vector<SlopeInterval> merge_intervals(std::vector<SlopeInterval> v)
{
    std::sort(v.begin(), v.end(), [](const SlopeInterval& a, const SlopeInterval& b) {
        if (a.lo != b.lo) return a.lo < b.lo;
        return !a.lo_open && b.lo_open;
    });
    std::vector<SlopeInterval> out;
    for (auto& s : v) {
        if (!out.empty()) {
            auto& c = out.back();
            const bool overlap = s.lo < c.hi || (s.lo == c.hi && !(s.lo_open && c.hi_open));
            if (overlap) {
                if (s.hi > c.hi || (s.hi == c.hi && !s.hi_open)) {
                    c.hi = s.hi;
                    c.hi_open = s.hi_open;
                }
                if (s.lo == c.lo && !s.lo_open) c.lo_open = false;
                if (c.provenance.size() < 64) c.provenance.insert(c.provenance.end(), s.provenance.begin(), s.provenance.end());
                continue;
            }
        }
        out.push_back(std::move(s));
    }
    return out;
}

SlopeResult orderable_slopes(const Locus& locus, int sym_range)
{
    SlopeResult res;
    std::vector<SlopeInterval> raw;
    const double kd = static_cast<double>(locus.k);
    auto usable = [](const LocusSample& s) { return !s.has(flag_axis); };
    for (const auto& e : locus.edges) {
        const auto& p = locus.nodes[static_cast<std::size_t>(e.a)];
        const auto& q = locus.nodes[static_cast<std::size_t>(e.b)];
        if (!usable(p) || !usable(q)) continue;
        if (p.has(flag_unverified_nonideal) || q.has(flag_unverified_nonideal)) res.unverified_nonideal_used = true;
        for (int n = -sym_range; n <= sym_range; ++n) {
            const double shift = n * kd;
            const Point a{p.x + shift, p.y, p.has(flag_parabolic) || p.has(flag_alexander)};
            const Point b{q.x + e.shift * kd + shift, q.y, q.has(flag_parabolic) || q.has(flag_alexander)};
            add_segment(raw, res.meridional, a, b, e.a, e.b);
        }
    }
    // isolated samples
    std::vector<int> degree(locus.nodes.size(), 0);
    for (const auto& e : locus.edges) {
        ++degree[static_cast<std::size_t>(e.a)];
        ++degree[static_cast<std::size_t>(e.b)];
    }
    for (std::size_t i = 0; i < locus.nodes.size(); ++i) {
        const auto& s = locus.nodes[i];
        if (degree[i] || s.has(flag_parabolic) || s.has(flag_alexander) || !usable(s)) continue;
        if (s.has(flag_unverified_nonideal)) res.unverified_nonideal_used = true;
        for (int n = -sym_range; n <= sym_range; ++n) {
            const double x = s.x + n * kd;
            if (std::hypot(x, s.y) < 1e-9) continue;
            if (x == 0.0) {
                res.meridional = true;
                continue;
            }
            SlopeInterval iv;
            iv.lo = iv.hi = -s.y / x;
            iv.witness_x = x;
            iv.witness_y = s.y;
            iv.provenance = {static_cast<int>(i)};
            raw.push_back(iv);
        }
    }
    // the abelian axis away from the lattice gives the longitude filling r = 0
    if (std::any_of(locus.axis.begin(), locus.axis.end(), [](const LocusSample& s) { return !s.has(flag_central); })) {
        SlopeInterval iv;
        for (const auto& s : locus.axis)
            if (!s.has(flag_central)) {
                iv.witness_x = s.x;
                break;
            }
        raw.push_back(iv);
    }
    res.intervals = merge_intervals(std::move(raw));
    return res;
}

const char* to_string(BranchedVerdict v)
{
    switch (v) {
    case BranchedVerdict::orderable: return "orderable";
    case BranchedVerdict::unverified: return "unverified";
    case BranchedVerdict::none: return "none";
    case BranchedVerdict::not_applicable: return "not_applicable";
    }
    return "?";
}

BranchedResult branched_cover_check(const Locus& locus, int n, std::int64_t k)
{
    BranchedResult r;
    if (k != 1) {
        r.verdict = BranchedVerdict::not_applicable;
        return r;
    }
    if (n < 1) throw LocusError("branched cover order must be positive");
    const double kd = static_cast<double>(k);
    const double c0 = 1.0 / n;
    bool verified = false;
    for (const auto& e : locus.edges) {
        const auto& p = locus.nodes[static_cast<std::size_t>(e.a)];
        const auto& q = locus.nodes[static_cast<std::size_t>(e.b)];
        const double x1 = p.x, x2 = q.x + e.shift * kd;
        for (int m = -1; m <= 1; ++m) {
            const double c = c0 + m * kd;
            if ((x1 - c) * (x2 - c) > 0 || x1 == x2) continue;
            const double t = (c - x1) / (x2 - x1);
            const double yc = p.y + t * (q.y - p.y);
            if (std::abs(yc) <= 1e-9) {
                r.axis_crossing = true;
                continue;
            }
            ++r.crossings;
            if (!p.has(flag_unverified_nonideal) && !q.has(flag_unverified_nonideal)) verified = true;
        }
    }
    if (!locus.axis.empty()) r.axis_crossing = true;
    if (verified)
        r.verdict = BranchedVerdict::orderable;
    else if (r.crossings > 0)
        r.verdict = BranchedVerdict::unverified;
    return r;
}

}  // namespace tl
