#include "tl/locus.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include "tl/reality.hpp"

namespace tl {

namespace {

constexpr std::pair<SampleFlag, const char*> flag_names[] = {
    {flag_parabolic, "parabolic"}, {flag_central, "central"},     {flag_compact_excluded, "compact_excluded"},
    {flag_unverified_nonideal, "unverified_nonideal"},              {flag_mirror, "mirror"},
    {flag_axis, "axis"},           {flag_alexander, "alexander"},
};

double wrap_shift(double from, double to, double k) { return std::round((from - to) / k); }

std::string fmt(const char* f, double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

double median(std::vector<double> v)
{
    if (v.empty()) return 0.0;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2), v.end());
    return v[v.size() / 2];
}

}  // namespace

std::string flags_to_string(unsigned flags)
{
    std::string out;
    for (const auto& [f, name] : flag_names)
        if (flags & f) {
            if (!out.empty()) out += '|';
            out += name;
        }
    return out;
}

unsigned flags_from_string(const std::string& s)
{
    unsigned flags = 0;
    std::stringstream in(s);
    std::string item;
    while (std::getline(in, item, '|')) {
        if (item.empty()) continue;
        bool found = false;
        for (const auto& [f, name] : flag_names)
            if (item == name) {
                flags |= f;
                found = true;
            }
        if (!found) throw LocusError("unknown sample flag " + item);
    }
    return flags;
}

LocusSample eval_sample(const LiftedRep& lift, const Presentation& p)
{
    const LiftedElement mu = evaluate(lift, p.meridian);
    const LiftedElement lambda = evaluate(lift, p.longitude);
    const auto tm = classify_matrix(mu.matrix);
    const auto tl = classify_matrix(lambda.matrix);
    if (tm == IsometryType::hyperbolic || tl == IsometryType::hyperbolic)
        throw LocusError("hyperbolic peripheral element");
    LocusSample s;
    s.x = translation_number(mu);
    s.y = translation_number(lambda);
    if (tm == IsometryType::parabolic || tl == IsometryType::parabolic) s.flags |= flag_parabolic;
    if (tm == IsometryType::central) s.flags |= flag_central;
    return s;
}

LocusSample strip_sample(LocusSample s, std::int64_t k)
{
    const double kd = static_cast<double>(k);
    s.x -= kd * std::floor(s.x / kd);
    if (s.x >= kd) s.x -= kd;
    return s;
}

LocusSample normalize_sample(LocusSample s, std::int64_t k)
{
    const double kd = static_cast<double>(k);
    s = strip_sample(s, k);
    if (s.x > kd / 2) {
        s.x = kd - s.x;
        s.y = -s.y;
    }
    if ((s.x == 0.0 || s.x == kd / 2) && s.y < 0) s.y = -s.y;
    if (s.y == 0.0) s.y = 0.0;  // no negative zero
    return s;
}

Locus assemble_arcs(const LocusInput& in)
{
    Locus L;
    L.k = in.k;
    L.alexander = in.alexander;
    const double kd = static_cast<double>(in.k);
    const int N = in.n_samples;

    // nodes
    std::vector<std::vector<std::vector<int>>> node_of(in.frames.size());
    for (std::size_t j = 0; j < in.frames.size(); ++j) {
        node_of[j].resize(in.frames[j].size());
        for (std::size_t c = 0; c < in.frames[j].size(); ++c)
            for (auto s : in.frames[j][c].samples) {
                if (!in.assume_small) s.flags |= flag_unverified_nonideal;
                node_of[j][c].push_back(static_cast<int>(L.nodes.size()));
                L.nodes.push_back(strip_sample(s, in.k));
            }
    }

    auto offset = [&](int a, int b) {  // shift bringing node b nearest to node a
        return static_cast<int>(wrap_shift(L.nodes[static_cast<std::size_t>(a)].x, L.nodes[static_cast<std::size_t>(b)].x, kd));
    };
    auto length = [&](const LocusEdge& e) {
        const auto& p = L.nodes[static_cast<std::size_t>(e.a)];
        const auto& q = L.nodes[static_cast<std::size_t>(e.b)];
        return std::hypot(q.x + e.shift * kd - p.x, q.y - p.y);
    };
    auto make_edge = [&](int a, int b) { return LocusEdge{a, b, offset(a, b)}; };

    // edges between consecutive angles, following branches and the monodromy at the wrap
    std::vector<LocusEdge> edges;
    const int last = ((in.start_index - 1) % N + N) % N;
    for (int j = 0; j < N && static_cast<std::size_t>(j) < in.frames.size(); ++j) {
        const int jn = (j + 1) % N;
        std::map<int, int> class_of;
        for (std::size_t c = 0; c < in.frames[static_cast<std::size_t>(jn)].size(); ++c)
            for (int b : in.frames[static_cast<std::size_t>(jn)][c].branches) class_of[b] = static_cast<int>(c);
        for (std::size_t c = 0; c < in.frames[static_cast<std::size_t>(j)].size(); ++c) {
            std::set<int> succ;
            for (int b : in.frames[static_cast<std::size_t>(j)][c].branches) {
                int nb = b;
                if (j == last) nb = b < static_cast<int>(in.monodromy.size()) ? in.monodromy[static_cast<std::size_t>(b)] : -1;
                if (auto it = class_of.find(nb); it != class_of.end()) succ.insert(it->second);
            }
            const auto& A = node_of[static_cast<std::size_t>(j)][c];
            for (int c2 : succ) {
                const auto& B = node_of[static_cast<std::size_t>(jn)][static_cast<std::size_t>(c2)];
                if (A.empty() || B.empty()) continue;
                if (A.size() == 2 && B.size() == 2) {
                    const double same = length(make_edge(A[0], B[0])) + length(make_edge(A[1], B[1]));
                    const double swap = length(make_edge(A[0], B[1])) + length(make_edge(A[1], B[0]));
                    if (same <= swap) {
                        edges.push_back(make_edge(A[0], B[0]));
                        edges.push_back(make_edge(A[1], B[1]));
                    } else {
                        edges.push_back(make_edge(A[0], B[1]));
                        edges.push_back(make_edge(A[1], B[0]));
                    }
                } else {
                    for (int a : A) {
                        int best = B[0];
                        for (int b : B)
                            if (length(make_edge(a, b)) < length(make_edge(a, best))) best = b;
                        edges.push_back(make_edge(a, best));
                    }
                }
            }
        }
    }

    // continuity: drop edges much longer than typical
    std::vector<double> lens;
    for (const auto& e : edges) lens.push_back(length(e));
    const double med = median(lens);
    for (const auto& e : edges) {
        if (med > 0 && length(e) > 10 * med) {
            ++L.dropped_long_edges;
            continue;
        }
        if (std::find(L.edges.begin(), L.edges.end(), e) == L.edges.end()) L.edges.push_back(e);
    }

    std::vector<int> degree(L.nodes.size(), 0);
    std::vector<double> last_len(L.nodes.size(), 0.0);
    for (const auto& e : L.edges) {
        ++degree[static_cast<std::size_t>(e.a)];
        ++degree[static_cast<std::size_t>(e.b)];
        last_len[static_cast<std::size_t>(e.a)] = last_len[static_cast<std::size_t>(e.b)] = length(e);
    }
    const std::size_t real_nodes = L.nodes.size();

    // arcs ending next to an Alexander point are joined to it
    std::map<std::size_t, int> alex_node;
    for (std::size_t n = 0; n < real_nodes; ++n) {
        if (degree[n] != 1) continue;
        const auto& p = L.nodes[n];
        double best = 3 * last_len[n];
        int which = -1;
        for (std::size_t a = 0; a < in.alexander.size(); ++a) {
            if (in.alexander[a].excluded) continue;
            const double shift = wrap_shift(p.x, in.alexander[a].x, kd);
            const double d = std::hypot(in.alexander[a].x + shift * kd - p.x, p.y);
            if (d < best) {
                best = d;
                which = static_cast<int>(a);
            }
        }
        if (which < 0) continue;
        auto [it, added] = alex_node.try_emplace(static_cast<std::size_t>(which), static_cast<int>(L.nodes.size()));
        if (added) {
            LocusSample s;
            s.x = in.alexander[static_cast<std::size_t>(which)].x;
            s.flags = flag_alexander;
            L.nodes.push_back(s);
            degree.push_back(0);
        }
        L.edges.push_back(make_edge(static_cast<int>(n), it->second));
        ++degree[n];
        ++degree[static_cast<std::size_t>(it->second)];
        ++L.alexander_links;
    }

    // folds: two loose ends at neighbouring angles close to each other
    std::vector<int> ends;
    for (std::size_t n = 0; n < real_nodes; ++n)
        if (degree[n] == 1) ends.push_back(static_cast<int>(n));
    std::vector<bool> used(L.nodes.size(), false);
    for (std::size_t i = 0; i < ends.size(); ++i) {
        const int a = ends[i];
        if (used[static_cast<std::size_t>(a)]) continue;
        int best = -1;
        double bd = 3 * med;
        for (std::size_t j = i + 1; j < ends.size(); ++j) {
            const int b = ends[j];
            if (used[static_cast<std::size_t>(b)]) continue;
            const int dj = std::abs(L.nodes[static_cast<std::size_t>(a)].angle_index - L.nodes[static_cast<std::size_t>(b)].angle_index);
            if (std::min(dj, N - dj) > 1) continue;
            const double d = length(make_edge(a, b));
            if (d < bd) {
                bd = d;
                best = b;
            }
        }
        if (best < 0) continue;
        used[static_cast<std::size_t>(a)] = used[static_cast<std::size_t>(best)] = true;
        L.edges.push_back(make_edge(a, best));
        ++L.fold_links;
    }

    // analytic abelian axis
    const int per_unit = std::max(N, 16);
    for (int i = 0; i <= per_unit * static_cast<int>(in.k); ++i) {
        LocusSample s;
        s.x = static_cast<double>(i) / per_unit;
        s.flags = flag_axis;
        if (i % per_unit == 0) s.flags |= flag_central;
        s.angle_index = i;
        L.axis.push_back(s);
    }
    return L;
}

std::vector<std::vector<std::pair<double, double>>> Locus::arcs() const
{
    const double kd = static_cast<double>(k);
    std::vector<std::vector<std::pair<int, std::size_t>>> adj(nodes.size());
    for (std::size_t e = 0; e < edges.size(); ++e) {
        adj[static_cast<std::size_t>(edges[e].a)].push_back({edges[e].b, e});
        adj[static_cast<std::size_t>(edges[e].b)].push_back({edges[e].a, e});
    }
    std::vector<bool> used(edges.size(), false);
    std::vector<std::vector<std::pair<double, double>>> out;
    auto walk = [&](int start) {
        std::vector<std::pair<double, double>> line{{nodes[static_cast<std::size_t>(start)].x, nodes[static_cast<std::size_t>(start)].y}};
        int u = start;
        double ux = nodes[static_cast<std::size_t>(u)].x;
        for (;;) {
            bool moved = false;
            for (auto [v, e] : adj[static_cast<std::size_t>(u)]) {
                if (used[e]) continue;
                used[e] = true;
                const auto& E = edges[e];
                const double delta = (E.a == u ? nodes[static_cast<std::size_t>(E.b)].x + E.shift * kd - nodes[static_cast<std::size_t>(E.a)].x
                                               : nodes[static_cast<std::size_t>(E.a)].x - E.shift * kd - nodes[static_cast<std::size_t>(E.b)].x);
                ux += delta;
                u = v;
                line.push_back({ux, nodes[static_cast<std::size_t>(u)].y});
                moved = true;
                break;
            }
            if (!moved || adj[static_cast<std::size_t>(u)].size() != 2) break;
        }
        out.push_back(std::move(line));
    };
    for (std::size_t n = 0; n < nodes.size(); ++n)
        if (adj[n].size() != 2)
            while (std::any_of(adj[n].begin(), adj[n].end(), [&](auto p) { return !used[p.second]; })) walk(static_cast<int>(n));
    for (std::size_t n = 0; n < nodes.size(); ++n)
        if (adj[n].empty() && !nodes[n].has(flag_alexander)) out.push_back({{nodes[n].x, nodes[n].y}});
    for (std::size_t n = 0; n < nodes.size(); ++n)
        while (std::any_of(adj[n].begin(), adj[n].end(), [&](auto p) { return !used[p.second]; })) walk(static_cast<int>(n));
    return out;
}

double pillowcase_residual(double x, double y, double tr2_mu, double tr2_lambda, double tr2_mulambda)
{
    const double pi = std::numbers::pi;
    auto c = [pi](double t) {
        const double v = std::cos(pi * t);
        return 4 * v * v;
    };
    return std::max({std::abs(c(x) - tr2_mu), std::abs(c(y) - tr2_lambda), std::abs(c(x + y) - tr2_mulambda)});
}

double symmetry_discrepancy(const std::vector<LocusSample>& samples, std::int64_t k)
{
    if (samples.empty()) return 0.0;
    const double kd = static_cast<double>(k);
    std::vector<std::pair<double, double>> pts;
    for (const auto& s : samples) pts.push_back({s.x - kd * std::floor(s.x / kd), s.y});
    std::sort(pts.begin(), pts.end());
    auto nearest = [&](double x, double y) {
        double best = std::numeric_limits<double>::infinity();
        for (double shift : {-kd, 0.0, kd}) {
            const double xs = x + shift;
            auto it = std::lower_bound(pts.begin(), pts.end(), std::make_pair(xs, -std::numeric_limits<double>::infinity()));
            for (auto r = it; r != pts.end() && r->first - xs < best; ++r) best = std::min(best, std::hypot(r->first - xs, r->second - y));
            for (auto l = it; l != pts.begin();) {
                --l;
                if (xs - l->first >= best) break;
                best = std::min(best, std::hypot(l->first - xs, l->second - y));
            }
        }
        return best;
    };
    double worst = 0;
    for (const auto& [x, y] : pts) worst = std::max(worst, nearest(kd - x, -y));
    return worst;
}

void export_csv(const Locus& locus, const std::filesystem::path& path, const std::string& header_comment)
{
    std::ofstream out(path);
    if (!out) throw LocusError("cannot write " + path.string());
    out << "# " << header_comment << '\n';
    out << "branch_id,angle_index,x,y,flags\n";
    char buf[128];
    auto row = [&](const LocusSample& s) {
        std::snprintf(buf, sizeof buf, "%d,%d,%.17g,%.17g,", s.branch_id, s.angle_index, s.x, s.y);
        out << buf << flags_to_string(s.flags) << '\n';
    };
    for (const auto& s : locus.nodes) row(s);
    for (const auto& s : locus.axis) row(s);
    if (!out) throw LocusError("write failed for " + path.string());
}

std::vector<LocusSample> read_csv(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw LocusError("cannot open " + path.string());
    std::vector<LocusSample> out;
    std::string line;
    bool header = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!header) {
            header = true;
            continue;
        }
        std::stringstream ss(line);
        std::string f[5];
        for (int i = 0; i < 4; ++i) std::getline(ss, f[i], ',');
        std::getline(ss, f[4]);
        LocusSample s;
        s.branch_id = std::stoi(f[0]);
        s.angle_index = std::stoi(f[1]);
        s.x = std::strtod(f[2].c_str(), nullptr);
        s.y = std::strtod(f[3].c_str(), nullptr);
        s.flags = flags_from_string(f[4]);
        out.push_back(s);
    }
    return out;
}

void export_svg(const Locus& locus, const std::filesystem::path& path, const std::string& header_comment)
{
    const double kd = static_cast<double>(locus.k);
    double ymax = 0;
    for (const auto& s : locus.nodes) ymax = std::max(ymax, std::abs(s.y));
    const double Y = std::ceil(ymax) + 1;
    const double size = 640, margin = 40, w = size - 2 * margin;
    auto px = [&](double x) { return fmt("%.3f", margin + x / kd * w); };
    auto py = [&](double y) { return fmt("%.3f", size / 2 - y / Y * (w / 2)); };

    std::ofstream out(path);
    if (!out) throw LocusError("cannot write " + path.string());
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"640\" viewBox=\"0 0 640 640\">\n";
    out << "<!-- " << header_comment << " -->\n";
    out << "<defs><clipPath id=\"strip\"><rect x=\"" << px(0) << "\" y=\"" << py(Y) << "\" width=\"" << fmt("%.3f", w)
        << "\" height=\"" << fmt("%.3f", w) << "\"/></clipPath></defs>\n";
    out << "<rect x=\"0\" y=\"0\" width=\"640\" height=\"640\" fill=\"white\"/>\n";
    out << "<rect x=\"" << px(0) << "\" y=\"" << py(Y) << "\" width=\"" << fmt("%.3f", w) << "\" height=\"" << fmt("%.3f", w)
        << "\" fill=\"none\" stroke=\"#888\" stroke-width=\"1\"/>\n";

    out << "<g font-family=\"sans-serif\" font-size=\"10\" fill=\"#444\">\n";
    for (int i = 0; i <= locus.k; ++i)
        out << "<text x=\"" << px(i) << "\" y=\"" << fmt("%.3f", size - margin + 14) << "\" text-anchor=\"middle\">" << i << "</text>\n";
    const int ystep = Y > 12 ? static_cast<int>(std::ceil(Y / 6)) : 1;
    for (int i = -static_cast<int>(Y); i <= static_cast<int>(Y); i += 1) {
        if (i % ystep != 0) continue;
        out << "<line x1=\"" << px(0) << "\" y1=\"" << py(i) << "\" x2=\"" << fmt("%.3f", margin - 4) << "\" y2=\"" << py(i)
            << "\" stroke=\"#888\"/>\n";
        out << "<text x=\"" << fmt("%.3f", margin - 6) << "\" y=\"" << fmt("%.3f", std::stod(py(i)) + 3)
            << "\" text-anchor=\"end\">" << i << "</text>\n";
    }
    out << "</g>\n";

    out << "<line x1=\"" << px(0) << "\" y1=\"" << py(0) << "\" x2=\"" << px(kd) << "\" y2=\"" << py(0)
        << "\" stroke=\"black\" stroke-width=\"1.5\"/>\n";

    out << "<g clip-path=\"url(#strip)\" fill=\"none\" stroke=\"#c03020\" stroke-width=\"1.2\">\n";
    for (const auto& arc : locus.arcs()) {
        for (double shift : {-kd, 0.0, kd}) {
            if (arc.size() == 1) {
                out << "<circle cx=\"" << px(arc[0].first + shift) << "\" cy=\"" << py(arc[0].second)
                    << "\" r=\"1.5\" fill=\"#c03020\" stroke=\"none\"/>\n";
                continue;
            }
            out << "<polyline points=\"";
            for (std::size_t i = 0; i < arc.size(); ++i) {
                if (i) out << ' ';
                out << px(arc[i].first + shift) << ',' << py(arc[i].second);
            }
            out << "\"/>\n";
        }
    }
    out << "</g>\n";

    // parabolic lattice points; those on x = 0 mod k as half disks on the strip sides
    std::set<std::pair<long, long>> seen;
    const double r = 5;
    for (const auto& s : locus.nodes) {
        if (!s.has(flag_parabolic)) continue;
        long xi = std::lround(s.x);
        if (xi == locus.k) xi = 0;
        const long yi = std::lround(s.y);
        if (!seen.insert({xi, yi}).second) continue;
        const double cy = std::stod(py(static_cast<double>(yi)));
        if (xi != 0) {
            out << "<circle cx=\"" << px(static_cast<double>(xi)) << "\" cy=\"" << fmt("%.3f", cy) << "\" r=\"" << fmt("%.3f", r)
                << "\" fill=\"#2a8a2a\"/>\n";
            continue;
        }
        for (double side : {0.0, kd}) {
            const double cx = std::stod(px(side));
            out << "<path d=\"M " << fmt("%.3f", cx) << ' ' << fmt("%.3f", cy - r) << " A " << fmt("%.3f", r) << ' '
                << fmt("%.3f", r) << " 0 0 " << (side == 0.0 ? 1 : 0) << ' ' << fmt("%.3f", cx) << ' ' << fmt("%.3f", cy + r)
                << " Z\" fill=\"#2a8a2a\"/>\n";
        }
    }

    for (const auto& a : locus.alexander) {
        const char* fill = a.excluded ? "none" : a.multiple ? "#103a8a" : "#7fb2ee";
        out << "<circle cx=\"" << px(a.x) << "\" cy=\"" << py(0) << "\" r=\"4\" fill=\"" << fill
            << "\" stroke=\"#103a8a\" stroke-width=\"1\"/>\n";
    }
    out << "</svg>\n";
    if (!out) throw LocusError("write failed for " + path.string());
}

}  // namespace tl
