#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "tl/alexander.hpp"
#include "tl/covergroup.hpp"
#include "tl/presentation.hpp"

namespace tl {

enum SampleFlag : unsigned {
    flag_parabolic = 1u << 0,
    flag_central = 1u << 1,
    flag_compact_excluded = 1u << 2,
    flag_unverified_nonideal = 1u << 3,
    flag_mirror = 1u << 4,  // from the rep conjugated by an orientation reversing reflection
    flag_axis = 1u << 5,
    flag_alexander = 1u << 6,  // synthetic node at an Alexander point
};

std::string flags_to_string(unsigned flags);
unsigned flags_from_string(const std::string& s);

struct LocusSample {
    double x = 0.0;  // trans of the lifted meridian
    double y = 0.0;  // trans of the lifted longitude
    unsigned flags = 0;
    int branch_id = -1;
    int angle_index = -1;

    bool has(SampleFlag f) const { return (flags & f) != 0; }
    bool operator==(const LocusSample&) const = default;
};

struct LocusError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Throws LocusError when a peripheral element is hyperbolic.
LocusSample eval_sample(const LiftedRep& lift, const Presentation& p);

// Representative under the dihedral symmetry group generated by x -> x + k
// and the half turns about (k n / 2, 0): 0 <= x <= k/2, with y >= 0 when x is 0 or k/2.
LocusSample normalize_sample(LocusSample s, std::int64_t k);
// Representative under translations only, 0 <= x < k.
LocusSample strip_sample(LocusSample s, std::int64_t k);

// Character class of tracked points over one sample angle, with its oriented samples.
struct ClassSamples {
    std::vector<int> branches;
    std::vector<LocusSample> samples;  // 0, 1 or 2 entries
};

struct LocusInput {
    int n_samples = 0;
    int start_index = 0;
    std::vector<int> monodromy;
    std::int64_t k = 1;
    std::vector<std::vector<ClassSamples>> frames;  // by angle index
    std::vector<AlexanderPoint> alexander;
    bool assume_small = false;
};

// Segment from nodes[a] to nodes[b] + (shift * k, 0).
struct LocusEdge {
    int a = 0, b = 0;
    int shift = 0;
    bool operator==(const LocusEdge&) const = default;
};

struct Locus {
    std::int64_t k = 1;
    std::vector<LocusSample> nodes;  // strip normalized
    std::vector<LocusEdge> edges;
    std::vector<LocusSample> axis;
    std::vector<AlexanderPoint> alexander;
    int dropped_long_edges = 0;
    int alexander_links = 0;
    int fold_links = 0;

    // Chains of edges as polylines in unwrapped coordinates.
    std::vector<std::vector<std::pair<double, double>>> arcs() const;
};

Locus assemble_arcs(const LocusInput& in);

// max |c(x, y) - (tr^2 mu, tr^2 lambda, tr^2 mu lambda)| for
// c(x, y) = 4 (cos^2(pi x), cos^2(pi y), cos^2(pi (x + y))).
double pillowcase_residual(double x, double y, double tr2_mu, double tr2_lambda, double tr2_mulambda);

// Hausdorff distance between the sample set and its image under (x, y) -> (k - x, -y), x taken mod k.
double symmetry_discrepancy(const std::vector<LocusSample>& samples, std::int64_t k);

void export_csv(const Locus& locus, const std::filesystem::path& path, const std::string& header_comment);
std::vector<LocusSample> read_csv(const std::filesystem::path& path);
void export_svg(const Locus& locus, const std::filesystem::path& path, const std::string& header_comment);

}  // namespace tl
