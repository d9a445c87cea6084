#pragma once

#include <map>
#include <string>
#include <vector>

#include "tl/locus.hpp"

namespace tl {

struct SlopeInterval {
    double lo = 0.0, hi = 0.0;  // may be infinite
    bool lo_open = false, hi_open = false;
    std::vector<int> provenance;  // witnessing node indices
    // witness on L_r: translated x' with |y + r x'| small
    double witness_x = 0.0, witness_y = 0.0;

    bool contains(double r) const;
    bool contains(double a, double b) const;  // the open interval (a, b)
};

struct SlopeResult {
    std::vector<SlopeInterval> intervals;  // merged, sorted, disjoint
    bool meridional = false;               // the meridian filling (slope infinity) is witnessed
    bool unverified_nonideal_used = false;
};

SlopeResult orderable_slopes(const Locus& locus, int sym_range);
std::vector<SlopeInterval> merge_intervals(std::vector<SlopeInterval> v);

enum class BranchedVerdict { orderable, unverified, none, not_applicable };
const char* to_string(BranchedVerdict v);

struct BranchedResult {
    BranchedVerdict verdict = BranchedVerdict::none;
    int crossings = 0;       // non-axis arcs crossing x = 1/n away from the axis
    bool axis_crossing = false;
};

BranchedResult branched_cover_check(const Locus& locus, int n, std::int64_t k);

}  // namespace tl
