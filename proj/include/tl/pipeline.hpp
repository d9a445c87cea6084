#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tl/alexander.hpp"
#include "tl/locus.hpp"
#include "tl/orderability.hpp"
#include "tl/repvar.hpp"

namespace tl {

struct RunConfig {
    std::filesystem::path input;
    TrackingConfig tracking;
    int sym_range = 100;
    int branched_max = 50;
    double tol_real = 1e-8;
    double tol_parabolic = 1e-8;
    std::optional<bool> assume_small;
    std::optional<std::filesystem::path> csv, svg, report, frames;
    bool verbose = true;  // phase timings on stderr

    void validate() const;
    // Canonical text of everything that influences the results.
    std::string canonical(const std::string& input_text) const;
};

std::uint64_t fnv1a(const std::string& s);
std::string hex64(std::uint64_t v);

struct ClassCounts {
    int classes = 0;
    int polished = 0;
    int polish_failed = 0;
    int nonreal = 0;
    int repolished = 0;
    int compact = 0;
    int twisted = 0;
    int circle = 0;
    int degenerate = 0;
    int hyperbolic = 0;
    int unliftable = 0;
    int lifted = 0;
};

struct ParabolicPoint {
    double x = 0, y = 0;
    int branch_id = -1;
    bool mirror = false;
    bool geometric = false;  // real member of the Galois orbit of a non-real character
    bool odd_y = false;
};

struct AnalysisResult {
    std::string config_hash;
    std::string canonical_config;
    Presentation presentation;
    HomologyData homology;
    LaurentPoly alexander;
    std::vector<UnitCircleRoot> roots;
    std::vector<AlexanderPoint> alexander_points;
    bool lspace_form = false;

    int seeded_nonabelian = 0;
    int rank_deficient = 0;
    bool warning_no_nonabelian = false;
    int start_index = 0;
    bool monodromy_bijective = true;
    int added_branches = 0;
    std::vector<int> monodromy;
    std::map<std::string, int> events;

    ClassCounts counts;
    double max_pillowcase = 0;
    double max_polish_residual = 0;
    double max_commutator_residual = 0;
    double max_parabolic_lattice_distance = 0;
    double symmetry = 0;
    double milnor_wood_bound = -1;  // negative when no genus is given
    double max_abs_y = 0;
    bool milnor_wood_ok = true;

    std::vector<ParabolicPoint> parabolic;
    int geometric_orbit_size = 0;
    int geometric_real_members = 0;

    Locus locus;
    SlopeResult slopes;
    std::map<int, BranchedResult> branched;
    bool assume_small = false;
};

// Runs the whole pipeline; throws InputError, TrackingError or other exceptions on failure.
AnalysisResult run_analysis(const RunConfig& cfg);

std::string report_json(const AnalysisResult& r, const RunConfig& cfg);
std::string report_text(const AnalysisResult& r);
void write_outputs(const AnalysisResult& r, const RunConfig& cfg);

// Full command line entry point; returns the exit code (0, 2 tracking failure, 3 input error).
int run_analyze(const RunConfig& cfg);

}  // namespace tl
