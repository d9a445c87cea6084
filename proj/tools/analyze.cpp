#include <iostream>

#include <CLI11.hpp>

#include "tl/pipeline.hpp"

int main(int argc, char** argv)
{
    CLI::App app{"Translation extension loci and orderable Dehn fillings"};
    app.require_subcommand(1);
    auto* analyze = app.add_subcommand("analyze", "run the full pipeline on a manifold file");

    tl::RunConfig cfg;
    std::string csv, svg, report, frames;
    bool small_on = false, small_off = false, quiet = false;
    analyze->add_option("input", cfg.input, "manifold JSON file")->required();
    analyze->add_option("--samples", cfg.tracking.n_samples, "sample angles on the unit circle (power of 2)")
        ->capture_default_str();
    analyze->add_option("--bits", cfg.tracking.polish_bits, "polishing precision in bits")->capture_default_str();
    analyze->add_option("--attempts", cfg.tracking.seed_attempts, "random Newton starts for the initial fiber")
        ->capture_default_str();
    analyze->add_option("--sym-range", cfg.sym_range, "translates |n| used for slopes")->capture_default_str();
    analyze->add_option("--seed", cfg.tracking.rng_seed, "random seed")->capture_default_str();
    analyze->add_option("--workers", cfg.tracking.workers, "worker threads, 0 for all cores")->capture_default_str();
    analyze->add_option("--branched-max", cfg.branched_max, "largest branched cover order checked")->capture_default_str();
    analyze->add_option("--csv", csv, "locus samples as CSV");
    analyze->add_option("--svg", svg, "locus plot as SVG");
    analyze->add_option("--report", report, "JSON report");
    analyze->add_option("--frames", frames, "dump of tracked fibers, one JSON object per line");
    analyze->add_flag("--assume-small", small_on, "treat the manifold as small (no ideal points)");
    analyze->add_flag("--no-assume-small", small_off, "do not treat the manifold as small");
    analyze->add_option("--tol-real", cfg.tol_real, "reality tolerance")->capture_default_str();
    analyze->add_option("--tol-parabolic", cfg.tol_parabolic, "parabolic tolerance on tr^2")->capture_default_str();
    analyze->add_flag("-q,--quiet", quiet, "no phase timings on stderr");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 3;
    }
    if (small_on && small_off) {
        std::cerr << "input error: --assume-small and --no-assume-small are exclusive\n";
        return 3;
    }
    if (small_on) cfg.assume_small = true;
    if (small_off) cfg.assume_small = false;
    if (!csv.empty()) cfg.csv = csv;
    if (!svg.empty()) cfg.svg = svg;
    if (!report.empty()) cfg.report = report;
    if (!frames.empty()) cfg.frames = frames;
    cfg.verbose = !quiet;
    return tl::run_analyze(cfg);
}
