#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "tl/bigfloat.hpp"
#include "tl/presentation.hpp"

namespace tl {

using cd = std::complex<double>;
using CMat2 = Eigen::Matrix2cd;
using BigMat2 = std::array<BigComplex, 4>;  // row-major a, b, c, d

struct TrackingConfig {
    int n_samples = 128;
    int seed_attempts = 400;
    double dedup_tol = 1e-6;
    int max_halvings = 12;
    int polish_bits = 256;
    std::uint64_t rng_seed = 1;
    unsigned workers = 0;  // 0 = available parallelism

    void validate() const;
};

struct RepPoint {
    std::vector<cd> params;
    std::vector<CMat2> matrices;
    double residual = 0.0;
    double commutator_residual = 0.0;
    int precision_bits = 53;
    int branch_id = -1;
    int angle_index = -1;
    std::vector<int> signs;  // relator i maps to signs[i] * I
    cd hmu = 1.0;
    // Constraint value z; exactly exp(2 pi i target_num / target_den) when target_den > 0.
    cd target = 1.0;
    std::int64_t target_num = 0, target_den = 0;

    // Abelian points send g to diag(w^f(g), w^-f(g)) with
    // w = exp(i pi phase_num / phase_den); params = {w}.
    bool abelian = false;
    std::int64_t phase_num = 0, phase_den = 1;

    // Filled by polish.
    std::vector<BigComplex> precise;
};

struct FiberFrame {
    int angle_index = 0;
    cd target = 1.0;
    std::vector<RepPoint> points;
    std::vector<int> dead_branches;
};

struct TrackingEvent {
    int branch_id = -1;
    int angle_index = -1;
    std::string kind;  // "halving", "singular", "dead", "landing_failed"
    int count = 0;
};

struct TrackingError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct PolishError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Representation variety of a presentation in the normal form
//   a = [[s, 1], [0, 1/s]],  b = [[t, 0], [u, 1/t]],
// further generators as free matrices with a determinant equation.
// Equations: each relator equals its sign times I, and
// tr(mu)^2 = z + 2 + 1/z for the holonomy parameter z.
class RepSystem {
public:
    RepSystem(Presentation p, HomologyData h);

    const Presentation& presentation() const { return p_; }
    const HomologyData& homology() const { return h_; }
    int unknowns() const { return unknowns_; }
    int equations() const { return equations_; }
    bool trackable() const { return p_.rank >= 2; }
    std::vector<std::vector<int>> sign_systems() const;

    std::vector<CMat2> generator_matrices(const std::vector<cd>& x) const;
    std::vector<CMat2> abelian_matrices(cd w) const;
    CMat2 word_matrix(const std::vector<CMat2>& gens, const Word& w) const;

    Eigen::VectorXcd residual(const std::vector<cd>& x, cd z, const std::vector<int>& signs) const;
    void residual_jacobian(const std::vector<cd>& x, cd z, const std::vector<int>& signs,
                           Eigen::VectorXcd& f, Eigen::MatrixXcd& jac) const;

    // Residual and Jacobian at big precision, with the trace condition
    // in the unsquared form tr(mu) = c.
    std::vector<BigComplex> residual(const std::vector<BigComplex>& x, const BigComplex& c,
                                     const std::vector<int>& signs) const;
    std::vector<std::vector<BigComplex>> jacobian(const std::vector<BigComplex>& x,
                                                  const BigComplex& c,
                                                  const std::vector<int>& signs) const;

    // Action of flipping the sign of generator g on parameters and relator signs.
    void flip_generator(int g, std::vector<cd>& x, std::vector<int>& signs) const;
    void canonicalize(std::vector<cd>& x, std::vector<int>& signs) const;

    RepPoint make_point(std::vector<cd> x, std::vector<int> signs, cd z) const;
    RepPoint abelian_point(std::int64_t phase_num, std::int64_t phase_den) const;

private:
    Presentation p_;
    HomologyData h_;
    int unknowns_ = 0;
    int equations_ = 0;
};

// Square of the eigenvalue of rho(mu).  With a reference the choice
// closest to it is taken, otherwise the eigenvalue of modulus >= 1.
cd holonomy_mu(const CMat2& mu, std::optional<cd> reference = std::nullopt);
cd holonomy_mu(const RepSystem& sys, const RepPoint& r, std::optional<cd> reference = std::nullopt);

struct SeedResult {
    FiberFrame frame;
    int nonabelian = 0;
    int rank_deficient = 0;  // converged attempts rejected as lying on positive dimensional fibers
    bool warning_no_nonabelian = false;
};

SeedResult seed_fiber(const RepSystem& sys, cd z0, const TrackingConfig& cfg);

struct TrackResult {
    std::vector<FiberFrame> frames;  // indexed by angle
    int start_index = 0;             // tracking starts and wraps here
    std::vector<int> monodromy;      // branch -> branch after one loop
    bool monodromy_bijective = true;
    int added_branches = 0;          // found by closing up the monodromy
    std::vector<TrackingEvent> events;
};

TrackResult track_circle(const RepSystem& sys, const FiberFrame& start, const TrackingConfig& cfg);

RepPoint polish(const RepSystem& sys, const RepPoint& r, int bits);
// Matrices of a polished point at its working precision.
std::vector<BigMat2> precise_matrices(const RepSystem& sys, const RepPoint& r);
BigMat2 big_word(const std::vector<BigMat2>& gens, const Word& w);
BigMat2 big_product(const BigMat2& x, const BigMat2& y);
BigComplex big_trace(const BigMat2& m);

// One JSON object per point; a non-null header is written as the first line.
void write_frames(const std::filesystem::path& path, const std::vector<FiberFrame>& frames,
                  const nlohmann::json& header = nullptr);
std::vector<RepPoint> read_frames(const std::filesystem::path& path);

}  // namespace tl
