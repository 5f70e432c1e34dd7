#pragma once

#include <cstdint>
#include <optional>
#include <random>

#include <Eigen/Dense>

#include "latcount/geometry.hpp"
#include "latcount/lattice.hpp"
#include "latcount/stats.hpp"

namespace latcount {

// 64-bit Mersenne twister with a portable [0,1) mapping.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}
    Rng(std::uint64_t seed, std::uint64_t stream);
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
    std::uint64_t next() { return eng_(); }

private:
    std::mt19937_64 eng_;
};

struct HaarSample {
    double u = 0.0, v = 1.0;  // point of the modular fundamental domain
    double theta = 0.0;
    Eigen::Matrix2d basis;     // R(theta) (1/sqrt v) [[1, u], [0, v]]
    int proposals = 1;         // draws used by the rejection step
};

HaarSample sample_haar_x2(Rng& rng);

// CDF of v under the normalized hyperbolic measure on the fundamental domain.
double haar_v_cdf(double v);
// P(v > t) for t >= 1 is 3/(pi t); the proposal acceptance rate is pi sqrt(3)/6.
inline constexpr double kHaarAcceptance = 0.90689968211710892;

std::int64_t siegel_value(const LatticeBasis& b, const Region& r, bool primitive);

struct MomentEstimate {
    double estimate = 0.0;     // the requested moment
    double std_error = 0.0;
    double mean = 0.0;         // E[X]
    double second_moment = 0.0;  // E[X^2]
    std::int64_t n_samples = 0;
    std::uint64_t seed = 0;
    std::optional<double> target;
    std::optional<double> z;
    double acceptance_rate = 0.0;
};

struct McOptions {
    std::int64_t n_samples = 100000;
    std::uint64_t seed = 1;
    int threads = 1;
    double extra_rotation = 0.0;  // composed onto every sample
};

// One pass over Haar samples of X_2 accumulating full and primitive counts and
// their squares.
struct SiegelRun {
    RunningStats full, primitive, full_sq, primitive_sq;
    std::int64_t proposals = 0;
    std::int64_t n_samples = 0;
    std::uint64_t seed = 0;
};

SiegelRun mc_siegel_run(const Region& region, const McOptions& opts);

MomentEstimate mc_mean(const Region& region, bool primitive, const McOptions& opts);
MomentEstimate mc_second_moment(const Region& region, bool primitive, const McOptions& opts);
MomentEstimate mean_estimate(const SiegelRun& run, const Region& region, bool primitive);
MomentEstimate second_moment_estimate(const SiegelRun& run, const Region& region, bool primitive);

// vol^2 + 2 zeta(d/2)^2 vol, d >= 3
double rogers_second_moment_bound(int d, double vol);
// (vol/zeta(d))^2 + vol/zeta(d) + overlap/zeta(d), d >= 3
double primitive_second_moment_d3(int d, double vol, double sym_overlap_vol);
// vol^2 + vol
double affine_second_moment(double vol);

// Area of the intersection of two discs of radius R whose centres are t apart.
double disc_overlap_area(double R, double t);
// sum over lattice vectors l of area(B cap (B + l)) for the disc B of radius R;
// equals the xi-average of #((L + xi) cap B)^2.
double disc_pair_sum(const LatticeBasis& b, double R);

}  // namespace latcount
