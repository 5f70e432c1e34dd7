#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "latcount/geometry.hpp"
#include "latcount/lattice.hpp"

namespace latcount {

struct ApproximatePair {
    IntVec p;
    std::int64_t q = 0;
    Eigen::VectorXd err;  // q x - p
    Eigen::VectorXd dir;  // err / |err|; empty when err = 0
    double err_norm = 0.0;
    bool exact() const { return err_norm == 0.0; }
};

// All (p, q) with 1 <= q <= T and |q x - p| < c q^{-1/d_x}, sorted by q and
// then lexicographically by p.
std::vector<ApproximatePair> enumerate_approximates(const Eigen::VectorXd& x, double c, double T,
                                                    bool coprime = false);

struct SpiralCounts {
    std::int64_t total = 0;   // non-exact approximates
    std::int64_t in_cap = 0;
    std::int64_t exact = 0;   // excluded: err = 0
    std::optional<double> ratio;  // empty when total = 0
};

SpiralCounts spiralling_counts(const Eigen::VectorXd& x, double c, double T, const SphericalCap& cap,
                               bool coprime = false);

struct CountRow {
    double T = 0.0;
    std::int64_t count = 0;
    double target = 0.0;
    double residual = 0.0;
};

struct CountingSeries {
    std::vector<CountRow> rows;
    std::int64_t exact_approximates = 0;
    bool degenerate = false;  // x has an exact approximate (rational direction)
};

// target = c^{d_x} B_{d_x} log T, divided by zeta(d_x + 1) when coprime.
double approximate_count_target(int dx, double c, double T, bool coprime);

// Single pass over q up to the last grid point.
CountingSeries counting_series(const Eigen::VectorXd& x, double c, const std::vector<double>& T_grid,
                               bool coprime = false);

}  // namespace latcount
