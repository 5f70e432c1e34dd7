#pragma once

#include <Eigen/Dense>

#include "latcount/lattice.hpp"

namespace latcount::detail {

using LReal = long double;
using LMat = Eigen::Matrix<LReal, Eigen::Dynamic, Eigen::Dynamic>;
using LVec = Eigen::Matrix<LReal, Eigen::Dynamic, 1>;

// Reduces the columns of B0.  On return B = B0 * U (recomputed from B0, not
// accumulated) and U is unimodular.
void reduce_columns(const LMat& B0, LMat& B, IntMat& U);

}  // namespace latcount::detail
