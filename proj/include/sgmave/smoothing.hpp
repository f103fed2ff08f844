#pragma once

#include "sgmave/core.hpp"

namespace sgmave {

// Gaussian product kernel with a single bandwidth.
struct KernelConfig {
  double bandwidth = 0.0;
};

// h = {4/(d+2)}^{1/(d+4)} n^{-1/(d+4)}
double default_bandwidth(Index n, Index d);

// Bandwidth for the first-iteration weights, before any basis exists:
// the same rule with d replaced by p, inflated by 2.
double initial_bandwidth(Index n, Index p);

// Row-stochastic kernel weights over projected predictor differences.
// `projections` holds one projected observation per row; entry (i, j)
// weights observation j around anchor i via the Gaussian kernel at
// (row_j - row_i) / h. Constants are dropped and each row is normalized
// with its maximum exponent subtracted, so small bandwidths cannot
// underflow the row sum through the diagonal term.
Matrix kernel_weights(const Matrix& projections, const KernelConfig& config);

// First-iteration weights: the full-dimensional kernel over the raw
// predictors.
Matrix initial_weights(const Matrix& predictors, double h0);

}  // namespace sgmave
