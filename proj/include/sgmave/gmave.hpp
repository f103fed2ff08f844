#pragma once

#include "sgmave/core.hpp"

namespace sgmave {

struct GmaveOptions {
  double tol = 1e-6;        // Frobenius gap of block projection matrices
  int max_iter = 50;        // outer alternation limit
  double ridge = 1e-8;      // scaled ridge added to every normal-equation solve
  // refined-MAVE bandwidth continuation: the alternation starts with the
  // target bandwidth inflated by anneal_start and shrinks it by
  // anneal_decay per refresh until the target is reached; wide early
  // neighborhoods keep correlated designs out of bad basins. The refined
  // pass always runs at the target bandwidth.
  double anneal_start = 4.0;
  double anneal_decay = 0.7;
};

// Objective values recorded at fixed weights within one outer iteration:
// entering the iteration, after the local solve, and after the basis
// solve evaluated at the raw (pre-orthonormalization) blocks. Each triple
// must be non-increasing.
struct IterationTrace {
  double entering;
  double after_local;
  double after_basis;
};

struct GmaveResult {
  GroupedBasis basis;        // refined estimate (final basis update)
  LocalFit local;            // intercepts/slopes fitted under refined weights
  bool converged = false;
  int iterations = 0;
  Index degenerate_anchors = 0;  // anchors flagged at least once
  std::vector<IterationTrace> trace;
};

// Per-group start: left singular vectors of the matrix whose columns are
// the centered per-observation covariance contributions (v_l^i - mean) *
// (y^i - mean); coordinate vectors when that matrix is rank-deficient.
GroupedBasis initial_basis(const Dataset& data, const GroupStructure& groups);

// n x d matrix of projected predictors, row i = concatenated B_l^T v_l^i.
Matrix project(const Matrix& predictors, const GroupStructure& groups,
               const GroupedBasis& basis);

// Weighted local linear fit around every anchor: for anchor i, minimizes
// sum_j {y^j - a - sum_l b_l' B_l'(v_l^j - v_l^i)}^2 w_j^i over (a, b).
// Anchors whose normal equations cannot be solved to relative residual
// 1e-8 are flagged and keep `previous` coefficients when provided.
LocalFit solve_local(const Dataset& data, const GroupStructure& groups,
                     const GroupedBasis& basis, const Matrix& weights,
                     const LocalFit* previous = nullptr, double ridge = 1e-8);

// Joint weighted least squares over vec(B_1), ..., vec(B_g) with local
// coefficients fixed, before orthonormalization. Flagged anchors are
// excluded from the accumulated rows.
std::vector<Matrix> solve_basis_raw(const Dataset& data,
                                    const GroupStructure& groups,
                                    const LocalFit& local, double ridge = 1e-8);

// Raw solve followed by per-block orthonormalization and sign
// normalization. Returns `previous` unchanged when all slopes vanish.
GroupedBasis solve_basis(const Dataset& data, const GroupStructure& groups,
                         const LocalFit& local, const GroupedBasis& previous,
                         double ridge = 1e-8);

// Value of the smoothing objective at fixed weights:
// sum_i sum_j w_j^i {y^j - a^i - b^i'(u^j - u^i)}^2 with u = projected rows.
double gmave_objective(const Dataset& data, const GroupStructure& groups,
                       const GroupedBasis& basis, const LocalFit& local);

// Full group-wise MAVE fit: initial weights, alternation with a kernel
// refresh from the current basis each outer iteration, then one refined
// pass (weights from the converged basis, local re-fit, final basis
// update).
GmaveResult gmave_fit(const Dataset& data, const GroupStructure& groups,
                      const GmaveOptions& options = {});

}  // namespace sgmave
