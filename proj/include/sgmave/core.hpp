#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace sgmave {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// Regression sample with predictors already in group coordinates,
// columns ordered group by group.
struct Dataset {
  Matrix predictors;  // n x p
  Vector response;    // n

  Index n() const { return predictors.rows(); }
  Index p() const { return predictors.cols(); }
};

// Partition of the p predictors into g contiguous blocks with per-group
// index dimensions. Optional gamma matrices carry a non-trivial group
// basis (default: contiguous coordinate blocks of the identity).
struct GroupStructure {
  std::vector<Index> sizes;   // p_1, ..., p_g
  std::vector<Index> dims;    // d_1, ..., d_g
  std::vector<Matrix> gamma;  // optional, each p x p_l column-orthonormal
  Index max_index_dim = 3;    // exceeding this warns, it does not fail

  Index group_count() const { return static_cast<Index>(sizes.size()); }
  Index total_size() const;
  Index total_dim() const;
  Index offset(Index group) const;      // first predictor column of the group
  Index dim_offset(Index group) const;  // first index column of the group
};

// Block-diagonal basis, one p_l x d_l block per group. Blocks coming out
// of the smoothing stage have orthonormal, sign-normalized columns;
// shrinkage output keeps raw row scales.
struct GroupedBasis {
  std::vector<Matrix> blocks;

  Matrix block_diagonal(const GroupStructure& groups) const;
};

// Local linear coefficients per anchor point plus the kernel weight
// matrix used to fit them. Row i of b concatenates (b_1^i, ..., b_g^i).
struct LocalFit {
  Vector a;                           // n intercepts
  Matrix b;                           // n x d slopes
  Matrix weights;                     // n x n row-stochastic, rows = anchors
  std::vector<std::uint8_t> flagged;  // anchors with degenerate local designs

  Eigen::Block<const Matrix> b_group(const GroupStructure& groups, Index i,
                                     Index group) const {
    return b.block(i, groups.dim_offset(group), 1, groups.dims[group]);
  }
};

// Per-predictor shrinkage multipliers, partitioned like the predictors.
// Exact zeros encode deselected predictors.
struct ShrinkageVector {
  Vector alpha;  // length p

  Eigen::VectorBlock<const Vector> group(const GroupStructure& groups,
                                         Index l) const {
    return alpha.segment(groups.offset(l), groups.sizes[l]);
  }
};

struct PathRecord {
  double lambda = 0.0;
  Vector alpha;
  double rss = std::numeric_limits<double>::quiet_NaN();
  double df = std::numeric_limits<double>::quiet_NaN();
  double bic = std::numeric_limits<double>::quiet_NaN();
  double kkt_residual = 0.0;
  bool cd_converged = true;
  bool rss_degenerate = false;  // rss underflowed to zero, bic is a sentinel
};

// Solutions along a strictly decreasing lambda grid.
struct RegularizationPath {
  std::vector<PathRecord> records;
};

struct FitResult {
  GroupedBasis basis_unshrunk;  // smoothing-stage estimate
  GroupedBasis basis;           // diag(alpha_l) * block_l, not re-orthonormalized
  ShrinkageVector alpha;
  RegularizationPath path;
  double selected_lambda = 0.0;
  std::vector<std::vector<Index>> support;  // nonzero rows per group
  Matrix indices;                           // n x d fitted index values
  bool gmave_converged = true;
  int gmave_iterations = 0;
  bool path_converged = true;
};

// Checks every type invariant of (dataset, groups); throws
// std::invalid_argument naming the first violation. Conditions that are
// allowed but suspicious (total index dimension above max_index_dim)
// append to `warnings` instead.
void validate(const Dataset& data, const GroupStructure& groups,
              std::vector<std::string>* warnings = nullptr);

// V_l = Gamma_l^T x per observation; identity blocks reproduce the input.
Matrix apply_group_bases(const Matrix& X, const GroupStructure& groups);

// Flips column signs so the first entry with |x| > 1e-12 is positive.
void normalize_column_signs(Matrix& m);

// Span-preserving QR orthonormalization with the sign convention applied.
// Throws std::runtime_error if the columns are not full rank.
Matrix orthonormalize(const Matrix& m);

// Nonzero-row index sets of the assembled per-group blocks.
std::vector<std::vector<Index>> nonzero_row_support(
    const std::vector<Matrix>& blocks);

}  // namespace sgmave
