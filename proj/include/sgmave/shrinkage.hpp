#pragma once

#include "sgmave/core.hpp"
#include "sgmave/gmave.hpp"

namespace sgmave {

enum class PenaltyKind { lasso, scad, mcp };

struct PenaltySpec {
  PenaltyKind kind = PenaltyKind::lasso;
  double lambda = 0.0;
  double a = 3.7;      // SCAD shape, must exceed 2
  double gamma = 3.0;  // MCP shape, must exceed 1
};

// The penalized problem as a weighted regression over all n^2 ordered
// pairs: row (i, j) lives at index i*n + j, its group-l segment is
// b_l^i' B_l' diag(v_l^j - v_l^i), the response is y^j - a^i and the row
// weight is the refined kernel weight.
//
// The descent loop minimizes loss_scale * sum_k w_k (r_k - x_k'alpha)^2
// plus the penalty. build_design sets loss_scale = 1/n, the per-anchor
// average that the cited coordinate-descent scheme uses; with it the
// folded-concave penalties keep their shape at coefficient scale.
// Column scales are never standardized away: they carry the adaptive
// weighting the alpha parametrization encodes.
// For the folded-concave penalties the problem is solved in the
// rescaled coordinates u_s = c_s * alpha_s with per-coordinate penalty
// level lambda / c_s, where c_s is the row norm of the unshrunk basis.
// That is the appendix form of the problem (adaptive weights
// 1/|B_ls1|): it coincides with the plain alpha form for the LASSO and
// keeps the concavity knots at coefficient scale for SCAD/MCP, so the
// retained coordinates de-bias while near-zero rows stay penalized.
struct ShrinkageDesign {
  Matrix X;                // N x p, N = n^2
  Vector response;         // length N
  Vector weights;          // length N, nonnegative
  Index n = 0;             // original sample size
  double loss_scale = 1.0;
  Vector penalty_scale;    // c_s per coordinate; ones when not set
  Matrix weighted_X;       // rows scaled by the weights (cached)
  Vector col_second_moment;  // loss_scale * sum_k w_k x_ks^2 per column

  Index pair_count() const { return X.rows(); }
  Index p() const { return X.cols(); }

  // recomputes the cached moments from X, weights and loss_scale and
  // defaults penalty_scale to ones when unset
  void finalize();
};

ShrinkageDesign build_design(const Dataset& data, const GroupStructure& groups,
                             const GmaveResult& gmave);

// sign(z) * max(|z| - t, 0)
double soft_threshold(double z, double t);

// Univariate minimizers of (v/2) x^2 - z x + penalty(|x|) for the SCAD
// and MCP penalties; v is the coordinate's weighted second moment.
double scad_threshold(double z, double lambda, double a, double v);
double mcp_threshold(double z, double lambda, double gamma, double v);

struct CdResult {
  ShrinkageVector alpha;
  bool converged = true;
  int sweeps = 0;
  double kkt_residual = 0.0;
};

// Cyclic coordinate descent on the penalized pairwise objective. For the
// LASSO the returned solution satisfies the KKT conditions to within
// 1e-7 * (1 + max|response|); non-convex penalties stop on coordinate
// stability. Exceeding 1000 sweeps flags the result instead of throwing.
CdResult coordinate_descent(const ShrinkageDesign& design,
                            const PenaltySpec& penalty,
                            const Vector& warm_start);

// Smallest lambda whose LASSO solution is identically zero.
double lambda_max(const ShrinkageDesign& design);

// count log-spaced values from lambda_max down to min_ratio * lambda_max.
std::vector<double> default_lambda_grid(const ShrinkageDesign& design,
                                        int count = 50,
                                        double min_ratio = 1e-3);

// Warm-started sweep over a strictly decreasing grid; records carry the
// solutions only, the selection criteria are filled by the tuning module.
RegularizationPath fit_path(const ShrinkageDesign& design, PenaltyKind kind,
                            const std::vector<double>& lambda_grid,
                            double scad_a = 3.7, double mcp_gamma = 3.0);

// B_hat_l = diag(alpha_l) * block_l, elementwise, no re-orthonormalization.
GroupedBasis assemble_estimator(const ShrinkageVector& alpha,
                                const GroupedBasis& basis,
                                const GroupStructure& groups);

}  // namespace sgmave
