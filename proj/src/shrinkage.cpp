#include "sgmave/shrinkage.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sgmave {

namespace {
constexpr int kMaxSweeps = 1000;
constexpr double kSweepTol = 1e-12;  // relative coordinate stability
}  // namespace

void ShrinkageDesign::finalize() {
  weighted_X = weights.asDiagonal() * X;
  col_second_moment =
      loss_scale * (weighted_X.array() * X.array()).colwise().sum();
  if (penalty_scale.size() != X.cols()) penalty_scale = Vector::Ones(X.cols());
}

ShrinkageDesign build_design(const Dataset& data, const GroupStructure& groups,
                             const GmaveResult& gmave) {
  const Index n = data.n();
  const Index p = data.p();
  const Index g = groups.group_count();

  ShrinkageDesign design;
  design.n = n;
  design.X.resize(n * n, p);
  design.response.resize(n * n);
  design.weights.resize(n * n);

  design.penalty_scale.resize(p);
  for (Index l = 0; l < g; ++l) {
    design.penalty_scale.segment(groups.offset(l), groups.sizes[l]) =
        gmave.basis.blocks[l].rowwise().norm();
  }

  for (Index i = 0; i < n; ++i) {
    const Index row0 = i * n;
    for (Index l = 0; l < g; ++l) {
      const Index pl = groups.sizes[l];
      const Index off = groups.offset(l);
      // row scale for group l at anchor i: B_l b_l^i
      const Vector coef =
          gmave.basis.blocks[l] *
          gmave.local.b.row(i).segment(groups.dim_offset(l), groups.dims[l])
              .transpose();
      design.X.block(row0, off, n, pl) =
          (data.predictors.middleCols(off, pl).rowwise() -
           data.predictors.row(i).segment(off, pl))
              .array()
              .rowwise() *
          coef.transpose().array();
    }
    design.response.segment(row0, n) =
        data.response.array() - gmave.local.a(i);
    design.weights.segment(row0, n) = gmave.local.weights.row(i).transpose();
  }

  design.loss_scale = 1.0 / static_cast<double>(n);
  design.finalize();
  return design;
}

double soft_threshold(double z, double t) {
  if (t < 0.0) throw std::invalid_argument("soft_threshold: negative threshold");
  if (z > t) return z - t;
  if (z < -t) return z + t;
  return 0.0;
}

double scad_threshold(double z, double lambda, double a, double v) {
  if (a <= 2.0) throw std::invalid_argument("scad_threshold: need a > 2");
  if (!(v > 0.0)) throw std::invalid_argument("scad_threshold: need v > 0");
  const double az = std::abs(z);
  if (az <= lambda * (v + 1.0)) return soft_threshold(z, lambda) / v;
  if (az <= a * lambda * v) {
    const double denom = v * (a - 1.0) - 1.0;
    if (!(denom > 0.0))
      throw std::invalid_argument("scad_threshold: non-convex regime, v*(a-1) <= 1");
    return ((a - 1.0) * z - (z > 0 ? 1.0 : -1.0) * a * lambda) / denom;
  }
  return z / v;
}

double mcp_threshold(double z, double lambda, double gamma, double v) {
  if (gamma <= 1.0) throw std::invalid_argument("mcp_threshold: need gamma > 1");
  if (!(gamma * v > 1.0))
    throw std::invalid_argument("mcp_threshold: need gamma * v > 1");
  const double az = std::abs(z);
  if (az <= gamma * lambda * v)
    return soft_threshold(z, lambda) / (v - 1.0 / gamma);
  return z / v;
}

namespace {

double scad_penalty_value(double t, double lambda, double a) {
  t = std::abs(t);
  if (t <= lambda) return lambda * t;
  if (t <= a * lambda)
    return (2.0 * a * lambda * t - t * t - lambda * lambda) /
           (2.0 * (a - 1.0));
  return lambda * lambda * (a + 1.0) / 2.0;
}

double mcp_penalty_value(double t, double lambda, double gamma) {
  t = std::abs(t);
  if (t <= gamma * lambda) return lambda * t - t * t / (2.0 * gamma);
  return gamma * lambda * lambda / 2.0;
}

// Exact global minimizers of (v/2) x^2 - z x + penalty(|x|) for any
// v > 0, by comparing the per-piece stationary points and boundaries.
// The adaptive column scaling makes tiny curvatures routine, where the
// closed three-branch formulas stop being the minimizer.
double scad_minimize(double z, double lambda, double a, double v) {
  const double sign = z < 0 ? -1.0 : 1.0;
  const double az = std::abs(z);
  double best_x = 0.0;
  double best_f = 0.0;
  const auto consider = [&](double x) {
    const double f =
        0.5 * v * x * x - az * x + scad_penalty_value(x, lambda, a);
    if (f < best_f) {
      best_f = f;
      best_x = x;
    }
  };
  consider(std::clamp((az - lambda) / v, 0.0, lambda));
  const double denom = v * (a - 1.0) - 1.0;
  if (denom > 0.0)
    consider(std::clamp(((a - 1.0) * az - a * lambda) / denom, lambda,
                        a * lambda));
  consider(lambda);
  consider(a * lambda);
  consider(std::max(az / v, a * lambda));
  return sign * best_x;
}

double mcp_minimize(double z, double lambda, double gamma, double v) {
  const double sign = z < 0 ? -1.0 : 1.0;
  const double az = std::abs(z);
  double best_x = 0.0;
  double best_f = 0.0;
  const auto consider = [&](double x) {
    const double f =
        0.5 * v * x * x - az * x + mcp_penalty_value(x, lambda, gamma);
    if (f < best_f) {
      best_f = f;
      best_x = x;
    }
  };
  const double denom = v - 1.0 / gamma;
  if (denom > 0.0)
    consider(std::clamp((az - lambda) / denom, 0.0, gamma * lambda));
  consider(gamma * lambda);
  consider(std::max(az / v, gamma * lambda));
  return sign * best_x;
}

// Coordinate update for the concave penalties in the standardized
// coordinates u = sqrt(v) * alpha, with the per-coordinate penalty level
// lambda / c: minimizes (v/2) a^2 - z a + p_{lambda/c}(sqrt(v) |a|).
// That is the cited solver's geometry (unit curvature after column
// standardization, adaptive factors carried by the penalty level); the
// LASSO keeps the plain form, where the two ways coincide.
double update_coordinate(const PenaltySpec& penalty, double z, double v,
                         double c) {
  switch (penalty.kind) {
    case PenaltyKind::lasso:
      return soft_threshold(z, penalty.lambda) / v;
    case PenaltyKind::scad: {
      const double q = std::sqrt(v);
      return scad_minimize(z / q, penalty.lambda / c, penalty.a, 1.0) / q;
    }
    case PenaltyKind::mcp: {
      const double q = std::sqrt(v);
      return mcp_minimize(z / q, penalty.lambda / c, penalty.gamma, 1.0) / q;
    }
  }
  throw std::logic_error("unknown penalty kind");
}

// derivative of the per-coordinate penalty at alpha = ax > 0, plus its
// slope at zero (the entry threshold) via ax = 0
double penalty_derivative(const PenaltySpec& penalty, double ax, double q,
                          double c) {
  switch (penalty.kind) {
    case PenaltyKind::lasso:
      return penalty.lambda;
    case PenaltyKind::scad: {
      const double t = q * ax;
      const double lam = penalty.lambda / c;
      if (t <= lam) return q * lam;
      if (t <= penalty.a * lam)
        return q * (penalty.a * lam - t) / (penalty.a - 1.0);
      return 0.0;
    }
    case PenaltyKind::mcp: {
      const double t = q * ax;
      const double lam = penalty.lambda / c;
      return t <= penalty.gamma * lam ? q * (lam - t / penalty.gamma) : 0.0;
    }
  }
  throw std::logic_error("unknown penalty kind");
}

double kkt_residual(const ShrinkageDesign& design, const PenaltySpec& penalty,
                    const Vector& alpha, const Vector& resid) {
  double worst = 0.0;
  for (Index s = 0; s < design.p(); ++s) {
    if (design.col_second_moment(s) <= 0.0) continue;
    const double grad =
        -2.0 * design.loss_scale * design.weighted_X.col(s).dot(resid);
    const double q = std::sqrt(2.0 * design.col_second_moment(s));
    const double c = design.penalty_scale(s);
    double violation;
    if (alpha(s) != 0.0) {
      violation = std::abs(
          grad + (alpha(s) > 0 ? 1.0 : -1.0) *
                     penalty_derivative(penalty, std::abs(alpha(s)), q, c));
    } else {
      violation =
          std::max(std::abs(grad) - penalty_derivative(penalty, 0.0, q, c),
                   0.0);
    }
    worst = std::max(worst, violation);
  }
  return worst;
}

}  // namespace

CdResult coordinate_descent(const ShrinkageDesign& design,
                            const PenaltySpec& penalty,
                            const Vector& warm_start) {
  const Index p = design.p();
  if (warm_start.size() != p)
    throw std::invalid_argument("coordinate_descent: warm start has wrong length");
  if (penalty.lambda < 0.0)
    throw std::invalid_argument("coordinate_descent: negative lambda");

  CdResult result;
  Vector alpha = warm_start;
  Vector resid = design.response - design.X * alpha;
  const double kkt_tol =
      1e-7 * (1.0 + design.response.cwiseAbs().maxCoeff());

  bool done = false;
  bool just_refreshed = false;
  int sweep = 0;
  while (sweep < kMaxSweeps) {
    double max_change = 0.0;
    double max_alpha = 0.0;
    for (Index s = 0; s < p; ++s) {
      const double v2 = design.col_second_moment(s);
      if (v2 <= 0.0) {
        alpha(s) = 0.0;
        continue;
      }
      const double partial =
          design.loss_scale * design.weighted_X.col(s).dot(resid) +
          v2 * alpha(s);
      // quadratic coefficient 2*v2, linear coefficient 2*partial
      const double updated = update_coordinate(penalty, 2.0 * partial, 2.0 * v2,
                                               design.penalty_scale(s));
      const double change = updated - alpha(s);
      if (change != 0.0) {
        resid -= design.X.col(s) * change;
        alpha(s) = updated;
      }
      max_change = std::max(max_change, std::abs(change));
      max_alpha = std::max(max_alpha, std::abs(updated));
    }
    ++sweep;
    if (max_change > kSweepTol * (1.0 + max_alpha)) {
      just_refreshed = false;
      continue;
    }
    // refresh the residual to shed incremental-update drift, then verify
    resid = design.response - design.X * alpha;
    result.kkt_residual = kkt_residual(design, penalty, alpha, resid);
    if (result.kkt_residual <= kkt_tol) {
      done = true;
      break;
    }
    if (just_refreshed) break;  // stable point that fails the check
    just_refreshed = true;
  }
  if (!done) {
    resid = design.response - design.X * alpha;
    result.kkt_residual = kkt_residual(design, penalty, alpha, resid);
    result.converged = result.kkt_residual <= kkt_tol;
  }
  result.sweeps = sweep;
  result.alpha.alpha = std::move(alpha);
  return result;
}

double lambda_max(const ShrinkageDesign& design) {
  // zero solves the KKT system iff the scaled gradient stays within
  // lambda everywhere; accumulate per column exactly like the descent
  // loop so the boundary solution is exactly zero
  double worst = 0.0;
  for (Index s = 0; s < design.p(); ++s)
    worst = std::max(worst,
                     std::abs(design.loss_scale *
                              design.weighted_X.col(s).dot(design.response)));
  return 2.0 * worst;
}

std::vector<double> default_lambda_grid(const ShrinkageDesign& design,
                                        int count, double min_ratio) {
  if (count < 1) throw std::invalid_argument("lambda grid needs count >= 1");
  if (!(min_ratio > 0.0 && min_ratio < 1.0))
    throw std::invalid_argument("lambda grid ratio must lie in (0, 1)");
  const double top = lambda_max(design);
  std::vector<double> grid(static_cast<std::size_t>(count));
  if (count == 1) {
    grid[0] = top;
    return grid;
  }
  const double log_top = std::log(top);
  const double log_bot = std::log(top * min_ratio);
  grid[0] = top;  // exactly, so the head of the path is exactly zero
  for (int k = 1; k < count; ++k)
    grid[static_cast<std::size_t>(k)] =
        std::exp(log_top + (log_bot - log_top) * k / (count - 1));
  return grid;
}

RegularizationPath fit_path(const ShrinkageDesign& design, PenaltyKind kind,
                            const std::vector<double>& lambda_grid,
                            double scad_a, double mcp_gamma) {
  if (lambda_grid.empty())
    throw std::invalid_argument("fit_path: empty lambda grid");
  for (std::size_t k = 1; k < lambda_grid.size(); ++k)
    if (!(lambda_grid[k] < lambda_grid[k - 1]))
      throw std::invalid_argument("fit_path: grid must be strictly decreasing");

  RegularizationPath path;
  path.records.reserve(lambda_grid.size());
  Vector warm = Vector::Zero(design.p());
  for (double lambda : lambda_grid) {
    PenaltySpec spec{kind, lambda, scad_a, mcp_gamma};
    CdResult cd = coordinate_descent(design, spec, warm);
    warm = cd.alpha.alpha;
    PathRecord record;
    record.lambda = lambda;
    record.alpha = cd.alpha.alpha;
    record.cd_converged = cd.converged;
    record.kkt_residual = cd.kkt_residual;
    path.records.push_back(std::move(record));
  }
  return path;
}

GroupedBasis assemble_estimator(const ShrinkageVector& alpha,
                                const GroupedBasis& basis,
                                const GroupStructure& groups) {
  if (alpha.alpha.size() != groups.total_size())
    throw std::invalid_argument("assemble_estimator: alpha length mismatch");
  GroupedBasis assembled;
  assembled.blocks.reserve(basis.blocks.size());
  for (Index l = 0; l < groups.group_count(); ++l) {
    if (basis.blocks[l].rows() != groups.sizes[l])
      throw std::invalid_argument("assemble_estimator: block shape mismatch");
    assembled.blocks.push_back(
        alpha.group(groups, l).asDiagonal() * basis.blocks[l]);
  }
  return assembled;
}

}  // namespace sgmave
