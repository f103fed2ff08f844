#include "sgmave/gmave.hpp"

#include <cmath>
#include <stdexcept>

#include "sgmave/smoothing.hpp"

namespace sgmave {

namespace {

constexpr double kSolveTol = 1e-8;    // relative normal-equation residual
constexpr double kZeroSlopeTol = 1e-12;

double relative_residual(const Matrix& A, const Vector& x, const Vector& rhs) {
  const double denom = std::max(rhs.norm(), 1e-30);
  return (A * x - rhs).norm() / denom;
}

}  // namespace

GroupedBasis initial_basis(const Dataset& data, const GroupStructure& groups) {
  const Index n = data.n();
  const Vector centered_y =
      data.response.array() - data.response.mean();
  GroupedBasis basis;
  basis.blocks.reserve(groups.group_count());
  for (Index l = 0; l < groups.group_count(); ++l) {
    const Index pl = groups.sizes[l];
    const Index dl = groups.dims[l];
    Matrix block_v = data.predictors.middleCols(groups.offset(l), pl);
    block_v.rowwise() -= block_v.colwise().mean();
    // columns are per-observation covariance contributions
    Matrix contrib = block_v.transpose() * centered_y.asDiagonal();
    Eigen::BDCSVD<Matrix> svd(contrib, Eigen::ComputeThinU);
    const Vector& sv = svd.singularValues();
    Matrix block;
    if (sv.size() < dl || !(sv(dl - 1) > 1e-12 * std::max(sv(0), 1e-300))) {
      block = Matrix::Identity(pl, dl);
    } else {
      block = svd.matrixU().leftCols(dl);
    }
    normalize_column_signs(block);
    basis.blocks.push_back(std::move(block));
  }
  return basis;
}

Matrix project(const Matrix& predictors, const GroupStructure& groups,
               const GroupedBasis& basis) {
  Matrix proj(predictors.rows(), groups.total_dim());
  for (Index l = 0; l < groups.group_count(); ++l) {
    proj.middleCols(groups.dim_offset(l), groups.dims[l]) =
        predictors.middleCols(groups.offset(l), groups.sizes[l]) *
        basis.blocks[l];
  }
  return proj;
}

LocalFit solve_local(const Dataset& data, const GroupStructure& groups,
                     const GroupedBasis& basis, const Matrix& weights,
                     const LocalFit* previous, double ridge) {
  const Index n = data.n();
  const Index d = groups.total_dim();
  const Matrix proj = project(data.predictors, groups, basis);
  const Vector& y = data.response;

  LocalFit fit;
  fit.a.resize(n);
  fit.b.resize(n, d);
  fit.flagged.assign(static_cast<std::size_t>(n), 0);
  fit.weights = weights;

  Matrix regressors(n, 1 + d);
  regressors.col(0).setOnes();
  Matrix normal(1 + d, 1 + d);
  Vector rhs(1 + d);
  for (Index i = 0; i < n; ++i) {
    regressors.rightCols(d) = proj.rowwise() - proj.row(i);
    const Vector w = weights.row(i).transpose();
    normal.noalias() = regressors.transpose() * w.asDiagonal() * regressors;
    rhs.noalias() = regressors.transpose() * (w.array() * y.array()).matrix();
    // ridge on the slope block only; the intercept column has unit weight mass
    const double eps = ridge * normal.trace() / static_cast<double>(1 + d);
    normal.diagonal().tail(d).array() += eps;
    Vector theta = normal.ldlt().solve(rhs);
    if (!theta.allFinite() || relative_residual(normal, theta, rhs) > kSolveTol) {
      fit.flagged[static_cast<std::size_t>(i)] = 1;
      if (previous != nullptr) {
        fit.a(i) = previous->a(i);
        fit.b.row(i) = previous->b.row(i);
      } else {
        fit.a(i) = w.dot(y);
        fit.b.row(i).setZero();
      }
      continue;
    }
    fit.a(i) = theta(0);
    fit.b.row(i) = theta.tail(d).transpose();
  }
  return fit;
}

std::vector<Matrix> solve_basis_raw(const Dataset& data,
                                    const GroupStructure& groups,
                                    const LocalFit& local, double ridge) {
  const Index n = data.n();
  const Index g = groups.group_count();
  Index m = 0;
  for (Index l = 0; l < g; ++l) m += groups.sizes[l] * groups.dims[l];

  Matrix normal = Matrix::Zero(m, m);
  Vector rhs = Vector::Zero(m);
  Matrix rows(n, m);
  Matrix weighted_rows(n, m);
  const Vector& y = data.response;

  for (Index i = 0; i < n; ++i) {
    if (local.flagged[static_cast<std::size_t>(i)]) continue;
    Index col = 0;
    for (Index l = 0; l < g; ++l) {
      const Index pl = groups.sizes[l];
      const Index dl = groups.dims[l];
      const Matrix diff =
          data.predictors.middleCols(groups.offset(l), pl).rowwise() -
          data.predictors.row(i).segment(groups.offset(l), pl);
      for (Index t = 0; t < dl; ++t) {
        rows.middleCols(col, pl) = local.b(i, groups.dim_offset(l) + t) * diff;
        col += pl;
      }
    }
    const Vector w = local.weights.row(i).transpose();
    weighted_rows = w.cwiseSqrt().asDiagonal() * rows;
    normal.selfadjointView<Eigen::Lower>().rankUpdate(weighted_rows.transpose());
    rhs.noalias() +=
        rows.transpose() * (w.array() * (y.array() - local.a(i))).matrix();
  }
  normal = normal.selfadjointView<Eigen::Lower>();
  const double eps = ridge * normal.trace() / static_cast<double>(m);
  normal.diagonal().array() += eps;

  Vector theta = normal.ldlt().solve(rhs);
  if (!theta.allFinite() || relative_residual(normal, theta, rhs) > kSolveTol) {
    // identify the offending block by its diagonal sub-matrix
    Index off = 0;
    for (Index l = 0; l < g; ++l) {
      const Index ml = groups.sizes[l] * groups.dims[l];
      Eigen::SelfAdjointEigenSolver<Matrix> es(normal.block(off, off, ml, ml));
      if (es.eigenvalues().minCoeff() <= eps * 2.0)
        throw std::runtime_error("solve_basis: rank-deficient block " +
                                 std::to_string(l + 1));
      off += ml;
    }
    throw std::runtime_error("solve_basis: normal equations not solvable");
  }

  std::vector<Matrix> blocks;
  blocks.reserve(static_cast<std::size_t>(g));
  Index off = 0;
  for (Index l = 0; l < g; ++l) {
    const Index pl = groups.sizes[l];
    const Index dl = groups.dims[l];
    blocks.emplace_back(
        Eigen::Map<const Matrix>(theta.data() + off, pl, dl));
    off += pl * dl;
  }
  return blocks;
}

GroupedBasis solve_basis(const Dataset& data, const GroupStructure& groups,
                         const LocalFit& local, const GroupedBasis& previous,
                         double ridge) {
  const double slope_scale = local.b.cwiseAbs().maxCoeff();
  const double fit_scale = 1.0 + local.a.cwiseAbs().maxCoeff();
  if (slope_scale <= kZeroSlopeTol * fit_scale) return previous;

  std::vector<Matrix> raw = solve_basis_raw(data, groups, local, ridge);
  GroupedBasis basis;
  basis.blocks.reserve(raw.size());
  for (std::size_t l = 0; l < raw.size(); ++l) {
    try {
      basis.blocks.push_back(orthonormalize(raw[l]));
    } catch (const std::runtime_error&) {
      throw std::runtime_error("solve_basis: rank-deficient block " +
                               std::to_string(l + 1));
    }
  }
  return basis;
}

double gmave_objective(const Dataset& data, const GroupStructure& groups,
                       const GroupedBasis& basis, const LocalFit& local) {
  const Index n = data.n();
  const Matrix proj = project(data.predictors, groups, basis);
  const Vector& y = data.response;
  double value = 0.0;
  Vector scores(n);
  for (Index i = 0; i < n; ++i) {
    scores.noalias() = proj * local.b.row(i).transpose();
    const Vector resid =
        y.array() - local.a(i) - (scores.array() - scores(i));
    value += local.weights.row(i).dot(resid.cwiseAbs2());
  }
  return value;
}

namespace {

double projection_gap(const GroupedBasis& a, const GroupedBasis& b) {
  double gap_sq = 0.0;
  for (std::size_t l = 0; l < a.blocks.size(); ++l) {
    const Matrix pa = a.blocks[l] * a.blocks[l].transpose();
    const Matrix pb = b.blocks[l] * b.blocks[l].transpose();
    gap_sq += (pa - pb).squaredNorm();
  }
  return std::sqrt(gap_sq);
}

}  // namespace

GmaveResult gmave_fit(const Dataset& data, const GroupStructure& groups,
                      const GmaveOptions& options) {
  validate(data, groups);
  const Index n = data.n();
  const Index d = groups.total_dim();
  const double h_target = default_bandwidth(n, d);

  GmaveResult result;
  GroupedBasis basis = initial_basis(data, groups);
  Matrix weights =
      initial_weights(data.predictors, initial_bandwidth(n, data.p()));
  LocalFit local;
  bool have_local = false;
  double h = h_target * std::max(1.0, options.anneal_start);

  for (int iter = 0; iter < options.max_iter; ++iter) {
    if (iter > 0) {
      h = std::max(h_target, h * options.anneal_decay);
      weights = kernel_weights(project(data.predictors, groups, basis),
                               KernelConfig{h});
    }
    IterationTrace tr{};
    bool have_entering = false;
    if (have_local) {
      local.weights = weights;
      tr.entering = gmave_objective(data, groups, basis, local);
      have_entering = true;
    }
    LocalFit next = solve_local(data, groups, basis, weights,
                                have_local ? &local : nullptr, options.ridge);
    for (std::size_t i = 0; i < next.flagged.size(); ++i)
      if (next.flagged[i]) ++result.degenerate_anchors;
    local = std::move(next);
    have_local = true;
    tr.after_local = gmave_objective(data, groups, basis, local);
    if (!have_entering) tr.entering = tr.after_local;  // no coefficients yet

    GroupedBasis updated;
    const double slope_scale = local.b.cwiseAbs().maxCoeff();
    if (slope_scale <= kZeroSlopeTol * (1.0 + local.a.cwiseAbs().maxCoeff())) {
      updated = basis;
      tr.after_basis = tr.after_local;
    } else {
      GroupedBasis raw;
      raw.blocks = solve_basis_raw(data, groups, local, options.ridge);
      tr.after_basis = gmave_objective(data, groups, raw, local);
      updated.blocks.reserve(raw.blocks.size());
      for (std::size_t l = 0; l < raw.blocks.size(); ++l) {
        try {
          updated.blocks.push_back(orthonormalize(raw.blocks[l]));
        } catch (const std::runtime_error&) {
          throw std::runtime_error("solve_basis: rank-deficient block " +
                                   std::to_string(l + 1));
        }
      }
    }
    result.trace.push_back(tr);
    result.iterations = iter + 1;

    const double gap = projection_gap(updated, basis);
    basis = std::move(updated);
    if (gap < options.tol && h <= h_target) {
      result.converged = true;
      break;
    }
  }

  // refined pass: weights from the converged basis at the target
  // bandwidth, one more local fit, one final basis update
  Matrix refined_weights = kernel_weights(
      project(data.predictors, groups, basis), KernelConfig{h_target});
  LocalFit refined = solve_local(data, groups, basis, refined_weights, &local,
                                 options.ridge);
  for (std::size_t i = 0; i < refined.flagged.size(); ++i)
    if (refined.flagged[i]) ++result.degenerate_anchors;
  result.basis = solve_basis(data, groups, refined, basis, options.ridge);
  result.local = std::move(refined);
  return result;
}

}  // namespace sgmave
