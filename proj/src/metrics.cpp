#include "sgmave/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace sgmave {

namespace {

// Orthonormal basis of the column span, rank-revealing so that heavily
// shrunk blocks with collapsed columns still get a valid (smaller) basis.
Matrix span_basis(const Matrix& m) {
  if (m.rows() == 0 || m.cols() == 0)
    throw std::invalid_argument("metric input is empty");
  if (!(m.cwiseAbs().maxCoeff() > 0.0))
    throw std::invalid_argument("metric input is a zero matrix");
  Eigen::BDCSVD<Matrix> svd(m, Eigen::ComputeThinU);
  const Vector& sv = svd.singularValues();
  const double tol = 1e-12 * sv(0);
  Index rank = 0;
  while (rank < sv.size() && sv(rank) > tol) ++rank;
  return svd.matrixU().leftCols(rank);
}

// Eigenvalues of Qh' Qs Qs' Qh padded with zeros up to the column count
// of b_hat, clamped to [0, 1].
Vector squared_cosines(const Matrix& b_hat, const Matrix& b_star) {
  if (b_hat.rows() != b_star.rows())
    throw std::invalid_argument("metric inputs have different row counts");
  if (b_hat.cols() != b_star.cols())
    throw std::invalid_argument("metric inputs have different column counts");
  const Matrix qh = span_basis(b_hat);
  const Matrix qs = span_basis(b_star);
  const Matrix cross = qh.transpose() * qs;
  Eigen::SelfAdjointEigenSolver<Matrix> es(cross * cross.transpose());
  Vector values = Vector::Zero(b_hat.cols());
  values.tail(es.eigenvalues().size()) = es.eigenvalues();
  for (Index t = 0; t < values.size(); ++t) {
    if (values(t) < -1e-8 || values(t) > 1.0 + 1e-8)
      throw std::runtime_error("metric eigenvalue outside [0,1] beyond slack");
    values(t) = std::min(std::max(values(t), 0.0), 1.0);
  }
  return values;
}

}  // namespace

double vcc(const Matrix& b_hat, const Matrix& b_star) {
  const Vector phi2 = squared_cosines(b_hat, b_star);
  double product = 1.0;
  for (Index t = 0; t < phi2.size(); ++t) product *= phi2(t);
  return std::sqrt(product);
}

double tcc(const Matrix& b_hat, const Matrix& b_star) {
  const Vector phi2 = squared_cosines(b_hat, b_star);
  return std::sqrt(phi2.mean());
}

std::vector<SelectionMetrics> selection_metrics(
    const std::vector<Matrix>& b_hat_blocks,
    const std::vector<std::vector<Index>>& true_supports,
    const GroupStructure& groups) {
  if (static_cast<Index>(b_hat_blocks.size()) != groups.group_count() ||
      static_cast<Index>(true_supports.size()) != groups.group_count())
    throw std::invalid_argument("selection_metrics: group count mismatch");

  std::vector<SelectionMetrics> out(b_hat_blocks.size());
  const auto supports = nonzero_row_support(b_hat_blocks);
  for (Index l = 0; l < groups.group_count(); ++l) {
    const Index pl = groups.sizes[l];
    const auto& truth = true_supports[static_cast<std::size_t>(l)];
    if (truth.empty())
      throw std::invalid_argument("selection_metrics: empty truth set in group " +
                                  std::to_string(l + 1));
    std::vector<char> is_true(static_cast<std::size_t>(pl), 0);
    for (Index s : truth) {
      if (s < 0 || s >= pl)
        throw std::invalid_argument("selection_metrics: truth index out of range");
      is_true[static_cast<std::size_t>(s)] = 1;
    }
    const auto& selected = supports[static_cast<std::size_t>(l)];
    Index true_hits = 0;
    Index false_hits = 0;
    for (Index s : selected) {
      if (is_true[static_cast<std::size_t>(s)])
        ++true_hits;
      else
        ++false_hits;
    }
    SelectionMetrics& m = out[static_cast<std::size_t>(l)];
    m.ms = static_cast<double>(selected.size());
    m.tpr = static_cast<double>(true_hits) / static_cast<double>(truth.size());
    const Index false_total = pl - static_cast<Index>(truth.size());
    if (false_total > 0) {
      m.fpr = static_cast<double>(false_hits) / static_cast<double>(false_total);
    } else {
      m.fpr = 0.0;
      m.fpr_flagged = true;
    }
  }
  return out;
}

}  // namespace sgmave
