#include "sgmave/core.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace sgmave {

namespace {
constexpr double kOrthoTol = 1e-8;
constexpr double kSignTol = 1e-12;
}  // namespace

Index GroupStructure::total_size() const {
  return std::accumulate(sizes.begin(), sizes.end(), Index{0});
}

Index GroupStructure::total_dim() const {
  return std::accumulate(dims.begin(), dims.end(), Index{0});
}

Index GroupStructure::offset(Index group) const {
  Index off = 0;
  for (Index l = 0; l < group; ++l) off += sizes[l];
  return off;
}

Index GroupStructure::dim_offset(Index group) const {
  Index off = 0;
  for (Index l = 0; l < group; ++l) off += dims[l];
  return off;
}

Matrix GroupedBasis::block_diagonal(const GroupStructure& groups) const {
  Matrix full = Matrix::Zero(groups.total_size(), groups.total_dim());
  for (Index l = 0; l < groups.group_count(); ++l) {
    full.block(groups.offset(l), groups.dim_offset(l), groups.sizes[l],
               groups.dims[l]) = blocks[l];
  }
  return full;
}

void validate(const Dataset& data, const GroupStructure& groups,
              std::vector<std::string>* warnings) {
  if (groups.sizes.empty())
    throw std::invalid_argument("group structure has no groups");
  if (groups.sizes.size() != groups.dims.size())
    throw std::invalid_argument("sizes and dims have different lengths");
  for (Index l = 0; l < groups.group_count(); ++l) {
    if (groups.sizes[l] < 1)
      throw std::invalid_argument("group " + std::to_string(l + 1) +
                                  " has non-positive size");
    if (groups.dims[l] < 1 || groups.dims[l] > groups.sizes[l])
      throw std::invalid_argument("group " + std::to_string(l + 1) +
                                  ": index dimension must satisfy 1 <= d_l <= p_l");
  }
  const Index p = groups.total_size();
  if (data.n() < 2) throw std::invalid_argument("need at least two observations");
  if (data.p() < 1) throw std::invalid_argument("need at least one predictor");
  if (data.p() != p)
    throw std::invalid_argument(
        "predictor count " + std::to_string(data.p()) +
        " does not match group partition total " + std::to_string(p));
  if (data.response.size() != data.n())
    throw std::invalid_argument("response length does not match observation count");
  if (!data.predictors.allFinite())
    throw std::invalid_argument("predictors contain non-finite entries");
  if (!data.response.allFinite())
    throw std::invalid_argument("response contains non-finite entries");

  if (!groups.gamma.empty()) {
    if (static_cast<Index>(groups.gamma.size()) != groups.group_count())
      throw std::invalid_argument("gamma list length does not match group count");
    for (Index l = 0; l < groups.group_count(); ++l) {
      const Matrix& g = groups.gamma[l];
      if (g.rows() != p || g.cols() != groups.sizes[l])
        throw std::invalid_argument("gamma block " + std::to_string(l + 1) +
                                    " has wrong dimensions");
      Matrix gram = g.transpose() * g;
      gram.diagonal().array() -= 1.0;
      if (gram.cwiseAbs().maxCoeff() > kOrthoTol)
        throw std::invalid_argument("gamma block " + std::to_string(l + 1) +
                                    " is not column-orthonormal");
      for (Index m = 0; m < l; ++m) {
        if ((groups.gamma[m].transpose() * g).cwiseAbs().maxCoeff() > kOrthoTol)
          throw std::invalid_argument("gamma blocks " + std::to_string(m + 1) +
                                      " and " + std::to_string(l + 1) +
                                      " are not mutually orthogonal");
      }
    }
  }

  if (warnings != nullptr && groups.total_dim() > groups.max_index_dim) {
    warnings->push_back("total index dimension d = " +
                        std::to_string(groups.total_dim()) + " exceeds " +
                        std::to_string(groups.max_index_dim) +
                        "; local smoothing may be unreliable");
  }
}

Matrix apply_group_bases(const Matrix& X, const GroupStructure& groups) {
  if (groups.gamma.empty()) return X;
  const Index p = groups.total_size();
  if (X.cols() != p)
    throw std::invalid_argument("input column count does not match group basis rows");
  for (Index l = 0; l < groups.group_count(); ++l) {
    const Matrix& g = groups.gamma[l];
    if (g.rows() != p || g.cols() != groups.sizes[l])
      throw std::invalid_argument("gamma block " + std::to_string(l + 1) +
                                  " has wrong dimensions");
    Matrix gram = g.transpose() * g;
    gram.diagonal().array() -= 1.0;
    if (gram.cwiseAbs().maxCoeff() > kOrthoTol)
      throw std::invalid_argument("gamma block " + std::to_string(l + 1) +
                                  " is not column-orthonormal");
  }
  Matrix V(X.rows(), p);
  for (Index l = 0; l < groups.group_count(); ++l)
    V.middleCols(groups.offset(l), groups.sizes[l]) = X * groups.gamma[l];
  return V;
}

void normalize_column_signs(Matrix& m) {
  for (Index j = 0; j < m.cols(); ++j) {
    for (Index i = 0; i < m.rows(); ++i) {
      if (std::abs(m(i, j)) > kSignTol) {
        if (m(i, j) < 0) m.col(j) = -m.col(j);
        break;
      }
    }
  }
}

Matrix orthonormalize(const Matrix& m) {
  const Index rows = m.rows();
  const Index cols = m.cols();
  if (cols == 0 || rows < cols)
    throw std::invalid_argument("orthonormalize: matrix must be tall");
  Eigen::HouseholderQR<Matrix> qr(m);
  const Matrix& qrm = qr.matrixQR();
  double scale = qrm.diagonal().head(cols).cwiseAbs().maxCoeff();
  if (!(scale > 0.0))
    throw std::runtime_error("orthonormalize: zero matrix");
  for (Index j = 0; j < cols; ++j) {
    if (std::abs(qrm(j, j)) <= 1e-12 * scale)
      throw std::runtime_error("orthonormalize: rank-deficient column " +
                               std::to_string(j + 1));
  }
  Matrix q = qr.householderQ() * Matrix::Identity(rows, cols);
  normalize_column_signs(q);
  return q;
}

std::vector<std::vector<Index>> nonzero_row_support(
    const std::vector<Matrix>& blocks) {
  std::vector<std::vector<Index>> support(blocks.size());
  for (std::size_t l = 0; l < blocks.size(); ++l) {
    for (Index s = 0; s < blocks[l].rows(); ++s) {
      if ((blocks[l].row(s).array() != 0.0).any()) support[l].push_back(s);
    }
  }
  return support;
}

}  // namespace sgmave
