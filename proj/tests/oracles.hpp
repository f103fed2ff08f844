// Test-only reference implementations, kept independent of the library's
// solver paths: pseudo-inverse least squares, naive double-loop sums and
// a per-coordinate exhaustive grid search for the penalized objective.
#pragma once

#include <random>

#include "sgmave/core.hpp"
#include "sgmave/shrinkage.hpp"

namespace oracles {

using sgmave::Index;
using sgmave::Matrix;
using sgmave::Vector;

// Weighted least squares through an SVD pseudo-inverse of the ridged
// normal matrix (the library solves the same system with LDLT).
inline Vector wls_pinv(const Matrix& regressors, const Vector& weights,
                       const Vector& response, const Matrix& ridge) {
  const Matrix normal =
      regressors.transpose() * weights.asDiagonal() * regressors + ridge;
  const Vector rhs =
      regressors.transpose() * (weights.array() * response.array()).matrix();
  Eigen::JacobiSVD<Matrix> svd(normal,
                               Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.solve(rhs);
}

inline double penalized_objective(const Matrix& X, const Vector& response,
                                  const Vector& weights, double lambda,
                                  const Vector& alpha) {
  const Vector resid = response - X * alpha;
  return weights.dot(resid.cwiseAbs2()) + lambda * alpha.cwiseAbs().sum();
}

// Cyclic exhaustive scan of each coordinate over the lattice
// [-range, range] with the given step, holding the others fixed. For the
// convex LASSO objective this reaches the per-coordinate lattice optimum.
inline Vector lasso_grid_search(const Matrix& X, const Vector& response,
                                const Vector& weights, double lambda,
                                double range = 3.0, double step = 1e-3,
                                int max_sweeps = 200) {
  const Index p = X.cols();
  Vector alpha = Vector::Zero(p);
  const long half = static_cast<long>(std::llround(range / step));
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    bool moved = false;
    for (Index s = 0; s < p; ++s) {
      // residual excluding coordinate s
      const Vector partial = response - X * alpha + X.col(s) * alpha(s);
      const double quad = weights.dot(X.col(s).cwiseAbs2());
      const double lin =
          (weights.array() * X.col(s).array() * partial.array()).sum();
      double best_value = std::numeric_limits<double>::infinity();
      double best_alpha = 0.0;
      for (long k = -half; k <= half; ++k) {
        const double candidate = static_cast<double>(k) * step;
        const double value = quad * candidate * candidate -
                             2.0 * lin * candidate +
                             lambda * std::abs(candidate);
        if (value < best_value) {
          best_value = value;
          best_alpha = candidate;
        }
      }
      if (best_alpha != alpha(s)) {
        alpha(s) = best_alpha;
        moved = true;
      }
    }
    if (!moved) break;
  }
  return alpha;
}

// Plain double-loop evaluation of the weighted pairwise residual sum of
// squares in the (i, j) layout the design uses.
inline double rss_double_loop(const sgmave::ShrinkageDesign& design,
                              const Vector& alpha) {
  double total = 0.0;
  const Index n = design.n;
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      const Index k = i * n + j;
      const double resid = design.response(k) - design.X.row(k).dot(alpha);
      total += design.weights(k) * resid * resid;
    }
  }
  return total;
}

inline Matrix random_matrix(Index rows, Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = normal(rng);
  return m;
}

inline Vector random_vector(Index size, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector v(size);
  for (Index i = 0; i < size; ++i) v(i) = normal(rng);
  return v;
}

inline Matrix random_orthonormal(Index rows, Index cols, std::mt19937_64& rng) {
  return sgmave::orthonormalize(random_matrix(rows, cols, rng));
}

}  // namespace oracles
