#include "sgmave/smoothing.hpp"

#include <cmath>
#include <stdexcept>

namespace sgmave {

double default_bandwidth(Index n, Index d) {
  if (n < 2) throw std::invalid_argument("default_bandwidth: need n >= 2");
  if (d < 1) throw std::invalid_argument("default_bandwidth: need d >= 1");
  const double dd = static_cast<double>(d);
  const double expo = 1.0 / (dd + 4.0);
  return std::pow(4.0 / (dd + 2.0), expo) * std::pow(static_cast<double>(n), -expo);
}

double initial_bandwidth(Index n, Index p) {
  return 2.0 * default_bandwidth(n, p);
}

Matrix kernel_weights(const Matrix& projections, const KernelConfig& config) {
  const double h = config.bandwidth;
  if (!(h > 0.0)) throw std::invalid_argument("kernel bandwidth must be positive");
  if (!projections.allFinite())
    throw std::invalid_argument("kernel_weights: non-finite projections");

  const Index n = projections.rows();
  const double inv2h2 = 1.0 / (2.0 * h * h);
  Matrix weights(n, n);
  Vector expo(n);
  for (Index i = 0; i < n; ++i) {
    expo = -(projections.rowwise() - projections.row(i))
                .rowwise()
                .squaredNorm() *
           inv2h2;
    const double peak = expo.maxCoeff();  // zero at j = i
    weights.row(i) = (expo.array() - peak).exp();
    const double total = weights.row(i).sum();
    if (!(total > 0.0) || !std::isfinite(total))
      throw std::runtime_error(
          "kernel_weights: degenerate row " + std::to_string(i + 1) +
          " (bandwidth far too small)");
    weights.row(i) /= total;
  }
  return weights;
}

Matrix initial_weights(const Matrix& predictors, double h0) {
  return kernel_weights(predictors, KernelConfig{h0});
}

}  // namespace sgmave
