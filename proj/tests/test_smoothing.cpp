#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "sgmave/smoothing.hpp"

using namespace sgmave;

TEST_CASE("default_bandwidth matches the closed form") {
  // frozen from a high-precision evaluation of the formula
  CHECK(default_bandwidth(200, 2) ==
        doctest::Approx(0.41351855420001374).epsilon(1e-12));
  CHECK(default_bandwidth(100, 1) ==
        doctest::Approx(0.42168460634274996).epsilon(1e-12));
}

TEST_CASE("default_bandwidth at d = 2 collapses to n^(-1/6)") {
  for (Index n : {50, 200, 1000})
    CHECK(default_bandwidth(n, 2) ==
          doctest::Approx(std::pow(static_cast<double>(n), -1.0 / 6.0))
              .epsilon(1e-14));
}

TEST_CASE("default_bandwidth decreases strictly in n") {
  for (Index d : {1, 2, 3}) {
    double prev = default_bandwidth(10, d);
    for (Index n : {11, 25, 80, 300, 1500}) {
      const double h = default_bandwidth(n, d);
      CHECK(h < prev);
      prev = h;
    }
  }
  CHECK_THROWS_AS(default_bandwidth(1, 1), std::invalid_argument);
  CHECK_THROWS_AS(default_bandwidth(10, 0), std::invalid_argument);
}

TEST_CASE("identical projections give uniform weights") {
  Matrix proj = Matrix::Ones(6, 2);
  Matrix w = kernel_weights(proj, KernelConfig{0.7});
  CHECK((w.array() - 1.0 / 6.0).abs().maxCoeff() < 1e-15);
}

TEST_CASE("two-point weight equals the normal-density ratio") {
  Matrix proj(2, 1);
  const double h = 0.31;
  proj << 0.0, h;
  Matrix w = kernel_weights(proj, KernelConfig{h});
  // phi(1) / (phi(0) + phi(1)), frozen from a high-precision evaluation
  CHECK(w(0, 1) == doctest::Approx(0.37754066879814544).epsilon(1e-12));
  CHECK(w(1, 0) == doctest::Approx(0.37754066879814544).epsilon(1e-12));
}

TEST_CASE("scaling differences and bandwidth together leaves weights fixed") {
  std::mt19937_64 rng(21);
  Matrix proj = oracles::random_matrix(15, 3, rng);
  const double h = 0.8;
  Matrix w1 = kernel_weights(proj, KernelConfig{h});
  Matrix w2 = kernel_weights((7.5 * proj).eval(), KernelConfig{7.5 * h});
  CHECK((w1 - w2).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("weight rows are stochastic with the diagonal as the row maximum") {
  std::mt19937_64 rng(22);
  Matrix proj = oracles::random_matrix(40, 2, rng);
  Matrix w = kernel_weights(proj, KernelConfig{0.35});
  CHECK(w.minCoeff() >= 0.0);
  CHECK((w.rowwise().sum().array() - 1.0).abs().maxCoeff() <= 1e-12);
  for (Index i = 0; i < w.rows(); ++i)
    CHECK(w(i, i) == doctest::Approx(w.row(i).maxCoeff()));
}

TEST_CASE("unnormalized kernel values are symmetric") {
  std::mt19937_64 rng(23);
  Matrix proj = oracles::random_matrix(12, 2, rng);
  Matrix w = kernel_weights(proj, KernelConfig{0.5});
  // dividing by the diagonal entry undoes the row normalization
  for (Index i = 0; i < w.rows(); ++i)
    for (Index j = 0; j < w.cols(); ++j)
      CHECK(w(i, j) / w(i, i) ==
            doctest::Approx(w(j, i) / w(j, j)).epsilon(1e-12));
}

TEST_CASE("kernel_weights rejects bad input") {
  Matrix proj = Matrix::Zero(3, 1);
  CHECK_THROWS_AS(kernel_weights(proj, KernelConfig{0.0}), std::invalid_argument);
  CHECK_THROWS_AS(kernel_weights(proj, KernelConfig{-1.0}),
                  std::invalid_argument);
  proj(1, 0) = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(kernel_weights(proj, KernelConfig{1.0}),
                  std::invalid_argument);
}

TEST_CASE("initial weights are uniform over identical rows") {
  Matrix v = Matrix::Constant(5, 8, 1.25);
  Matrix w = initial_weights(v, initial_bandwidth(5, 8));
  CHECK((w.array() - 0.2).abs().maxCoeff() < 1e-15);
}

TEST_CASE("permuting observations permutes weight rows and columns") {
  std::mt19937_64 rng(24);
  const Index n = 17;
  Matrix v = oracles::random_matrix(n, 4, rng);
  Matrix w = initial_weights(v, 1.1);

  std::vector<Index> perm(n);
  for (Index i = 0; i < n; ++i) perm[i] = (i * 5 + 3) % n;  // a permutation
  Matrix vp(n, v.cols());
  for (Index i = 0; i < n; ++i) vp.row(i) = v.row(perm[i]);
  Matrix wp = initial_weights(vp, 1.1);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j)
      CHECK(wp(i, j) == doctest::Approx(w(perm[i], perm[j])).epsilon(1e-13));
}

TEST_CASE("initial bandwidth doubles the rule at full dimension") {
  CHECK(initial_bandwidth(200, 40) ==
        doctest::Approx(2.0 * default_bandwidth(200, 40)).epsilon(1e-15));
}
