#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "sgmave/metrics.hpp"

using namespace sgmave;

TEST_CASE("identical spans score one, orthogonal spans score zero") {
  std::mt19937_64 rng(81);
  Matrix q = oracles::random_orthonormal(6, 4, rng);
  Matrix b = q.leftCols(2);
  CHECK(std::abs(vcc(b, b) - 1.0) <= 1e-10);
  CHECK(std::abs(tcc(b, b) - 1.0) <= 1e-10);
  Matrix perp = q.rightCols(2);
  CHECK(std::abs(vcc(b, perp)) <= 1e-10);
  CHECK(std::abs(tcc(b, perp)) <= 1e-10);
}

TEST_CASE("one-dimensional vcc equals the absolute cosine") {
  std::mt19937_64 rng(82);
  for (int trial = 0; trial < 50; ++trial) {
    Vector u = oracles::random_vector(7, rng);
    Vector v = oracles::random_vector(7, rng);
    const double cosine = std::abs(u.dot(v)) / (u.norm() * v.norm());
    CHECK(vcc(u, v) == doctest::Approx(cosine).epsilon(1e-10));
    CHECK(tcc(u, v) == doctest::Approx(cosine).epsilon(1e-10));
  }
}

TEST_CASE("one shared and one orthogonal direction gives tcc sqrt(1/2)") {
  Matrix star(4, 2), hat(4, 2);
  star.setZero();
  hat.setZero();
  star(0, 0) = 1;
  star(1, 1) = 1;
  hat(0, 0) = 1;  // shared
  hat(2, 1) = 1;  // orthogonal to the truth
  CHECK(tcc(hat, star) ==
        doctest::Approx(0.70710678118654752).epsilon(1e-12));
  CHECK(vcc(hat, star) == doctest::Approx(0.0));
}

TEST_CASE("tcc dominates vcc") {
  std::mt19937_64 rng(83);
  for (int trial = 0; trial < 1000; ++trial) {
    const Index d = 1 + trial % 3;
    Matrix a = oracles::random_matrix(8, d, rng);
    Matrix b = oracles::random_matrix(8, d, rng);
    CHECK(tcc(a, b) >= vcc(a, b) - 1e-12);
  }
}

TEST_CASE("metrics ignore nonsingular right mixing") {
  std::mt19937_64 rng(84);
  Matrix base = oracles::random_matrix(9, 2, rng);
  Matrix star = oracles::random_matrix(9, 2, rng);
  const double v0 = vcc(base, star);
  const double t0 = tcc(base, star);
  for (int trial = 0; trial < 100; ++trial) {
    Matrix mix = oracles::random_matrix(2, 2, rng);
    while (std::abs(mix.determinant()) < 0.1)
      mix = oracles::random_matrix(2, 2, rng);
    CHECK(std::abs(vcc((base * mix).eval(), star) - v0) < 1e-9);
    CHECK(std::abs(tcc((base * mix).eval(), star) - t0) < 1e-9);
    CHECK(std::abs(vcc(base, (star * mix).eval()) - v0) < 1e-9);
  }
}

TEST_CASE("metrics are symmetric in their arguments") {
  std::mt19937_64 rng(85);
  for (int trial = 0; trial < 20; ++trial) {
    Matrix a = oracles::random_matrix(6, 2, rng);
    Matrix b = oracles::random_matrix(6, 2, rng);
    CHECK(vcc(a, b) == doctest::Approx(vcc(b, a)).epsilon(1e-11));
    CHECK(tcc(a, b) == doctest::Approx(tcc(b, a)).epsilon(1e-11));
  }
}

TEST_CASE("zero inputs are rejected") {
  Matrix zero = Matrix::Zero(5, 1);
  Matrix ok = Matrix::Identity(5, 1);
  CHECK_THROWS_AS(vcc(zero, ok), std::invalid_argument);
  CHECK_THROWS_AS(tcc(ok, zero), std::invalid_argument);
}

TEST_CASE("selection metrics on exact and saturated fits") {
  GroupStructure groups{{20}, {1}};

  Matrix exact = Matrix::Zero(20, 1);
  exact(0, 0) = exact(1, 0) = exact(2, 0) = 1.0;
  auto m = selection_metrics({exact}, {{0, 1, 2}}, groups);
  CHECK(m[0].ms == 3.0);
  CHECK(m[0].tpr == 1.0);
  CHECK(m[0].fpr == 0.0);

  Matrix all = Matrix::Ones(20, 1);
  m = selection_metrics({all}, {{0, 1}}, groups);
  CHECK(m[0].ms == 20.0);
  CHECK(m[0].tpr == 1.0);
  CHECK(m[0].fpr == 1.0);
}

TEST_CASE("selection metrics flag a missing false-row denominator") {
  GroupStructure groups{{2}, {1}};
  Matrix block = Matrix::Ones(2, 1);
  auto m = selection_metrics({block}, {{0, 1}}, groups);
  CHECK(m[0].fpr == 0.0);
  CHECK(m[0].fpr_flagged);

  CHECK_THROWS_AS(selection_metrics({block}, {{}}, groups),
                  std::invalid_argument);
}

TEST_CASE("partial recovery rates") {
  GroupStructure groups{{10}, {1}};
  Matrix block = Matrix::Zero(10, 1);
  block(0, 0) = 1.0;  // one of two true rows
  block(5, 0) = 1.0;  // one false row
  auto m = selection_metrics({block}, {{0, 1}}, groups);
  CHECK(m[0].ms == 2.0);
  CHECK(m[0].tpr == doctest::Approx(0.5));
  CHECK(m[0].fpr == doctest::Approx(1.0 / 8.0));
}
