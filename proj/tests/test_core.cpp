#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "sgmave/core.hpp"

using namespace sgmave;

namespace {

Dataset make_dataset(Index n, Index p, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Dataset data;
  data.predictors = oracles::random_matrix(n, p, rng);
  data.response = oracles::random_vector(n, rng);
  return data;
}

}  // namespace

TEST_CASE("validate accepts the two-group example shape") {
  Dataset data = make_dataset(200, 40, 1);
  GroupStructure groups{{20, 20}, {1, 1}};
  std::vector<std::string> warnings;
  CHECK_NOTHROW(validate(data, groups, &warnings));
  CHECK(warnings.empty());
  // idempotent, no state
  CHECK_NOTHROW(validate(data, groups, &warnings));
  CHECK(warnings.empty());
}

TEST_CASE("validate rejects a partition that does not match the data") {
  Dataset data = make_dataset(50, 30, 2);
  GroupStructure groups{{20, 20}, {1, 1}};
  CHECK_THROWS_AS(validate(data, groups), std::invalid_argument);
}

TEST_CASE("validate warns at d > 3 but allows the fit") {
  Dataset data = make_dataset(50, 12, 3);
  GroupStructure groups{{6, 6}, {2, 2}};
  std::vector<std::string> warnings;
  CHECK_NOTHROW(validate(data, groups, &warnings));
  REQUIRE(warnings.size() == 1);
  CHECK(warnings[0].find("index dimension") != std::string::npos);
}

TEST_CASE("validate rejects d_l > p_l") {
  Dataset data = make_dataset(20, 4, 4);
  GroupStructure groups{{2, 2}, {3, 1}};
  CHECK_THROWS_AS(validate(data, groups), std::invalid_argument);
}

TEST_CASE("validate rejects non-finite entries and tiny samples") {
  Dataset data = make_dataset(10, 4, 5);
  GroupStructure groups{{2, 2}, {1, 1}};
  data.predictors(3, 1) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(validate(data, groups), std::invalid_argument);

  Dataset tiny = make_dataset(1, 4, 6);
  CHECK_THROWS_AS(validate(tiny, groups), std::invalid_argument);
}

TEST_CASE("apply_group_bases with identity blocks is the identity") {
  std::mt19937_64 rng(7);
  Matrix x = oracles::random_matrix(9, 5, rng);
  GroupStructure groups{{3, 2}, {1, 1}};
  CHECK(apply_group_bases(x, groups) == x);
}

TEST_CASE("apply_group_bases applies a rotation transpose") {
  GroupStructure groups{{2}, {1}};
  Matrix rot(2, 2);
  rot << 0, -1, 1, 0;  // rotation by 90 degrees
  groups.gamma = {rot};
  Matrix x(1, 2);
  x << 1, 0;
  Matrix v = apply_group_bases(x, groups);
  CHECK(v(0, 0) == doctest::Approx(0.0));
  CHECK(v(0, 1) == doctest::Approx(-1.0));
}

TEST_CASE("apply_group_bases preserves the Gram trace and row norms") {
  std::mt19937_64 rng(8);
  const Index p = 6;
  Matrix q = oracles::random_orthonormal(p, p, rng);
  GroupStructure groups{{4, 2}, {1, 1}};
  groups.gamma = {q.leftCols(4), q.rightCols(2)};
  Matrix x = oracles::random_matrix(11, p, rng);
  Matrix v = apply_group_bases(x, groups);
  CHECK((v.transpose() * v).trace() ==
        doctest::Approx((x.transpose() * x).trace()).epsilon(1e-12));
  for (Index i = 0; i < x.rows(); ++i)
    CHECK(v.row(i).norm() == doctest::Approx(x.row(i).norm()).epsilon(1e-12));
}

TEST_CASE("apply_group_bases rejects non-orthonormal blocks") {
  GroupStructure groups{{2}, {1}};
  Matrix bad(2, 2);
  bad << 1, 1, 0, 1;
  groups.gamma = {bad};
  Matrix x = Matrix::Ones(3, 2);
  CHECK_THROWS_AS(apply_group_bases(x, groups), std::invalid_argument);
}

TEST_CASE("validate rejects gamma blocks that overlap") {
  Dataset data = make_dataset(10, 4, 9);
  GroupStructure groups{{2, 2}, {1, 1}};
  Matrix g(4, 2);
  g << 1, 0, 0, 1, 0, 0, 0, 0;
  groups.gamma = {g, g};  // same span twice
  CHECK_THROWS_AS(validate(data, groups), std::invalid_argument);
}

TEST_CASE("orthonormalize returns the span with the sign convention") {
  std::mt19937_64 rng(10);
  Matrix m = oracles::random_matrix(7, 3, rng);
  Matrix q = orthonormalize(m);
  CHECK((q.transpose() * q - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff() <
        1e-12);
  // same column space
  Matrix pm = m * (m.transpose() * m).inverse() * m.transpose();
  Matrix pq = q * q.transpose();
  CHECK((pm - pq).cwiseAbs().maxCoeff() < 1e-10);
  for (Index j = 0; j < q.cols(); ++j) {
    for (Index i = 0; i < q.rows(); ++i) {
      if (std::abs(q(i, j)) > 1e-12) {
        CHECK(q(i, j) > 0.0);
        break;
      }
    }
  }
}

TEST_CASE("orthonormalize rejects rank-deficient input") {
  Matrix m(4, 2);
  m.col(0) << 1, 2, 3, 4;
  m.col(1) = 2.0 * m.col(0);
  CHECK_THROWS_AS(orthonormalize(m), std::runtime_error);
}

TEST_CASE("nonzero_row_support finds exact nonzero rows") {
  Matrix block = Matrix::Zero(5, 2);
  block(0, 0) = 0.3;
  block(3, 1) = -1.0;
  auto support = nonzero_row_support({block});
  REQUIRE(support.size() == 1);
  CHECK(support[0] == std::vector<Index>{0, 3});
}
