#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "sgmave/tuning.hpp"

using namespace sgmave;

namespace {

// small synthetic design with the pairwise layout but arbitrary content
ShrinkageDesign toy_design(Index n, Index p, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  ShrinkageDesign design;
  design.n = n;
  design.X = oracles::random_matrix(n * n, p, rng);
  design.response = oracles::random_vector(n * n, rng);
  design.weights = oracles::random_vector(n * n, rng).cwiseAbs();
  design.finalize();
  return design;
}

}  // namespace

TEST_CASE("rss matches a naive double-loop summation") {
  ShrinkageDesign design = toy_design(5, 3, 31);
  std::mt19937_64 rng(32);
  Vector alpha = oracles::random_vector(3, rng);
  CHECK(rss(design, ShrinkageVector{alpha}) ==
        doctest::Approx(oracles::rss_double_loop(design, alpha))
            .epsilon(1e-12));
}

TEST_CASE("rss vanishes exactly on interpolating data") {
  ShrinkageDesign design = toy_design(4, 2, 33);
  Vector alpha(2);
  alpha << 0.7, -1.2;
  design.response = design.X * alpha;  // exact interpolation
  CHECK(rss(design, ShrinkageVector{alpha}) == doctest::Approx(0.0));
}

TEST_CASE("effective_df counts active predictors times group dimensions") {
  GroupStructure groups{{20, 20}, {1, 1}};
  Vector alpha = Vector::Zero(40);
  CHECK(effective_df(ShrinkageVector{alpha}, groups) == 0.0);

  // the two-group example truth: 3 and 2 active predictors, d = (1, 1)
  alpha(0) = alpha(1) = alpha(2) = 1.0;
  alpha(20) = alpha(21) = 0.5;
  CHECK(effective_df(ShrinkageVector{alpha}, groups) == 5.0);

  GroupStructure wide{{20, 20}, {2, 1}};
  Vector full = Vector::Ones(40);
  CHECK(effective_df(ShrinkageVector{full}, wide) == 60.0);
}

TEST_CASE("bic matches the closed form") {
  CHECK(bic(100.0, 2.0, 100) ==
        doctest::Approx(4.6972735897078532).epsilon(1e-12));
  CHECK(bic(std::exp(1.0), 0.0, 57) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("bic is strictly increasing in df and rss") {
  double prev = bic(10.0, 0.0, 50);
  for (double df : {1.0, 2.0, 5.0, 11.0}) {
    const double value = bic(10.0, df, 50);
    CHECK(value > prev);
    prev = value;
  }
  prev = bic(0.5, 3.0, 50);
  for (double r : {0.7, 1.0, 10.0, 250.0}) {
    const double value = bic(r, 3.0, 50);
    CHECK(value > prev);
    prev = value;
  }
}

TEST_CASE("bic guards a zero rss with a sentinel and flag") {
  bool degenerate = false;
  const double value = bic(0.0, 2.0, 10, &degenerate);
  CHECK(degenerate);
  CHECK(value == std::numeric_limits<double>::lowest());
  CHECK_THROWS_AS(bic(-1.0, 0.0, 10), std::invalid_argument);
}

TEST_CASE("select_lambda picks the smallest bic, ties to the sparser side") {
  RegularizationPath path;
  const auto push = [&](double lambda, double b) {
    PathRecord r;
    r.lambda = lambda;
    r.alpha = Vector::Zero(2);
    r.rss = 1.0;
    r.df = 0.0;
    r.bic = b;
    path.records.push_back(r);
  };
  push(1.0, 3.0);
  CHECK(select_lambda(path).lambda == 1.0);  // single record

  push(0.5, 2.0);
  push(0.25, 2.5);
  CHECK(select_lambda(path).lambda == 0.5);

  push(0.75, 2.0);  // ties the minimum with a larger lambda
  CHECK(select_lambda(path).lambda == 0.75);

  // permutation invariance: record order must not matter
  RegularizationPath shuffled;
  shuffled.records = {path.records[2], path.records[0], path.records[3],
                      path.records[1]};
  CHECK(select_lambda(shuffled).lambda == 0.75);
}

TEST_CASE("select_lambda wants a nonempty, filled path") {
  RegularizationPath empty;
  CHECK_THROWS_AS(select_lambda(empty), std::invalid_argument);
  RegularizationPath unfilled;
  PathRecord r;
  r.lambda = 1.0;
  r.alpha = Vector::Zero(2);
  unfilled.records.push_back(r);
  CHECK_THROWS_AS(select_lambda(unfilled), std::invalid_argument);
}

TEST_CASE("a path whose true-support record dominates is selected") {
  // synthetic: rss drops sharply once the true support enters, df grows
  GroupStructure groups{{4, 4}, {1, 1}};
  RegularizationPath path;
  const Index n = 100;
  const auto add = [&](double lambda, std::initializer_list<int> active,
                       double rss_value) {
    PathRecord r;
    r.lambda = lambda;
    r.alpha = Vector::Zero(8);
    for (int s : active) r.alpha(s) = 1.0;
    r.rss = rss_value;
    r.df = effective_df(ShrinkageVector{r.alpha}, groups);
    r.bic = bic(r.rss, r.df, n);
    path.records.push_back(r);
  };
  add(2.0, {}, 500.0);
  add(1.0, {0}, 300.0);
  add(0.5, {0, 1, 4}, 40.0);     // true support
  add(0.25, {0, 1, 2, 4}, 39.5);  // overfit: tiny rss gain, extra df
  add(0.1, {0, 1, 2, 3, 4, 5}, 39.2);
  const PathRecord chosen = select_lambda(path);
  CHECK(chosen.lambda == 0.5);
}
