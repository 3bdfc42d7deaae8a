#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "lofdrf/error.hpp"
#include "lofdrf/lof.hpp"
#include "lofdrf/rng.hpp"
#include "support/oracles.hpp"

using namespace lofdrf;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

PointSet line_points(std::vector<double> xs) {
  return PointSet{xs.size(), [xs = std::move(xs)](size_t i, size_t j) {
                    return std::abs(xs[i] - xs[j]);
                  }};
}

std::vector<std::vector<double>> distance_matrix(const PointSet& ps) {
  std::vector<std::vector<double>> m(ps.size, std::vector<double>(ps.size, 0.0));
  for (size_t i = 0; i < ps.size; ++i) {
    for (size_t j = 0; j < ps.size; ++j) m[i][j] = ps.distance(i, j);
  }
  return m;
}

}  // namespace

TEST_SUITE("lof") {
  TEST_CASE("knn rejects tiny sets and out-of-range k") {
    PointSet single = line_points({1.0});
    CHECK_THROWS_AS(knn(single, 1), InputError);
    PointSet three = line_points({0.0, 1.0, 3.0});
    CHECK_THROWS_AS(knn(three, 0), InputError);
    CHECK_THROWS_AS(knn(three, 3), InputError);
    CHECK_NOTHROW(knn(three, 2));
  }

  TEST_CASE("three points on a line, worked by hand") {
    PointSet ps = line_points({0.0, 1.0, 3.0});
    NeighborhoodInfo info = knn(ps, 1);
    CHECK(info.k_distance == std::vector<double>{1.0, 1.0, 2.0});
    REQUIRE(info.neighbors.size() == 3);
    CHECK(info.neighbors[0] == std::vector<size_t>{1});
    CHECK(info.neighbors[1] == std::vector<size_t>{0});
    CHECK(info.neighbors[2] == std::vector<size_t>{1});

    // rd(0, 1) = max(kd(1), d(0,1)) = 1; rd(2, 1) = max(1, 2) = 2
    CHECK(reachability_distance(ps, info, 0, 1) == 1.0);
    CHECK(reachability_distance(ps, info, 2, 1) == 2.0);

    CHECK(local_reachability_density(ps, info, 0) == 1.0);
    CHECK(local_reachability_density(ps, info, 1) == 1.0);
    CHECK(local_reachability_density(ps, info, 2) == 0.5);

    std::vector<double> scores = compute_lof(ps, 1);
    CHECK(scores == std::vector<double>{1.0, 1.0, 2.0});
  }

  TEST_CASE("duplicate points produce infinite scores for the stray one") {
    PointSet ps = line_points({0.0, 0.0, 5.0});
    std::vector<double> scores = compute_lof(ps, 1);
    // 0 and 1 coincide: zero reachability sums give both infinite density,
    // and the inf/inf ratio counts as 1. Point 2 divides a finite density
    // by an infinite one.
    CHECK(scores[0] == 1.0);
    CHECK(scores[1] == 1.0);
    CHECK(scores[2] == kInf);
    CHECK(normalize_scores(scores) == std::vector<double>{0.0, 0.0, 1.0});
  }

  TEST_CASE("uniform grid interior scores one, edges stand out") {
    std::vector<double> xs(21);
    for (size_t i = 0; i < xs.size(); ++i) xs[i] = double(i);
    PointSet ps = line_points(std::move(xs));
    std::vector<double> scores = compute_lof(ps, 2);
    for (size_t i = 3; i <= 17; ++i) {
      CHECK(scores[i] == doctest::Approx(1.0).epsilon(1e-12));
    }
    // End points reach both neighbors on one side: lrd 2/3 against
    // neighbors at density 1 and 5/6.
    CHECK(scores[0] == doctest::Approx(1.25).epsilon(1e-12));
    CHECK(scores[20] == doctest::Approx(1.25).epsilon(1e-12));
    CHECK(scores[2] == doctest::Approx(5.0 / 6.0).epsilon(1e-12));
    CHECK(scores[18] == doctest::Approx(5.0 / 6.0).epsilon(1e-12));
  }

  TEST_CASE("matches a brute-force reference on random point sets") {
    Rng gen(404);
    for (int trial = 0; trial < 50; ++trial) {
      size_t m = 3 + gen.below(38);
      std::vector<double> xs(m);
      bool clumpy = trial % 3 == 0;
      for (double& x : xs) {
        // A third of the trials draw from a tiny value set so duplicates
        // and distance ties are common.
        x = clumpy ? double(gen.below(4)) : gen.unit() * 10.0;
      }
      PointSet ps = line_points(std::move(xs));
      size_t k = 1 + gen.below(std::min<size_t>(10, m - 1));

      NeighborhoodInfo info = knn(ps, k);
      std::vector<std::vector<double>> dist = distance_matrix(ps);
      oracle::LofResult ref = oracle::brute_lof(dist, k);
      std::vector<double> scores = compute_lof(ps, k);

      REQUIRE(scores.size() == m);
      for (size_t i = 0; i < m; ++i) {
        CAPTURE(trial);
        CAPTURE(i);
        CHECK(info.k_distance[i] == ref.k_distance[i]);
        CHECK(info.neighbors[i] == ref.neighbors[i]);
        if (std::isinf(ref.lof[i])) {
          CHECK(std::isinf(scores[i]));
        } else {
          CHECK(scores[i] == doctest::Approx(ref.lof[i]).epsilon(1e-9));
        }
      }
    }
  }

  TEST_CASE("normalization handles plain, constant, and infinite inputs") {
    std::vector<double> plain = {1.0, 2.0, 3.0};
    CHECK(normalize_scores(plain) == std::vector<double>{0.0, 0.5, 1.0});

    std::vector<double> constant = {4.0, 4.0, 4.0};
    CHECK(normalize_scores(constant) == std::vector<double>{0.5, 0.5, 0.5});

    std::vector<double> with_inf = {1.0, 3.0, kInf};
    CHECK(normalize_scores(with_inf) == std::vector<double>{0.0, 0.5, 1.0});

    std::vector<double> equal_finite = {2.0, 2.0, kInf};
    CHECK(normalize_scores(equal_finite) == std::vector<double>{0.0, 0.0, 1.0});

    std::vector<double> all_inf = {kInf, kInf};
    CHECK(normalize_scores(all_inf) == std::vector<double>{1.0, 1.0});

    // Already-normalized finite input is a fixed point.
    std::vector<double> unit = {0.0, 0.5, 1.0};
    CHECK(normalize_scores(unit) == unit);

    CHECK(normalize_scores(std::vector<double>{}).empty());

    // Same convention as the hand oracle.
    std::vector<double> mixed = {1.0, 3.0, kInf, 2.0};
    CHECK(normalize_scores(mixed) == oracle::normalize(mixed));
  }

  TEST_CASE("prediction distance is the disagreement fraction") {
    std::vector<int32_t> u = {0, 0, 1, 2, 2, 0, 1, 2, 1, 1};
    std::vector<int32_t> v = {0, 0, 1, 1, 0, 0, 1, 2, 2, 2};
    CHECK(prediction_distance(u, v) == 0.4);
    CHECK(prediction_distance(v, u) == 0.4);
    CHECK(prediction_distance(u, u) == 0.0);
    CHECK(prediction_distance(u, v) == oracle::naive_distance(u, v));

    std::vector<int32_t> shorter = {0, 1};
    CHECK_THROWS_AS(prediction_distance(u, shorter), InputError);
    CHECK(prediction_distance(std::vector<int32_t>{}, std::vector<int32_t>{}) == 0.0);
  }
}
