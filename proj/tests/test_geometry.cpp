#include "doctest.h"

#include <numeric>

#include "ipomp/error.hpp"
#include "ipomp/geometry.hpp"
#include "support.hpp"

using namespace ipomp;
using namespace ipomp::testing;

TEST_CASE("kmeans with k = 1 puts everything in one cluster at the mean") {
  const auto store = random_store(30, 5, 1);
  const auto c = kmeans(store, store.ids(), 1, 0);
  CHECK(std::all_of(c.assignment.begin(), c.assignment.end(), [](int a) { return a == 0; }));
  const Eigen::RowVectorXd mean = store.matrix().colwise().mean();
  CHECK((c.centroids.row(0) - mean).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("kmeans with k = n has zero inertia") {
  const auto store = random_store(12, 4, 2);
  const auto c = kmeans(store, store.ids(), 12, 3);
  CHECK(c.inertia == doctest::Approx(0.0).epsilon(1e-12));
  auto sizes = c.sizes();
  CHECK(std::all_of(sizes.begin(), sizes.end(), [](std::size_t s) { return s == 1; }));
}

TEST_CASE("kmeans splits two obvious pairs") {
  const auto store = circle_store({0.0, 8.05, 180.0, 171.95}, {"a", "b", "c", "d"});
  const auto c = kmeans(store, store.ids(), 2, 0);
  CHECK(c.assignment[0] == c.assignment[1]);
  CHECK(c.assignment[2] == c.assignment[3]);
  CHECK(c.assignment[0] != c.assignment[2]);

  // Brute force over every 2-partition confirms this is the optimum.
  const auto &m = store.matrix();
  double best = 1e300;
  for (int mask = 1; mask < 15; ++mask) {
    double inertia = 0.0;
    for (int side = 0; side < 2; ++side) {
      std::vector<Eigen::Index> rows;
      for (int i = 0; i < 4; ++i)
        if (((mask >> i) & 1) == side)
          rows.push_back(i);
      Eigen::RowVectorXd mu = Eigen::RowVectorXd::Zero(2);
      for (auto r : rows)
        mu += m.row(r);
      mu /= static_cast<double>(rows.size());
      for (auto r : rows)
        inertia += (m.row(r) - mu).squaredNorm();
    }
    best = std::min(best, inertia);
  }
  CHECK(c.inertia == doctest::Approx(best));
}

TEST_CASE("kmeans partitions, never increases inertia and is deterministic") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 5 + rng() % 80;
    const auto store = random_store(n, 6, rng());
    const int k = 1 + static_cast<int>(rng() % std::min<std::size_t>(n, 8));
    const auto seed = rng();
    const auto c = kmeans(store, store.ids(), k, seed);
    const auto sizes = c.sizes();
    CHECK(std::accumulate(sizes.begin(), sizes.end(), std::size_t{0}) == n);
    for (std::size_t i = 1; i < c.inertia_trace.size(); ++i)
      CHECK(c.inertia_trace[i] <= c.inertia_trace[i - 1] + 1e-12);
    CHECK(c.iterations <= kKMeansMaxIterations);
    const auto again = kmeans(store, store.ids(), k, seed);
    CHECK(again.assignment == c.assignment);
    CHECK(again.centroids == c.centroids);
  }
}

TEST_CASE("kmeans argument errors") {
  const auto store = random_store(5, 3, 1);
  CHECK_THROWS_AS(kmeans(store, store.ids(), 0, 0), InputError);
  CHECK_THROWS_AS(kmeans(store, store.ids(), 6, 0), InputError);
  CHECK_THROWS_AS(kmeans(store, {}, 1, 0), InputError);
}

TEST_CASE("proportional_quotas") {
  CHECK(proportional_quotas({10, 6, 4}, 10) == std::vector<std::size_t>{5, 3, 2});
  CHECK(proportional_quotas({7, 7, 6}, 10) == std::vector<std::size_t>{4, 3, 3});
  CHECK(proportional_quotas({7, 7, 6}, 0) == std::vector<std::size_t>{0, 0, 0});
  CHECK(proportional_quotas({1, 1, 1}, 3) == std::vector<std::size_t>{1, 1, 1});
  CHECK_THROWS_AS(proportional_quotas({1, 1}, 3), InputError);
}

TEST_CASE("proportional_sample follows the quotas") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 10 + rng() % 60;
    const auto store = random_store(n, 4, rng());
    const int k = 1 + static_cast<int>(rng() % 6);
    const auto c = kmeans(store, store.ids(), k, rng());
    const std::size_t m = rng() % (n + 1);
    const auto seed = rng();
    const auto picked = proportional_sample(c, m, seed);
    CHECK(picked.size() == m);
    CHECK(std::unordered_set<std::string>(picked.begin(), picked.end()).size() == m);
    const auto quotas = proportional_quotas(c.sizes(), m);
    std::vector<std::size_t> got(static_cast<std::size_t>(k), 0);
    for (const auto &id : picked)
      ++got[static_cast<std::size_t>(
          c.assignment[static_cast<std::size_t>(store.row_index(id))])];
    CHECK(got == quotas);
    CHECK(proportional_sample(c, m, seed) == picked);
  }
  const auto store = random_store(10, 3, 1);
  CHECK(proportional_sample(kmeans(store, store.ids(), 2, 0), 0, 1).empty());
}

TEST_CASE("boundary_points examples") {
  const auto circle = circle_store({0.0, 1.0, 2.0, 180.0}, {"p0", "p1", "p2", "p180"});
  CHECK(boundary_points(circle, circle.ids(), 1) == std::vector<std::string>{"p180"});
  const auto all = boundary_points(circle, circle.ids(), 4);
  CHECK(all.size() == 4);
  CHECK(all.front() == "p180");

  CHECK_THROWS_AS(boundary_points(circle, circle.ids(), 0), InputError);
  CHECK_THROWS_AS(boundary_points(circle, circle.ids(), 5), InputError);
}

TEST_CASE("boundary_points finds planted outliers") {
  std::mt19937_64 rng(31);
  std::normal_distribution<double> normal;
  const int d = 16;
  RowMatrix m(205, d);
  Eigen::RowVectorXd centre = Eigen::RowVectorXd::Zero(d);
  centre[0] = 1.0;
  for (Eigen::Index i = 0; i < 200; ++i)
    for (int j = 0; j < d; ++j)
      m(i, j) = centre[j] + 0.1 * normal(rng);
  for (Eigen::Index i = 200; i < 205; ++i)
    for (int j = 0; j < d; ++j)
      m(i, j) = normal(rng) - centre[j];
  const auto ids = make_ids(205);
  const EmbeddingStore store(ids, m);
  const auto got = boundary_points(store, ids, 5);
  CHECK(std::set<std::string>(got.begin(), got.end()) ==
        std::set<std::string>(ids.begin() + 200, ids.end()));

  // Scores agree with a direct kNN-distance computation.
  const auto scores = boundary_scores(store, ids);
  for (std::size_t i = 0; i < 205; i += 17) {
    std::vector<double> dist;
    for (std::size_t j = 0; j < 205; ++j)
      if (j != i)
        dist.push_back(cosine_distance(store.row(ids[i]), store.row(ids[j])));
    std::sort(dist.begin(), dist.end());
    CHECK(scores[i] == doctest::Approx(std::accumulate(dist.begin(), dist.begin() + 10, 0.0)));
  }
}

TEST_CASE("furthest_pair examples") {
  const auto s = circle_store({0.0, 10.0, 180.0}, {"a", "b", "c"});
  CHECK(furthest_pair(s, s.ids()) == std::pair<std::string, std::string>{"a", "c"});
  CHECK(furthest_pair(s, {"c", "b"}) == std::pair<std::string, std::string>{"b", "c"});
  CHECK_THROWS_AS(furthest_pair(s, {"a"}), InputError);
}

TEST_CASE("furthest_pair equals brute force and composes with boundary_points") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 100; ++trial) {
    const auto store = random_store(64, 3 + trial % 8, rng());
    const auto ids = store.ids();
    CHECK(furthest_pair(store, ids) == brute_furthest(store, ids));
    CHECK(furthest_pair(store, boundary_points(store, ids, ids.size())) ==
          furthest_pair(store, ids));
  }
}
