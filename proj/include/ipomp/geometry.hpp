#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ipomp/embedding.hpp"

namespace ipomp {

/// Result of a seeded k-means run.
struct ClusterAssignment {
  int k = 0;
  std::vector<std::string> ids;   ///< input order
  std::vector<int> assignment;    ///< cluster of ids[i]
  RowMatrix centroids;            ///< k x d
  double inertia = 0.0;           ///< sum of squared distances to assigned centroid
  std::vector<double> inertia_trace; ///< inertia after each Lloyd iteration
  int iterations = 0;

  /// Members of each cluster, in input order.
  std::vector<std::vector<std::string>> members() const;
  std::vector<std::size_t> sizes() const;
};

inline constexpr int kKMeansMaxIterations = 300;

/// Lloyd's algorithm with k-means++ seeding on the rows of `points`.
/// Squared-Euclidean objective, nearest-centroid ties go to the lowest
/// cluster index, and an emptied cluster is re-seeded with the point
/// farthest from its own centroid.
ClusterAssignment kmeans_rows(const RowMatrix &points, std::vector<std::string> ids,
                              int k, std::uint64_t seed);

ClusterAssignment kmeans(const EmbeddingStore &store, const std::vector<std::string> &ids,
                         int k, std::uint64_t seed);

/// Largest-remainder allocation of `m` draws over clusters of the given
/// sizes: floor(m * size / total), remainder handed out by descending
/// fractional part (ties to the lower index), capped at cluster size.
std::vector<std::size_t> proportional_quotas(const std::vector<std::size_t> &sizes,
                                             std::size_t m);

/// Draws `m` ids, per-cluster counts given by proportional_quotas, each
/// cluster sampled uniformly without replacement.
std::vector<std::string> proportional_sample(const ClusterAssignment &clusters,
                                             std::size_t m, std::uint64_t seed);

/// kNN outlier score per id: sum of cosine distances to the
/// kappa = min(10, n - 1) nearest neighbours.
std::vector<double> boundary_scores(const EmbeddingStore &store,
                                    const std::vector<std::string> &ids);

/// The `budget` ids with the highest boundary score, ties by ascending id.
std::vector<std::string> boundary_points(const EmbeddingStore &store,
                                         const std::vector<std::string> &ids,
                                         std::size_t budget);

/// Exact maximal-cosine-distance pair. The returned pair has first < second
/// and among equally distant pairs is the lexicographically smallest.
std::pair<std::string, std::string> furthest_pair(const EmbeddingStore &store,
                                                  const std::vector<std::string> &ids);

} // namespace ipomp
