#include "ipomp/geometry.hpp"

#include <algorithm>
#include <numeric>
#include <queue>
#include <random>
#include <tuple>

namespace ipomp {

std::vector<std::vector<std::string>> ClusterAssignment::members() const {
  std::vector<std::vector<std::string>> out(static_cast<std::size_t>(k));
  for (std::size_t i = 0; i < ids.size(); ++i)
    out[static_cast<std::size_t>(assignment[i])].push_back(ids[i]);
  return out;
}

std::vector<std::size_t> ClusterAssignment::sizes() const {
  std::vector<std::size_t> out(static_cast<std::size_t>(k), 0);
  for (int c : assignment)
    ++out[static_cast<std::size_t>(c)];
  return out;
}

namespace {

std::vector<Eigen::Index> kmeanspp_seeds(const RowMatrix &x, int k, std::mt19937_64 &rng) {
  const Eigen::Index n = x.rows();
  std::vector<Eigen::Index> seeds;
  seeds.reserve(static_cast<std::size_t>(k));
  std::uniform_int_distribution<Eigen::Index> first(0, n - 1);
  seeds.push_back(first(rng));
  std::vector<double> d2(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i)
    d2[static_cast<std::size_t>(i)] = (x.row(i) - x.row(seeds[0])).squaredNorm();
  std::vector<bool> chosen(static_cast<std::size_t>(n), false);
  chosen[static_cast<std::size_t>(seeds[0])] = true;

  while (static_cast<int>(seeds.size()) < k) {
    const double total = std::accumulate(d2.begin(), d2.end(), 0.0);
    Eigen::Index next = -1;
    if (total > 0.0) {
      std::discrete_distribution<Eigen::Index> pick(d2.begin(), d2.end());
      next = pick(rng);
    } else {
      // Every remaining point duplicates a seed.
      for (Eigen::Index i = 0; i < n; ++i)
        if (!chosen[static_cast<std::size_t>(i)]) {
          next = i;
          break;
        }
    }
    seeds.push_back(next);
    chosen[static_cast<std::size_t>(next)] = true;
    for (Eigen::Index i = 0; i < n; ++i)
      d2[static_cast<std::size_t>(i)] =
          std::min(d2[static_cast<std::size_t>(i)], (x.row(i) - x.row(next)).squaredNorm());
  }
  return seeds;
}

} // namespace

ClusterAssignment kmeans_rows(const RowMatrix &points, std::vector<std::string> ids, int k,
                              std::uint64_t seed) {
  const Eigen::Index n = points.rows();
  if (k < 1)
    throw InputError("kmeans: k must be >= 1");
  if (k > n)
    throw InputError("kmeans: k = " + std::to_string(k) + " exceeds the number of points (" +
                     std::to_string(n) + ")");
  if (static_cast<Eigen::Index>(ids.size()) != n)
    throw InputError("kmeans: id count does not match point count");

  std::mt19937_64 rng(seed);
  const auto seeds = kmeanspp_seeds(points, k, rng);

  ClusterAssignment out;
  out.k = k;
  out.ids = std::move(ids);
  out.centroids.resize(k, points.cols());
  for (int c = 0; c < k; ++c)
    out.centroids.row(c) = points.row(seeds[static_cast<std::size_t>(c)]);

  std::vector<int> assign(static_cast<std::size_t>(n), -1);
  std::vector<double> dist(static_cast<std::size_t>(n), 0.0);

  for (int iter = 1; iter <= kKMeansMaxIterations; ++iter) {
    bool changed = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      int best = 0;
      double best_d = (points.row(i) - out.centroids.row(0)).squaredNorm();
      for (int c = 1; c < k; ++c) {
        const double d = (points.row(i) - out.centroids.row(c)).squaredNorm();
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      auto &slot = assign[static_cast<std::size_t>(i)];
      if (slot != best)
        changed = true;
      slot = best;
      dist[static_cast<std::size_t>(i)] = best_d;
    }

    std::vector<std::size_t> size(static_cast<std::size_t>(k), 0);
    for (int c : assign)
      ++size[static_cast<std::size_t>(c)];
    for (int c = 0; c < k; ++c) {
      if (size[static_cast<std::size_t>(c)] != 0)
        continue;
      Eigen::Index far = -1;
      for (Eigen::Index i = 0; i < n; ++i) {
        const auto owner = static_cast<std::size_t>(assign[static_cast<std::size_t>(i)]);
        if (size[owner] < 2)
          continue;
        if (far < 0 || dist[static_cast<std::size_t>(i)] > dist[static_cast<std::size_t>(far)])
          far = i;
      }
      --size[static_cast<std::size_t>(assign[static_cast<std::size_t>(far)])];
      assign[static_cast<std::size_t>(far)] = c;
      dist[static_cast<std::size_t>(far)] = 0.0;
      size[static_cast<std::size_t>(c)] = 1;
      out.centroids.row(c) = points.row(far);
      changed = true;
    }

    if (!changed && iter > 1)
      break;

    out.centroids.setZero();
    for (Eigen::Index i = 0; i < n; ++i)
      out.centroids.row(assign[static_cast<std::size_t>(i)]) += points.row(i);
    for (int c = 0; c < k; ++c)
      out.centroids.row(c) /= static_cast<double>(size[static_cast<std::size_t>(c)]);

    double inertia = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
      inertia += (points.row(i) - out.centroids.row(assign[static_cast<std::size_t>(i)]))
                     .squaredNorm();
    out.inertia_trace.push_back(inertia);
    out.iterations = iter;
  }

  out.assignment = std::move(assign);
  out.inertia = out.inertia_trace.empty() ? 0.0 : out.inertia_trace.back();
  return out;
}

ClusterAssignment kmeans(const EmbeddingStore &store, const std::vector<std::string> &ids,
                         int k, std::uint64_t seed) {
  return kmeans_rows(store.gather(ids), ids, k, seed);
}

std::vector<std::size_t> proportional_quotas(const std::vector<std::size_t> &sizes,
                                             std::size_t m) {
  const std::size_t total = std::accumulate(sizes.begin(), sizes.end(), std::size_t{0});
  if (m > total)
    throw InputError("proportional_sample: m = " + std::to_string(m) +
                     " exceeds the number of clustered ids (" + std::to_string(total) + ")");
  std::vector<std::size_t> quota(sizes.size(), 0);
  if (m == 0)
    return quota;

  // Remainders are kept as integers (m * size mod total) so ties are exact.
  std::vector<std::size_t> rem(sizes.size(), 0);
  std::size_t assigned = 0;
  for (std::size_t c = 0; c < sizes.size(); ++c) {
    quota[c] = std::min(m * sizes[c] / total, sizes[c]);
    rem[c] = m * sizes[c] % total;
    assigned += quota[c];
  }
  std::vector<std::size_t> order(sizes.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return rem[a] > rem[b]; });
  while (assigned < m) {
    bool progressed = false;
    for (std::size_t c : order) {
      if (assigned == m)
        break;
      if (quota[c] < sizes[c]) {
        ++quota[c];
        ++assigned;
        progressed = true;
      }
    }
    if (!progressed)
      break;
  }
  return quota;
}

std::vector<std::string> proportional_sample(const ClusterAssignment &clusters, std::size_t m,
                                             std::uint64_t seed) {
  auto groups = clusters.members();
  std::vector<std::size_t> sizes;
  sizes.reserve(groups.size());
  for (const auto &g : groups)
    sizes.push_back(g.size());
  const auto quota = proportional_quotas(sizes, m);

  std::mt19937_64 rng(seed);
  std::vector<std::string> out;
  out.reserve(m);
  for (std::size_t c = 0; c < groups.size(); ++c) {
    if (quota[c] == 0)
      continue;
    auto &g = groups[c];
    std::shuffle(g.begin(), g.end(), rng);
    out.insert(out.end(), g.begin(), g.begin() + static_cast<std::ptrdiff_t>(quota[c]));
  }
  return out;
}

std::vector<double> boundary_scores(const EmbeddingStore &store,
                                    const std::vector<std::string> &ids) {
  const auto n = static_cast<Eigen::Index>(ids.size());
  std::vector<double> scores(ids.size(), 0.0);
  if (n < 2)
    return scores;
  const std::size_t kappa = static_cast<std::size_t>(std::min<Eigen::Index>(10, n - 1));
  const RowMatrix x = store.gather(ids);

  // Per-row max-heap of the kappa smallest (distance, column) pairs.
  using Entry = std::pair<double, Eigen::Index>;
  std::vector<std::vector<Entry>> nearest(ids.size());
  for (auto &h : nearest)
    h.reserve(kappa + 1);
  auto offer = [&](Eigen::Index row, double d, Eigen::Index col) {
    auto &h = nearest[static_cast<std::size_t>(row)];
    const Entry e{d, col};
    if (h.size() < kappa) {
      h.push_back(e);
      std::push_heap(h.begin(), h.end());
    } else if (e < h.front()) {
      std::pop_heap(h.begin(), h.end());
      h.back() = e;
      std::push_heap(h.begin(), h.end());
    }
  };

  // Upper-triangular blocks only; each Gram entry feeds both of its rows.
  constexpr Eigen::Index kBlock = 256;
  Eigen::MatrixXd gram;
  for (Eigen::Index r0 = 0; r0 < n; r0 += kBlock) {
    const Eigen::Index rn = std::min(kBlock, n - r0);
    for (Eigen::Index c0 = r0; c0 < n; c0 += kBlock) {
      const Eigen::Index cn = std::min(kBlock, n - c0);
      gram.noalias() = x.middleRows(r0, rn) * x.middleRows(c0, cn).transpose();
      for (Eigen::Index a = 0; a < rn; ++a) {
        const Eigen::Index i = r0 + a;
        for (Eigen::Index b = 0; b < cn; ++b) {
          const Eigen::Index j = c0 + b;
          if (j <= i)
            continue;
          const double d = std::clamp(1.0 - gram(a, b), 0.0, 2.0);
          offer(i, d, j);
          offer(j, d, i);
        }
      }
    }
  }

  for (std::size_t i = 0; i < nearest.size(); ++i) {
    auto &h = nearest[i];
    std::sort(h.begin(), h.end());
    double s = 0.0;
    for (const auto &e : h)
      s += e.first;
    scores[i] = s;
  }
  return scores;
}

std::vector<std::string> boundary_points(const EmbeddingStore &store,
                                         const std::vector<std::string> &ids,
                                         std::size_t budget) {
  if (budget < 1)
    throw InputError("boundary_points: budget must be >= 1");
  if (budget > ids.size())
    throw InputError("boundary_points: budget " + std::to_string(budget) +
                     " exceeds the number of ids (" + std::to_string(ids.size()) + ")");
  const auto scores = boundary_scores(store, ids);
  std::vector<std::size_t> order(ids.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b])
      return scores[a] > scores[b];
    return ids[a] < ids[b];
  });
  std::vector<std::string> out;
  out.reserve(budget);
  for (std::size_t i = 0; i < budget; ++i)
    out.push_back(ids[order[i]]);
  return out;
}

std::pair<std::string, std::string> furthest_pair(const EmbeddingStore &store,
                                                  const std::vector<std::string> &ids) {
  if (ids.size() < 2)
    throw InputError("furthest_pair: need at least 2 ids");
  const RowMatrix x = store.gather(ids);
  const auto n = x.rows();
  double best = -1.0;
  const std::string *best_a = nullptr;
  const std::string *best_b = nullptr;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double d = 1.0 - x.row(i).dot(x.row(j));
      if (d < best)
        continue;
      const std::string *a = &ids[static_cast<std::size_t>(i)];
      const std::string *b = &ids[static_cast<std::size_t>(j)];
      if (*b < *a)
        std::swap(a, b);
      if (d > best || std::tie(*a, *b) < std::tie(*best_a, *best_b)) {
        best = d;
        best_a = a;
        best_b = b;
      }
    }
  }
  std::pair<std::string, std::string> best_pair{*best_a, *best_b};
  return best_pair;
}

} // namespace ipomp
