#include "ipomp/ann.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <queue>
#include <random>
#include <unordered_set>

namespace ipomp {

DissimilarityIndex::DissimilarityIndex(const EmbeddingStore &store,
                                       const std::vector<std::string> &ids, HnswParams params)
    : ids_(ids), params_(params) {
  if (ids_.empty())
    throw InputError("build_index: empty id list");
  if (params_.m_links < 2 || params_.ef_construction < 1 || params_.ef_search < 1)
    throw InputError("build_index: invalid graph parameters");
  {
    std::unordered_set<std::string> seen;
    for (const auto &id : ids_)
      if (!seen.insert(id).second)
        throw InputError("build_index: duplicate id \"" + id + "\"");
  }
  negated_ = -store.gather(ids_);

  std::mt19937_64 rng(params_.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double ml = 1.0 / std::log(static_cast<double>(params_.m_links));
  links_.resize(ids_.size());
  for (std::uint32_t node = 0; node < ids_.size(); ++node) {
    const double u = 1.0 - unit(rng); // (0, 1]
    const int level = static_cast<int>(std::floor(-std::log(u) * ml));
    insert(node, level);
  }
}

double DissimilarityIndex::node_distance(std::uint32_t a, std::uint32_t b) const {
  return 1.0 - negated_.row(a).dot(negated_.row(b));
}

double DissimilarityIndex::query_distance(const Eigen::Ref<const Eigen::RowVectorXd> &q,
                                          std::uint32_t node) const {
  return 1.0 - q.dot(negated_.row(node));
}

template <typename Dist>
std::vector<DissimilarityIndex::Candidate>
DissimilarityIndex::search_layer(Dist &&dist, std::vector<std::uint32_t> entries,
                                 std::size_t ef, int level,
                                 std::vector<bool> &visited) const {
  std::priority_queue<Candidate, std::vector<Candidate>, std::greater<>> frontier;
  std::priority_queue<Candidate> found; // worst on top
  for (auto e : entries) {
    if (visited[e])
      continue;
    visited[e] = true;
    const Candidate c{dist(e), e};
    frontier.push(c);
    found.push(c);
    if (found.size() > ef)
      found.pop();
  }
  while (!frontier.empty()) {
    const Candidate c = frontier.top();
    frontier.pop();
    if (found.size() >= ef && found.top() < c)
      break;
    for (auto nb : links_[c.node][static_cast<std::size_t>(level)]) {
      if (visited[nb])
        continue;
      visited[nb] = true;
      const Candidate cand{dist(nb), nb};
      if (found.size() < ef || cand < found.top()) {
        frontier.push(cand);
        found.push(cand);
        if (found.size() > ef)
          found.pop();
      }
    }
  }
  std::vector<Candidate> out;
  out.reserve(found.size());
  while (!found.empty()) {
    out.push_back(found.top());
    found.pop();
  }
  std::reverse(out.begin(), out.end());
  return out;
}

// Diversity heuristic: keep a candidate only if it is closer to the base
// than to every neighbour already kept, then top up with the closest
// discarded ones.
std::vector<std::uint32_t>
DissimilarityIndex::select_neighbors(std::uint32_t base, std::vector<Candidate> candidates,
                                     std::size_t limit) const {
  (void)base;
  std::sort(candidates.begin(), candidates.end());
  std::vector<std::uint32_t> kept;
  std::vector<std::uint32_t> discarded;
  for (const auto &c : candidates) {
    if (kept.size() >= limit)
      break;
    bool good = true;
    for (auto k : kept)
      if (node_distance(c.node, k) < c.dist) {
        good = false;
        break;
      }
    if (good)
      kept.push_back(c.node);
    else
      discarded.push_back(c.node);
  }
  for (auto d : discarded) {
    if (kept.size() >= limit)
      break;
    kept.push_back(d);
  }
  return kept;
}

void DissimilarityIndex::insert(std::uint32_t node, int level) {
  links_[node].resize(static_cast<std::size_t>(level) + 1);
  if (max_level_ < 0) {
    entry_ = node;
    max_level_ = level;
    return;
  }
  const auto m = static_cast<std::size_t>(params_.m_links);
  auto dist = [&](std::uint32_t other) { return node_distance(node, other); };
  std::vector<bool> visited(ids_.size(), false);

  std::uint32_t cur = entry_;
  for (int l = max_level_; l > level; --l) {
    std::fill(visited.begin(), visited.end(), false);
    cur = search_layer(dist, {cur}, 1, l, visited).front().node;
  }
  std::vector<std::uint32_t> entries{cur};
  for (int l = std::min(level, max_level_); l >= 0; --l) {
    std::fill(visited.begin(), visited.end(), false);
    auto found = search_layer(dist, entries, static_cast<std::size_t>(params_.ef_construction),
                              l, visited);
    const std::size_t cap = l == 0 ? 2 * m : m;
    auto neighbours = select_neighbors(node, found, m);
    links_[node][static_cast<std::size_t>(l)] = neighbours;
    for (auto nb : neighbours) {
      auto &back = links_[nb][static_cast<std::size_t>(l)];
      back.push_back(node);
      if (back.size() > cap) {
        std::vector<Candidate> pool;
        pool.reserve(back.size());
        for (auto x : back)
          pool.push_back({node_distance(nb, x), x});
        back = select_neighbors(nb, std::move(pool), cap);
      }
    }
    entries.clear();
    for (const auto &c : found)
      entries.push_back(c.node);
  }
  if (level > max_level_) {
    max_level_ = level;
    entry_ = node;
  }
}

std::string DissimilarityIndex::least_similar(const Eigen::Ref<const Eigen::RowVectorXd> &query,
                                              const std::unordered_set<std::string> &exclude) const {
  return least_similar(query, exclude, params_.ef_search);
}

std::string DissimilarityIndex::least_similar(const Eigen::Ref<const Eigen::RowVectorXd> &query,
                                              const std::unordered_set<std::string> &exclude,
                                              int ef_search) const {
  if (query.size() != negated_.cols())
    throw InputError("least_similar: query dimension mismatch");
  std::vector<bool> excluded(ids_.size(), false);
  std::size_t n_excluded = 0;
  if (!exclude.empty()) {
    for (std::size_t i = 0; i < ids_.size(); ++i)
      if (exclude.count(ids_[i])) {
        excluded[i] = true;
        ++n_excluded;
      }
  }
  if (n_excluded == ids_.size())
    throw InputError("least_similar: every indexed id is excluded");

  auto dist = [&](std::uint32_t node) { return query_distance(query, node); };
  std::vector<bool> visited(ids_.size(), false);
  std::size_t ef = static_cast<std::size_t>(std::max(ef_search, 1)) + n_excluded;

  auto pick = [&](const std::vector<Candidate> &found) -> const std::string * {
    const Candidate *best = nullptr;
    for (const auto &c : found) {
      if (excluded[c.node])
        continue;
      if (!best || c.dist < best->dist ||
          (c.dist == best->dist && ids_[c.node] < ids_[best->node]))
        best = &c;
    }
    return best ? &ids_[best->node] : nullptr;
  };

  while (true) {
    std::fill(visited.begin(), visited.end(), false);
    std::uint32_t cur = entry_;
    for (int l = max_level_; l > 0; --l) {
      cur = search_layer(dist, {cur}, 1, l, visited).front().node;
      std::fill(visited.begin(), visited.end(), false);
    }
    auto found = search_layer(dist, {cur}, ef, 0, visited);
    if (ef >= ids_.size()) {
      // Degenerate exact mode: score anything the walk could not reach.
      for (std::uint32_t i = 0; i < ids_.size(); ++i)
        if (!visited[i])
          found.push_back({dist(i), i});
    }
    if (const auto *id = pick(found))
      return *id;
    ef = std::min(ids_.size(), ef * 2);
  }
}

} // namespace ipomp
