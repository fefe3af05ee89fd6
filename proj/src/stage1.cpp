#include "ipomp/stage1.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <unordered_set>

#include "ipomp/error.hpp"
#include "ipomp/geometry.hpp"
#include "ipomp/hashing.hpp"

namespace ipomp {

using nlohmann::json;

std::string to_string(Provenance p) {
  switch (p) {
  case Provenance::clustering: return "clustering";
  case Provenance::boundary: return "boundary";
  case Provenance::replacement: return "replacement";
  case Provenance::random: return "random";
  case Provenance::anchor_point: return "anchor_point";
  }
  return "unknown";
}

Provenance provenance_from_string(const std::string &s) {
  for (auto p : {Provenance::clustering, Provenance::boundary, Provenance::replacement,
                 Provenance::random, Provenance::anchor_point})
    if (to_string(p) == s)
      return p;
  throw InputError("unknown provenance \"" + s + "\"");
}

void EvaluationSet::add(const std::string &id, Provenance p) {
  if (!provenance.emplace(id, p).second)
    throw InputError("evaluation set already contains \"" + id + "\"");
  ids.push_back(id);
}

void EvaluationSet::replace(const std::string &out, const std::string &in) {
  auto it = std::find(ids.begin(), ids.end(), out);
  if (it == ids.end())
    throw InputError("evaluation set does not contain \"" + out + "\"");
  if (contains(in))
    throw InputError("evaluation set already contains \"" + in + "\"");
  *it = in;
  provenance.erase(out);
  provenance.emplace(in, Provenance::replacement);
}

void EvaluationSet::validate() const {
  if (ids.empty())
    throw InputError("evaluation set is empty");
  std::unordered_set<std::string> seen;
  for (const auto &id : ids) {
    if (!seen.insert(id).second)
      throw InputError("evaluation set repeats \"" + id + "\"");
    if (!provenance.count(id))
      throw InputError("evaluation set id \"" + id + "\" has no provenance");
  }
  if (provenance.size() != ids.size())
    throw InputError("evaluation set provenance has extra entries");
}

int Stage1Config::clustering_count() const {
  return static_cast<int>(std::lround(alpha * n));
}

void Stage1Config::validate() const {
  if (n < 1)
    throw InputError("N must be positive");
  if (k < 1)
    throw InputError("k must be positive");
  if (!(alpha >= 0.0 && alpha <= 1.0))
    throw InputError("alpha must lie in [0, 1]");
  if (boundary_budget && *boundary_budget < 1)
    throw InputError("boundary budget must be positive");
}

EvaluationSet select_diverse(const Dataset &dataset, const EmbeddingStore &store,
                             const Stage1Config &cfg) {
  cfg.validate();
  if (static_cast<std::size_t>(cfg.n) > dataset.size())
    throw InputError("N = " + std::to_string(cfg.n) + " exceeds the dataset size (" +
                     std::to_string(dataset.size()) + ")");
  store.require_covers(dataset);

  EvaluationSet out;
  const int m_cluster = cfg.clustering_count();
  const int m_boundary = cfg.n - m_cluster;

  Dataset pool = dataset;
  if (m_cluster > 0) {
    const auto clusters = kmeans(store, dataset.ids(), cfg.k, mix_seed(cfg.seed, "kmeans"));
    const auto picked = proportional_sample(clusters, static_cast<std::size_t>(m_cluster),
                                            mix_seed(cfg.seed, "proportional"));
    for (const auto &id : picked)
      out.add(id, Provenance::clustering);
    pool = pool.remove({picked.begin(), picked.end()});
  }

  if (m_boundary > 0) {
    auto pool_ids = pool.ids();
    const std::size_t budget = std::min(cfg.effective_budget(), pool_ids.size());
    auto candidates = boundary_points(store, pool_ids, budget);
    int admitted = 0;
    while (admitted < m_boundary) {
      if (candidates.size() < 2) {
        if (candidates.size() == 1 && m_boundary - admitted == 1 &&
            !out.contains(candidates.front())) {
          out.add(candidates.front(), Provenance::boundary);
          ++admitted;
          break;
        }
        throw InputError("boundary pool exhausted after " + std::to_string(admitted) + " of " +
                         std::to_string(m_boundary) +
                         " boundary samples; use a larger boundary budget");
      }
      const auto [first, second] = furthest_pair(store, candidates);
      for (const auto *id : {&first, &second}) {
        if (admitted == m_boundary)
          break;
        if (!out.contains(*id)) {
          out.add(*id, Provenance::boundary);
          ++admitted;
        }
      }
      std::erase_if(candidates,
                    [&](const std::string &id) { return id == first || id == second; });
    }
  }
  out.method = cfg.alpha >= 1.0 ? "clustering" : cfg.alpha <= 0.0 ? "boundary" : "ipomp";
  return out;
}

json to_json(const EvaluationSet &set) {
  json prov = json::object();
  for (const auto &[id, p] : set.provenance)
    prov[id] = to_string(p);
  return json{{"method", set.method}, {"ids", set.ids}, {"provenance", prov}};
}

EvaluationSet evaluation_set_from_json(const json &j) {
  try {
    EvaluationSet set;
    set.method = j.value("method", std::string("ipomp"));
    const auto &prov = j.at("provenance");
    for (const auto &id : j.at("ids"))
      set.add(id.get<std::string>(), provenance_from_string(prov.at(id.get<std::string>())));
    set.validate();
    return set;
  } catch (const json::exception &e) {
    throw InputError(std::string("malformed evaluation set: ") + e.what());
  }
}

void save_selection(const EvaluationSet &set, const json &config,
                    const std::filesystem::path &path) {
  auto j = to_json(set);
  j["config"] = config;
  std::ofstream out(path);
  if (!out)
    throw InputError("cannot write selection file " + path.string());
  out << j.dump(2) << '\n';
}

EvaluationSet load_selection(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in)
    throw InputError("cannot open selection file " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error &e) {
    throw InputError("malformed selection file " + path.string());
  }
  return evaluation_set_from_json(j);
}

} // namespace ipomp
