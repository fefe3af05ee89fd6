#include "ipomp/baselines.hpp"

#include <algorithm>
#include <random>
#include <unordered_map>

#include "ipomp/error.hpp"
#include "ipomp/geometry.hpp"
#include "ipomp/hashing.hpp"

namespace ipomp {

EvaluationSet select_random(const Dataset &dataset, int n, std::uint64_t seed) {
  if (n < 1)
    throw InputError("N must be positive");
  if (static_cast<std::size_t>(n) > dataset.size())
    throw InputError("N = " + std::to_string(n) + " exceeds the dataset size (" +
                     std::to_string(dataset.size()) + ")");
  auto ids = dataset.ids();
  std::mt19937_64 rng(mix_seed(seed, "random"));
  std::shuffle(ids.begin(), ids.end(), rng);
  EvaluationSet out;
  out.method = "random";
  for (int i = 0; i < n; ++i)
    out.add(ids[static_cast<std::size_t>(i)], Provenance::random);
  return out;
}

EvaluationSet select_clustering(const Dataset &dataset, const EmbeddingStore &store, int n, int k,
                                std::uint64_t seed) {
  Stage1Config cfg;
  cfg.n = n;
  cfg.k = k;
  cfg.alpha = 1.0;
  cfg.seed = seed;
  auto out = select_diverse(dataset, store, cfg);
  out.method = "clustering";
  return out;
}

EvaluationSet select_boundary(const Dataset &dataset, const EmbeddingStore &store, int n,
                              std::optional<std::size_t> budget) {
  Stage1Config cfg;
  cfg.n = n;
  cfg.alpha = 0.0;
  cfg.boundary_budget = budget;
  auto out = select_diverse(dataset, store, cfg);
  out.method = "boundary";
  return out;
}

RowMatrix confidence_matrix(const std::vector<PerfRecord> &records,
                            const std::vector<std::string> &ids, const Dataset &dataset,
                            int num_prompts) {
  std::unordered_map<std::string, Eigen::Index> row_of;
  for (std::size_t i = 0; i < ids.size(); ++i)
    row_of.emplace(ids[i], static_cast<Eigen::Index>(i));
  RowMatrix conf = RowMatrix::Zero(static_cast<Eigen::Index>(ids.size()), num_prompts);
  for (const auto &r : records) {
    auto it = row_of.find(r.sample_id);
    if (it == row_of.end() || r.prompt_index < 0 || r.prompt_index >= num_prompts)
      throw InputError("confidence_matrix: record outside the prefiltered set");
    if (r.predicted_label && *r.predicted_label == dataset.at(r.sample_id).label)
      conf(it->second, r.prompt_index) = r.logit;
  }
  return conf;
}

std::size_t medoid(const RowMatrix &points, const std::vector<std::size_t> &rows,
                   const Eigen::RowVectorXd &centroid, const std::vector<std::string> &ids) {
  if (rows.empty())
    throw InputError("medoid of an empty cluster");
  std::size_t best = rows.front();
  double best_d = (points.row(static_cast<Eigen::Index>(best)) - centroid).squaredNorm();
  for (auto r : rows) {
    const double d = (points.row(static_cast<Eigen::Index>(r)) - centroid).squaredNorm();
    if (d < best_d || (d == best_d && ids[r] < ids[best])) {
      best = r;
      best_d = d;
    }
  }
  return best;
}

EvaluationSet select_anchor_point(const Dataset &dataset, const EmbeddingStore &store,
                                  ModelClient &client, OptimizerStrategy &optimizer,
                                  const AnchorConfig &cfg) {
  if (cfg.n < 1)
    throw InputError("N must be positive");
  if (cfg.num_prelim_prompts < 1)
    throw InputError("anchor point needs at least one preliminary prompt");
  const std::size_t prefilter = std::min(cfg.prefilter_size, dataset.size());
  if (prefilter < static_cast<std::size_t>(cfg.n))
    throw InputError("anchor-point prefilter (" + std::to_string(prefilter) +
                     ") is smaller than N = " + std::to_string(cfg.n));

  Stage1Config pre;
  pre.n = static_cast<int>(prefilter);
  pre.k = std::min<int>(cfg.k, pre.n);
  pre.seed = mix_seed(cfg.seed, "anchor-prefilter");
  const auto pool = select_diverse(dataset, store, pre);

  auto prompts = optimizer.generate(cfg.num_prelim_prompts);
  prompts.resize(std::min(prompts.size(), cfg.num_prelim_prompts));
  const int n_prompts = static_cast<int>(prompts.size());

  std::vector<PerfRecord> records;
  for (int p = 0; p < n_prompts; ++p) {
    auto ev = evaluate_prompt(client, prompts[static_cast<std::size_t>(p)].text, p, pool.ids,
                              dataset, cfg.parallelism);
    records.insert(records.end(), ev.records.begin(), ev.records.end());
  }
  const auto conf = confidence_matrix(records, pool.ids, dataset, n_prompts);
  const auto clusters = kmeans_rows(conf, pool.ids, cfg.n, mix_seed(cfg.seed, "anchor-kmeans"));

  std::vector<std::vector<std::size_t>> rows(static_cast<std::size_t>(cfg.n));
  for (std::size_t i = 0; i < clusters.assignment.size(); ++i)
    rows[static_cast<std::size_t>(clusters.assignment[i])].push_back(i);

  EvaluationSet out;
  out.method = "anchor-point";
  for (int c = 0; c < cfg.n; ++c) {
    const auto m = medoid(conf, rows[static_cast<std::size_t>(c)], clusters.centroids.row(c),
                          pool.ids);
    out.add(pool.ids[m], Provenance::anchor_point);
  }
  return out;
}

} // namespace ipomp
