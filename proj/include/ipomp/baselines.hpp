#pragma once

#include <cstdint>

#include "ipomp/optimizer.hpp"
#include "ipomp/stage1.hpp"

namespace ipomp {

/// Uniform sample without replacement.
EvaluationSet select_random(const Dataset &dataset, int n, std::uint64_t seed);

/// Proportional cluster sampling for all n ids (stage 1 with alpha = 1).
EvaluationSet select_clustering(const Dataset &dataset, const EmbeddingStore &store, int n, int k,
                                std::uint64_t seed);

/// Furthest-pair boundary selection for all n ids (stage 1 with alpha = 0).
EvaluationSet select_boundary(const Dataset &dataset, const EmbeddingStore &store, int n,
                              std::optional<std::size_t> budget = std::nullopt);

struct AnchorConfig {
  std::size_t prefilter_size = 200;
  std::size_t num_prelim_prompts = 10;
  int n = 20;
  int k = 5; ///< clusters for the stage-1 prefilter
  std::uint64_t seed = 0;
  int parallelism = 1;
};

/// Per-sample gold-label confidence across prompts: the logit when the
/// prediction is the gold label, else 0. Rows follow `ids`.
RowMatrix confidence_matrix(const std::vector<PerfRecord> &records,
                            const std::vector<std::string> &ids, const Dataset &dataset,
                            int num_prompts);

/// Index of the row closest to `centroid` among `rows`, ties by id.
std::size_t medoid(const RowMatrix &points, const std::vector<std::size_t> &rows,
                   const Eigen::RowVectorXd &centroid, const std::vector<std::string> &ids);

/// Anchor-point selection: stage-1 prefilter, preliminary evaluation of
/// every prefiltered sample on the optimizer's first prompts, k-means with
/// k = n over the confidence rows, and one medoid per cluster. Issues
/// exactly prefilter_size x num_prelim_prompts completion calls.
EvaluationSet select_anchor_point(const Dataset &dataset, const EmbeddingStore &store,
                                  ModelClient &client, OptimizerStrategy &optimizer,
                                  const AnchorConfig &cfg);

} // namespace ipomp
