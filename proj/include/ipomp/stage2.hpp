#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "ipomp/ann.hpp"
#include "ipomp/optimizer.hpp"
#include "ipomp/perf.hpp"
#include "ipomp/stage1.hpp"
#include "json.hpp"

namespace ipomp {

/// How a redundant sample's substitute is chosen. Only `dissimilar` is the
/// method proper; the others exist for ablation.
enum class ReplacementStrategy { dissimilar, random, similar };

std::string to_string(ReplacementStrategy s);
ReplacementStrategy replacement_strategy_from_string(const std::string &s);

struct IterationRecord {
  int iteration = 0;
  std::vector<PromptCandidate> candidates; ///< scored on the pre-refinement set
  double best_score = 0.0;
  double best_so_far = 0.0;
  std::vector<std::string> redundant;
  std::vector<std::pair<std::string, std::string>> replacements; ///< (out, in)
  double redundancy_pre = 0.0;
  double redundancy_post = 0.0;
  CorrMatrix corr_pre;
  CorrMatrix corr_post;
  std::vector<std::string> warnings;
};

struct RefineState {
  int iteration = 0;
  EvaluationSet current;
  std::vector<PromptCandidate> candidates;
  std::set<std::string> tombstones; ///< replaced ids; never re-admitted
  std::vector<IterationRecord> history;
};

struct RefineConfig {
  RedundancyConfig redundancy;
  ReplacementStrategy strategy = ReplacementStrategy::dissimilar;
};

/// One redundancy-detection and replacement pass over `state.current`.
/// `perf` must cover the current set in order. Appends a history record
/// holding the redundant ids, the (out, in) swaps, the pre-refinement
/// correlation matrix and its redundancy fraction; the post fields are left
/// equal to the pre ones for the caller to fill once the new samples have
/// been scored. Stops replacing (with a warning) if the pool runs dry.
RefineState refine_step(RefineState state, const PerfMatrix &perf,
                        const DissimilarityIndex &index, const EmbeddingStore &store,
                        const RefineConfig &cfg);

struct RunConfig {
  int iterations = 10;
  Stage1Config stage1;
  RedundancyConfig redundancy;
  ReplacementStrategy strategy = ReplacementStrategy::dissimilar;
  HnswParams index;
  int parallelism = 1;
  bool refine = true;

  void validate() const;
};

nlohmann::json to_json(const RunConfig &cfg);

struct RunTiming {
  double stage1_s = 0.0;
  double stage2_s = 0.0; ///< refinement bookkeeping, model calls excluded
  double evaluation_s = 0.0;
  double total_s = 0.0;
};

struct RunResult {
  std::string status = "ok";
  std::string error;
  EvaluationSet initial_set;
  EvaluationSet final_set;
  std::optional<PromptCandidate> best;
  std::vector<IterationRecord> history;
  std::vector<std::string> warnings;
  ClientStats client_stats;
  RunTiming timing;
};

/// Raised when the model client fails mid-run; holds everything recorded so far.
class RunFailed : public ClientError {
public:
  RunFailed(const std::string &what, RunResult partial)
      : ClientError(what), partial_(std::move(partial)) {}
  const RunResult &partial() const { return partial_; }

private:
  RunResult partial_;
};

/// The optimization loop starting from `initial`: per iteration update the
/// prompts, score every candidate on the current set, then (when
/// cfg.refine) replace redundant samples and score the newcomers to get the
/// post-refinement matrix.
RunResult run_optimization(const Dataset &dataset, const EmbeddingStore &store,
                           EvaluationSet initial, const RunConfig &cfg,
                           OptimizerStrategy &optimizer, ModelClient &client);

/// Stage-1 selection followed by run_optimization with refinement.
RunResult run_ipomp(const Dataset &dataset, const EmbeddingStore &store, const RunConfig &cfg,
                    OptimizerStrategy &optimizer, ModelClient &client);

/// Deterministic run record (no wall-clock data).
nlohmann::json run_record_json(const RunResult &result, const nlohmann::json &config);
nlohmann::json corr_to_json(const CorrMatrix &corr);
CorrMatrix corr_from_json(const nlohmann::json &j);

} // namespace ipomp
