#pragma once

#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ipomp/baselines.hpp"
#include "ipomp/stage2.hpp"

namespace ipomp {

/// Selection methods understood by the harness. "ipomp" is stage-1
/// selection followed by refinement; every other method runs the same
/// optimization loop without refinement unless told otherwise.
const std::vector<std::string> &known_methods();

struct MethodConfig {
  std::string method = "ipomp";
  RunConfig run;
  ApeConfig ape;
  AnchorConfig anchor;
  std::optional<bool> refine; ///< overrides the per-method default
};

/// Selection through the named method.
EvaluationSet select_with(const std::string &method, const Dataset &dataset,
                          const EmbeddingStore &store, const MethodConfig &cfg,
                          ModelClient *client);

struct MethodRun {
  RunResult result;
  std::optional<double> test_accuracy; ///< best prompt scored on the test split
};

/// Select with `cfg.method`, then optimize. Throws RunFailed on client
/// failure (partial result attached).
MethodRun run_method(const Dataset &train, const std::optional<Dataset> &test,
                     const EmbeddingStore &store, const MethodConfig &cfg, ModelClient &client);

struct MethodSummary {
  std::string method;
  int runs = 0;
  int failed = 0;
  std::vector<double> scores;      ///< headline score per successful run
  std::vector<double> eval_scores; ///< best score on the evaluation set
  double mean_score = 0.0;
  double sd_score = 0.0;           ///< population standard deviation
  double mean_eval_score = 0.0;
  double sd_eval_score = 0.0;
  double mean_wall_s = 0.0;
  double mean_calls = 0.0;
};

struct CompareOptions {
  std::vector<std::string> methods{"random", "ipomp"};
  int seeds = 5;
  std::uint64_t base_seed = 0;
  MethodConfig base;
  /// When set, each run persists its record under <dir>/<method>/seed<k>.
  std::optional<std::filesystem::path> run_dir;
};

using ClientFactory = std::function<std::unique_ptr<ModelClient>()>;

/// Runs every method for seeds base_seed .. base_seed + seeds - 1. The
/// headline score is held-out test accuracy of the best prompt when a test
/// split is given, else the best evaluation-set score.
std::vector<MethodSummary> compare_methods(const Dataset &train, const std::optional<Dataset> &test,
                                           const EmbeddingStore &store, const CompareOptions &opts,
                                           const ClientFactory &make_client);

inline const char *kCompareCsvHeader =
    "method,runs,failed,mean_score,sd_score,mean_eval_score,sd_eval_score,mean_wall_s,mean_calls";

void write_compare_csv(const std::vector<MethodSummary> &rows, const std::filesystem::path &path);
std::string format_compare_table(const std::vector<MethodSummary> &rows);

/// Population mean and standard deviation.
std::pair<double, double> mean_sd(const std::vector<double> &xs);

} // namespace ipomp
