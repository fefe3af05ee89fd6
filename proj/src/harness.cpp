#include "ipomp/harness.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <sstream>

#include "ipomp/error.hpp"
#include "ipomp/hashing.hpp"

namespace ipomp {

using nlohmann::json;

const std::vector<std::string> &known_methods() {
  static const std::vector<std::string> methods = {"ipomp",      "ipomp-stage1", "random",
                                                   "clustering", "boundary",     "anchor-point"};
  return methods;
}

namespace {

EvaluationSet select_by_name(const std::string &method, const Dataset &dataset,
                             const EmbeddingStore &store, const MethodConfig &cfg,
                             ModelClient *client) {
  const auto &s1 = cfg.run.stage1;
  if (method == "ipomp" || method == "ipomp-stage1")
    return select_diverse(dataset, store, s1);
  if (method == "random")
    return select_random(dataset, s1.n, s1.seed);
  if (method == "clustering")
    return select_clustering(dataset, store, s1.n, s1.k, s1.seed);
  if (method == "boundary")
    return select_boundary(dataset, store, s1.n, s1.boundary_budget);
  if (method == "anchor-point") {
    if (!client)
      throw InputError("anchor-point selection needs a model (--simulate or --endpoint)");
    ApeConfig prelim = cfg.ape;
    prelim.seed = mix_seed(cfg.ape.seed, "anchor-prelim");
    ApeOptimizer optimizer(*client, prelim);
    AnchorConfig anchor = cfg.anchor;
    anchor.n = s1.n;
    anchor.k = s1.k;
    anchor.seed = s1.seed;
    anchor.parallelism = cfg.run.parallelism;
    return select_anchor_point(dataset, store, *client, optimizer, anchor);
  }
  throw InputError("unknown selection method \"" + method + "\"");
}

} // namespace

EvaluationSet select_with(const std::string &method, const Dataset &dataset,
                          const EmbeddingStore &store, const MethodConfig &cfg,
                          ModelClient *client) {
  auto set = select_by_name(method, dataset, store, cfg, client);
  set.method = method;
  return set;
}

MethodRun run_method(const Dataset &train, const std::optional<Dataset> &test,
                     const EmbeddingStore &store, const MethodConfig &cfg, ModelClient &client) {
  const auto t0 = std::chrono::steady_clock::now();
  auto initial = select_with(cfg.method, train, store, cfg, &client);
  const double select_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  RunConfig run = cfg.run;
  run.refine = cfg.refine.value_or(cfg.method == "ipomp");
  ApeOptimizer optimizer(client, cfg.ape);
  MethodRun out;
  try {
    out.result = run_optimization(train, store, std::move(initial), run, optimizer, client);
  } catch (RunFailed &e) {
    auto partial = e.partial();
    partial.timing.stage1_s = select_s;
    throw RunFailed(e.what(), std::move(partial));
  }
  out.result.timing.stage1_s = select_s;
  out.result.timing.total_s += select_s;
  if (test && out.result.best) {
    const auto ids = test->ids();
    out.test_accuracy =
        evaluate_prompt(client, out.result.best->text, 0, ids, *test, run.parallelism).accuracy;
  }
  return out;
}

std::pair<double, double> mean_sd(const std::vector<double> &xs) {
  if (xs.empty())
    return {0.0, 0.0};
  const double n = static_cast<double>(xs.size());
  const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : xs)
    ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / n)};
}

std::vector<MethodSummary> compare_methods(const Dataset &train, const std::optional<Dataset> &test,
                                           const EmbeddingStore &store, const CompareOptions &opts,
                                           const ClientFactory &make_client) {
  if (opts.seeds < 1)
    throw InputError("--seeds must be >= 1");
  std::vector<MethodSummary> rows;
  for (const auto &method : opts.methods) {
    MethodSummary row;
    row.method = method;
    std::vector<double> walls, calls;
    for (int s = 0; s < opts.seeds; ++s) {
      const std::uint64_t seed = opts.base_seed + static_cast<std::uint64_t>(s);
      MethodConfig cfg = opts.base;
      cfg.method = method;
      cfg.run.stage1.seed = seed;
      cfg.run.redundancy.seed = mix_seed(seed, "redundancy");
      cfg.run.index.seed = mix_seed(seed, "hnsw");
      cfg.ape.seed = mix_seed(seed, "ape");
      ++row.runs;
      auto client = make_client();
      try {
        auto run = run_method(train, test, store, cfg, *client);
        row.eval_scores.push_back(*run.result.best->score);
        row.scores.push_back(run.test_accuracy.value_or(*run.result.best->score));
        walls.push_back(run.result.timing.total_s);
        calls.push_back(static_cast<double>(run.result.client_stats.calls));
        if (opts.run_dir) {
          const auto dir = *opts.run_dir / method / ("seed" + std::to_string(seed));
          std::filesystem::create_directories(dir);
          std::ofstream(dir / "record.json")
              << run_record_json(run.result, to_json(cfg.run)).dump(2) << '\n';
        }
      } catch (const ClientError &) {
        ++row.failed;
      }
    }
    std::tie(row.mean_score, row.sd_score) = mean_sd(row.scores);
    std::tie(row.mean_eval_score, row.sd_eval_score) = mean_sd(row.eval_scores);
    row.mean_wall_s = mean_sd(walls).first;
    row.mean_calls = mean_sd(calls).first;
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_compare_csv(const std::vector<MethodSummary> &rows, const std::filesystem::path &path) {
  std::ofstream out(path);
  if (!out)
    throw InputError("cannot write " + path.string());
  out << kCompareCsvHeader << '\n';
  out << std::setprecision(6) << std::fixed;
  for (const auto &r : rows) {
    if (r.failed == r.runs) {
      out << r.method << ',' << r.runs << ',' << r.failed << ",failed,failed,failed,failed,failed,failed\n";
      continue;
    }
    out << r.method << ',' << r.runs << ',' << r.failed << ',' << r.mean_score << ','
        << r.sd_score << ',' << r.mean_eval_score << ',' << r.sd_eval_score << ','
        << r.mean_wall_s << ',' << r.mean_calls << '\n';
  }
}

std::string format_compare_table(const std::vector<MethodSummary> &rows) {
  std::ostringstream out;
  out << std::left << std::setw(14) << "method" << std::right << std::setw(6) << "runs"
      << std::setw(8) << "failed" << std::setw(20) << "score (mean±sd)" << std::setw(20)
      << "eval (mean±sd)" << std::setw(10) << "wall s" << std::setw(10) << "calls" << '\n';
  for (const auto &r : rows) {
    out << std::left << std::setw(14) << r.method << std::right << std::setw(6) << r.runs
        << std::setw(8) << r.failed;
    if (r.failed == r.runs) {
      out << std::setw(20) << "failed" << std::setw(20) << "failed" << '\n';
      continue;
    }
    std::ostringstream score, eval;
    score << std::fixed << std::setprecision(4) << r.mean_score << "±" << r.sd_score;
    eval << std::fixed << std::setprecision(4) << r.mean_eval_score << "±" << r.sd_eval_score;
    // "±" is two bytes; pad one extra so columns line up.
    out << std::setw(21) << score.str() << std::setw(21) << eval.str() << std::fixed
        << std::setprecision(3) << std::setw(10) << r.mean_wall_s << std::setprecision(0)
        << std::setw(10) << r.mean_calls << '\n';
  }
  return out.str();
}

} // namespace ipomp
