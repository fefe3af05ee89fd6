#include "ipomp/stage2.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <random>
#include <unordered_map>
#include <unordered_set>

#include "ipomp/error.hpp"
#include "ipomp/hashing.hpp"

namespace ipomp {

using nlohmann::json;

std::string to_string(ReplacementStrategy s) {
  switch (s) {
  case ReplacementStrategy::dissimilar: return "dissimilar";
  case ReplacementStrategy::random: return "random";
  case ReplacementStrategy::similar: return "similar";
  }
  return "unknown";
}

ReplacementStrategy replacement_strategy_from_string(const std::string &s) {
  for (auto v : {ReplacementStrategy::dissimilar, ReplacementStrategy::random,
                 ReplacementStrategy::similar})
    if (to_string(v) == s)
      return v;
  throw InputError("unknown replacement strategy \"" + s + "\"");
}

namespace {

std::string choose_replacement(const std::string &out, const DissimilarityIndex &index,
                               const EmbeddingStore &store,
                               const std::unordered_set<std::string> &exclude,
                               const RefineConfig &cfg, int iteration) {
  const auto query = store.row(out);
  switch (cfg.strategy) {
  case ReplacementStrategy::dissimilar:
    return index.least_similar(query, exclude);
  case ReplacementStrategy::random: {
    std::vector<const std::string *> pool;
    for (const auto &id : index.ids())
      if (!exclude.count(id))
        pool.push_back(&id);
    if (pool.empty())
      throw InputError("replacement pool exhausted");
    std::mt19937_64 rng(mix_seed(mix_seed(cfg.redundancy.seed, "random-replace"),
                                 mix_seed(static_cast<std::uint64_t>(iteration), out)));
    std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
    return *pool[pick(rng)];
  }
  case ReplacementStrategy::similar: {
    const std::string *best = nullptr;
    double best_sim = -std::numeric_limits<double>::infinity();
    for (const auto &id : index.ids()) {
      if (exclude.count(id))
        continue;
      const double s = query.dot(store.row(id));
      if (s > best_sim || (s == best_sim && id < *best)) {
        best_sim = s;
        best = &id;
      }
    }
    if (!best)
      throw InputError("replacement pool exhausted");
    return *best;
  }
  }
  throw InputError("unknown replacement strategy");
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

} // namespace

RefineState refine_step(RefineState state, const PerfMatrix &perf,
                        const DissimilarityIndex &index, const EmbeddingStore &store,
                        const RefineConfig &cfg) {
  cfg.redundancy.validate();
  if (perf.ids != state.current.ids)
    throw InputError("refine_step: performance matrix does not cover the current set");

  IterationRecord rec;
  rec.iteration = state.iteration;
  rec.corr_pre = pairwise_correlation(perf);
  rec.redundancy_pre = redundancy_fraction(rec.corr_pre, cfg.redundancy.ct);

  auto clusters = redundancy_clusters(rec.corr_pre, cfg.redundancy.ct);
  RedundancyConfig draw = cfg.redundancy;
  draw.seed = mix_seed(cfg.redundancy.seed, static_cast<std::uint64_t>(state.iteration));
  const auto redundant = sample_redundant(clusters, draw);
  rec.redundant.assign(redundant.begin(), redundant.end());

  std::unordered_set<std::string> exclude(state.current.ids.begin(), state.current.ids.end());
  exclude.insert(state.tombstones.begin(), state.tombstones.end());
  for (const auto &out : rec.redundant) {
    std::string in;
    try {
      in = choose_replacement(out, index, store, exclude, cfg, state.iteration);
    } catch (const InputError &) {
      rec.warnings.push_back("training pool exhausted; stopped replacing at iteration " +
                             std::to_string(state.iteration));
      break;
    }
    state.current.replace(out, in);
    state.tombstones.insert(out);
    exclude.insert(in);
    rec.replacements.emplace_back(out, in);
  }

  rec.corr_post = rec.corr_pre;
  rec.redundancy_post = rec.redundancy_pre;
  state.history.push_back(std::move(rec));
  return state;
}

void RunConfig::validate() const {
  if (iterations < 1)
    throw InputError("iterations must be >= 1");
  stage1.validate();
  redundancy.validate();
  if (parallelism < 1)
    throw InputError("parallelism must be >= 1");
}

json to_json(const RunConfig &cfg) {
  json budget = cfg.stage1.boundary_budget ? json(*cfg.stage1.boundary_budget) : json(nullptr);
  return json{{"iterations", cfg.iterations},
              {"n", cfg.stage1.n},
              {"k", cfg.stage1.k},
              {"alpha", cfg.stage1.alpha},
              {"boundary_budget", budget},
              {"seed", cfg.stage1.seed},
              {"ct", cfg.redundancy.ct},
              {"beta", cfg.redundancy.beta},
              {"strategy", to_string(cfg.strategy)},
              {"refine", cfg.refine},
              {"hnsw",
               {{"m_links", cfg.index.m_links},
                {"ef_construction", cfg.index.ef_construction},
                {"ef_search", cfg.index.ef_search}}}};
}

RunResult run_optimization(const Dataset &dataset, const EmbeddingStore &store,
                           EvaluationSet initial, const RunConfig &cfg,
                           OptimizerStrategy &optimizer, ModelClient &client) {
  using clock = std::chrono::steady_clock;
  const auto t_start = clock::now();
  cfg.validate();
  initial.validate();
  for (const auto &id : initial.ids)
    if (!dataset.contains(id))
      throw InputError("evaluation id \"" + id + "\" is not in the training set");
  store.require_covers(dataset);

  RunResult result;
  result.initial_set = initial;

  std::optional<DissimilarityIndex> index;
  if (cfg.refine) {
    const auto t0 = clock::now();
    index.emplace(store, dataset.ids(), cfg.index);
    result.timing.stage2_s += seconds_since(t0);
  }

  RefineState state;
  state.current = std::move(initial);
  double best_so_far = -std::numeric_limits<double>::infinity();
  std::size_t warnings_seen = 0;
  const auto &labels = dataset.label_space();

  auto finish = [&] {
    result.final_set = state.current;
    result.history = state.history;
    result.client_stats = client.stats();
    result.timing.total_s = seconds_since(t_start);
  };

  try {
    for (int i = 0; i < cfg.iterations; ++i) {
      state.iteration = i;
      auto t0 = clock::now();
      auto candidates = optimizer.update_prompts(i, state.candidates);
      const int n_prompts = static_cast<int>(candidates.size());

      std::vector<PerfRecord> records;
      for (int p = 0; p < n_prompts; ++p) {
        auto ev = evaluate_prompt(client, candidates[static_cast<std::size_t>(p)].text, p,
                                  state.current.ids, dataset, cfg.parallelism);
        candidates[static_cast<std::size_t>(p)].score = ev.accuracy;
        records.insert(records.end(), ev.records.begin(), ev.records.end());
      }
      result.timing.evaluation_s += seconds_since(t0);
      const auto perf = build_matrix(records, state.current.ids, labels, n_prompts);

      if (cfg.refine) {
        t0 = clock::now();
        state = refine_step(std::move(state), perf, *index, store,
                            RefineConfig{cfg.redundancy, cfg.strategy});
        result.timing.stage2_s += seconds_since(t0);
      } else {
        IterationRecord rec;
        rec.iteration = i;
        rec.corr_pre = pairwise_correlation(perf);
        rec.redundancy_pre = redundancy_fraction(rec.corr_pre, cfg.redundancy.ct);
        rec.corr_post = rec.corr_pre;
        rec.redundancy_post = rec.redundancy_pre;
        state.history.push_back(std::move(rec));
      }

      auto &rec = state.history.back();
      if (!rec.replacements.empty()) {
        t0 = clock::now();
        std::unordered_set<std::string> incoming;
        for (const auto &[out, in] : rec.replacements)
          incoming.insert(in);
        std::vector<std::string> fresh;
        for (const auto &id : state.current.ids)
          if (incoming.count(id))
            fresh.push_back(id);
        std::vector<PerfRecord> post;
        for (const auto &r : records)
          if (state.current.contains(r.sample_id))
            post.push_back(r);
        for (int p = 0; p < n_prompts; ++p) {
          auto ev = evaluate_prompt(client, candidates[static_cast<std::size_t>(p)].text, p,
                                    fresh, dataset, cfg.parallelism);
          post.insert(post.end(), ev.records.begin(), ev.records.end());
        }
        result.timing.evaluation_s += seconds_since(t0);
        const auto perf_post = build_matrix(post, state.current.ids, labels, n_prompts);
        rec.corr_post = pairwise_correlation(perf_post);
        rec.redundancy_post = redundancy_fraction(rec.corr_post, cfg.redundancy.ct);
      }

      const auto best = identify_best(candidates);
      best_so_far = std::max(best_so_far, *best.score);
      rec.candidates = candidates;
      rec.best_score = *best.score;
      rec.best_so_far = best_so_far;
      const auto &ow = optimizer.warnings();
      for (; warnings_seen < ow.size(); ++warnings_seen)
        rec.warnings.push_back(ow[warnings_seen]);
      result.warnings.insert(result.warnings.end(), rec.warnings.begin(), rec.warnings.end());
      state.candidates = std::move(candidates);
    }
  } catch (const ClientError &e) {
    finish();
    result.status = "failed";
    result.error = e.what();
    throw RunFailed(e.what(), std::move(result));
  }

  finish();
  result.best = identify_best(state.candidates);
  return result;
}

RunResult run_ipomp(const Dataset &dataset, const EmbeddingStore &store, const RunConfig &cfg,
                    OptimizerStrategy &optimizer, ModelClient &client) {
  const auto t0 = std::chrono::steady_clock::now();
  auto initial = select_diverse(dataset, store, cfg.stage1);
  const double stage1_s = seconds_since(t0);
  RunConfig run_cfg = cfg;
  run_cfg.refine = true;
  try {
    auto result = run_optimization(dataset, store, std::move(initial), run_cfg, optimizer, client);
    result.timing.stage1_s = stage1_s;
    result.timing.total_s += stage1_s;
    return result;
  } catch (RunFailed &e) {
    auto partial = e.partial();
    partial.timing.stage1_s = stage1_s;
    throw RunFailed(e.what(), std::move(partial));
  }
}

json corr_to_json(const CorrMatrix &corr) {
  json values = json::array();
  for (Eigen::Index i = 0; i < corr.values.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < corr.values.cols(); ++j)
      row.push_back(corr.values(i, j));
    values.push_back(std::move(row));
  }
  return json{{"ids", corr.ids}, {"values", std::move(values)}};
}

CorrMatrix corr_from_json(const json &j) {
  CorrMatrix c;
  c.ids = j.at("ids").get<std::vector<std::string>>();
  const auto n = static_cast<Eigen::Index>(c.ids.size());
  const auto &values = j.at("values");
  if (static_cast<Eigen::Index>(values.size()) != n)
    throw InputError("correlation matrix has the wrong number of rows");
  c.values.resize(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const auto &row = values.at(static_cast<std::size_t>(r));
    if (static_cast<Eigen::Index>(row.size()) != n)
      throw InputError("correlation matrix row has the wrong length");
    for (Eigen::Index col = 0; col < n; ++col)
      c.values(r, col) = row.at(static_cast<std::size_t>(col)).get<double>();
  }
  return c;
}

json run_record_json(const RunResult &result, const json &config) {
  json iterations = json::array();
  std::size_t replaced = 0;
  for (const auto &rec : result.history) {
    json cands = json::array();
    for (const auto &c : rec.candidates)
      cands.push_back(json{{"text", c.text}, {"score", c.score ? json(*c.score) : json(nullptr)}});
    json swaps = json::array();
    for (const auto &[out, in] : rec.replacements)
      swaps.push_back(json::array({out, in}));
    replaced += rec.replacements.size();
    iterations.push_back(json{{"iteration", rec.iteration},
                              {"candidates", std::move(cands)},
                              {"best_score", rec.best_score},
                              {"best_so_far", rec.best_so_far},
                              {"redundant", rec.redundant},
                              {"replacements", std::move(swaps)},
                              {"redundancy_pre", rec.redundancy_pre},
                              {"redundancy_post", rec.redundancy_post},
                              {"corr_pre", corr_to_json(rec.corr_pre)},
                              {"corr_post", corr_to_json(rec.corr_post)},
                              {"warnings", rec.warnings}});
  }
  const auto &s = result.client_stats;
  json metrics{{"best_score", result.best ? json(*result.best->score) : json(nullptr)},
               {"best_so_far", result.history.empty() ? json(nullptr)
                                                      : json(result.history.back().best_so_far)},
               {"redundancy_pre_first",
                result.history.empty() ? json(nullptr) : json(result.history.front().redundancy_pre)},
               {"redundancy_post_first",
                result.history.empty() ? json(nullptr) : json(result.history.front().redundancy_post)},
               {"replacements_total", replaced},
               {"client_calls", s.calls},
               {"rewrite_calls", s.rewrite_calls},
               {"retries", s.retries},
               {"prompt_tokens", s.prompt_tokens},
               {"completion_tokens", s.completion_tokens},
               {"logprob_fallbacks", s.logprob_fallbacks}};
  json out{{"status", result.status},
           {"method", result.initial_set.method},
           {"config", config},
           {"initial_set", to_json(result.initial_set)},
           {"final_set", to_json(result.final_set)},
           {"best_prompt", result.best ? json{{"text", result.best->text},
                                              {"score", *result.best->score}}
                                       : json(nullptr)},
           {"iterations", std::move(iterations)},
           {"metrics", std::move(metrics)},
           {"warnings", result.warnings}};
  if (!result.error.empty())
    out["error"] = result.error;
  return out;
}

} // namespace ipomp
