#include "ipomp/cli.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <memory>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "ipomp/error.hpp"
#include "ipomp/harness.hpp"
#include "ipomp/hashing.hpp"
#include "ipomp/http_client.hpp"
#include "ipomp/simulator.hpp"

namespace ipomp {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct DataOptions {
  std::string dataset;
  std::string test;
  std::string embeddings;
  bool hash = false;
  int hash_dim = 256;
  std::uint64_t embed_seed = 0;
};

struct ModelOptions {
  bool simulate = false;
  std::string endpoint;
  std::string model = "gpt-3.5-turbo";
  std::string api_key_env = "OPENAI_API_KEY";
  int max_attempts = 3;
  bool verbose = false;
  SimConfig sim;
};

struct SelectionOptions {
  std::string method;
  int n = 20;
  int k = 5;
  double alpha = 0.5;
  int budget = 0; // 0: default 4N
  std::uint64_t seed = 0;
  int prefilter = 200;
  int prelim = 10;
  int population = 8;
  std::string initial_prompt = "answer the question";
  int parallelism = 1;
};

struct LoopOptions {
  int iterations = 10;
  double beta = 0.5;
  double ct = 0.9;
  bool no_refine = false;
  std::string strategy = "dissimilar";
  int m_links = 16;
  int ef_construction = 200;
  int ef_search = 64;
};

void add_data_options(CLI::App *cmd, DataOptions &o) {
  cmd->add_option("--dataset", o.dataset, "training set (JSONL)")->required();
  cmd->add_option("--test", o.test, "held-out test set (JSONL)");
  auto *emb = cmd->add_option("--embeddings", o.embeddings, "embedding file (JSONL id/vector)");
  auto *hash = cmd->add_flag("--hash-embed", o.hash, "use the built-in hashing embedder");
  emb->excludes(hash);
  cmd->add_option("--hash-dim", o.hash_dim, "hashing embedder dimension")->capture_default_str();
  cmd->add_option("--embed-seed", o.embed_seed, "hashing embedder seed")->capture_default_str();
}

void add_model_options(CLI::App *cmd, ModelOptions &o) {
  auto *sim = cmd->add_flag("--simulate", o.simulate, "use the deterministic simulated model");
  auto *ep = cmd->add_option("--endpoint", o.endpoint, "chat-completions base URL");
  sim->excludes(ep);
  cmd->add_option("--model", o.model, "model name sent to the endpoint")->capture_default_str();
  cmd->add_option("--api-key-env", o.api_key_env, "environment variable holding the API token")
      ->capture_default_str();
  cmd->add_option("--max-attempts", o.max_attempts, "attempts per request")->capture_default_str();
  cmd->add_flag("--verbose", o.verbose, "log request and response bodies");
  cmd->add_option("--sim-seed", o.sim.seed, "simulator seed")->capture_default_str();
  cmd->add_option("--sim-sigma", o.sim.sigma, "simulator noise scale")->capture_default_str();
  cmd->add_option("--sim-groups", o.sim.latent_groups, "simulator trait dimension")
      ->capture_default_str();
  cmd->add_option("--sim-trait-scale", o.sim.trait_scale, "simulator trait scale")
      ->capture_default_str();
  cmd->add_option("--sim-weight-scale", o.sim.weight_scale, "simulator prompt weight scale")
      ->capture_default_str();
  cmd->add_option("--sim-quality-bias", o.sim.quality_bias, "simulator quality offset")
      ->capture_default_str();
}

void add_selection_options(CLI::App *cmd, SelectionOptions &o, bool with_seed_and_method) {
  if (with_seed_and_method) {
    cmd->add_option("--method", o.method, "selection method")
        ->check(CLI::IsMember(known_methods()))
        ->capture_default_str();
    cmd->add_option("--seed", o.seed, "run seed")->capture_default_str();
  }
  cmd->add_option("--n", o.n, "evaluation-set size")->capture_default_str();
  cmd->add_option("--k", o.k, "semantic clusters")->capture_default_str();
  cmd->add_option("--alpha", o.alpha, "share picked by clustering")->capture_default_str();
  cmd->add_option("--budget", o.budget, "boundary candidate budget (0: 4N)")->capture_default_str();
  cmd->add_option("--prefilter", o.prefilter, "anchor-point prefilter size")->capture_default_str();
  cmd->add_option("--prelim-prompts", o.prelim, "anchor-point preliminary prompts")
      ->capture_default_str();
  cmd->add_option("--population", o.population, "prompt population")->capture_default_str();
  cmd->add_option("--initial-prompt", o.initial_prompt, "seed prompt")->capture_default_str();
  cmd->add_option("--parallelism", o.parallelism, "concurrent model calls")->capture_default_str();
}

void add_loop_options(CLI::App *cmd, LoopOptions &o) {
  cmd->add_option("--iterations", o.iterations, "optimization iterations")->capture_default_str();
  cmd->add_option("--beta", o.beta, "share of each redundant cluster replaced")
      ->capture_default_str();
  cmd->add_option("--ct", o.ct, "correlation threshold")->capture_default_str();
  cmd->add_flag("--no-refine", o.no_refine, "skip real-time refinement");
  cmd->add_option("--strategy", o.strategy, "replacement strategy")
      ->check(CLI::IsMember({"dissimilar", "random", "similar"}))
      ->capture_default_str();
  cmd->add_option("--hnsw-m", o.m_links, "HNSW links per node")->capture_default_str();
  cmd->add_option("--hnsw-ef-construction", o.ef_construction, "HNSW build beam")
      ->capture_default_str();
  cmd->add_option("--hnsw-ef-search", o.ef_search, "HNSW query beam")->capture_default_str();
}

struct LoadedData {
  Dataset train;
  std::optional<Dataset> test;
  EmbeddingStore store;
};

LoadedData load_data(const DataOptions &o) {
  LoadedData d;
  d.train = load_dataset(o.dataset);
  if (!o.test.empty())
    d.test = load_dataset(o.test);
  if (!o.embeddings.empty()) {
    d.store = load_embeddings(o.embeddings, d.train);
  } else if (o.hash) {
    if (o.hash_dim < 1)
      throw InputError("--hash-dim must be positive");
    std::vector<const Dataset *> parts{&d.train};
    if (d.test)
      parts.push_back(&*d.test);
    std::vector<std::string> ids;
    std::vector<Eigen::VectorXd> rows;
    for (const auto *part : parts)
      for (const auto &s : *part) {
        ids.push_back(s.id);
        rows.push_back(hash_embed_text(s.input, o.hash_dim, o.embed_seed));
      }
    RowMatrix m(static_cast<Eigen::Index>(rows.size()), o.hash_dim);
    for (std::size_t i = 0; i < rows.size(); ++i)
      m.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();
    d.store = EmbeddingStore(std::move(ids), std::move(m));
  } else {
    throw InputError("one of --embeddings or --hash-embed is required");
  }
  return d;
}

ClientFactory client_factory(const ModelOptions &o, const EmbeddingStore &store) {
  if (o.simulate)
    return [&o, &store] { return std::make_unique<SimulatedModel>(store, o.sim); };
  if (!o.endpoint.empty()) {
    HttpClientConfig cfg;
    cfg.base_url = o.endpoint;
    cfg.model = o.model;
    cfg.api_key_env = o.api_key_env;
    cfg.max_attempts = o.max_attempts;
    cfg.verbose = o.verbose;
    return [cfg] { return std::make_unique<HttpChatClient>(cfg); };
  }
  return {};
}

MethodConfig method_config(const SelectionOptions &s, const LoopOptions *loop) {
  MethodConfig cfg;
  cfg.method = s.method;
  cfg.run.stage1.n = s.n;
  cfg.run.stage1.k = s.k;
  cfg.run.stage1.alpha = s.alpha;
  if (s.budget != 0)
    cfg.run.stage1.boundary_budget = s.budget;
  cfg.run.parallelism = s.parallelism;
  cfg.ape.population = s.population;
  cfg.ape.initial_prompt = s.initial_prompt;
  cfg.anchor.prefilter_size = s.prefilter;
  cfg.anchor.num_prelim_prompts = s.prelim;
  if (loop) {
    cfg.run.iterations = loop->iterations;
    cfg.run.redundancy.beta = loop->beta;
    cfg.run.redundancy.ct = loop->ct;
    cfg.run.strategy = replacement_strategy_from_string(loop->strategy);
    cfg.run.index.m_links = loop->m_links;
    cfg.run.index.ef_construction = loop->ef_construction;
    cfg.run.index.ef_search = loop->ef_search;
  }
  return cfg;
}

void apply_seed(MethodConfig &cfg, std::uint64_t seed) {
  cfg.run.stage1.seed = seed;
  cfg.run.redundancy.seed = mix_seed(seed, "redundancy");
  cfg.run.index.seed = mix_seed(seed, "hnsw");
  cfg.ape.seed = mix_seed(seed, "ape");
}

void check_size(const MethodConfig &cfg, const Dataset &train) {
  if (cfg.run.stage1.n < 1)
    throw InputError("--n must be positive");
  if (static_cast<std::size_t>(cfg.run.stage1.n) > train.size())
    throw InputError("--n " + std::to_string(cfg.run.stage1.n) + " exceeds the dataset size (" +
                     std::to_string(train.size()) + " samples)");
}

json config_json(const MethodConfig &cfg, const ModelOptions &model) {
  json j = to_json(cfg.run);
  j["method"] = cfg.method;
  j["population"] = cfg.ape.population;
  j["initial_prompt"] = cfg.ape.initial_prompt;
  if (cfg.method == "anchor-point") {
    j["prefilter"] = cfg.anchor.prefilter_size;
    j["prelim_prompts"] = cfg.anchor.num_prelim_prompts;
  }
  if (model.simulate)
    j["simulator"] = {{"seed", model.sim.seed},
                      {"sigma", model.sim.sigma},
                      {"groups", model.sim.latent_groups},
                      {"trait_scale", model.sim.trait_scale},
                      {"weight_scale", model.sim.weight_scale},
                      {"quality_bias", model.sim.quality_bias}};
  else if (!model.endpoint.empty())
    j["endpoint"] = {{"url", model.endpoint}, {"model", model.model}};
  return j;
}

std::string timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream s;
  s << std::put_time(&tm, "%Y%m%dT%H%M%SZ");
  return s.str();
}

fs::path fresh_run_dir(const fs::path &root, const std::string &stem) {
  fs::path dir = root / stem;
  for (int i = 2; fs::exists(dir); ++i)
    dir = root / (stem + "-" + std::to_string(i));
  fs::create_directories(dir);
  return dir;
}

void write_text(const fs::path &path, const std::string &text) {
  // Write-then-rename so a record is never observed half written.
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out)
      throw InputError("cannot write " + path.string());
    out << text;
  }
  fs::rename(tmp, path);
}

json timing_json(const RunTiming &t) {
  return json{{"stage1_s", t.stage1_s},
              {"stage2_s", t.stage2_s},
              {"evaluation_s", t.evaluation_s},
              {"total_s", t.total_s}};
}

void persist_run(const fs::path &dir, const std::string &run_id, const RunResult &result,
                 const json &config) {
  for (const auto &rec : result.history) {
    const std::string stem = "corr_iter_" + std::to_string(rec.iteration);
    write_corr_csv(rec.corr_pre, dir / (stem + "_pre.csv"));
    write_corr_csv(rec.corr_post, dir / (stem + "_post.csv"));
  }
  if (result.initial_set.size() > 0)
    save_selection(result.initial_set, config, dir / "selection.json");
  json meta{{"run_id", run_id}, {"status", result.status}, {"timing", timing_json(result.timing)}};
  write_text(dir / "run_meta.json", meta.dump(2) + "\n");
  write_text(dir / "record.json", run_record_json(result, config).dump(2) + "\n");
}

std::string fmt(double v, int digits = 4) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << v;
  return s.str();
}

int cmd_select(const DataOptions &data, const ModelOptions &model, const SelectionOptions &sel,
               const std::string &out_path, std::ostream &out) {
  auto d = load_data(data);
  MethodConfig cfg = method_config(sel, nullptr);
  apply_seed(cfg, sel.seed);
  check_size(cfg, d.train);
  cfg.run.stage1.validate();
  std::unique_ptr<ModelClient> client;
  if (auto make = client_factory(model, d.store))
    client = make();
  const auto set = select_with(sel.method, d.train, d.store, cfg, client.get());
  json config = config_json(cfg, model);
  config.erase("iterations");
  save_selection(set, config, out_path);
  out << "selected " << set.size() << " samples (" << sel.method << ") -> " << out_path << '\n';
  if (client && sel.method == "anchor-point")
    out << "preliminary model calls: " << client->stats().calls << '\n';
  return kExitOk;
}

int cmd_optimize(const DataOptions &data, const ModelOptions &model, const SelectionOptions &sel,
                 const LoopOptions &loop, const std::string &run_root, const CLI::App &cmd,
                 std::ostream &out, std::ostream &err) {
  auto d = load_data(data);
  MethodConfig cfg = method_config(sel, &loop);
  apply_seed(cfg, sel.seed);
  cfg.refine = !loop.no_refine;
  check_size(cfg, d.train);
  cfg.run.stage1.validate();
  cfg.run.validate();
  auto make = client_factory(model, d.store);
  if (!make)
    throw InputError("optimize needs a model: pass --simulate or --endpoint");
  auto client = make();

  const std::string run_id = timestamp() + "-seed" + std::to_string(sel.seed);
  const fs::path dir = fresh_run_dir(run_root, run_id);
  write_text(dir / "config.ini", cmd.config_to_str(true, false));
  json config = config_json(cfg, model);
  config["refine"] = *cfg.refine;

  try {
    auto run = run_method(d.train, d.test, d.store, cfg, *client);
    persist_run(dir, dir.filename().string(), run.result, config);
    const auto &best = *run.result.best;
    out << "best prompt: " << best.text << '\n';
    out << "eval score: " << fmt(*best.score) << '\n';
    if (run.test_accuracy)
      out << "test accuracy: " << fmt(*run.test_accuracy) << '\n';
    out << "model calls: " << run.result.client_stats.calls << '\n';
    out << "run dir: " << dir.string() << '\n';
    for (const auto &w : run.result.warnings)
      err << "warning: " << w << '\n';
    return kExitOk;
  } catch (const RunFailed &e) {
    persist_run(dir, dir.filename().string(), e.partial(), config);
    err << "error: " << e.what() << "\npartial record: " << (dir / "record.json").string() << '\n';
    return kExitClient;
  }
}

int cmd_compare(const DataOptions &data, const ModelOptions &model, const SelectionOptions &sel,
                const LoopOptions &loop, const std::vector<std::string> &methods, int seeds,
                const std::string &csv_path, const std::string &run_root, std::ostream &out) {
  auto d = load_data(data);
  CompareOptions opts;
  opts.methods = methods;
  opts.seeds = seeds;
  opts.base_seed = sel.seed;
  opts.base = method_config(sel, &loop);
  if (loop.no_refine)
    opts.base.refine = false;
  if (!run_root.empty())
    opts.run_dir = run_root;
  check_size(opts.base, d.train);
  opts.base.run.stage1.validate();
  opts.base.run.validate();
  auto make = client_factory(model, d.store);
  if (!make)
    throw InputError("compare needs a model: pass --simulate or --endpoint");
  const auto rows = compare_methods(d.train, d.test, d.store, opts, make);
  out << format_compare_table(rows);
  if (!csv_path.empty())
    write_compare_csv(rows, csv_path);
  for (const auto &r : rows)
    if (r.failed == r.runs)
      return kExitAllFailed;
  return kExitOk;
}

int cmd_report(const std::string &run_dir, const std::string &out_dir, std::ostream &out) {
  const fs::path dir(run_dir);
  std::ifstream in(dir / "record.json");
  if (!in)
    throw InputError("no record.json in " + dir.string());
  json record;
  try {
    record = json::parse(in);
  } catch (const json::exception &e) {
    throw InputError("corrupt record.json: " + std::string(e.what()));
  }
  const fs::path dest = out_dir.empty() ? dir / "report" : fs::path(out_dir);
  fs::create_directories(dest);
  json trajectory = json::array();
  try {
    for (const auto &it : record.at("iterations")) {
      const int i = it.at("iteration").get<int>();
      const std::string stem = "corr_iter_" + std::to_string(i);
      write_corr_csv(corr_from_json(it.at("corr_pre")), dest / (stem + "_pre.csv"));
      write_corr_csv(corr_from_json(it.at("corr_post")), dest / (stem + "_post.csv"));
      trajectory.push_back(json{{"iteration", i},
                                {"redundancy_pre", it.at("redundancy_pre")},
                                {"redundancy_post", it.at("redundancy_post")},
                                {"replacements", it.at("replacements").size()},
                                {"best_score", it.at("best_score")}});
    }
  } catch (const json::exception &e) {
    throw InputError("corrupt record.json: " + std::string(e.what()));
  }
  json summary{{"status", record.value("status", "unknown")},
               {"method", record.value("method", "")},
               {"iterations", trajectory.size()},
               {"redundancy", trajectory}};
  if (record.contains("error") && !record["error"].is_null())
    summary["error"] = record["error"];
  write_text(dest / "summary.json", summary.dump(2) + "\n");
  out << "status " << summary["status"].get<std::string>() << ", " << trajectory.size()
      << " iteration(s) -> " << dest.string() << '\n';
  return kExitOk;
}

int cmd_synth(const SyntheticConfig &cfg, const std::string &out_dir, std::ostream &out) {
  const auto task = make_synthetic_task(cfg);
  const fs::path dir(out_dir);
  fs::create_directories(dir);
  save_dataset(task.train, dir / "train.jsonl");
  if (cfg.test_size > 0)
    save_dataset(task.test, dir / "test.jsonl");
  save_embeddings(task.store, dir / "embeddings.jsonl");
  out << "wrote " << task.train.size() << " train / " << task.test.size() << " test samples to "
      << dir.string() << '\n';
  return kExitOk;
}

bool has_flag(const std::vector<std::string> &args, const std::string &name) {
  const std::string bare = "--" + name, eq = bare + "=";
  for (const auto &a : args)
    if (a == bare || a.rfind(eq, 0) == 0)
      return true;
  return false;
}

/// Rewrites `<sub> ... --config FILE ...` into explicit `--key=value`
/// arguments placed before the command-line ones. Keys already given on the
/// command line are skipped, as are empty values and false flags, so flags
/// win over the file and the file wins over defaults.
std::vector<std::string> expand_config(int argc, const char *const *argv, const CLI::App &app) {
  std::vector<std::string> args(argv, argv + argc);
  if (args.size() < 2)
    return args;
  const CLI::App *sub = nullptr;
  for (const auto *s : app.get_subcommands([](const CLI::App *) { return true; }))
    if (s->get_name() == args[1])
      sub = s;
  if (!sub)
    return args;
  std::vector<std::string> rest;
  std::string file;
  for (std::size_t i = 2; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      file = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      file = args[i].substr(9);
    } else {
      rest.push_back(args[i]);
    }
  }
  if (file.empty())
    return args;
  if (!fs::exists(file))
    throw InputError("config file " + file + " does not exist");
  std::vector<std::string> out{args[0], args[1]};
  for (const auto &item : CLI::ConfigINI().from_file(file)) {
    if (item.name == "++" || item.name == "--" || item.inputs.empty())
      continue;
    const std::string name = item.fullname();
    const auto *opt = sub->get_option_no_throw("--" + name);
    if (!opt)
      throw InputError("unknown key \"" + name + "\" in config file " + file);
    if (has_flag(rest, name))
      continue;
    const std::string value = CLI::detail::join(item.inputs, ",");
    if (value.empty())
      continue;
    if (opt->get_expected_min() == 0) {
      if (value == "false" || value == "0")
        continue;
      out.push_back("--" + name);
      continue;
    }
    out.push_back("--" + name + "=" + value);
  }
  out.insert(out.end(), rest.begin(), rest.end());
  return out;
}

} // namespace

int run_cli(int argc, const char *const *argv, std::ostream &out, std::ostream &err) {
  CLI::App app{"Evaluation-data selection for prompt optimization", "ipomp"};
  app.require_subcommand(1);

  DataOptions data;
  ModelOptions model;
  SelectionOptions sel_select, sel_optimize, sel_compare;
  LoopOptions loop;
  std::string out_path, run_root = "runs", csv_path, report_dir, report_out, synth_dir;
  std::vector<std::string> methods{"random", "ipomp"};
  int seeds = 5;
  SyntheticConfig synth;

  auto *select = app.add_subcommand("select", "select an evaluation set");
  select->add_option("--config", "flat key = value config file (flags take precedence)");
  add_data_options(select, data);
  add_model_options(select, model);
  sel_select.method = "ipomp-stage1";
  add_selection_options(select, sel_select, true);
  select->add_option("--out", out_path, "selection output (JSON)")->required();

  auto *optimize = app.add_subcommand("optimize", "run prompt optimization");
  optimize->add_option("--config", "flat key = value config file (flags take precedence)");
  add_data_options(optimize, data);
  add_model_options(optimize, model);
  sel_optimize.method = "ipomp";
  add_selection_options(optimize, sel_optimize, true);
  add_loop_options(optimize, loop);
  optimize->add_option("--run-dir", run_root, "root directory for run records")
      ->capture_default_str();

  auto *compare = app.add_subcommand("compare", "compare selection methods over seeds");
  compare->add_option("--config", "flat key = value config file (flags take precedence)");
  add_data_options(compare, data);
  add_model_options(compare, model);
  add_selection_options(compare, sel_compare, false);
  add_loop_options(compare, loop);
  compare->add_option("--methods", methods, "methods to compare")
      ->check(CLI::IsMember(known_methods()))
      ->delimiter(',')
      ->capture_default_str();
  compare->add_option("--seeds", seeds, "runs per method")->capture_default_str();
  compare->add_option("--seed", sel_compare.seed, "first seed")->capture_default_str();
  compare->add_option("--out-csv", csv_path, "summary CSV path");
  std::string compare_runs;
  compare->add_option("--run-dir", compare_runs, "persist each run's record here");

  auto *report = app.add_subcommand("report", "export correlation matrices of a run");
  report->add_option("--run-dir", report_dir, "directory of a run")->required();
  report->add_option("--out", report_out, "output directory (default <run-dir>/report)");

  auto *synth_cmd = app.add_subcommand("synth", "generate a synthetic task");
  synth_cmd->add_option("--out-dir", synth_dir, "output directory")->required();
  synth_cmd->add_option("--train", synth.train_size, "training samples")->capture_default_str();
  synth_cmd->add_option("--test", synth.test_size, "test samples")->capture_default_str();
  synth_cmd->add_option("--groups", synth.groups, "latent groups")->capture_default_str();
  synth_cmd->add_option("--dim", synth.dimension, "embedding dimension")->capture_default_str();
  synth_cmd->add_option("--seed", synth.seed, "generator seed")->capture_default_str();

  try {
    auto args = expand_config(argc, argv, app);
    std::vector<const char *> ptrs;
    for (const auto &a : args)
      ptrs.push_back(a.c_str());
    app.parse(static_cast<int>(ptrs.size()), ptrs.data());
  } catch (const InputError &e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e, out, err);
    if (code == 0)
      return kExitOk;
    const auto parsed = app.get_subcommands();
    err << (parsed.empty() ? app.help() : parsed.front()->help());
    return kExitUsage;
  }

  try {
    if (*select)
      return cmd_select(data, model, sel_select, out_path, out);
    if (*optimize)
      return cmd_optimize(data, model, sel_optimize, loop, run_root, *optimize, out, err);
    if (*compare)
      return cmd_compare(data, model, sel_compare, loop, methods, seeds, csv_path, compare_runs, out);
    if (*report)
      return cmd_report(report_dir, report_out, out);
    return cmd_synth(synth, synth_dir, out);
  } catch (const InputError &e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ClientError &e) {
    err << "model client error: " << e.what() << '\n';
    return kExitClient;
  } catch (const std::exception &e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}

} // namespace ipomp
