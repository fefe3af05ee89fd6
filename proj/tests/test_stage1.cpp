#include "doctest.h"

#include <cstdlib>

#include "ipomp/error.hpp"
#include "ipomp/geometry.hpp"
#include "ipomp/hashing.hpp"
#include "ipomp/simulator.hpp"
#include "ipomp/stage1.hpp"
#include "support.hpp"

using namespace ipomp;
using namespace ipomp::testing;

namespace {

std::size_t count(const EvaluationSet &s, Provenance p) {
  return static_cast<std::size_t>(std::count_if(
      s.provenance.begin(), s.provenance.end(), [&](const auto &kv) { return kv.second == p; }));
}

} // namespace

TEST_CASE("N = 4, alpha = 0.5 gives two of each, disjoint") {
  const auto store = random_store(40, 8, 3);
  const auto d = dataset_for(store.ids());
  Stage1Config cfg;
  cfg.n = 4;
  cfg.k = 2;
  const auto s = select_diverse(d, store, cfg);
  CHECK(s.size() == 4);
  CHECK(count(s, Provenance::clustering) == 2);
  CHECK(count(s, Provenance::boundary) == 2);
  CHECK(s.method == "ipomp");
  s.validate();
}

TEST_CASE("alpha = 1 is a pure proportional cluster sample") {
  const auto store = random_store(60, 8, 4);
  const auto d = dataset_for(store.ids());
  Stage1Config cfg;
  cfg.n = 10;
  cfg.k = 3;
  cfg.alpha = 1.0;
  cfg.seed = 5;
  const auto s = select_diverse(d, store, cfg);
  CHECK(count(s, Provenance::clustering) == 10);
  CHECK(s.method == "clustering");
  const auto clusters = kmeans(store, d.ids(), 3, mix_seed(5, "kmeans"));
  CHECK(s.ids == proportional_sample(clusters, 10, mix_seed(5, "proportional")));
}

TEST_CASE("alpha = 0 with the full budget starts with the exact furthest pair") {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 50; ++trial) {
    const auto store = random_store(20 + rng() % 40, 6, rng());
    const auto d = dataset_for(store.ids());
    Stage1Config cfg;
    cfg.n = 2 + static_cast<int>(rng() % 6);
    cfg.alpha = 0.0;
    cfg.boundary_budget = d.size();
    const auto s = select_diverse(d, store, cfg);
    const auto pair = brute_furthest(store, store.ids());
    CHECK(s.ids[0] == pair.first);
    CHECK(s.ids[1] == pair.second);
    CHECK(s.method == "boundary");
  }
}

TEST_CASE("odd boundary share takes the smaller id of the last pair") {
  const auto store = circle_store({0, 90, 180, 270, 45}, {"a", "b", "c", "d", "e"});
  const auto d = dataset_for(store.ids());
  Stage1Config cfg;
  cfg.n = 3;
  cfg.alpha = 0.0;
  cfg.boundary_budget = 5;
  const auto s = select_diverse(d, store, cfg);
  // Pairs by distance: (a,c) then (b,d); (b,d) contributes "b" only.
  CHECK(s.ids == std::vector<std::string>{"a", "c", "b"});
}

TEST_CASE("configuration errors") {
  const auto store = random_store(10, 4, 1);
  const auto d = dataset_for(store.ids());
  Stage1Config cfg;
  cfg.n = 11;
  CHECK_THROWS_AS(select_diverse(d, store, cfg), InputError);
  cfg.n = 0;
  CHECK_THROWS_AS(select_diverse(d, store, cfg), InputError);
  cfg.n = 4;
  cfg.alpha = 1.5;
  CHECK_THROWS_AS(select_diverse(d, store, cfg), InputError);
  cfg.alpha = 0.5;
  cfg.k = 0;
  CHECK_THROWS_AS(select_diverse(d, store, cfg), InputError);
  cfg.k = 2;
  cfg.boundary_budget = 0;
  CHECK_THROWS_AS(select_diverse(d, store, cfg), InputError);
  cfg.boundary_budget.reset();
  const auto other = random_store(3, 4, 2);
  CHECK_THROWS_AS(select_diverse(d, other, cfg), InputError);
  // Budget 1 cannot produce a pair.
  cfg.alpha = 0.0;
  cfg.boundary_budget = 1;
  CHECK_THROWS_AS(select_diverse(d, store, cfg), InputError);
}

TEST_CASE("EvaluationSet bookkeeping and JSON round trip") {
  EvaluationSet s;
  s.add("a", Provenance::clustering);
  s.add("b", Provenance::boundary);
  CHECK_THROWS_AS(s.add("a", Provenance::boundary), InputError);
  s.replace("a", "c");
  CHECK(s.ids == std::vector<std::string>{"c", "b"});
  CHECK(s.provenance.at("c") == Provenance::replacement);
  CHECK_FALSE(s.contains("a"));
  CHECK_THROWS_AS(s.replace("zz", "d"), InputError);
  CHECK_THROWS_AS(s.replace("c", "b"), InputError);

  const auto back = evaluation_set_from_json(to_json(s));
  CHECK(back.ids == s.ids);
  CHECK(back.provenance == s.provenance);
  CHECK(back.method == s.method);

  for (auto p : {Provenance::clustering, Provenance::boundary, Provenance::replacement,
                 Provenance::random, Provenance::anchor_point})
    CHECK(provenance_from_string(to_string(p)) == p);
  CHECK_THROWS_AS(provenance_from_string("other"), InputError);

  TempDir dir;
  save_selection(s, {{"n", 2}}, dir / "sel.json");
  const auto loaded = load_selection(dir / "sel.json");
  CHECK(loaded.ids == s.ids);
  const auto j = nlohmann::json::parse(read_file(dir / "sel.json"));
  CHECK(j.at("config").at("n") == 2);
  write_file(dir / "bad.json", "{\"ids\": [\"a\"]}");
  CHECK_THROWS_AS(load_selection(dir / "bad.json"), InputError);
}

TEST_CASE("golden selection on the seed-7 synthetic fixture") {
  SyntheticConfig tc;
  tc.train_size = 100;
  tc.seed = 7;
  const auto task = make_synthetic_task(tc);
  Stage1Config cfg;
  cfg.seed = 7;
  const auto s = select_diverse(task.train, task.store, cfg);
  const auto path = std::filesystem::path(IPOMP_TEST_DATA_DIR) / "stage1_golden_seed7.json";
  if (std::getenv("IPOMP_UPDATE_GOLDEN"))
    std::ofstream(path) << to_json(s).dump(2) << '\n';
  const auto golden = evaluation_set_from_json(nlohmann::json::parse(read_file(path)));
  CHECK(s.ids == golden.ids);
  CHECK(s.provenance == golden.provenance);

  // Audit: rebuild the selection from the primitives, one step at a time.
  const auto clusters = kmeans(task.store, task.train.ids(), 5, mix_seed(7, "kmeans"));
  const auto s_cluster = proportional_sample(clusters, 10, mix_seed(7, "proportional"));
  CHECK(std::vector<std::string>(golden.ids.begin(), golden.ids.begin() + 10) == s_cluster);
  const auto pool = task.train.remove({s_cluster.begin(), s_cluster.end()});
  auto candidates = boundary_points(task.store, pool.ids(), 80);
  std::vector<std::string> s_boundary;
  while (s_boundary.size() < 10) {
    const auto [a, b] = furthest_pair(task.store, candidates);
    s_boundary.push_back(a);
    s_boundary.push_back(b);
    std::erase(candidates, a);
    std::erase(candidates, b);
  }
  CHECK(std::vector<std::string>(golden.ids.begin() + 10, golden.ids.end()) == s_boundary);
}
