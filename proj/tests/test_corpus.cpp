#include "doctest.h"

#include "ipomp/corpus.hpp"
#include "ipomp/error.hpp"
#include "support.hpp"

using namespace ipomp;
using ipomp::testing::TempDir;
using ipomp::testing::write_file;

namespace {

std::string error_of(const std::function<void()> &f) {
  try {
    f();
  } catch (const InputError &e) {
    return e.what();
  }
  return "";
}

} // namespace

TEST_CASE("load_dataset infers a sorted label space") {
  TempDir dir;
  write_file(dir / "d.jsonl", R"({"id":"s1","input":"a","label":"yes"}
{"id":"s2","input":"b","label":"no"}
{"id":"s3","input":"c","label":"yes"}
)");
  const auto d = load_dataset(dir / "d.jsonl");
  CHECK(d.size() == 3);
  CHECK(d.label_space() == std::vector<std::string>{"no", "yes"});
  CHECK(d.ids() == std::vector<std::string>{"s1", "s2", "s3"});
  CHECK(d.at("s2").input == "b");
  CHECK(d.label_index("yes") == 1);
  CHECK(d.label_index("maybe") == -1);
}

TEST_CASE("load_dataset honours a label-space header") {
  TempDir dir;
  write_file(dir / "d.jsonl", R"({"label_space":["True","False","Unknown"]}
{"id":"a","input":"x","label":"False"}
{"id":"b","input":"y","label":"True"}
)");
  const auto d = load_dataset(dir / "d.jsonl");
  CHECK(d.label_space() == std::vector<std::string>{"True", "False", "Unknown"});
}

TEST_CASE("load_dataset errors") {
  TempDir dir;
  write_file(dir / "empty.jsonl", "");
  CHECK(error_of([&] { load_dataset(dir / "empty.jsonl"); }).find("empty dataset") !=
        std::string::npos);

  write_file(dir / "dup.jsonl", R"({"id":"s1","input":"a","label":"yes"}
{"id":"s1","input":"b","label":"no"}
)");
  CHECK(error_of([&] { load_dataset(dir / "dup.jsonl"); }).find("s1") != std::string::npos);

  write_file(dir / "bad.jsonl", R"({"id":"s1","input":"a","label":"yes"}
not json
)");
  CHECK(error_of([&] { load_dataset(dir / "bad.jsonl"); }).find("2") != std::string::npos);

  write_file(dir / "missing.jsonl", R"({"id":"s1","label":"yes"})");
  CHECK_THROWS_AS(load_dataset(dir / "missing.jsonl"), InputError);

  write_file(dir / "one.jsonl", R"({"id":"s1","input":"a","label":"yes"})");
  CHECK_THROWS_AS(load_dataset(dir / "one.jsonl"), InputError);

  write_file(dir / "outside.jsonl", R"({"label_space":["a","b"]}
{"id":"s1","input":"x","label":"c"}
)");
  CHECK(error_of([&] { load_dataset(dir / "outside.jsonl"); }).find("c") != std::string::npos);

  CHECK_THROWS_AS(load_dataset(dir / "nope.jsonl"), InputError);
}

TEST_CASE("save then load is the identity") {
  TempDir dir;
  const Dataset d("t",
                  {{"z1", "héllo \"quoted\"\nline", "b"}, {"a2", "x", "a"}, {"m3", "", "c"}},
                  {"c", "a", "b"});
  save_dataset(d, dir / "d.jsonl");
  const auto back = load_dataset(dir / "d.jsonl");
  REQUIRE(back.size() == d.size());
  CHECK(back.label_space() == d.label_space());
  for (std::size_t i = 0; i < d.size(); ++i) {
    CHECK(back[i].id == d[i].id);
    CHECK(back[i].input == d[i].input);
    CHECK(back[i].label == d[i].label);
  }
}

TEST_CASE("remove_samples") {
  const Dataset d("t", {{"s1", "a", "x"}, {"s2", "b", "y"}, {"s3", "c", "x"}}, {"x", "y"});
  SUBCASE("empty removal is identity") {
    CHECK(remove_samples(d, {}).ids() == d.ids());
  }
  SUBCASE("removing everything leaves an empty view") {
    const auto e = remove_samples(d, {"s1", "s2", "s3"});
    CHECK(e.empty());
    CHECK(e.label_space() == d.label_space());
  }
  SUBCASE("single removal keeps order") {
    const auto r = remove_samples(d, {"s2"});
    CHECK(r.ids() == std::vector<std::string>{"s1", "s3"});
    CHECK_FALSE(r.contains("s2"));
    CHECK_THROWS_AS(r.at("s2"), InputError);
    CHECK(d.contains("s2"));
  }
  SUBCASE("unknown ids are rejected") {
    CHECK_THROWS_AS(remove_samples(d, {"s9"}), InputError);
  }
}

TEST_CASE("remove_samples composes over disjoint sets") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const auto ids = ipomp::testing::make_ids(2 + rng() % 30);
    const auto d = ipomp::testing::dataset_for(ids);
    std::unordered_set<std::string> a, b, ab;
    for (const auto &id : ids) {
      const auto r = rng() % 3;
      if (r == 0)
        a.insert(id);
      else if (r == 1)
        b.insert(id);
    }
    ab = a;
    ab.insert(b.begin(), b.end());
    CHECK(remove_samples(d, ab).ids() == remove_samples(remove_samples(d, a), b).ids());
  }
}
