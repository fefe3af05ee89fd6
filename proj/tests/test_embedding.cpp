#include "doctest.h"

#include <cmath>

#include "ipomp/embedding.hpp"
#include "ipomp/error.hpp"
#include "ipomp/hashing.hpp"
#include "support.hpp"

using namespace ipomp;
using ipomp::testing::TempDir;
using ipomp::testing::write_file;

TEST_CASE("cosine_similarity examples") {
  Eigen::VectorXd v(3);
  v << 0.3, -1.2, 2.0;
  CHECK(cosine_similarity(v, v) == doctest::Approx(1.0));
  CHECK(cosine_similarity(v, Eigen::VectorXd(-v)) == doctest::Approx(-1.0));
  Eigen::Vector2d x(1, 0), y(0, 1);
  CHECK(cosine_similarity(x, y) == 0.0);
  CHECK(cosine_distance(x, Eigen::Vector2d(-1, 0)) == doctest::Approx(2.0));
  CHECK_THROWS_AS(cosine_similarity(Eigen::VectorXd(x), Eigen::VectorXd::Ones(3)), InputError);
  CHECK_THROWS_AS(cosine_similarity(x, Eigen::Vector2d(0, 0)), InputError);
  Eigen::Vector2f xf(1, 1), yf(1, 0);
  CHECK(cosine_similarity(xf, yf) == doctest::Approx(std::sqrt(0.5f)));
}

TEST_CASE("cosine_similarity is bounded and exactly symmetric") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 1000; ++trial) {
    Eigen::VectorXd a(17), b(17);
    for (int i = 0; i < 17; ++i) {
      a[i] = normal(rng);
      b[i] = normal(rng) * (trial % 7 == 0 ? 0.0 : 1.0) + (trial % 7 == 0 ? a[i] : 0.0);
    }
    const double s = cosine_similarity(a, b);
    CHECK(s >= -1.0 - 1e-9);
    CHECK(s <= 1.0 + 1e-9);
    CHECK(s == cosine_similarity(b, a));
  }
}

TEST_CASE("EmbeddingStore normalizes and validates") {
  RowMatrix m(2, 2);
  m << 3, 4, 0, -2;
  const EmbeddingStore store({"a", "b"}, m);
  CHECK(store.row("a").norm() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(store.row("a")[0] == doctest::Approx(0.6));
  CHECK(store.row_index("b") == 1);
  CHECK(store.dimension() == 2);
  CHECK_THROWS_AS(store.row_index("c"), InputError);
  CHECK(store.gather({"b", "a"}).row(0) == store.row("b"));

  CHECK_THROWS_AS(EmbeddingStore({"a", "a"}, m), InputError);
  RowMatrix z(1, 3);
  z << 0, 0, 0;
  try {
    EmbeddingStore({"a"}, z);
    FAIL("zero vector accepted");
  } catch (const InputError &e) {
    CHECK(std::string(e.what()).find("zero vector") != std::string::npos);
  }
  RowMatrix nan(1, 2);
  nan << std::nan(""), 1.0;
  CHECK_THROWS_AS(EmbeddingStore({"a"}, nan), InputError);
}

TEST_CASE("load_embeddings") {
  TempDir dir;
  const auto d = ipomp::testing::dataset_for({"s1", "s2"});
  write_file(dir / "ok.jsonl", R"({"id":"s1","vector":[1,2,3,4]}
{"id":"s2","vector":[0,0,0,2]}
{"id":"extra","vector":[1,0,0,0]}
)");
  const auto store = load_embeddings(dir / "ok.jsonl", d);
  CHECK(store.dimension() == 4);
  CHECK(store.size() == 3);
  for (Eigen::Index i = 0; i < 3; ++i)
    CHECK(std::abs(store.row(i).norm() - 1.0) <= 1e-6);

  write_file(dir / "missing.jsonl", R"({"id":"s1","vector":[1,2]})");
  const auto d7 = ipomp::testing::dataset_for({"s1", "s7"});
  try {
    load_embeddings(dir / "missing.jsonl", d7);
    FAIL("missing id accepted");
  } catch (const InputError &e) {
    CHECK(std::string(e.what()).find("s7") != std::string::npos);
  }

  write_file(dir / "zero.jsonl", R"({"id":"s1","vector":[0,0,0]}
{"id":"s2","vector":[1,0,0]}
)");
  try {
    load_embeddings(dir / "zero.jsonl", d);
    FAIL("zero vector accepted");
  } catch (const InputError &e) {
    CHECK(std::string(e.what()).find("zero vector") != std::string::npos);
  }

  write_file(dir / "ragged.jsonl", R"({"id":"s1","vector":[1,0,0]}
{"id":"s2","vector":[1,0]}
)");
  CHECK_THROWS_AS(load_embeddings(dir / "ragged.jsonl", d), InputError);

  save_embeddings(store, dir / "out.jsonl");
  const auto back = load_embeddings(dir / "out.jsonl", d);
  CHECK((back.matrix() - store.matrix()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("hash_embed is deterministic and content addressed") {
  const Dataset d("t", {{"a", "the quick brown fox", "x"}, {"b", "aaa", "y"}, {"c", "aaa", "x"}},
                  {"x", "y"});
  const auto s1 = hash_embed(d, 64, 3);
  const auto s2 = hash_embed(d, 64, 3);
  CHECK(s1.matrix() == s2.matrix());
  CHECK(cosine_similarity(s1.row("b"), s1.row("c")) == doctest::Approx(1.0));
  CHECK(hash_embed_text("The Quick, brown FOX!", 64, 3) == hash_embed_text("the quick brown fox", 64, 3));
  CHECK_FALSE(hash_embed(d, 64, 4).matrix() == s1.matrix());
}

namespace {

// Independent feature-hashing reference: token -> bucket h % d, sign from
// the top bit, h = splitmix64(fnv1a64(token) ^ splitmix64(seed)).
Eigen::VectorXd reference_hash(const std::vector<std::string> &tokens, int d, std::uint64_t seed) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(d);
  for (const auto &t : tokens) {
    const std::uint64_t h = splitmix64(fnv1a64(t) ^ splitmix64(seed));
    v[static_cast<Eigen::Index>(h % static_cast<std::uint64_t>(d))] += (h >> 63) ? -1.0 : 1.0;
  }
  return v.normalized();
}

} // namespace

TEST_CASE("hash_embed matches a reference hasher and separates unrelated texts") {
  std::mt19937_64 rng(21);
  std::uniform_int_distribution<int> letter('a', 'z');
  auto word = [&] {
    std::string w;
    for (int i = 0; i < 6; ++i)
      w.push_back(static_cast<char>(letter(rng)));
    return w;
  };
  double worst = 0.0;
  for (int pair = 0; pair < 100; ++pair) {
    std::vector<std::string> ta, tb;
    std::string a, b;
    for (int i = 0; i < 60; ++i) {
      ta.push_back(word());
      tb.push_back(word());
      a += ta.back() + " ";
      b += tb.back() + " ";
    }
    const auto va = hash_embed_text(a, 256, 9);
    CHECK((va - reference_hash(ta, 256, 9)).cwiseAbs().maxCoeff() < 1e-12);
    worst = std::max(worst, std::abs(cosine_similarity(va, hash_embed_text(b, 256, 9))));
  }
  CHECK(worst < 0.3);
}
