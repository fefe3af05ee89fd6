#pragma once

#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <cstdio>
#include <random>
#include <unordered_set>
#include <string>
#include <vector>

#include "ipomp/corpus.hpp"
#include "ipomp/embedding.hpp"
#include "ipomp/model.hpp"
#include "ipomp/perf.hpp"
#include "ipomp/simulator.hpp"
#include "ipomp/stage1.hpp"

namespace ipomp::testing {

/// Fresh directory under the system temp path, removed on destruction.
class TempDir {
public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("ipomp-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir &) = delete;
  TempDir &operator=(const TempDir &) = delete;

  const std::filesystem::path &path() const { return path_; }
  std::filesystem::path operator/(const std::string &name) const { return path_ / name; }

private:
  std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path &path, const std::string &text) {
  std::ofstream(path) << text;
}

inline std::string read_file(const std::filesystem::path &path) {
  std::ifstream in(path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// Unit vectors on the circle at the given angles (degrees).
inline EmbeddingStore circle_store(const std::vector<double> &degrees,
                                   const std::vector<std::string> &ids) {
  RowMatrix m(static_cast<Eigen::Index>(degrees.size()), 2);
  for (std::size_t i = 0; i < degrees.size(); ++i) {
    const double r = degrees[i] * 3.14159265358979323846 / 180.0;
    m(static_cast<Eigen::Index>(i), 0) = std::cos(r);
    m(static_cast<Eigen::Index>(i), 1) = std::sin(r);
  }
  return EmbeddingStore(ids, std::move(m));
}

inline std::string make_id(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "s%05zu", i);
  return buf;
}

inline std::vector<std::string> make_ids(std::size_t n) {
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < n; ++i)
    ids.push_back(make_id(i));
  return ids;
}

/// n Gaussian vectors of dimension d, normalized by the store.
inline EmbeddingStore random_store(std::size_t n, int d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  RowMatrix m(static_cast<Eigen::Index>(n), d);
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      m(i, j) = normal(rng);
  return EmbeddingStore(make_ids(n), std::move(m));
}

inline Dataset dataset_for(const std::vector<std::string> &ids,
                           std::vector<std::string> labels = {"no", "yes"}) {
  std::vector<Sample> samples;
  for (std::size_t i = 0; i < ids.size(); ++i)
    samples.push_back({ids[i], "input " + ids[i], labels[i % labels.size()]});
  return Dataset("test", std::move(samples), std::move(labels));
}

/// Brute-force argmin of cosine similarity to `q`, ties to the smaller id.
inline std::string brute_least_similar(const EmbeddingStore &store,
                                       const std::vector<std::string> &ids,
                                       const Eigen::RowVectorXd &q,
                                       const std::unordered_set<std::string> &exclude = {}) {
  std::string best;
  double best_sim = 2.0;
  for (const auto &id : ids) {
    if (exclude.count(id))
      continue;
    const double s = q.dot(store.row(id));
    if (s < best_sim || (s == best_sim && id < best)) {
      best_sim = s;
      best = id;
    }
  }
  return best;
}

/// Brute-force furthest pair by cosine distance, lexicographic ties.
inline std::pair<std::string, std::string> brute_furthest(const EmbeddingStore &store,
                                                          std::vector<std::string> ids) {
  std::sort(ids.begin(), ids.end());
  std::pair<std::string, std::string> best;
  double best_d = -1.0;
  for (std::size_t i = 0; i < ids.size(); ++i)
    for (std::size_t j = i + 1; j < ids.size(); ++j) {
      const double d = cosine_distance(store.row(ids[i]), store.row(ids[j]));
      if (d > best_d) {
        best_d = d;
        best = {ids[i], ids[j]};
      }
    }
  return best;
}

/// PerfMatrix from prompts evaluated on `ids` by `model`.
inline PerfMatrix evaluate_matrix(ModelClient &model, const std::vector<std::string> &prompts,
                                  const std::vector<std::string> &ids, const Dataset &dataset) {
  std::vector<PerfRecord> records;
  for (std::size_t p = 0; p < prompts.size(); ++p) {
    auto ev = evaluate_prompt(model, prompts[p], static_cast<int>(p), ids, dataset);
    records.insert(records.end(), ev.records.begin(), ev.records.end());
  }
  return build_matrix(records, ids, dataset.label_space(), static_cast<int>(prompts.size()));
}

} // namespace ipomp::testing
