#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ipomp/corpus.hpp"
#include "ipomp/embedding.hpp"
#include "json.hpp"

namespace ipomp {

enum class Provenance { clustering, boundary, replacement, random, anchor_point };

std::string to_string(Provenance p);
Provenance provenance_from_string(const std::string &s);

/// The evaluation subset used to score prompts.
struct EvaluationSet {
  std::vector<std::string> ids;
  std::map<std::string, Provenance> provenance;
  std::string method = "ipomp";

  std::size_t size() const { return ids.size(); }
  bool contains(const std::string &id) const { return provenance.count(id) != 0; }
  void add(const std::string &id, Provenance p);
  /// Swaps `out` for `in` at the same position and tags `in` as a replacement.
  void replace(const std::string &out, const std::string &in);

  /// Throws InputError unless ids are distinct, non-empty and all tagged.
  void validate() const;
};

struct Stage1Config {
  int n = 20;
  int k = 5;
  double alpha = 0.5;
  std::optional<std::size_t> boundary_budget; ///< defaults to 4 * n
  std::uint64_t seed = 0;

  std::size_t effective_budget() const {
    return boundary_budget.value_or(4 * static_cast<std::size_t>(n));
  }
  /// round(alpha * n), half away from zero.
  int clustering_count() const;
  void validate() const;
};

/// Clustering picks plus furthest-pair boundary picks, `cfg.n` ids total.
EvaluationSet select_diverse(const Dataset &dataset, const EmbeddingStore &store,
                             const Stage1Config &cfg);

nlohmann::json to_json(const EvaluationSet &set);
EvaluationSet evaluation_set_from_json(const nlohmann::json &j);

/// Writes {"method", "ids", "provenance", "config"}.
void save_selection(const EvaluationSet &set, const nlohmann::json &config,
                    const std::filesystem::path &path);
EvaluationSet load_selection(const std::filesystem::path &path);

} // namespace ipomp
