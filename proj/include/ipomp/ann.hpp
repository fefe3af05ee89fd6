#pragma once

#include <cstdint>
#include <string>
#include <unordered_set>
#include <vector>

#include "ipomp/embedding.hpp"

namespace ipomp {

struct HnswParams {
  int m_links = 16;          ///< max links per node above layer 0 (2x at layer 0)
  int ef_construction = 200;
  int ef_search = 64;
  std::uint64_t seed = 0;
};

/// HNSW index answering "which stored vector is least similar to q".
///
/// Stored vectors are negated and searched for the nearest neighbour under
/// inner-product distance 1 - <q, -v>, which for unit vectors is the
/// minimum of cosine(q, v). Immutable after construction; concurrent
/// queries are safe.
class DissimilarityIndex {
public:
  DissimilarityIndex(const EmbeddingStore &store, const std::vector<std::string> &ids,
                     HnswParams params = {});

  std::size_t size() const { return ids_.size(); }
  const std::vector<std::string> &ids() const { return ids_; }
  const HnswParams &params() const { return params_; }
  int max_level() const { return max_level_; }

  /// Approximate argmin of cosine(query, v) over stored ids not in
  /// `exclude`; ties go to the smaller id. Throws InputError when every id
  /// is excluded.
  std::string least_similar(const Eigen::Ref<const Eigen::RowVectorXd> &query,
                            const std::unordered_set<std::string> &exclude = {}) const;

  /// Same with an explicit beam width.
  std::string least_similar(const Eigen::Ref<const Eigen::RowVectorXd> &query,
                            const std::unordered_set<std::string> &exclude,
                            int ef_search) const;

private:
  struct Candidate {
    double dist;
    std::uint32_t node;
    bool operator<(const Candidate &o) const {
      return dist < o.dist || (dist == o.dist && node < o.node);
    }
    bool operator>(const Candidate &o) const { return o < *this; }
  };

  double node_distance(std::uint32_t a, std::uint32_t b) const;
  double query_distance(const Eigen::Ref<const Eigen::RowVectorXd> &q,
                        std::uint32_t node) const;

  template <typename Dist>
  std::vector<Candidate> search_layer(Dist &&dist, std::vector<std::uint32_t> entries,
                                      std::size_t ef, int level,
                                      std::vector<bool> &visited) const;
  std::vector<std::uint32_t> select_neighbors(std::uint32_t base,
                                              std::vector<Candidate> candidates,
                                              std::size_t limit) const;
  void insert(std::uint32_t node, int level);

  std::vector<std::string> ids_;
  RowMatrix negated_;
  HnswParams params_;
  std::vector<std::vector<std::vector<std::uint32_t>>> links_; // [node][level]
  std::uint32_t entry_ = 0;
  int max_level_ = -1;
};

} // namespace ipomp
