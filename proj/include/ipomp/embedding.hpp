#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <string>
#include <unordered_map>
#include <vector>

#include "ipomp/corpus.hpp"
#include "ipomp/error.hpp"

namespace ipomp {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Cosine similarity of two vectors, clamped to [-1, 1].
///
/// Symmetric bit-for-bit: the products commute and the summation order only
/// depends on the length.
template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar cosine_similarity(const Eigen::MatrixBase<DerivedA> &a,
                                            const Eigen::MatrixBase<DerivedB> &b) {
  using Scalar = typename DerivedA::Scalar;
  if (a.size() != b.size())
    throw InputError("cosine_similarity: dimension mismatch (" +
                     std::to_string(a.size()) + " vs " + std::to_string(b.size()) + ")");
  const Scalar denom = a.norm() * b.norm();
  if (denom == Scalar(0))
    throw InputError("cosine_similarity: zero vector");
  const Scalar s = a.reshaped().dot(b.reshaped()) / denom;
  return std::clamp(s, Scalar(-1), Scalar(1));
}

/// Cosine distance, 1 - cosine similarity.
template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar cosine_distance(const Eigen::MatrixBase<DerivedA> &a,
                                          const Eigen::MatrixBase<DerivedB> &b) {
  return typename DerivedA::Scalar(1) - cosine_similarity(a, b);
}

/// Unit-normalized embedding vectors keyed by sample id. Immutable.
class EmbeddingStore {
public:
  EmbeddingStore() = default;

  /// Rows of `vectors` are normalized in place. Rejects duplicate ids,
  /// non-finite entries and zero rows.
  EmbeddingStore(std::vector<std::string> ids, RowMatrix vectors);

  Eigen::Index dimension() const { return vectors_.cols(); }
  std::size_t size() const { return ids_.size(); }
  bool contains(const std::string &id) const { return row_of_.count(id) != 0; }

  /// Row index of `id`; throws InputError when absent.
  Eigen::Index row_index(const std::string &id) const;

  auto row(const std::string &id) const { return vectors_.row(row_index(id)); }
  auto row(Eigen::Index i) const { return vectors_.row(i); }

  const std::vector<std::string> &ids() const { return ids_; }
  const RowMatrix &matrix() const { return vectors_; }

  /// Gathers the rows for `ids` in the given order.
  RowMatrix gather(const std::vector<std::string> &ids) const;

  /// Throws InputError naming the first dataset id without a vector.
  void require_covers(const Dataset &dataset) const;

private:
  std::vector<std::string> ids_;
  std::unordered_map<std::string, Eigen::Index> row_of_;
  RowMatrix vectors_;
};

/// Reads JSONL lines {"id": ..., "vector": [...]} and checks coverage of
/// `dataset`. Vectors for ids outside the dataset are kept.
EmbeddingStore load_embeddings(const std::filesystem::path &path,
                               const Dataset &dataset);

void save_embeddings(const EmbeddingStore &store, const std::filesystem::path &path);

/// Deterministic feature-hashing embedder: lowercase alphanumeric tokens
/// are hashed (seeded) into `dimension` signed buckets, then normalized.
EmbeddingStore hash_embed(const Dataset &dataset, int dimension, std::uint64_t seed);

/// Same as hash_embed for a single text.
Eigen::VectorXd hash_embed_text(const std::string &text, int dimension,
                                std::uint64_t seed);

} // namespace ipomp
