#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ipomp/embedding.hpp"

namespace ipomp {

/// One model response for (sample, prompt).
struct PerfRecord {
  std::string sample_id;
  int prompt_index = 0;
  std::optional<std::string> predicted_label; ///< absent when outside the label space
  double logit = 0.0;                         ///< log-probability of the emitted label
};

/// Per-sample logit encodings across candidate prompts. Row r is sample
/// ids[r]; block p spans columns [p*L, (p+1)*L) for L labels.
struct PerfMatrix {
  std::vector<std::string> ids;
  std::vector<std::string> label_space;
  int num_prompts = 0;
  RowMatrix values;
};

/// Pairwise Pearson correlations; symmetric with an exact unit diagonal.
struct CorrMatrix {
  std::vector<std::string> ids;
  Eigen::MatrixXd values;
};

struct RedundancyConfig {
  double ct = 0.9;
  double beta = 0.5;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Zero block with the logit placed at the predicted label; all zeros when
/// the prediction is absent or unknown.
Eigen::RowVectorXd encode_block(const std::vector<std::string> &label_space,
                                const PerfRecord &record);

/// Requires exactly one record per (eval id, prompt index).
PerfMatrix build_matrix(const std::vector<PerfRecord> &records,
                        const std::vector<std::string> &eval_ids,
                        const std::vector<std::string> &label_space, int num_prompts);

/// Pearson correlation of every row pair of `rows`. A zero-variance row
/// correlates 0 with every other row.
template <typename Derived>
Eigen::MatrixXd pearson_rows(const Eigen::MatrixBase<Derived> &rows) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index n = rows.rows();
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> z =
      rows.colwise() - rows.rowwise().mean();
  std::vector<bool> flat(static_cast<std::size_t>(n), false);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Scalar scale = rows.row(i).cwiseAbs().maxCoeff();
    const Scalar norm = z.row(i).norm();
    // Centering a constant row leaves rounding residue near eps * |x|.
    if (norm <= Scalar(1e-12) * scale * std::sqrt(Scalar(rows.cols())) || norm == Scalar(0)) {
      flat[static_cast<std::size_t>(i)] = true;
      z.row(i).setZero();
    } else {
      z.row(i) /= norm;
    }
  }
  Eigen::MatrixXd c(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    c(i, i) = 1.0;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      double r = 0.0;
      if (!flat[static_cast<std::size_t>(i)] && !flat[static_cast<std::size_t>(j)])
        r = std::clamp(static_cast<double>(z.row(i).dot(z.row(j))), -1.0, 1.0);
      c(i, j) = r;
      c(j, i) = r;
    }
  }
  return c;
}

CorrMatrix pairwise_correlation(const PerfMatrix &matrix);

/// Complete-linkage agglomerative clustering cut so that every pair inside
/// a cluster has correlation >= ct. Singletons included. Clusters and their
/// members are sorted by id.
std::vector<std::vector<std::string>> redundancy_clusters(const CorrMatrix &corr, double ct);

/// From each cluster of size s >= 2 draws ceil(beta * (s - 1)) members.
std::set<std::string> sample_redundant(const std::vector<std::vector<std::string>> &clusters,
                                       const RedundancyConfig &cfg);

/// Fraction of samples with some off-diagonal correlation > ct.
double redundancy_fraction(const CorrMatrix &corr, double ct);

/// Header row of ids, then one row of values per id.
void write_corr_csv(const CorrMatrix &corr, const std::filesystem::path &path);
CorrMatrix read_corr_csv(const std::filesystem::path &path);

} // namespace ipomp
