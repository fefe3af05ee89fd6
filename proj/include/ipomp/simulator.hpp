#pragma once

#include <atomic>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "ipomp/embedding.hpp"
#include "ipomp/model.hpp"

namespace ipomp {

struct SimConfig {
  int latent_groups = 5;      ///< trait dimension g
  double sigma = 0.3;         ///< response noise scale
  double trait_scale = 1.0;   ///< scale of the embedding-to-trait projection
  double weight_scale = 0.15; ///< std of per-prompt trait weights
  double quality_bias = -0.6; ///< logit offset of the prompt-quality landscape
  std::uint64_t seed = 0;
};

/// Deterministic stand-in for an LLM classifier.
///
/// Sample traits are squared coordinates of a seeded projection of the
/// sample embedding, u = trait_scale * ((P e)^2 - 1), so a sample and its
/// antipode behave alike. A prompt has a planted quality q in [0, 1] (a
/// function of its words) and a seeded weight vector w. The model answers
/// the gold label iff q + <w, u> + eps > 0 with eps ~ N(0, sigma^2) seeded
/// by (prompt, sample), and reports log sigmoid(|z|) as its logit.
class SimulatedModel final : public ModelClient {
public:
  SimulatedModel(const EmbeddingStore &store, SimConfig cfg = {});

  Completion complete(const std::string &prompt, const Sample &sample,
                      const std::vector<std::string> &label_space) override;
  std::optional<std::string> rewrite(const std::string &prompt, std::uint64_t seed) override;
  ClientStats stats() const override;

  const SimConfig &config() const { return cfg_; }

  /// Planted quality q_p of a prompt text.
  double quality(const std::string &prompt) const;
  Eigen::VectorXd prompt_weights(const std::string &prompt) const;
  Eigen::VectorXd trait(const Sample &sample) const;
  Eigen::VectorXd trait_of(const Eigen::VectorXd &embedding) const;
  /// Pre-noise decision value q + <w, u>.
  double margin(const std::string &prompt, const Sample &sample) const;
  double noise(const std::string &prompt, const Sample &sample) const;

  /// Instruction words the landscape assigns weight to.
  static const std::vector<std::string> &vocabulary();

  /// A random prompt of `words` vocabulary words.
  std::string random_prompt(std::uint64_t seed, int words = 6) const;

private:
  SimConfig cfg_;
  Eigen::MatrixXd projection_; // g x d
  std::unordered_map<std::string, Eigen::VectorXd> traits_;
  std::unordered_map<std::string, double> word_weight_;
  std::atomic<std::size_t> calls_{0};
  std::atomic<std::size_t> rewrites_{0};
  std::atomic<std::size_t> prompt_tokens_{0};
};

struct SyntheticConfig {
  std::size_t train_size = 100;
  std::size_t test_size = 0;
  int groups = 5;
  int dimension = 32;
  double core_fraction = 0.5;  ///< share of samples sitting tightly on a group centre
  double core_radius = 0.05;
  double loose_radius = 1.0;
  double label_noise = 0.2;    ///< chance a sample's label differs from its group label
  double label_separation = 1.0; ///< pull of group centres towards their label's anchor
  std::vector<std::string> labels = {"no", "yes"};
  std::uint64_t seed = 0;
};

/// A generated task: train and test splits with embeddings for both.
struct SyntheticTask {
  Dataset train;
  Dataset test;
  EmbeddingStore store;
  std::vector<int> train_groups;
};

SyntheticTask make_synthetic_task(const SyntheticConfig &cfg);

} // namespace ipomp
