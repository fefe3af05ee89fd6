#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ipomp/model.hpp"

namespace ipomp {

/// The prompt-proposal half of a prompt optimizer.
class OptimizerStrategy {
public:
  virtual ~OptimizerStrategy() = default;

  /// Next candidate population. At iteration 0 `scored` may be empty;
  /// afterwards every candidate must carry a score. Never returns an empty
  /// list.
  virtual std::vector<PromptCandidate> update_prompts(int iteration,
                                                      const std::vector<PromptCandidate> &scored) = 0;

  /// The first `count` candidates this optimizer would propose from scratch.
  virtual std::vector<PromptCandidate> generate(std::size_t count) = 0;

  /// Warnings raised since construction (failed generations and the like).
  virtual const std::vector<std::string> &warnings() const = 0;
};

struct ApeConfig {
  std::size_t population = 8;
  std::string initial_prompt = "answer the question";
  std::uint64_t seed = 0;
  int dedupe_attempts = 4; ///< retries when a variant duplicates an existing text
};

/// Survivor selection plus paraphrase refill, APE style: keep the better
/// half (ties by text), then ask the client for variants of survivors,
/// round-robin, until the population is full. Scores are cleared because
/// every iteration is re-evaluated.
std::vector<PromptCandidate> ape_update(int iteration, const std::vector<PromptCandidate> &scored,
                                        const ApeConfig &cfg, ModelClient &client,
                                        std::vector<std::string> *warnings = nullptr);

class ApeOptimizer final : public OptimizerStrategy {
public:
  ApeOptimizer(ModelClient &client, ApeConfig cfg) : client_(client), cfg_(std::move(cfg)) {}

  std::vector<PromptCandidate> update_prompts(int iteration,
                                              const std::vector<PromptCandidate> &scored) override;
  std::vector<PromptCandidate> generate(std::size_t count) override;
  const std::vector<std::string> &warnings() const override { return warnings_; }

  const ApeConfig &config() const { return cfg_; }

private:
  ModelClient &client_;
  ApeConfig cfg_;
  std::vector<std::string> warnings_;
};

/// Highest score, ties by ascending text. Throws on an empty list or an
/// unscored candidate.
PromptCandidate identify_best(const std::vector<PromptCandidate> &candidates);

} // namespace ipomp
