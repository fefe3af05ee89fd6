#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ipomp/corpus.hpp"
#include "ipomp/error.hpp"
#include "ipomp/perf.hpp"

namespace ipomp {

/// A prompt under optimization.
struct PromptCandidate {
  std::string text;
  std::optional<double> score;     ///< accuracy on the current evaluation set
  std::optional<std::size_t> parent; ///< index of the survivor it was derived from
};

/// Model answer for one sample. `label` is already normalized into the
/// label space; absent means the output matched no label.
struct Completion {
  std::optional<std::string> label;
  double logit = 0.0;
};

struct ClientStats {
  std::size_t calls = 0;          ///< completion requests that returned
  std::size_t rewrite_calls = 0;
  std::size_t retries = 0;
  std::size_t prompt_tokens = 0;
  std::size_t completion_tokens = 0;
  std::size_t logprob_fallbacks = 0; ///< responses without logprobs
};

/// Abstract LLM. Implementations must be safe to call concurrently.
class ModelClient {
public:
  virtual ~ModelClient() = default;

  /// Throws ClientError when the model cannot be reached.
  virtual Completion complete(const std::string &prompt, const Sample &sample,
                              const std::vector<std::string> &label_space) = 0;

  /// A paraphrase of `prompt`, or nullopt when generation failed.
  virtual std::optional<std::string> rewrite(const std::string &prompt,
                                             std::uint64_t seed) = 0;

  virtual ClientStats stats() const = 0;
};

/// Trim, lowercase and match exactly against the lowercased label space.
std::optional<std::string> normalize_label(std::string_view raw,
                                           const std::vector<std::string> &label_space);

struct PromptEvaluation {
  double accuracy = 0.0;
  std::vector<PerfRecord> records; ///< in `ids` order
};

/// Client failure during evaluation; carries the records that did complete.
class EvaluationError : public ClientError {
public:
  EvaluationError(const std::string &what, std::vector<PerfRecord> partial)
      : ClientError(what), partial_(std::move(partial)) {}
  const std::vector<PerfRecord> &partial() const { return partial_; }

private:
  std::vector<PerfRecord> partial_;
};

/// One client call per id, up to `parallelism` in flight. Results are
/// aggregated in `ids` order whatever the completion order.
PromptEvaluation evaluate_prompt(ModelClient &client, const std::string &prompt,
                                 int prompt_index, std::span<const std::string> ids,
                                 const Dataset &dataset, int parallelism = 1);

} // namespace ipomp
