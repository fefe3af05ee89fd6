#pragma once

#include <atomic>
#include <chrono>
#include <memory>
#include <string>

#include "ipomp/model.hpp"
#include "json.hpp"

namespace ipomp {

struct HttpClientConfig {
  std::string base_url = "https://api.openai.com/v1"; ///< requests go to <base_url>/chat/completions
  std::string model = "gpt-3.5-turbo";
  std::string api_key_env = "OPENAI_API_KEY";
  int max_attempts = 3;
  std::chrono::milliseconds initial_backoff{500};
  std::chrono::seconds timeout{60};
  int max_tokens = 16;
  double rewrite_temperature = 0.7;
  bool verbose = false;
};

/// OpenAI-compatible chat-completions client. Classification requests run
/// at temperature 0 with logprobs enabled; the logit is the log-probability
/// of the first generated token. Transport failures and 429/5xx responses
/// are retried with exponential backoff; an unparseable answer is not
/// retried and comes back as an absent label.
class HttpChatClient final : public ModelClient {
public:
  explicit HttpChatClient(HttpClientConfig cfg);
  ~HttpChatClient() override;

  Completion complete(const std::string &prompt, const Sample &sample,
                      const std::vector<std::string> &label_space) override;
  std::optional<std::string> rewrite(const std::string &prompt, std::uint64_t seed) override;
  ClientStats stats() const override;

  /// Request body for a classification call (exposed for tests).
  nlohmann::json classification_request(const std::string &prompt, const Sample &sample,
                                        const std::vector<std::string> &label_space) const;

  /// Interprets a chat-completions response body.
  Completion parse_classification(const nlohmann::json &response,
                                  const std::vector<std::string> &label_space) const;

private:
  nlohmann::json post(const nlohmann::json &body);

  HttpClientConfig cfg_;
  std::string api_key_;
  std::string origin_; ///< scheme://host[:port]
  std::string path_;   ///< path prefix + /chat/completions
  std::atomic<std::size_t> calls_{0};
  std::atomic<std::size_t> rewrites_{0};
  std::atomic<std::size_t> retries_{0};
  std::atomic<std::size_t> prompt_tokens_{0};
  std::atomic<std::size_t> completion_tokens_{0};
  mutable std::atomic<std::size_t> fallbacks_{0};
};

} // namespace ipomp
