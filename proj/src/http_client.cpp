#include "ipomp/http_client.hpp"

#include <cmath>
#include <cstdlib>
#include <iostream>
#include <thread>

#include "httplib.h"

namespace ipomp {

using nlohmann::json;

namespace {

std::string join_labels(const std::vector<std::string> &labels) {
  std::string out;
  for (const auto &l : labels)
    out += (out.empty() ? "" : ", ") + l;
  return out;
}


} // namespace

HttpChatClient::HttpChatClient(HttpClientConfig cfg) : cfg_(std::move(cfg)) {
  if (const char *key = std::getenv(cfg_.api_key_env.c_str()))
    api_key_ = key;
  const auto scheme = cfg_.base_url.find("://");
  if (scheme == std::string::npos)
    throw InputError("endpoint must look like http[s]://host[:port][/prefix], got \"" +
                     cfg_.base_url + "\"");
  const auto slash = cfg_.base_url.find('/', scheme + 3);
  origin_ = cfg_.base_url.substr(0, slash);
  std::string prefix = slash == std::string::npos ? "" : cfg_.base_url.substr(slash);
  while (!prefix.empty() && prefix.back() == '/')
    prefix.pop_back();
  path_ = prefix + "/chat/completions";
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
  if (origin_.rfind("https://", 0) == 0)
    throw InputError("this build has no HTTPS support; use an http:// endpoint");
#endif
}

HttpChatClient::~HttpChatClient() = default;

json HttpChatClient::classification_request(const std::string &prompt, const Sample &sample,
                                            const std::vector<std::string> &label_space) const {
  return json{
      {"model", cfg_.model},
      {"temperature", 0},
      {"max_tokens", cfg_.max_tokens},
      {"logprobs", true},
      {"messages",
       json::array({json{{"role", "system"},
                         {"content", prompt + "\nRespond with exactly one of: " +
                                         join_labels(label_space) + "."}},
                    json{{"role", "user"}, {"content", sample.input}}})}};
}

Completion HttpChatClient::parse_classification(const json &response,
                                                const std::vector<std::string> &label_space) const {
  Completion c;
  try {
    const auto &choice = response.at("choices").at(0);
    const auto text = choice.at("message").at("content").get<std::string>();
    c.label = normalize_label(text, label_space);
    const auto lp = choice.find("logprobs");
    if (lp != choice.end() && lp->is_object() && lp->contains("content") &&
        (*lp)["content"].is_array() && !(*lp)["content"].empty()) {
      c.logit = (*lp)["content"][0].at("logprob").get<double>();
    } else {
      // No logprobs: the label position still carries the prediction.
      c.logit = 0.0;
      ++fallbacks_;
    }
  } catch (const json::exception &) {
    c.label.reset();
    c.logit = 0.0;
  }
  if (!std::isfinite(c.logit))
    c.logit = 0.0;
  return c;
}

json HttpChatClient::post(const json &body) {
  const auto payload = body.dump();
  auto backoff = cfg_.initial_backoff;
  std::string last_error;
  for (int attempt = 1; attempt <= std::max(1, cfg_.max_attempts); ++attempt) {
    if (attempt > 1) {
      ++retries_;
      std::this_thread::sleep_for(backoff);
      backoff *= 2;
    }
    httplib::Client http(origin_);
    http.set_connection_timeout(cfg_.timeout);
    http.set_read_timeout(cfg_.timeout);
    httplib::Headers headers;
    if (!api_key_.empty())
      headers.emplace("Authorization", "Bearer " + api_key_);
    if (cfg_.verbose)
      std::clog << "POST " << origin_ << path_ << " Authorization: Bearer ***\n"
                << payload << '\n';
    auto res = http.Post(path_, headers, payload, "application/json");
    if (!res) {
      last_error = "transport error: " + httplib::to_string(res.error());
      continue;
    }
    if (cfg_.verbose)
      std::clog << "HTTP " << res->status << '\n' << res->body << '\n';
    if (res->status == 429 || res->status >= 500) {
      last_error = "HTTP " + std::to_string(res->status);
      continue;
    }
    if (res->status >= 400)
      throw ClientError("chat endpoint rejected the request: HTTP " +
                        std::to_string(res->status) + " " + res->body);
    try {
      return json::parse(res->body);
    } catch (const json::parse_error &) {
      return json::object(); // malformed; caller treats as absent label
    }
  }
  throw ClientError("chat endpoint unavailable after " + std::to_string(cfg_.max_attempts) +
                    " attempts (" + last_error + ")");
}

Completion HttpChatClient::complete(const std::string &prompt, const Sample &sample,
                                    const std::vector<std::string> &label_space) {
  const auto response = post(classification_request(prompt, sample, label_space));
  ++calls_;
  if (response.contains("usage") && response["usage"].is_object()) {
    prompt_tokens_ += response["usage"].value("prompt_tokens", std::size_t{0});
    completion_tokens_ += response["usage"].value("completion_tokens", std::size_t{0});
  }
  return parse_classification(response, label_space);
}

std::optional<std::string> HttpChatClient::rewrite(const std::string &prompt,
                                                   std::uint64_t seed) {
  json body{{"model", cfg_.model},
            {"temperature", cfg_.rewrite_temperature},
            {"seed", seed % 2147483647ULL},
            {"max_tokens", 256},
            {"messages",
             json::array({json{{"role", "user"},
                               {"content", "Generate a variation of the following instruction "
                                           "while keeping the semantic meaning.\n\nInput: " +
                                               prompt + "\n\nOutput:"}}})}};
  const auto response = post(body);
  ++rewrites_;
  try {
    auto text = response.at("choices").at(0).at("message").at("content").get<std::string>();
    const auto b = text.find_first_not_of(" \t\r\n");
    if (b == std::string::npos)
      return std::nullopt;
    text = text.substr(b, text.find_last_not_of(" \t\r\n") - b + 1);
    return text;
  } catch (const json::exception &) {
    return std::nullopt;
  }
}

ClientStats HttpChatClient::stats() const {
  ClientStats s;
  s.calls = calls_;
  s.rewrite_calls = rewrites_;
  s.retries = retries_;
  s.prompt_tokens = prompt_tokens_;
  s.completion_tokens = completion_tokens_;
  s.logprob_fallbacks = fallbacks_;
  return s;
}

} // namespace ipomp
