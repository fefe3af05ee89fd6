#include "ipomp/model.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <exception>
#include <thread>

namespace ipomp {

namespace {

std::string lower_trimmed(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos)
    return {};
  auto e = s.find_last_not_of(" \t\r\n");
  std::string out(s.substr(b, e - b + 1));
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

} // namespace

std::optional<std::string> normalize_label(std::string_view raw,
                                           const std::vector<std::string> &label_space) {
  const auto norm = lower_trimmed(raw);
  for (const auto &l : label_space)
    if (lower_trimmed(l) == norm)
      return l;
  return std::nullopt;
}

PromptEvaluation evaluate_prompt(ModelClient &client, const std::string &prompt,
                                 int prompt_index, std::span<const std::string> ids,
                                 const Dataset &dataset, int parallelism) {
  for (const auto &id : ids)
    if (!dataset.contains(id))
      throw InputError("evaluation id \"" + id + "\" is not in the dataset");

  const std::size_t n = ids.size();
  std::vector<std::optional<Completion>> results(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        results[i] = client.complete(prompt, dataset.at(ids[i]), dataset.label_space());
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const auto threads = static_cast<std::size_t>(std::clamp(parallelism, 1, 64));
  if (threads == 1 || n < 2) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < std::min(threads, n); ++t)
      pool.emplace_back(worker);
  }

  PromptEvaluation out;
  std::size_t correct = 0;
  std::exception_ptr first_error;
  for (std::size_t i = 0; i < n; ++i) {
    if (errors[i]) {
      if (!first_error)
        first_error = errors[i];
      continue;
    }
    const auto &c = *results[i];
    out.records.push_back({ids[i], prompt_index, c.label, c.logit});
    if (c.label && *c.label == dataset.at(ids[i]).label)
      ++correct;
  }
  if (first_error) {
    std::string what = "model client failed";
    try {
      std::rethrow_exception(first_error);
    } catch (const std::exception &e) {
      what = e.what();
    } catch (...) {
    }
    throw EvaluationError(what, std::move(out.records));
  }
  out.accuracy = n == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(n);
  return out;
}

} // namespace ipomp
