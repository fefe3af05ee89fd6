#include "ipomp/optimizer.hpp"

#include <algorithm>
#include <iostream>
#include <set>

#include "ipomp/hashing.hpp"

namespace ipomp {

namespace {

bool ranks_before(const PromptCandidate &a, const PromptCandidate &b) {
  if (*a.score != *b.score)
    return *a.score > *b.score;
  return a.text < b.text;
}

void warn(std::vector<std::string> *sink, std::string msg) {
  std::clog << "warning: " << msg << '\n';
  if (sink)
    sink->push_back(std::move(msg));
}

// Refill `out` with variants of out[0 .. parents) up to `target`.
bool refill(std::vector<PromptCandidate> &out, std::size_t parents, std::size_t target,
            std::uint64_t seed, int attempts, ModelClient &client,
            std::vector<std::string> *warnings) {
  std::set<std::string> texts;
  for (const auto &c : out)
    texts.insert(c.text);
  for (std::size_t slot = 0; out.size() < target; ++slot) {
    const std::size_t parent = slot % parents;
    std::optional<std::string> variant;
    for (int a = 0; a <= attempts; ++a) {
      std::optional<std::string> v;
      try {
        v = client.rewrite(out[parent].text, mix_seed(seed, slot * 64 + static_cast<std::size_t>(a)));
      } catch (const ClientError &e) {
        warn(warnings, std::string("prompt generation failed: ") + e.what());
        return false;
      }
      if (!v || v->empty()) {
        warn(warnings, "prompt generation returned nothing");
        return false;
      }
      variant = std::move(v);
      if (!texts.count(*variant))
        break;
    }
    texts.insert(*variant);
    out.push_back({*variant, std::nullopt, parent});
  }
  return true;
}

} // namespace

std::vector<PromptCandidate> ape_update(int iteration, const std::vector<PromptCandidate> &scored,
                                        const ApeConfig &cfg, ModelClient &client,
                                        std::vector<std::string> *warnings) {
  if (scored.empty())
    throw InputError("ape_update: need at least one scored candidate");
  for (const auto &c : scored)
    if (!c.score)
      throw InputError("ape_update: candidate \"" + c.text + "\" has no score");

  auto ranked = scored;
  std::stable_sort(ranked.begin(), ranked.end(), ranks_before);
  const std::size_t keep = (ranked.size() + 1) / 2;
  std::vector<PromptCandidate> out;
  out.reserve(std::max(cfg.population, keep));
  for (std::size_t i = 0; i < keep; ++i)
    out.push_back({ranked[i].text, std::nullopt, std::nullopt});

  const auto seed = mix_seed(cfg.seed, static_cast<std::uint64_t>(iteration) + 1);
  std::vector<PromptCandidate> survivors = out;
  if (!refill(out, keep, std::max(cfg.population, keep), seed, cfg.dedupe_attempts, client,
              warnings))
    return survivors;
  return out;
}

std::vector<PromptCandidate> ApeOptimizer::generate(std::size_t count) {
  std::vector<PromptCandidate> out{{cfg_.initial_prompt, std::nullopt, std::nullopt}};
  if (count > 1)
    refill(out, 1, count, mix_seed(cfg_.seed, "initial"), cfg_.dedupe_attempts, client_,
           &warnings_);
  return out;
}

std::vector<PromptCandidate>
ApeOptimizer::update_prompts(int iteration, const std::vector<PromptCandidate> &scored) {
  if (scored.empty())
    return generate(cfg_.population);
  return ape_update(iteration, scored, cfg_, client_, &warnings_);
}

PromptCandidate identify_best(const std::vector<PromptCandidate> &candidates) {
  if (candidates.empty())
    throw InputError("identify_best: no candidates");
  for (const auto &c : candidates)
    if (!c.score)
      throw InputError("identify_best: candidate \"" + c.text + "\" has no score");
  return *std::min_element(candidates.begin(), candidates.end(), ranks_before);
}

} // namespace ipomp
