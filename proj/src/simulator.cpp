#include "ipomp/simulator.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include "ipomp/hashing.hpp"

namespace ipomp {

namespace {

std::vector<std::string> words_of(const std::string &text) {
  std::vector<std::string> out;
  std::string cur;
  for (unsigned char c : text) {
    if (std::isalnum(c)) {
      cur.push_back(static_cast<char>(std::tolower(c)));
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty())
    out.push_back(std::move(cur));
  return out;
}

std::vector<std::string> split_spaces(const std::string &text) {
  std::istringstream ss(text);
  std::vector<std::string> out;
  for (std::string w; ss >> w;)
    out.push_back(w);
  return out;
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

} // namespace

const std::vector<std::string> &SimulatedModel::vocabulary() {
  static const std::vector<std::string> words = {
      "answer",   "question", "carefully", "think",    "step",      "by",
      "label",    "classify", "the",       "input",    "statement", "decide",
      "whether",  "true",     "false",     "read",     "context",   "reason",
      "briefly",  "only",     "output",    "one",      "word",      "consider",
      "meaning",  "implied",  "speaker",   "literal",  "evaluate",  "claim",
      "evidence", "judge",    "correct",   "option",   "choose",    "best",
      "explain",  "verify",   "facts",     "logic",    "precise",   "final",
      "respond",  "with",     "exactly",   "given",    "text",      "intent"};
  return words;
}

SimulatedModel::SimulatedModel(const EmbeddingStore &store, SimConfig cfg) : cfg_(cfg) {
  if (cfg_.latent_groups < 1)
    throw InputError("simulator: latent_groups must be positive");
  if (cfg_.sigma < 0.0)
    throw InputError("simulator: sigma must be non-negative");
  std::mt19937_64 rng(mix_seed(cfg_.seed, "projection"));
  std::normal_distribution<double> normal(0.0, 1.0);
  projection_.resize(cfg_.latent_groups, store.dimension());
  for (Eigen::Index i = 0; i < projection_.rows(); ++i)
    for (Eigen::Index j = 0; j < projection_.cols(); ++j)
      projection_(i, j) = normal(rng);

  traits_.reserve(store.size());
  for (std::size_t i = 0; i < store.size(); ++i)
    traits_.emplace(store.ids()[i], trait_of(store.row(static_cast<Eigen::Index>(i)).transpose()));

  std::mt19937_64 wrng(mix_seed(cfg_.seed, "landscape"));
  std::normal_distribution<double> wnormal(0.0, 0.6);
  for (const auto &w : vocabulary())
    word_weight_.emplace(w, wnormal(wrng));
}

double SimulatedModel::quality(const std::string &prompt) const {
  const auto words = words_of(prompt);
  std::set<std::string> distinct(words.begin(), words.end());
  double s = cfg_.quality_bias;
  for (const auto &w : distinct) {
    auto it = word_weight_.find(w);
    if (it != word_weight_.end())
      s += it->second;
  }
  return sigmoid(s);
}

Eigen::VectorXd SimulatedModel::prompt_weights(const std::string &prompt) const {
  std::mt19937_64 rng(mix_seed(cfg_.seed, "weights:" + prompt));
  std::normal_distribution<double> normal(0.0, cfg_.weight_scale);
  Eigen::VectorXd w(cfg_.latent_groups);
  for (Eigen::Index i = 0; i < w.size(); ++i)
    w[i] = normal(rng);
  return w;
}

Eigen::VectorXd SimulatedModel::trait_of(const Eigen::VectorXd &embedding) const {
  const Eigen::ArrayXd p = (projection_ * embedding).array();
  return (cfg_.trait_scale * (p.square() - 1.0)).matrix();
}

Eigen::VectorXd SimulatedModel::trait(const Sample &sample) const {
  auto it = traits_.find(sample.id);
  if (it != traits_.end())
    return it->second;
  return trait_of(hash_embed_text(sample.input, static_cast<int>(projection_.cols()), 0));
}

double SimulatedModel::margin(const std::string &prompt, const Sample &sample) const {
  return quality(prompt) + prompt_weights(prompt).dot(trait(sample));
}

double SimulatedModel::noise(const std::string &prompt, const Sample &sample) const {
  if (cfg_.sigma == 0.0)
    return 0.0;
  std::mt19937_64 rng(mix_seed(mix_seed(cfg_.seed, "noise:" + prompt), sample.id));
  std::normal_distribution<double> normal(0.0, cfg_.sigma);
  return normal(rng);
}

Completion SimulatedModel::complete(const std::string &prompt, const Sample &sample,
                                    const std::vector<std::string> &label_space) {
  const double z = margin(prompt, sample) + noise(prompt, sample);
  ++calls_;
  prompt_tokens_ += split_spaces(prompt).size() + split_spaces(sample.input).size();

  auto gold = std::find(label_space.begin(), label_space.end(), sample.label);
  Completion c;
  c.logit = -std::log1p(std::exp(-std::abs(z)));
  if (gold == label_space.end() || label_space.size() < 2)
    return c;
  const auto g = static_cast<std::size_t>(gold - label_space.begin());
  if (z > 0.0) {
    c.label = sample.label;
  } else {
    const auto others = label_space.size() - 1;
    const auto h = mix_seed(cfg_.seed, prompt + "\x1f" + sample.id);
    c.label = label_space[(g + 1 + h % others) % label_space.size()];
  }
  return c;
}

std::optional<std::string> SimulatedModel::rewrite(const std::string &prompt,
                                                   std::uint64_t seed) {
  ++rewrites_;
  const auto &vocab = vocabulary();
  std::mt19937_64 rng(mix_seed(mix_seed(cfg_.seed, seed), "rewrite:" + prompt));
  auto tokens = split_spaces(prompt);
  std::uniform_int_distribution<std::size_t> pick_word(0, vocab.size() - 1);
  const int edits = 1 + static_cast<int>(rng() % 2);
  for (int e = 0; e < edits; ++e) {
    const auto op = rng() % 3;
    if (tokens.empty() || op == 0) {
      std::uniform_int_distribution<std::size_t> pos(0, tokens.size());
      tokens.insert(tokens.begin() + static_cast<std::ptrdiff_t>(pos(rng)), vocab[pick_word(rng)]);
    } else if (op == 1 && tokens.size() > 1) {
      std::uniform_int_distribution<std::size_t> pos(0, tokens.size() - 1);
      tokens.erase(tokens.begin() + static_cast<std::ptrdiff_t>(pos(rng)));
    } else {
      std::uniform_int_distribution<std::size_t> pos(0, tokens.size() - 1);
      tokens[pos(rng)] = vocab[pick_word(rng)];
    }
  }
  std::string out;
  for (const auto &t : tokens)
    out += (out.empty() ? "" : " ") + t;
  return out;
}

ClientStats SimulatedModel::stats() const {
  ClientStats s;
  s.calls = calls_;
  s.rewrite_calls = rewrites_;
  s.prompt_tokens = prompt_tokens_;
  s.completion_tokens = calls_;
  return s;
}

std::string SimulatedModel::random_prompt(std::uint64_t seed, int words) const {
  const auto &vocab = vocabulary();
  std::mt19937_64 rng(mix_seed(cfg_.seed, seed));
  std::uniform_int_distribution<std::size_t> pick(0, vocab.size() - 1);
  std::string out;
  for (int i = 0; i < words; ++i)
    out += (i ? " " : "") + vocab[pick(rng)];
  return out;
}

SyntheticTask make_synthetic_task(const SyntheticConfig &cfg) {
  if (cfg.groups < 1 || cfg.dimension < 2 || cfg.labels.size() < 2 || cfg.train_size < 1)
    throw InputError("synthetic task: invalid configuration");
  std::mt19937_64 rng(mix_seed(cfg.seed, "synthetic"));
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> pick_group(0, cfg.groups - 1);
  std::uniform_int_distribution<int> pick_word(0, 19);

  const int d = cfg.dimension;
  const auto n_labels = cfg.labels.size();
  auto random_unit = [&] {
    Eigen::RowVectorXd v(d);
    for (int j = 0; j < d; ++j)
      v[j] = normal(rng);
    return Eigen::RowVectorXd(v.normalized());
  };
  // One anchor direction per label; with two labels they are antipodal.
  Eigen::MatrixXd anchors(static_cast<Eigen::Index>(n_labels), d);
  for (std::size_t l = 0; l < n_labels; ++l)
    anchors.row(static_cast<Eigen::Index>(l)) =
        (n_labels == 2 && l == 1) ? Eigen::RowVectorXd(-anchors.row(0)) : random_unit();
  Eigen::MatrixXd centres(cfg.groups, d);
  for (int g = 0; g < cfg.groups; ++g) {
    const auto label = static_cast<Eigen::Index>(static_cast<std::size_t>(g) % n_labels);
    centres.row(g) = (cfg.label_separation * anchors.row(label) + random_unit()).normalized();
  }

  const std::size_t total = cfg.train_size + cfg.test_size;
  RowMatrix vectors(static_cast<Eigen::Index>(total), d);
  std::vector<std::string> ids;
  std::vector<Sample> train, test;
  std::vector<int> train_groups;
  for (std::size_t i = 0; i < total; ++i) {
    const bool is_train = i < cfg.train_size;
    const int g = pick_group(rng);
    const bool core = unit(rng) < cfg.core_fraction;
    const double r = core ? cfg.core_radius : cfg.loose_radius;
    Eigen::RowVectorXd v = centres.row(g);
    for (int j = 0; j < d; ++j)
      v[j] += r * normal(rng) / std::sqrt(static_cast<double>(d));
    vectors.row(static_cast<Eigen::Index>(i)) = v;

    std::size_t label = static_cast<std::size_t>(g) % n_labels;
    if (unit(rng) < cfg.label_noise)
      label = (label + 1 + rng() % (n_labels - 1)) % n_labels;

    std::ostringstream text;
    text << "topic" << g;
    for (int w = 0; w < 8; ++w)
      text << " t" << g << "w" << pick_word(rng);
    char id[32];
    std::snprintf(id, sizeof id, "%s%05zu", is_train ? "tr" : "te",
                  is_train ? i : i - cfg.train_size);
    Sample s{id, text.str(), cfg.labels[label]};
    ids.push_back(s.id);
    if (is_train) {
      train.push_back(std::move(s));
      train_groups.push_back(g);
    } else {
      test.push_back(std::move(s));
    }
  }

  SyntheticTask task;
  task.train = Dataset("synthetic-train", std::move(train), cfg.labels);
  if (!test.empty())
    task.test = Dataset("synthetic-test", std::move(test), cfg.labels);
  task.store = EmbeddingStore(std::move(ids), std::move(vectors));
  task.train_groups = std::move(train_groups);
  return task;
}

} // namespace ipomp
