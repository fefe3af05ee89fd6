#include "ipomp/embedding.hpp"

#include <cctype>
#include <cmath>
#include <fstream>

#include "ipomp/hashing.hpp"
#include "json.hpp"

namespace ipomp {

using nlohmann::json;

EmbeddingStore::EmbeddingStore(std::vector<std::string> ids, RowMatrix vectors)
    : ids_(std::move(ids)), vectors_(std::move(vectors)) {
  if (static_cast<Eigen::Index>(ids_.size()) != vectors_.rows())
    throw InputError("embedding store: id count does not match vector count");
  if (!ids_.empty() && vectors_.cols() < 1)
    throw InputError("embedding store: dimension must be positive");
  row_of_.reserve(ids_.size());
  for (Eigen::Index i = 0; i < vectors_.rows(); ++i) {
    const auto &id = ids_[static_cast<std::size_t>(i)];
    if (!row_of_.emplace(id, i).second)
      throw InputError("embedding store: duplicate id \"" + id + "\"");
    if (!vectors_.row(i).allFinite())
      throw InputError("embedding for \"" + id + "\" has a non-finite value");
    const double n = vectors_.row(i).norm();
    if (n == 0.0)
      throw InputError("embedding for \"" + id + "\" is a zero vector");
    vectors_.row(i) /= n;
  }
}

Eigen::Index EmbeddingStore::row_index(const std::string &id) const {
  auto it = row_of_.find(id);
  if (it == row_of_.end())
    throw InputError("no embedding for sample \"" + id + "\"");
  return it->second;
}

RowMatrix EmbeddingStore::gather(const std::vector<std::string> &ids) const {
  RowMatrix out(static_cast<Eigen::Index>(ids.size()), dimension());
  for (std::size_t i = 0; i < ids.size(); ++i)
    out.row(static_cast<Eigen::Index>(i)) = row(ids[i]);
  return out;
}

void EmbeddingStore::require_covers(const Dataset &dataset) const {
  for (const auto &s : dataset)
    if (!contains(s.id))
      throw InputError("no embedding for sample \"" + s.id + "\"");
}

EmbeddingStore load_embeddings(const std::filesystem::path &path,
                               const Dataset &dataset) {
  std::ifstream in(path);
  if (!in)
    throw InputError("cannot open embedding file " + path.string());
  std::vector<std::string> ids;
  std::vector<std::vector<double>> rows;
  std::string text;
  std::size_t line = 0;
  std::size_t dim = 0;
  while (std::getline(in, text)) {
    ++line;
    if (text.find_first_not_of(" \t\r") == std::string::npos)
      continue;
    json rec;
    try {
      rec = json::parse(text);
    } catch (const json::parse_error &e) {
      throw InputError("embeddings line " + std::to_string(line) + ": malformed JSON");
    }
    if (!rec.is_object() || !rec.contains("id") || !rec["id"].is_string() ||
        !rec.contains("vector") || !rec["vector"].is_array())
      throw InputError("embeddings line " + std::to_string(line) +
                       ": expected {\"id\": str, \"vector\": [...]}");
    std::vector<double> v;
    v.reserve(rec["vector"].size());
    for (const auto &x : rec["vector"]) {
      if (!x.is_number())
        throw InputError("embeddings line " + std::to_string(line) +
                         ": non-finite value");
      v.push_back(x.get<double>());
    }
    if (v.empty())
      throw InputError("embeddings line " + std::to_string(line) + ": empty vector");
    if (dim == 0)
      dim = v.size();
    else if (v.size() != dim)
      throw InputError("embeddings line " + std::to_string(line) +
                       ": dimension mismatch (" + std::to_string(v.size()) + " vs " +
                       std::to_string(dim) + ")");
    ids.push_back(rec["id"].get<std::string>());
    rows.push_back(std::move(v));
  }
  RowMatrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(dim));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < dim; ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  EmbeddingStore store(std::move(ids), std::move(m));
  store.require_covers(dataset);
  return store;
}

void save_embeddings(const EmbeddingStore &store, const std::filesystem::path &path) {
  std::ofstream out(path);
  if (!out)
    throw InputError("cannot write embedding file " + path.string());
  for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(store.size()); ++i) {
    std::vector<double> v(store.row(i).begin(), store.row(i).end());
    out << json{{"id", store.ids()[static_cast<std::size_t>(i)]}, {"vector", v}}.dump()
        << '\n';
  }
}

Eigen::VectorXd hash_embed_text(const std::string &text, int dimension,
                                std::uint64_t seed) {
  if (dimension < 2)
    throw InputError("hash_embed: dimension must be >= 2");
  Eigen::VectorXd v = Eigen::VectorXd::Zero(dimension);
  std::string token;
  auto flush = [&] {
    if (token.empty())
      return;
    const std::uint64_t h = splitmix64(fnv1a64(token) ^ splitmix64(seed));
    const auto bucket = static_cast<Eigen::Index>(h % static_cast<std::uint64_t>(dimension));
    v[bucket] += (h >> 63) ? -1.0 : 1.0;
    token.clear();
  };
  for (unsigned char c : text) {
    if (std::isalnum(c))
      token.push_back(static_cast<char>(std::tolower(c)));
    else
      flush();
  }
  flush();
  const double n = v.norm();
  if (n == 0.0)
    throw InputError("hash_embed: text hashes to a zero vector");
  return v / n;
}

EmbeddingStore hash_embed(const Dataset &dataset, int dimension, std::uint64_t seed) {
  RowMatrix m(static_cast<Eigen::Index>(dataset.size()), dimension);
  std::vector<std::string> ids;
  ids.reserve(dataset.size());
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const auto &s = dataset[i];
    try {
      m.row(static_cast<Eigen::Index>(i)) = hash_embed_text(s.input, dimension, seed).transpose();
    } catch (const InputError &) {
      throw InputError("hash_embed: sample \"" + s.id + "\" hashes to a zero vector");
    }
    ids.push_back(s.id);
  }
  return EmbeddingStore(std::move(ids), std::move(m));
}

} // namespace ipomp
