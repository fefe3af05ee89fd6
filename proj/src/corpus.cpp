#include "ipomp/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include "ipomp/error.hpp"
#include "json.hpp"

namespace ipomp {

using nlohmann::json;

Dataset::Dataset(std::string name, std::vector<Sample> samples,
                 std::vector<std::string> label_space)
    : name_(std::move(name)) {
  if (samples.empty())
    throw InputError("empty dataset");
  if (label_space.size() < 2)
    throw InputError("label space needs at least 2 labels, got " +
                     std::to_string(label_space.size()));
  std::set<std::string> seen_labels;
  for (const auto &l : label_space)
    if (!seen_labels.insert(l).second)
      throw InputError("duplicate label in label space: \"" + l + "\"");

  auto by_id = std::make_shared<std::unordered_map<std::string, std::size_t>>();
  by_id->reserve(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto &s = samples[i];
    if (s.id.empty())
      throw InputError("sample at position " + std::to_string(i) + " has an empty id");
    if (!by_id->emplace(s.id, i).second)
      throw InputError("duplicate sample id \"" + s.id + "\"");
    if (!seen_labels.count(s.label))
      throw InputError("sample \"" + s.id + "\" has label \"" + s.label +
                       "\" outside the label space");
  }

  view_.resize(samples.size());
  for (std::size_t i = 0; i < view_.size(); ++i)
    view_[i] = i;
  present_.assign(samples.size(), true);
  storage_ = std::make_shared<const std::vector<Sample>>(std::move(samples));
  label_space_ = std::make_shared<const std::vector<std::string>>(std::move(label_space));
  by_id_ = std::move(by_id);
}

bool Dataset::contains(const std::string &id) const {
  if (!by_id_)
    return false;
  auto it = by_id_->find(id);
  return it != by_id_->end() && present_[it->second];
}

const Sample &Dataset::at(const std::string &id) const {
  if (!contains(id))
    throw InputError("unknown sample id \"" + id + "\"");
  return (*storage_)[by_id_->at(id)];
}

std::vector<std::string> Dataset::ids() const {
  std::vector<std::string> out;
  out.reserve(view_.size());
  for (auto i : view_)
    out.push_back((*storage_)[i].id);
  return out;
}

int Dataset::label_index(const std::string &label) const {
  const auto &ls = label_space();
  auto it = std::find(ls.begin(), ls.end(), label);
  return it == ls.end() ? -1 : static_cast<int>(it - ls.begin());
}

Dataset Dataset::remove(const std::unordered_set<std::string> &ids) const {
  for (const auto &id : ids)
    if (!contains(id))
      throw InputError("cannot remove unknown sample id \"" + id + "\"");
  if (ids.empty())
    return *this;
  Dataset out = *this;
  out.view_.clear();
  for (auto i : view_) {
    if (ids.count((*storage_)[i].id))
      out.present_[i] = false;
    else
      out.view_.push_back(i);
  }
  return out;
}

Dataset remove_samples(const Dataset &dataset,
                       const std::unordered_set<std::string> &ids) {
  return dataset.remove(ids);
}

namespace {

std::string field(const json &rec, const char *key, std::size_t line) {
  auto it = rec.find(key);
  if (it == rec.end() || !it->is_string())
    throw InputError("line " + std::to_string(line) + ": missing string field \"" +
                     key + "\"");
  return it->get<std::string>();
}

} // namespace

Dataset load_dataset(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in)
    throw InputError("cannot open dataset file " + path.string());

  std::vector<Sample> samples;
  std::vector<std::string> declared;
  bool have_declared = false;
  std::string text;
  std::size_t line = 0;
  bool first_record = true;
  while (std::getline(in, text)) {
    ++line;
    if (text.find_first_not_of(" \t\r") == std::string::npos)
      continue;
    json rec;
    try {
      rec = json::parse(text);
    } catch (const json::parse_error &e) {
      throw InputError("line " + std::to_string(line) + ": malformed JSON (" +
                       e.what() + ")");
    }
    if (!rec.is_object())
      throw InputError("line " + std::to_string(line) + ": expected a JSON object");
    if (first_record && rec.contains("label_space")) {
      const auto &ls = rec["label_space"];
      if (!ls.is_array())
        throw InputError("line " + std::to_string(line) + ": label_space must be an array");
      for (const auto &l : ls) {
        if (!l.is_string())
          throw InputError("line " + std::to_string(line) +
                           ": label_space entries must be strings");
        declared.push_back(l.get<std::string>());
      }
      have_declared = true;
      first_record = false;
      continue;
    }
    first_record = false;
    samples.push_back({field(rec, "id", line), field(rec, "input", line),
                       field(rec, "label", line)});
  }
  if (samples.empty())
    throw InputError("empty dataset");

  if (!have_declared) {
    std::set<std::string> labels;
    for (const auto &s : samples)
      labels.insert(s.label);
    declared.assign(labels.begin(), labels.end());
  }
  auto name = path.stem().string();
  return Dataset(std::move(name), std::move(samples), std::move(declared));
}

void save_dataset(const Dataset &dataset, const std::filesystem::path &path) {
  std::ofstream out(path);
  if (!out)
    throw InputError("cannot write dataset file " + path.string());
  out << json{{"label_space", dataset.label_space()}}.dump() << '\n';
  for (const auto &s : dataset)
    out << json{{"id", s.id}, {"input", s.input}, {"label", s.label}}.dump() << '\n';
}

} // namespace ipomp
