#pragma once

#include <cstddef>
#include <filesystem>
#include <memory>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace ipomp {

/// One labeled task instance.
struct Sample {
  std::string id;
  std::string input;
  std::string label;
};

/// An immutable, ordered collection of samples over a fixed label space.
///
/// Removing samples yields a new view that shares the underlying storage,
/// so repeatedly shrinking a training pool never copies sample text.
class Dataset {
public:
  Dataset() = default;

  /// Validates ids (non-empty, distinct), the label space (>= 2 distinct
  /// entries) and label membership. An empty sample list is rejected.
  Dataset(std::string name, std::vector<Sample> samples,
          std::vector<std::string> label_space);

  const std::string &name() const { return name_; }
  const std::vector<std::string> &label_space() const { return *label_space_; }

  std::size_t size() const { return view_.size(); }
  bool empty() const { return view_.empty(); }

  const Sample &operator[](std::size_t i) const { return (*storage_)[view_[i]]; }

  bool contains(const std::string &id) const;
  /// Throws InputError for unknown ids.
  const Sample &at(const std::string &id) const;

  /// Sample ids in dataset order.
  std::vector<std::string> ids() const;

  /// Position of `label` within the label space, or -1.
  int label_index(const std::string &label) const;

  /// Returns the dataset without `ids`; survivors keep their relative order.
  Dataset remove(const std::unordered_set<std::string> &ids) const;

  class const_iterator;
  const_iterator begin() const;
  const_iterator end() const;

private:
  std::string name_;
  std::shared_ptr<const std::vector<Sample>> storage_;
  std::shared_ptr<const std::vector<std::string>> label_space_;
  std::shared_ptr<const std::unordered_map<std::string, std::size_t>> by_id_;
  std::vector<std::size_t> view_;
  std::vector<bool> present_;
};

class Dataset::const_iterator {
public:
  using iterator_category = std::forward_iterator_tag;
  using value_type = Sample;
  using difference_type = std::ptrdiff_t;
  using pointer = const Sample *;
  using reference = const Sample &;

  const_iterator() = default;
  const_iterator(const Dataset *d, std::size_t i) : d_(d), i_(i) {}
  reference operator*() const { return (*d_)[i_]; }
  pointer operator->() const { return &(*d_)[i_]; }
  const_iterator &operator++() {
    ++i_;
    return *this;
  }
  const_iterator operator++(int) {
    auto t = *this;
    ++i_;
    return t;
  }
  bool operator==(const const_iterator &o) const { return i_ == o.i_; }

private:
  const Dataset *d_ = nullptr;
  std::size_t i_ = 0;
};

inline Dataset::const_iterator Dataset::begin() const { return {this, 0}; }
inline Dataset::const_iterator Dataset::end() const { return {this, size()}; }

/// Parse a JSONL dataset file. The first line may declare
/// {"label_space": [...]}; otherwise the label space is the sorted set of
/// observed labels.
Dataset load_dataset(const std::filesystem::path &path);

/// Writes the explicit label-space header followed by one record per line.
void save_dataset(const Dataset &dataset, const std::filesystem::path &path);

/// Throws InputError naming the first unknown id.
Dataset remove_samples(const Dataset &dataset,
                       const std::unordered_set<std::string> &ids);

} // namespace ipomp
