#include "ipomp/perf.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <unordered_map>

#include "ipomp/error.hpp"

namespace ipomp {

void RedundancyConfig::validate() const {
  if (!(ct > 0.0 && ct <= 1.0))
    throw InputError("correlation threshold CT must lie in (0, 1]");
  if (!(beta >= 0.0 && beta <= 1.0))
    throw InputError("replace rate beta must lie in [0, 1]");
}

Eigen::RowVectorXd encode_block(const std::vector<std::string> &label_space,
                                const PerfRecord &record) {
  Eigen::RowVectorXd block = Eigen::RowVectorXd::Zero(static_cast<Eigen::Index>(label_space.size()));
  if (!record.predicted_label)
    return block;
  auto it = std::find(label_space.begin(), label_space.end(), *record.predicted_label);
  if (it != label_space.end())
    block[it - label_space.begin()] = record.logit;
  return block;
}

PerfMatrix build_matrix(const std::vector<PerfRecord> &records,
                        const std::vector<std::string> &eval_ids,
                        const std::vector<std::string> &label_space, int num_prompts) {
  if (num_prompts < 1)
    throw InputError("build_matrix: need at least one prompt");
  const auto width = static_cast<Eigen::Index>(label_space.size());
  std::unordered_map<std::string, Eigen::Index> row_of;
  for (std::size_t i = 0; i < eval_ids.size(); ++i)
    row_of.emplace(eval_ids[i], static_cast<Eigen::Index>(i));

  PerfMatrix m;
  m.ids = eval_ids;
  m.label_space = label_space;
  m.num_prompts = num_prompts;
  m.values = RowMatrix::Zero(static_cast<Eigen::Index>(eval_ids.size()), width * num_prompts);
  std::vector<bool> seen(eval_ids.size() * static_cast<std::size_t>(num_prompts), false);

  for (const auto &r : records) {
    auto it = row_of.find(r.sample_id);
    if (it == row_of.end())
      throw InputError("build_matrix: record for sample \"" + r.sample_id +
                       "\" outside the evaluation set");
    if (r.prompt_index < 0 || r.prompt_index >= num_prompts)
      throw InputError("build_matrix: prompt index " + std::to_string(r.prompt_index) +
                       " out of range");
    const auto slot = static_cast<std::size_t>(it->second) * static_cast<std::size_t>(num_prompts) +
                      static_cast<std::size_t>(r.prompt_index);
    if (seen[slot])
      throw InputError("build_matrix: duplicate record for (sample \"" + r.sample_id +
                       "\", prompt " + std::to_string(r.prompt_index) + ")");
    seen[slot] = true;
    m.values.block(it->second, r.prompt_index * width, 1, width) = encode_block(label_space, r);
  }
  for (std::size_t i = 0; i < eval_ids.size(); ++i)
    for (int p = 0; p < num_prompts; ++p)
      if (!seen[i * static_cast<std::size_t>(num_prompts) + static_cast<std::size_t>(p)])
        throw InputError("build_matrix: missing record for (sample \"" + eval_ids[i] +
                         "\", prompt " + std::to_string(p) + ")");
  return m;
}

CorrMatrix pairwise_correlation(const PerfMatrix &matrix) {
  return {matrix.ids, pearson_rows(matrix.values)};
}

std::vector<std::vector<std::string>> redundancy_clusters(const CorrMatrix &corr, double ct) {
  const auto n = static_cast<std::size_t>(corr.values.rows());
  // Working in correlation space: complete linkage distance 1 - min corr,
  // cut at 1 - ct, is the same as merging while min corr >= ct.
  std::vector<std::vector<std::size_t>> clusters(n);
  for (std::size_t i = 0; i < n; ++i)
    clusters[i] = {i};
  auto min_id = [&](const std::vector<std::size_t> &c) -> const std::string & {
    const std::string *best = &corr.ids[c.front()];
    for (auto i : c)
      if (corr.ids[i] < *best)
        best = &corr.ids[i];
    return *best;
  };

  // linkage[a][b] = min correlation between clusters a and b
  Eigen::MatrixXd link = corr.values;
  std::vector<bool> alive(n, true);
  while (true) {
    double best = -std::numeric_limits<double>::infinity();
    std::size_t ba = 0, bb = 0;
    bool found = false;
    for (std::size_t a = 0; a < n; ++a) {
      if (!alive[a])
        continue;
      for (std::size_t b = a + 1; b < n; ++b) {
        if (!alive[b])
          continue;
        const double l = link(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
        if (l < ct)
          continue;
        bool take = !found || l > best;
        if (found && l == best) {
          auto key = [&](std::size_t x, std::size_t y) {
            const auto &mx = min_id(clusters[x]);
            const auto &my = min_id(clusters[y]);
            return mx < my ? std::pair{mx, my} : std::pair{my, mx};
          };
          take = key(a, b) < key(ba, bb);
        }
        if (take) {
          best = l;
          ba = a;
          bb = b;
          found = true;
        }
      }
    }
    if (!found)
      break;
    clusters[ba].insert(clusters[ba].end(), clusters[bb].begin(), clusters[bb].end());
    clusters[bb].clear();
    alive[bb] = false;
    for (std::size_t c = 0; c < n; ++c) {
      if (!alive[c] || c == ba)
        continue;
      const auto ia = static_cast<Eigen::Index>(ba), ib = static_cast<Eigen::Index>(bb),
                 ic = static_cast<Eigen::Index>(c);
      const double l = std::min(link(ia, ic), link(ib, ic));
      link(ia, ic) = l;
      link(ic, ia) = l;
    }
  }

  std::vector<std::vector<std::string>> out;
  for (std::size_t a = 0; a < n; ++a) {
    if (!alive[a])
      continue;
    std::vector<std::string> members;
    for (auto i : clusters[a])
      members.push_back(corr.ids[i]);
    std::sort(members.begin(), members.end());
    out.push_back(std::move(members));
  }
  std::sort(out.begin(), out.end(),
            [](const auto &x, const auto &y) { return x.front() < y.front(); });
  return out;
}

std::set<std::string> sample_redundant(const std::vector<std::vector<std::string>> &clusters,
                                       const RedundancyConfig &cfg) {
  cfg.validate();
  std::mt19937_64 rng(cfg.seed);
  std::set<std::string> out;
  for (const auto &c : clusters) {
    if (c.size() < 2)
      continue;
    // The 1e-9 guard keeps beta * (s - 1) that is integral in exact
    // arithmetic from rounding up.
    const auto take = static_cast<std::size_t>(
        std::ceil(cfg.beta * static_cast<double>(c.size() - 1) - 1e-9));
    if (take == 0)
      continue;
    auto members = c;
    std::shuffle(members.begin(), members.end(), rng);
    out.insert(members.begin(), members.begin() + static_cast<std::ptrdiff_t>(take));
  }
  return out;
}

double redundancy_fraction(const CorrMatrix &corr, double ct) {
  const Eigen::Index n = corr.values.rows();
  if (n == 0)
    return 0.0;
  Eigen::Index redundant = 0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      if (i != j && corr.values(i, j) > ct) {
        ++redundant;
        break;
      }
  return static_cast<double>(redundant) / static_cast<double>(n);
}

namespace {

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::vector<std::string> split_csv(const std::string &line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ','))
    out.push_back(cell);
  if (!line.empty() && line.back() == ',')
    out.emplace_back();
  return out;
}

} // namespace

void write_corr_csv(const CorrMatrix &corr, const std::filesystem::path &path) {
  std::ofstream out(path);
  if (!out)
    throw InputError("cannot write " + path.string());
  for (std::size_t i = 0; i < corr.ids.size(); ++i)
    out << (i ? "," : "") << corr.ids[i];
  out << '\n';
  for (Eigen::Index i = 0; i < corr.values.rows(); ++i) {
    for (Eigen::Index j = 0; j < corr.values.cols(); ++j)
      out << (j ? "," : "") << format_double(corr.values(i, j));
    out << '\n';
  }
}

CorrMatrix read_corr_csv(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in)
    throw InputError("cannot open " + path.string());
  std::string line;
  CorrMatrix corr;
  if (!std::getline(in, line))
    throw InputError("empty correlation file " + path.string());
  corr.ids = split_csv(line);
  const auto n = static_cast<Eigen::Index>(corr.ids.size());
  corr.values.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!std::getline(in, line))
      throw InputError("truncated correlation file " + path.string());
    auto cells = split_csv(line);
    if (static_cast<Eigen::Index>(cells.size()) != n)
      throw InputError("ragged correlation file " + path.string());
    for (Eigen::Index j = 0; j < n; ++j) {
      double v = 0.0;
      const auto &c = cells[static_cast<std::size_t>(j)];
      auto res = std::from_chars(c.data(), c.data() + c.size(), v);
      if (res.ec != std::errc())
        throw InputError("bad number in correlation file " + path.string());
      corr.values(i, j) = v;
    }
  }
  return corr;
}

} // namespace ipomp
