#include "lofdrf/prune.hpp"

#include <algorithm>

#include "lofdrf/error.hpp"
#include "lofdrf/io.hpp"
#include "lofdrf/lof.hpp"
#include "lofdrf/parallel.hpp"

namespace lofdrf {
namespace {

void check_schema_match(const Forest& f, const Dataset& d) {
  const Schema& s = f.schema;
  bool ok = d.n_features() == s.features.size() && d.class_labels == s.class_labels;
  if (ok) {
    for (size_t i = 0; i < s.features.size(); ++i) {
      if (d.features[i].kind != s.features[i].kind) {
        ok = false;
        break;
      }
    }
  }
  if (!ok) throw InputError("dataset does not match forest schema");
}

}  // namespace

std::vector<WeightedTree> weight_trees(const Forest& f, const Dataset& train, size_t k_lof,
                                       size_t threads) {
  size_t n = f.size();
  if (n < 2 || k_lof < 1 || k_lof > n - 1) throw InputError("k_lof out of range");
  check_schema_match(f, train);
  size_t rows = train.n_rows();
  if (rows == 0) throw InputError("empty dataset");

  std::vector<std::vector<int32_t>> preds(n);
  parallel_for(n, threads, [&](size_t i) { preds[i] = prediction_vector(f.trees[i], train); });

  std::vector<double> dist(n * n, 0.0);
  parallel_for(n, threads, [&](size_t i) {
    for (size_t j = i + 1; j < n; ++j) {
      double d = prediction_distance(preds[i], preds[j]);
      dist[i * n + j] = d;
      dist[j * n + i] = d;
    }
  });

  PointSet ps{n, [&dist, n](size_t a, size_t b) { return dist[a * n + b]; }};
  std::vector<double> raw = compute_lof(ps, k_lof, threads);
  std::vector<double> norm = normalize_scores(raw);

  std::vector<WeightedTree> out(n);
  for (size_t i = 0; i < n; ++i) {
    size_t correct = 0;
    for (size_t r = 0; r < rows; ++r) correct += (preds[i][r] == train.labels[r]);
    double acc = double(correct) / double(rows);
    out[i] = {i, raw[i], norm[i], acc, norm[i] * acc};
  }
  return out;
}

PrunedForest select_top_k(const Forest& parent, std::span<const WeightedTree> weights, size_t k,
                          bool invert_ranking) {
  size_t n = weights.size();
  if (n != parent.size()) throw InputError("weight list does not match forest size");
  if (k < 1 || k > n) throw InputError("k out of range");

  std::vector<bool> seen(n, false);
  for (const WeightedTree& w : weights) {
    if (w.tree_index >= n || seen[w.tree_index]) throw InputError("invalid weighted tree indices");
    seen[w.tree_index] = true;
  }

  std::vector<WeightedTree> order(weights.begin(), weights.end());
  std::sort(order.begin(), order.end(), [invert_ranking](const WeightedTree& a,
                                                         const WeightedTree& b) {
    if (a.weight != b.weight) return invert_ranking ? a.weight < b.weight : a.weight > b.weight;
    return a.tree_index < b.tree_index;
  });

  PrunedForest p;
  p.parent = &parent;
  p.selected.reserve(k);
  p.weights.assign(order.begin(), order.begin() + k);
  for (const WeightedTree& w : p.weights) p.selected.push_back(w.tree_index);
  return p;
}

double pruning_level(size_t parent_size, size_t child_size) {
  if (parent_size == 0) throw InputError("parent size must be positive");
  if (child_size > parent_size) throw InputError("child exceeds parent");
  return 100.0 * double(parent_size - child_size) / double(parent_size);
}

int32_t classify_pruned(const PrunedForest& p, const Dataset& d, size_t row) {
  if (p.parent == nullptr) throw RuntimeError("pruned forest has no parent");
  if (p.selected.empty()) throw InputError("empty selection");
  return majority_vote(*p.parent, p.selected, d, row);
}

void save_pruned(const PrunedForest& p, const std::filesystem::path& parent_path,
                 const std::filesystem::path& out_path) {
  if (p.selected.empty() || p.selected.size() != p.weights.size()) {
    throw InputError("empty selection");
  }
  std::vector<uint8_t> parent_bytes = read_binary_file(parent_path);
  {
    ByteReader r(parent_bytes);
    if (r.u32() != kModelMagic || r.u32() != kModelVersion || r.u8() != kModelKindForest) {
      throw InputError("parent path does not point at a forest model file");
    }
  }

  std::filesystem::path base = out_path.parent_path();
  if (base.empty()) base = ".";
  std::error_code ec;
  std::filesystem::path rec = std::filesystem::relative(parent_path, base, ec);
  if (ec || rec.empty()) rec = std::filesystem::absolute(parent_path);

  ByteWriter w;
  w.u32(kModelMagic);
  w.u32(kModelVersion);
  w.u8(kModelKindPruned);
  w.str(rec.generic_string());
  w.u64(fnv1a64(parent_bytes));
  w.u64(p.selected.size());
  for (const WeightedTree& t : p.weights) {
    w.u64(t.tree_index);
    w.f64(t.raw_lof);
    w.f64(t.normalized_lof);
    w.f64(t.accuracy);
    w.f64(t.weight);
  }
  write_binary_file(out_path, w.bytes());
}

PrunedModel load_pruned(const std::filesystem::path& path) {
  std::vector<uint8_t> bytes = read_binary_file(path);
  ByteReader r(bytes);
  if (r.u32() != kModelMagic) throw InputError("not a lofdrf model file");
  uint32_t version = r.u32();
  if (version != kModelVersion) {
    throw InputError("unsupported model version: " + std::to_string(version));
  }
  if (r.u8() != kModelKindPruned) {
    throw InputError("file is a forest model; expected a pruned model");
  }

  PrunedModel m;
  std::filesystem::path rec = r.str();
  m.parent_hash = r.u64();
  uint64_t count = r.u64();
  if (count == 0 || count > uint64_t(INT32_MAX)) {
    throw InputError("corrupt model file: bad selection count");
  }
  m.pruned.selected.reserve(size_t(count));
  m.pruned.weights.reserve(size_t(count));
  for (uint64_t i = 0; i < count; ++i) {
    WeightedTree t;
    t.tree_index = size_t(r.u64());
    t.raw_lof = r.f64();
    t.normalized_lof = r.f64();
    t.accuracy = r.f64();
    t.weight = r.f64();
    m.pruned.selected.push_back(t.tree_index);
    m.pruned.weights.push_back(t);
  }
  if (!r.at_end()) throw InputError("corrupt model file: trailing bytes");

  m.parent_path = rec;
  if (rec.is_relative()) {
    std::filesystem::path beside = path.parent_path() / rec;
    if (std::filesystem::exists(beside)) {
      m.parent_path = beside;
    }
  }
  if (!std::filesystem::exists(m.parent_path)) {
    throw InputError("parent forest file not found: " + rec.generic_string());
  }

  std::vector<uint8_t> parent_bytes = read_binary_file(m.parent_path);
  if (fnv1a64(parent_bytes) != m.parent_hash) {
    throw InputError("parent forest hash mismatch: " + m.parent_path.generic_string());
  }
  m.parent = std::make_shared<Forest>(forest_from_bytes(parent_bytes));
  m.pruned.parent = m.parent.get();

  std::vector<bool> seen(m.parent->size(), false);
  for (size_t idx : m.pruned.selected) {
    if (idx >= m.parent->size() || seen[idx]) {
      throw InputError("corrupt model file: selection does not match parent forest");
    }
    seen[idx] = true;
  }
  return m;
}

}  // namespace lofdrf
