#include "lofdrf/forest.hpp"

#include <cmath>
#include <numeric>

#include "lofdrf/error.hpp"
#include "lofdrf/io.hpp"
#include "lofdrf/parallel.hpp"

namespace lofdrf {
namespace {

void write_schema(ByteWriter& w, const Schema& s) {
  w.u64(s.features.size());
  for (const FeatureSpec& f : s.features) {
    w.str(f.name);
    w.u8(uint8_t(f.kind));
    w.u64(f.categories.size());
    for (const auto& c : f.categories) w.str(c);
  }
  w.str(s.label_name);
  w.u64(s.class_labels.size());
  for (const auto& l : s.class_labels) w.str(l);
  w.u64(s.medians.size());
  for (double m : s.medians) w.f64(m);
}

Schema read_schema(ByteReader& r) {
  Schema s;
  uint64_t nf = r.u64();
  if (nf == 0 || nf > uint64_t(INT32_MAX)) throw InputError("corrupt model file: bad feature count");
  s.features.reserve(size_t(nf));
  for (uint64_t i = 0; i < nf; ++i) {
    FeatureSpec f;
    f.name = r.str();
    uint8_t kind = r.u8();
    if (kind > 1) throw InputError("corrupt model file: bad feature kind");
    f.kind = FeatureKind(kind);
    uint64_t nc = r.u64();
    if (nc > uint64_t(INT32_MAX)) throw InputError("corrupt model file: bad category count");
    f.categories.reserve(size_t(nc));
    for (uint64_t c = 0; c < nc; ++c) f.categories.push_back(r.str());
    s.features.push_back(std::move(f));
  }
  s.label_name = r.str();
  uint64_t nl = r.u64();
  if (nl < 2 || nl > uint64_t(INT32_MAX)) throw InputError("corrupt model file: bad label count");
  for (uint64_t i = 0; i < nl; ++i) s.class_labels.push_back(r.str());
  uint64_t nm = r.u64();
  if (nm != nf) throw InputError("corrupt model file: median table does not match features");
  for (uint64_t i = 0; i < nm; ++i) s.medians.push_back(r.f64());
  return s;
}

void validate_tree_against_schema(const DecisionTree& t, const Schema& s) {
  for (const TreeNode& n : t.nodes) {
    if (n.feature < 0) {
      if (size_t(n.label) >= s.class_labels.size()) {
        throw InputError("corrupt model file: leaf label out of range");
      }
      continue;
    }
    if (size_t(n.feature) >= s.features.size()) {
      throw InputError("corrupt model file: split feature out of range");
    }
    const FeatureSpec& f = s.features[size_t(n.feature)];
    if (n.category >= 0) {
      if (f.kind != FeatureKind::categorical || size_t(n.category) >= f.categories.size()) {
        throw InputError("corrupt model file: split category out of range");
      }
    } else if (f.kind != FeatureKind::numeric) {
      throw InputError("corrupt model file: threshold split on a categorical feature");
    }
  }
}

void check_header(ByteReader& r, uint8_t expected_kind) {
  if (r.u32() != kModelMagic) throw InputError("not a lofdrf model file");
  uint32_t version = r.u32();
  if (version != kModelVersion) {
    throw InputError("unsupported model version: " + std::to_string(version));
  }
  uint8_t kind = r.u8();
  if (kind != expected_kind) {
    throw InputError(kind == kModelKindPruned
                         ? "file is a pruned model; expected a forest model"
                         : "file is a forest model; expected a pruned model");
  }
}

}  // namespace

Forest build_forest(const Dataset& train, size_t n_trees, uint32_t s, uint64_t master_seed,
                    size_t threads) {
  if (n_trees < 1) throw InputError("forest size must be at least 1");
  if (train.n_rows() < 1) throw InputError("empty dataset");
  if (train.class_labels.size() < 2) throw InputError("degenerate labels: need at least 2 classes");
  size_t f = train.n_features();
  if (f == 0) throw InputError("no feature columns");
  if (s == 0) s = uint32_t(std::max(1.0, std::floor(std::sqrt(double(f)))));
  if (s > f) throw InputError("feature subset size exceeds feature count");
  if (has_missing_numeric(train)) {
    throw InputError("training data has missing numeric values; impute first");
  }

  Forest forest;
  forest.schema = dataset_schema(train, train_medians(train));
  forest.master_seed = master_seed;
  forest.s_per_node = s;
  forest.trees.resize(n_trees);
  parallel_for(n_trees, threads, [&](size_t i) {
    Rng rng(derive_seed(master_seed, i));
    BootstrapSample sample = bootstrap_sample(train.n_rows(), rng);
    forest.trees[i] = grow_tree(train, sample, s, rng);
  });
  return forest;
}

std::vector<int32_t> prediction_vector(const DecisionTree& t, const Dataset& d) {
  if (d.n_rows() == 0) throw InputError("empty dataset");
  std::vector<int32_t> out(d.n_rows());
  for (size_t r = 0; r < d.n_rows(); ++r) out[r] = predict_tree(t, d, r);
  return out;
}

int32_t modal_label(std::span<const int32_t> votes, size_t n_classes) {
  if (votes.empty()) throw InputError("empty ensemble");
  std::vector<size_t> counts(n_classes, 0);
  for (int32_t v : votes) {
    if (v < 0 || size_t(v) >= n_classes) throw RuntimeError("vote out of label range");
    ++counts[size_t(v)];
  }
  size_t best = 0;
  for (size_t c = 1; c < n_classes; ++c) {
    if (counts[c] > counts[best]) best = c;
  }
  return int32_t(best);
}

int32_t majority_vote(const Forest& f, std::span<const size_t> tree_indices, const Dataset& d,
                      size_t row) {
  if (tree_indices.empty()) throw InputError("empty ensemble");
  std::vector<int32_t> votes;
  votes.reserve(tree_indices.size());
  for (size_t i : tree_indices) {
    if (i >= f.size()) throw InputError("tree index out of range");
    votes.push_back(predict_tree(f.trees[i], d, row));
  }
  return modal_label(votes, f.schema.class_labels.size());
}

int32_t predict_forest(const Forest& f, const Dataset& d, size_t row) {
  if (f.trees.empty()) throw InputError("empty ensemble");
  std::vector<int32_t> votes;
  votes.reserve(f.size());
  for (const DecisionTree& t : f.trees) votes.push_back(predict_tree(t, d, row));
  return modal_label(votes, f.schema.class_labels.size());
}

std::vector<double> vote_fractions(const Forest& f, std::span<const size_t> tree_indices,
                                   const Dataset& d, size_t row) {
  if (tree_indices.empty()) throw InputError("empty ensemble");
  std::vector<size_t> counts(f.schema.class_labels.size(), 0);
  for (size_t i : tree_indices) {
    if (i >= f.size()) throw InputError("tree index out of range");
    ++counts[size_t(predict_tree(f.trees[i], d, row))];
  }
  std::vector<double> fractions(counts.size());
  for (size_t c = 0; c < counts.size(); ++c) {
    fractions[c] = double(counts[c]) / double(tree_indices.size());
  }
  return fractions;
}

std::vector<uint8_t> forest_bytes(const Forest& f) {
  ByteWriter w;
  w.u32(kModelMagic);
  w.u32(kModelVersion);
  w.u8(kModelKindForest);
  w.u64(f.master_seed);
  w.u32(f.s_per_node);
  write_schema(w, f.schema);
  w.u64(f.trees.size());
  for (const DecisionTree& t : f.trees) write_tree(w, t);
  return w.bytes();
}

Forest forest_from_bytes(const std::vector<uint8_t>& bytes) {
  ByteReader r(bytes);
  check_header(r, kModelKindForest);
  Forest f;
  f.master_seed = r.u64();
  f.s_per_node = r.u32();
  f.schema = read_schema(r);
  uint64_t n = r.u64();
  if (n == 0 || n > uint64_t(INT32_MAX)) throw InputError("corrupt model file: bad tree count");
  f.trees.reserve(size_t(n));
  for (uint64_t i = 0; i < n; ++i) {
    DecisionTree t = read_tree(r);
    validate_tree_against_schema(t, f.schema);
    f.trees.push_back(std::move(t));
  }
  if (!r.at_end()) throw InputError("corrupt model file: trailing bytes");
  return f;
}

void save_forest(const Forest& f, const std::filesystem::path& path) {
  write_binary_file(path, forest_bytes(f));
}

Forest load_forest(const std::filesystem::path& path) {
  return forest_from_bytes(read_binary_file(path));
}

uint8_t model_kind(const std::filesystem::path& path) {
  ByteReader r(read_binary_file(path));
  if (r.u32() != kModelMagic) throw InputError("not a lofdrf model file");
  uint32_t version = r.u32();
  if (version != kModelVersion) {
    throw InputError("unsupported model version: " + std::to_string(version));
  }
  uint8_t kind = r.u8();
  if (kind > 1) throw InputError("corrupt model file: unknown kind");
  return kind;
}

}  // namespace lofdrf
