#include "lofdrf/tree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "lofdrf/error.hpp"

namespace lofdrf {
namespace {

// Gains at or under this are treated as zero so float noise cannot force a
// split on an unsplittable node.
constexpr double kMinDecrease = 1e-12;

double gini(std::span<const size_t> counts, size_t n) {
  double g = 1.0;
  for (size_t c : counts) {
    double p = double(c) / double(n);
    g -= p * p;
  }
  return g;
}

struct Candidate {
  double decrease = 0.0;
  int32_t feature = -1;
  int32_t category = -1;
  double threshold = 0.0;
  bool valid = false;
};

bool better(const Candidate& a, const Candidate& b) {
  if (!b.valid) return a.valid;
  if (!a.valid) return false;
  if (a.decrease != b.decrease) return a.decrease > b.decrease;
  if (a.feature != b.feature) return a.feature < b.feature;
  if (a.category != b.category) return a.category < b.category;
  return a.threshold < b.threshold;
}

class Grower {
 public:
  Grower(const Dataset& d, uint32_t s, Rng& rng) : d_(d), s_(s), rng_(rng), pool_(d.n_features()) {
    std::iota(pool_.begin(), pool_.end(), 0);
  }

  DecisionTree run(std::span<const size_t> rows) {
    std::vector<size_t> r(rows.begin(), rows.end());
    build(r);
    return std::move(tree_);
  }

 private:
  size_t make_leaf(int32_t label) {
    tree_.nodes.push_back(TreeNode{-1, -1, 0.0, -1, -1, label});
    return tree_.nodes.size() - 1;
  }

  int32_t modal_of(const std::vector<size_t>& rows, bool* pure) const {
    std::vector<size_t> counts(d_.class_labels.size(), 0);
    for (size_t r : rows) ++counts[size_t(d_.labels[r])];
    size_t best = 0, nonzero = 0;
    for (size_t c = 0; c < counts.size(); ++c) {
      if (counts[c] > 0) ++nonzero;
      if (counts[c] > counts[best]) best = c;
    }
    *pure = nonzero <= 1;
    return int32_t(best);
  }

  size_t build(std::vector<size_t>& rows) {
    bool pure = false;
    int32_t modal = modal_of(rows, &pure);
    if (pure || rows.size() < 2) return make_leaf(modal);

    // s features without replacement via a partial shuffle; drawn before the
    // split search so the generator stream does not depend on the outcome
    for (uint32_t j = 0; j < s_; ++j) {
      size_t pick = j + size_t(rng_.below(uint64_t(pool_.size() - j)));
      std::swap(pool_[j], pool_[pick]);
    }
    auto split = best_split(d_, rows, std::span<const int32_t>(pool_.data(), s_));
    if (!split) return make_leaf(modal);

    std::vector<size_t> left, right;
    const auto& col = d_.columns[size_t(split->feature)];
    for (size_t r : rows) {
      bool go_left = split->category >= 0 ? col[r] == double(split->category)
                                          : col[r] <= split->threshold;
      (go_left ? left : right).push_back(r);
    }
    rows = std::vector<size_t>();  // release before recursing

    size_t idx = tree_.nodes.size();
    tree_.nodes.push_back(TreeNode{split->feature, split->category, split->threshold, -1, -1, -1});
    size_t li = build(left);
    size_t ri = build(right);
    tree_.nodes[idx].left = int32_t(li);
    tree_.nodes[idx].right = int32_t(ri);
    return idx;
  }

  const Dataset& d_;
  uint32_t s_;
  Rng& rng_;
  DecisionTree tree_;
  std::vector<int32_t> pool_;
};

thread_local TraversalCounter* g_active_counter = nullptr;

}  // namespace

std::optional<BestSplit> best_split(const Dataset& d, std::span<const size_t> rows,
                                    std::span<const int32_t> candidates) {
  size_t n = rows.size();
  if (n < 2) return std::nullopt;
  size_t n_classes = d.class_labels.size();

  std::vector<size_t> parent_counts(n_classes, 0);
  for (size_t r : rows) ++parent_counts[size_t(d.labels[r])];
  size_t nonzero = 0;
  for (size_t c : parent_counts) nonzero += c > 0;
  if (nonzero <= 1) return std::nullopt;
  double parent_gini = gini(parent_counts, n);

  Candidate best;
  std::vector<std::pair<double, int32_t>> values;
  std::vector<size_t> left_counts(n_classes), right_counts(n_classes);

  for (int32_t f : candidates) {
    const FeatureSpec& spec = d.features[size_t(f)];
    if (spec.kind == FeatureKind::numeric) {
      values.clear();
      for (size_t r : rows) values.emplace_back(d.value(r, size_t(f)), d.labels[r]);
      std::sort(values.begin(), values.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });
      std::fill(left_counts.begin(), left_counts.end(), 0);
      right_counts = parent_counts;
      for (size_t i = 0; i + 1 < n; ++i) {
        auto cls = size_t(values[i].second);
        ++left_counts[cls];
        --right_counts[cls];
        double a = values[i].first, b = values[i + 1].first;
        if (!(a < b)) continue;  // boundaries only between distinct values
        size_t nl = i + 1, nr = n - nl;
        double dec = parent_gini - (double(nl) / double(n)) * gini(left_counts, nl) -
                     (double(nr) / double(n)) * gini(right_counts, nr);
        if (dec <= kMinDecrease) continue;
        double t = a + (b - a) / 2;
        if (!(t < b)) t = a;  // adjacent doubles: keep a <= t < b
        Candidate c{dec, f, -1, t, true};
        if (better(c, best)) best = c;
      }
    } else {
      size_t ncat = spec.categories.size();
      std::vector<size_t> counts(ncat * n_classes, 0), per_cat(ncat, 0);
      for (size_t r : rows) {
        auto cat = size_t(d.value(r, size_t(f)));
        ++counts[cat * n_classes + size_t(d.labels[r])];
        ++per_cat[cat];
      }
      for (size_t cat = 0; cat < ncat; ++cat) {
        size_t nl = per_cat[cat];
        if (nl == 0 || nl == n) continue;  // a child would be empty
        for (size_t c = 0; c < n_classes; ++c) {
          left_counts[c] = counts[cat * n_classes + c];
          right_counts[c] = parent_counts[c] - left_counts[c];
        }
        size_t nr = n - nl;
        double dec = parent_gini - (double(nl) / double(n)) * gini(left_counts, nl) -
                     (double(nr) / double(n)) * gini(right_counts, nr);
        if (dec <= kMinDecrease) continue;
        Candidate c{dec, f, int32_t(cat), 0.0, true};
        if (better(c, best)) best = c;
      }
    }
  }

  if (!best.valid) return std::nullopt;
  return BestSplit{best.feature, best.category, best.threshold, best.decrease};
}

DecisionTree grow_tree(const Dataset& train, const BootstrapSample& sample, uint32_t s, Rng& rng) {
  size_t f = train.n_features();
  if (s == 0 || s > f) {
    throw InputError("feature subset size must be in [1, " + std::to_string(f) + "]");
  }
  if (sample.in_bag.empty()) throw InputError("empty bootstrap sample");
  Grower grower(train, s, rng);
  return grower.run(sample.in_bag);
}

int32_t predict_tree(const DecisionTree& t, const Dataset& d, size_t row) {
  TraversalCounter::record_traversal();
  if (t.nodes.empty()) throw RuntimeError("empty tree");
  size_t i = 0;
  for (;;) {
    const TreeNode& node = t.nodes[i];
    if (node.feature < 0) return node.label;
    if (size_t(node.feature) >= d.n_features()) {
      throw InputError("schema mismatch: tree splits on feature " + std::to_string(node.feature) +
                       " but the data has " + std::to_string(d.n_features()));
    }
    double v = d.value(row, size_t(node.feature));
    bool go_left = node.category >= 0 ? v == double(node.category) : v <= node.threshold;
    i = size_t(go_left ? node.left : node.right);
  }
}

double tree_accuracy(const DecisionTree& t, const Dataset& d) {
  if (d.n_rows() == 0) throw InputError("empty dataset");
  size_t correct = 0;
  for (size_t r = 0; r < d.n_rows(); ++r) {
    correct += predict_tree(t, d, r) == d.labels[r];
  }
  return double(correct) / double(d.n_rows());
}

void write_tree(ByteWriter& w, const DecisionTree& t) {
  w.u64(t.nodes.size());
  for (const TreeNode& n : t.nodes) {
    w.i32(n.feature);
    w.i32(n.category);
    w.f64(n.threshold);
    w.i32(n.left);
    w.i32(n.right);
    w.i32(n.label);
  }
}

DecisionTree read_tree(ByteReader& r) {
  uint64_t count = r.u64();
  if (count == 0 || count > uint64_t(INT32_MAX)) {
    throw InputError("corrupt model file: bad tree node count");
  }
  DecisionTree t;
  t.nodes.reserve(size_t(count));
  for (uint64_t i = 0; i < count; ++i) {
    TreeNode n;
    n.feature = r.i32();
    n.category = r.i32();
    n.threshold = r.f64();
    n.left = r.i32();
    n.right = r.i32();
    n.label = r.i32();
    if (n.feature >= 0) {
      // children must point forward so prediction always terminates
      bool ok = n.left > int32_t(i) && n.right > int32_t(i) && uint64_t(n.left) < count &&
                uint64_t(n.right) < count;
      if (!ok) throw InputError("corrupt model file: bad tree node links");
    } else if (n.label < 0) {
      throw InputError("corrupt model file: leaf without a label");
    }
    t.nodes.push_back(n);
  }
  return t;
}

TraversalCounter::TraversalCounter() : prev_(g_active_counter) { g_active_counter = this; }

TraversalCounter::~TraversalCounter() { g_active_counter = prev_; }

void TraversalCounter::record_traversal() {
  for (TraversalCounter* c = g_active_counter; c; c = c->prev_) ++c->count_;
}

}  // namespace lofdrf
