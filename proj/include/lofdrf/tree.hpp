#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "lofdrf/dataset.hpp"
#include "lofdrf/io.hpp"

namespace lofdrf {

struct TreeNode {
  int32_t feature = -1;    // -1 marks a leaf
  int32_t category = -1;   // >= 0: categorical split, matching rows go left
  double threshold = 0.0;  // numeric split: value <= threshold goes left
  int32_t left = -1;
  int32_t right = -1;
  int32_t label = -1;  // leaf class
};

// Unpruned classification tree; nodes[0] is the root and children always
// follow their parent in the list.
struct DecisionTree {
  std::vector<TreeNode> nodes;
};

struct BestSplit {
  int32_t feature = -1;
  int32_t category = -1;
  double threshold = 0.0;
  double decrease = 0.0;  // Gini impurity decrease
};

// Highest Gini-decrease split over the candidate features. Ties prefer the
// lower feature index, then the lower threshold or category, so the result
// does not depend on candidate order. Empty when no split has positive
// decrease (pure or unsplittable node).
std::optional<BestSplit> best_split(const Dataset& d, std::span<const size_t> rows,
                                    std::span<const int32_t> candidates);

// Recursive growth on the in-bag rows (with multiplicity): at every node s
// features are drawn without replacement, the best split applied, and
// recursion stops only on pure nodes, nodes under 2 rows, or zero-gain
// candidates. Fully determined by (train, sample, s, generator state).
DecisionTree grow_tree(const Dataset& train, const BootstrapSample& sample, uint32_t s, Rng& rng);

// Routes one row to a leaf. Unseen categories (encoded -1) fail every
// category match and fall to the "rest" side.
int32_t predict_tree(const DecisionTree& t, const Dataset& d, size_t row);

double tree_accuracy(const DecisionTree& t, const Dataset& d);

void write_tree(ByteWriter& w, const DecisionTree& t);
DecisionTree read_tree(ByteReader& r);

// Counts predict_tree calls on the current thread while in scope. Scopes
// nest; an outer counter also sees traversals made under inner ones.
class TraversalCounter {
 public:
  TraversalCounter();
  ~TraversalCounter();
  TraversalCounter(const TraversalCounter&) = delete;
  TraversalCounter& operator=(const TraversalCounter&) = delete;

  uint64_t count() const { return count_; }
  static void record_traversal();

 private:
  uint64_t count_ = 0;
  TraversalCounter* prev_;
};

}  // namespace lofdrf
