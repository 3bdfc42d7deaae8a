#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <vector>

#include "lofdrf/dataset.hpp"
#include "lofdrf/forest.hpp"

namespace lofdrf {

struct WeightedTree {
  size_t tree_index = 0;
  double raw_lof = 0.0;
  double normalized_lof = 0.0;  // in [0,1]
  double accuracy = 0.0;        // on the weighting split
  double weight = 0.0;          // normalized_lof * accuracy
};

// Score every tree: LOF over pairwise prediction-vector distances on the
// training split, min-max normalized, multiplied by that tree's accuracy on
// the same split. Requires 1 <= k_lof <= forest size - 1.
std::vector<WeightedTree> weight_trees(const Forest& f, const Dataset& train, size_t k_lof,
                                       size_t threads = 0);

// A child ensemble that references trees of its parent; no tree is copied or
// retrained. `selected` and `weights` are aligned, in descending-weight order.
struct PrunedForest {
  const Forest* parent = nullptr;
  std::vector<size_t> selected;
  std::vector<WeightedTree> weights;
};

// Take the k heaviest trees; ties broken by ascending tree index. With
// invert_ranking the k lightest are taken instead (diagnostic baseline).
PrunedForest select_top_k(const Forest& parent, std::span<const WeightedTree> weights, size_t k,
                          bool invert_ranking = false);

// Percentage of the parent removed: 100 * (1 - child/parent).
double pruning_level(size_t parent_size, size_t child_size);

// Majority vote over exactly the selected trees.
int32_t classify_pruned(const PrunedForest& p, const Dataset& d, size_t row);

// Pruned-model file: header, parent forest path + content hash, then the
// selected index/weight table. The parent path is stored relative to the
// output file's directory when possible.
void save_pruned(const PrunedForest& p, const std::filesystem::path& parent_path,
                 const std::filesystem::path& out_path);

struct PrunedModel {
  std::shared_ptr<Forest> parent;
  PrunedForest pruned;  // pruned.parent points at *parent
  std::filesystem::path parent_path;
  uint64_t parent_hash = 0;
};

// Loads a pruned model and its parent forest, verifying the recorded hash.
PrunedModel load_pruned(const std::filesystem::path& path);

}  // namespace lofdrf
