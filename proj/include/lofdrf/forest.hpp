#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "lofdrf/dataset.hpp"
#include "lofdrf/tree.hpp"

namespace lofdrf {

inline constexpr uint32_t kModelMagic = 0x4652444CU;  // "LDRF" on disk
inline constexpr uint32_t kModelVersion = 1;
inline constexpr uint8_t kModelKindForest = 0;
inline constexpr uint8_t kModelKindPruned = 1;

struct Forest {
  Schema schema;
  std::vector<DecisionTree> trees;
  uint64_t master_seed = 0;
  uint32_t s_per_node = 0;  // features drawn at each split node

  size_t size() const { return trees.size(); }
};

// Grows n_trees bootstrap trees, tree i on its own generator seeded
// derive_seed(master_seed, i), so the result is byte-identical for any
// worker count. s == 0 selects floor(sqrt(feature count)). The training
// data must already be imputed.
Forest build_forest(const Dataset& train, size_t n_trees, uint32_t s, uint64_t master_seed,
                    size_t threads = 0);

// One tree's class labels over every row of d.
std::vector<int32_t> prediction_vector(const DecisionTree& t, const Dataset& d);

// Modal vote; ties resolve to the earliest label in class order.
int32_t modal_label(std::span<const int32_t> votes, size_t n_classes);

// Consults exactly the listed trees; classification cost is linear in the
// ensemble slice, which is what makes pruning pay off.
int32_t majority_vote(const Forest& f, std::span<const size_t> tree_indices, const Dataset& d,
                      size_t row);
int32_t predict_forest(const Forest& f, const Dataset& d, size_t row);

// Per-class vote fractions over the listed trees; the ranking scores used
// by the AUC metric.
std::vector<double> vote_fractions(const Forest& f, std::span<const size_t> tree_indices,
                                   const Dataset& d, size_t row);

std::vector<uint8_t> forest_bytes(const Forest& f);
Forest forest_from_bytes(const std::vector<uint8_t>& bytes);
void save_forest(const Forest& f, const std::filesystem::path& path);
Forest load_forest(const std::filesystem::path& path);

// Distinguishes forest files from pruned-model files without loading them.
uint8_t model_kind(const std::filesystem::path& path);

}  // namespace lofdrf
