#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "lofdrf/rng.hpp"

namespace lofdrf {

enum class FeatureKind : uint8_t { numeric = 0, categorical = 1 };

struct FeatureSpec {
  std::string name;
  FeatureKind kind = FeatureKind::numeric;
  std::vector<std::string> categories;  // categorical only, first-appearance order
};

// Column-major table. Numeric cells hold the parsed value (NaN while a
// missing entry awaits imputation); categorical cells hold the category
// index, with -1 reserved for categories unseen at training time. Labels
// are indices into class_labels, whose order is fixed at load time and
// drives every deterministic tie-break downstream.
struct Dataset {
  std::string name;
  std::vector<FeatureSpec> features;
  std::vector<std::string> class_labels;
  std::string label_name;
  std::vector<std::vector<double>> columns;  // [feature][row]
  std::vector<int32_t> labels;               // [row]

  size_t n_rows() const { return labels.size(); }
  size_t n_features() const { return features.size(); }
  double value(size_t row, size_t feature) const { return columns[feature][row]; }
};

// The training-side contract carried by serialized models: feature layout,
// label order, and the train-split medians used to impute missing numerics
// at prediction time.
struct Schema {
  std::vector<FeatureSpec> features;
  std::vector<std::string> class_labels;
  std::string label_name;
  std::vector<double> medians;  // per feature; 0.0 placeholder on categoricals
};

// Forces the kind of named columns when inference guesses wrong
// (numeric-coded categoricals and the like).
using SchemaOverride = std::map<std::string, FeatureKind>;

// Header row required; fields may be quoted per RFC 4180. "?" or an empty
// field marks a missing value. label_column is a header name, or a 0-based
// column index when no header matches.
Dataset load_csv(const std::filesystem::path& path, const std::string& label_column,
                 const SchemaOverride& overrides = {});

// Flattens an attribute-relation (.arff) file to CSV text: nominal and
// numeric attributes, dense data section.
std::string arff_to_csv(const std::string& text);

// Dispatch on extension: .arff files are flattened first, anything else
// parses as CSV.
Dataset load_table(const std::filesystem::path& path, const std::string& label_column,
                   const SchemaOverride& overrides = {});

// One "name:kind" line per feature; kind is "numeric" or "categorical".
// Blank lines and #-comments are skipped.
SchemaOverride parse_schema_file(const std::filesystem::path& path);

struct SplitPair {
  Dataset train;
  Dataset test;
  std::vector<size_t> train_indices;  // ascending row indices into the source
  std::vector<size_t> test_indices;
  uint64_t seed = 0;
  double train_fraction = 0.0;
};

// Seeded uniform permutation, then a prefix of round(fraction * n) rows
// (clamped so neither side is empty). Missing numerics on both sides are
// imputed with medians computed from the train side only.
SplitPair holdout_split(const Dataset& d, double train_fraction, uint64_t seed);

struct BootstrapSample {
  std::vector<size_t> in_bag;      // n draws with replacement, in draw order
  std::vector<size_t> out_of_bag;  // complement of the distinct draws, ascending
};
BootstrapSample bootstrap_sample(size_t n, Rng& rng);

// Median of the non-missing values per numeric column (0.0 when a column is
// all-missing); 0.0 placeholders on categorical columns.
std::vector<double> train_medians(const Dataset& d);
void impute_missing(Dataset& d, std::span<const double> medians);
bool has_missing_numeric(const Dataset& d);

// Row subset (repeats allowed); schema, label order, and name carry over.
Dataset subset_rows(const Dataset& d, std::span<const size_t> rows);

// Re-encodes a dataset onto a model's schema: features matched by name and
// kind, categories unseen at training time mapped to -1 (these route to the
// "rest" side of categorical splits), labels required to exist in the
// schema. Missing numerics are imputed with the schema medians.
Dataset remap_to_schema(const Schema& schema, const Dataset& d);

Schema dataset_schema(const Dataset& d, std::vector<double> medians);

}  // namespace lofdrf
