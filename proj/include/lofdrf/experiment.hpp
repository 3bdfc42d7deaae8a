#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "lofdrf/dataset.hpp"
#include "lofdrf/eval.hpp"

namespace lofdrf {

struct ExperimentConfig {
  std::filesystem::path data_path;
  std::string label_column = "class";
  std::filesystem::path schema_path;
  size_t n_trees = 500;
  uint32_t s_per_node = 0;  // 0 picks floor(sqrt(F))
  size_t k_lof = 10;
  std::vector<size_t> ks = {5, 10, 15, 20, 25, 30, 35, 40};
  size_t runs = 10;
  double train_fraction = 0.66;
  uint64_t master_seed = 1;
  bool fixed_split = false;
  size_t threads = 0;
  std::filesystem::path out_dir = ".";
  std::string format = "both";  // csv | markdown | both
};

struct KRow {
  size_t k = 0;
  MetricsReport metrics;
  double pruning = 0.0;  // percent of parent removed
  bool beats_rf = false;
};

struct ExperimentReport {
  std::string dataset;
  ExperimentConfig config;
  uint32_t resolved_s = 0;
  size_t n_rows = 0;
  size_t n_classes = 0;
  std::vector<KRow> rows;  // ascending k
  MetricsReport rf;
  bool has_bias_variance = false;
  size_t best_k = 0;  // highest mean accuracy, ties to the smaller k
};

// Runs the full sweep: per run a fresh holdout split (unless fixed_split) and
// a fresh forest seeded from the master seed and run index, weighted once,
// then evaluated at every k. Bias/variance rows are added when runs >= 2.
ExperimentReport run_experiment(const ExperimentConfig& cfg);

// Writes <dataset>_metrics.csv / _pruning.csv / _bias_variance.csv and/or
// <dataset>_report.md into cfg.out_dir, per cfg.format. Percentages with two
// decimals; byte-identical output for equal reports.
std::vector<std::filesystem::path> emit_report(const ExperimentReport& report);

}  // namespace lofdrf
