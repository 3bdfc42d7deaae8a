#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "lofdrf/dataset.hpp"
#include "lofdrf/forest.hpp"
#include "lofdrf/prune.hpp"

namespace lofdrf {

// Joint correctness counts of two classifiers on the same test rows:
// n11 both right, n10 only the first right, n01 only the second, n00 neither.
struct ContingencyCounts {
  size_t n11 = 0;
  size_t n10 = 0;
  size_t n01 = 0;
  size_t n00 = 0;
  size_t total() const { return n11 + n10 + n01 + n00; }
};

// Binary problems only; the pairwise measures below are not defined beyond
// two classes.
ContingencyCounts contingency(std::span<const int32_t> pred_a, std::span<const int32_t> pred_b,
                              std::span<const int32_t> truth, size_t n_classes);

double disagreement(const ContingencyCounts& c);
double double_fault(const ContingencyCounts& c);

// Fraction of rows where two prediction vectors differ.
double diversity(std::span<const int32_t> u, std::span<const int32_t> v);

double accuracy_rate(std::span<const int32_t> preds, std::span<const int32_t> truth);

// Macro-averaged F1 over all classes; a class absent from both prediction
// and truth contributes 0.
double macro_f1(std::span<const int32_t> preds, std::span<const int32_t> truth, size_t n_classes);

// One-vs-rest macro AUC on per-class ranking scores (vote fractions),
// trapezoidal, equal scores processed as one tie group. Classes with no
// positives or no negatives are skipped; if every class is degenerate the
// result is 0.5.
double macro_auc(const std::vector<std::vector<double>>& scores, std::span<const int32_t> truth,
                 size_t n_classes);

struct RunMetrics {
  double accuracy = 0.0;
  double f_measure = 0.0;
  double auc = 0.0;
};

// Metrics from per-row vote fractions; the hard prediction is the first
// maximal class, matching the majority-vote tie rule.
RunMetrics evaluate_votes(const std::vector<std::vector<double>>& fractions,
                          std::span<const int32_t> truth, size_t n_classes);

RunMetrics evaluate_forest(const Forest& f, const Dataset& test, size_t threads = 0);
RunMetrics evaluate_pruned(const PrunedForest& p, const Dataset& test, size_t threads = 0);

struct MetricsReport {
  double avg = 0.0;
  double min = 0.0;
  double max = 0.0;
  double sd = 0.0;  // population standard deviation
  double f_measure = 0.0;
  double auc = 0.0;
  double bias = 0.0;
  double variance = 0.0;
};

// Accuracy statistics plus mean F-measure and AUC across runs. bias and
// variance stay 0 here; fill them from bias_variance if wanted.
MetricsReport aggregate_runs(std::span<const RunMetrics> runs);

struct BiasVariance {
  double bias = 0.0;
  double variance = 0.0;
};

// 0/1-loss decomposition from per-run predictions on a fixed test set:
// main = modal prediction per row across runs; bias = rate main differs from
// truth; variance = rate run predictions differ from main.
BiasVariance bias_variance_from_predictions(const std::vector<std::vector<int32_t>>& per_run,
                                            std::span<const int32_t> truth, size_t n_classes);

// Trains on a bootstrap resample of the training pool and predicts the fixed
// test split; must return one label index per test row.
using TrainProcedure =
    std::function<std::vector<int32_t>(const Dataset& train, const Dataset& test, uint64_t seed)>;

// Holds out a fixed test split once, then reruns the training procedure on
// `runs` resamples of the remaining pool. Requires runs >= 2.
BiasVariance bias_variance(const TrainProcedure& builder, const Dataset& d, size_t runs,
                           uint64_t seed, double train_fraction = 0.66);

}  // namespace lofdrf
