#include "lofdrf/eval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "lofdrf/error.hpp"
#include "lofdrf/lof.hpp"
#include "lofdrf/parallel.hpp"
#include "lofdrf/rng.hpp"

namespace lofdrf {
namespace {

size_t checked_length(size_t a, size_t b) {
  if (a != b) throw InputError("prediction vectors differ in length");
  if (a == 0) throw InputError("empty test set");
  return a;
}

double binary_auc(std::span<const double> score, std::span<const uint8_t> positive) {
  size_t n = score.size();
  size_t pos = 0;
  for (uint8_t p : positive) pos += p;
  size_t neg = n - pos;
  if (pos == 0 || neg == 0) return -1.0;  // degenerate, caller skips

  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    if (score[a] != score[b]) return score[a] > score[b];
    return a < b;
  });

  double auc = 0.0;
  double tp = 0.0;
  size_t i = 0;
  while (i < n) {
    size_t j = i;
    double dtp = 0.0;
    double dfp = 0.0;
    while (j < n && score[order[j]] == score[order[i]]) {
      if (positive[order[j]]) {
        dtp += 1.0;
      } else {
        dfp += 1.0;
      }
      ++j;
    }
    auc += dfp * tp + dfp * dtp / 2.0;
    tp += dtp;
    i = j;
  }
  return auc / (double(pos) * double(neg));
}

int32_t argmax_label(const std::vector<double>& fractions) {
  size_t best = 0;
  for (size_t c = 1; c < fractions.size(); ++c) {
    if (fractions[c] > fractions[best]) best = c;
  }
  return int32_t(best);
}

std::vector<int32_t> hard_predictions(const std::vector<std::vector<double>>& fractions) {
  std::vector<int32_t> preds(fractions.size());
  for (size_t r = 0; r < fractions.size(); ++r) preds[r] = argmax_label(fractions[r]);
  return preds;
}

RunMetrics evaluate_ensemble(const Forest& f, std::span<const size_t> indices, const Dataset& test,
                             size_t threads) {
  if (test.n_rows() == 0) throw InputError("empty test set");
  std::vector<std::vector<double>> fractions(test.n_rows());
  parallel_for(test.n_rows(), threads,
               [&](size_t r) { fractions[r] = vote_fractions(f, indices, test, r); });
  return evaluate_votes(fractions, test.labels, f.schema.class_labels.size());
}

}  // namespace

ContingencyCounts contingency(std::span<const int32_t> pred_a, std::span<const int32_t> pred_b,
                              std::span<const int32_t> truth, size_t n_classes) {
  if (n_classes != 2) {
    throw InputError("pairwise diversity measures are defined for binary problems only");
  }
  size_t n = checked_length(pred_a.size(), truth.size());
  checked_length(pred_b.size(), truth.size());
  ContingencyCounts c;
  for (size_t i = 0; i < n; ++i) {
    bool a_ok = pred_a[i] == truth[i];
    bool b_ok = pred_b[i] == truth[i];
    if (a_ok && b_ok) {
      ++c.n11;
    } else if (a_ok) {
      ++c.n10;
    } else if (b_ok) {
      ++c.n01;
    } else {
      ++c.n00;
    }
  }
  return c;
}

double disagreement(const ContingencyCounts& c) {
  size_t n = c.total();
  if (n == 0) throw InputError("empty contingency counts");
  return double(c.n10 + c.n01) / double(n);
}

double double_fault(const ContingencyCounts& c) {
  size_t n = c.total();
  if (n == 0) throw InputError("empty contingency counts");
  return double(c.n00) / double(n);
}

double diversity(std::span<const int32_t> u, std::span<const int32_t> v) {
  return prediction_distance(u, v);
}

double accuracy_rate(std::span<const int32_t> preds, std::span<const int32_t> truth) {
  size_t n = checked_length(preds.size(), truth.size());
  size_t correct = 0;
  for (size_t i = 0; i < n; ++i) correct += (preds[i] == truth[i]);
  return double(correct) / double(n);
}

double macro_f1(std::span<const int32_t> preds, std::span<const int32_t> truth, size_t n_classes) {
  size_t n = checked_length(preds.size(), truth.size());
  if (n_classes == 0) throw InputError("no classes");
  std::vector<size_t> tp(n_classes, 0), fp(n_classes, 0), fn(n_classes, 0);
  for (size_t i = 0; i < n; ++i) {
    auto p = size_t(preds[i]);
    auto t = size_t(truth[i]);
    if (p >= n_classes || t >= n_classes) throw InputError("label index out of range");
    if (p == t) {
      ++tp[p];
    } else {
      ++fp[p];
      ++fn[t];
    }
  }
  double sum = 0.0;
  for (size_t c = 0; c < n_classes; ++c) {
    double prec = tp[c] + fp[c] == 0 ? 0.0 : double(tp[c]) / double(tp[c] + fp[c]);
    double rec = tp[c] + fn[c] == 0 ? 0.0 : double(tp[c]) / double(tp[c] + fn[c]);
    sum += prec + rec == 0.0 ? 0.0 : 2.0 * prec * rec / (prec + rec);
  }
  return sum / double(n_classes);
}

double macro_auc(const std::vector<std::vector<double>>& scores, std::span<const int32_t> truth,
                 size_t n_classes) {
  size_t n = checked_length(scores.size(), truth.size());
  if (n_classes == 0) throw InputError("no classes");
  for (const auto& row : scores) {
    if (row.size() != n_classes) throw InputError("score row has wrong class count");
  }
  std::vector<double> col(n);
  std::vector<uint8_t> pos(n);
  double sum = 0.0;
  size_t used = 0;
  for (size_t c = 0; c < n_classes; ++c) {
    for (size_t i = 0; i < n; ++i) {
      col[i] = scores[i][c];
      pos[i] = truth[i] == int32_t(c);
    }
    double auc = binary_auc(col, pos);
    if (auc >= 0.0) {
      sum += auc;
      ++used;
    }
  }
  if (used == 0) return 0.5;
  return sum / double(used);
}

RunMetrics evaluate_votes(const std::vector<std::vector<double>>& fractions,
                          std::span<const int32_t> truth, size_t n_classes) {
  checked_length(fractions.size(), truth.size());
  if (n_classes == 0) throw InputError("no classes");
  for (const auto& row : fractions) {
    if (row.size() != n_classes) throw InputError("score row has wrong class count");
  }
  std::vector<int32_t> preds = hard_predictions(fractions);
  RunMetrics m;
  m.accuracy = accuracy_rate(preds, truth);
  m.f_measure = macro_f1(preds, truth, n_classes);
  m.auc = macro_auc(fractions, truth, n_classes);
  return m;
}

RunMetrics evaluate_forest(const Forest& f, const Dataset& test, size_t threads) {
  std::vector<size_t> all(f.size());
  std::iota(all.begin(), all.end(), 0);
  return evaluate_ensemble(f, all, test, threads);
}

RunMetrics evaluate_pruned(const PrunedForest& p, const Dataset& test, size_t threads) {
  if (p.parent == nullptr) throw RuntimeError("pruned forest has no parent");
  if (p.selected.empty()) throw InputError("empty selection");
  return evaluate_ensemble(*p.parent, p.selected, test, threads);
}

MetricsReport aggregate_runs(std::span<const RunMetrics> runs) {
  if (runs.empty()) throw InputError("no runs to aggregate");
  MetricsReport rep;
  rep.min = runs[0].accuracy;
  rep.max = runs[0].accuracy;
  double acc_sum = 0.0, f_sum = 0.0, auc_sum = 0.0;
  for (const RunMetrics& r : runs) {
    acc_sum += r.accuracy;
    f_sum += r.f_measure;
    auc_sum += r.auc;
    rep.min = std::min(rep.min, r.accuracy);
    rep.max = std::max(rep.max, r.accuracy);
  }
  double n = double(runs.size());
  rep.avg = acc_sum / n;
  rep.f_measure = f_sum / n;
  rep.auc = auc_sum / n;
  double sq = 0.0;
  for (const RunMetrics& r : runs) {
    double d = r.accuracy - rep.avg;
    sq += d * d;
  }
  rep.sd = std::sqrt(sq / n);
  return rep;
}

BiasVariance bias_variance_from_predictions(const std::vector<std::vector<int32_t>>& per_run,
                                            std::span<const int32_t> truth, size_t n_classes) {
  if (per_run.size() < 2) throw InputError("bias/variance needs at least 2 runs");
  size_t n = truth.size();
  if (n == 0) throw InputError("empty test set");
  for (const auto& run : per_run) checked_length(run.size(), n);

  std::vector<int32_t> votes(per_run.size());
  size_t bias_hits = 0;
  size_t var_hits = 0;
  for (size_t i = 0; i < n; ++i) {
    for (size_t r = 0; r < per_run.size(); ++r) votes[r] = per_run[r][i];
    int32_t main = modal_label(votes, n_classes);
    bias_hits += (main != truth[i]);
    for (int32_t v : votes) var_hits += (v != main);
  }
  BiasVariance bv;
  bv.bias = double(bias_hits) / double(n);
  bv.variance = double(var_hits) / double(n * per_run.size());
  return bv;
}

BiasVariance bias_variance(const TrainProcedure& builder, const Dataset& d, size_t runs,
                           uint64_t seed, double train_fraction) {
  if (runs < 2) throw InputError("bias/variance needs at least 2 runs");
  SplitPair split = holdout_split(d, train_fraction, derive_seed(seed, 0));
  const Dataset& pool = split.train;
  const Dataset& test = split.test;

  std::vector<std::vector<int32_t>> per_run(runs);
  for (size_t r = 0; r < runs; ++r) {
    Rng resampler(derive_seed(seed, 1 + 2 * r));
    std::vector<size_t> rows(pool.n_rows());
    for (size_t& row : rows) row = resampler.below(pool.n_rows());
    Dataset resampled = subset_rows(pool, rows);
    per_run[r] = builder(resampled, test, derive_seed(seed, 2 + 2 * r));
    if (per_run[r].size() != test.n_rows()) {
      throw RuntimeError("training procedure returned wrong prediction count");
    }
  }
  return bias_variance_from_predictions(per_run, test.labels, d.class_labels.size());
}

}  // namespace lofdrf
