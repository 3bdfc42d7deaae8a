#include "lofdrf/experiment.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <numeric>

#include "lofdrf/error.hpp"
#include "lofdrf/io.hpp"
#include "lofdrf/parallel.hpp"
#include "lofdrf/rng.hpp"

namespace lofdrf {
namespace {

// Salts keep the split and bias/variance seed streams disjoint from the
// per-run forest seeds derived directly from the master seed.
constexpr uint64_t kSplitStreamSalt = 0x7C3A1E5B9D2F8641ULL;
constexpr uint64_t kBiasVarianceSalt = 0x1F9E3D7B5C2A8E43ULL;

std::vector<std::vector<double>> fractions_from_votes(
    const std::vector<std::vector<int32_t>>& votes, std::span<const size_t> idx, size_t rows,
    size_t n_classes) {
  std::vector<std::vector<double>> fr(rows, std::vector<double>(n_classes, 0.0));
  for (size_t r = 0; r < rows; ++r) {
    for (size_t t : idx) fr[r][size_t(votes[t][r])] += 1.0;
    for (double& v : fr[r]) v /= double(idx.size());
  }
  return fr;
}

std::vector<int32_t> predict_subset(const Forest& f, std::span<const size_t> idx,
                                    const Dataset& test, size_t threads) {
  std::vector<std::vector<int32_t>> votes(idx.size());
  parallel_for(idx.size(), threads,
               [&](size_t t) { votes[t] = prediction_vector(f.trees[idx[t]], test); });
  size_t n_classes = f.schema.class_labels.size();
  std::vector<int32_t> out(test.n_rows());
  std::vector<int32_t> v(idx.size());
  for (size_t r = 0; r < test.n_rows(); ++r) {
    for (size_t t = 0; t < idx.size(); ++t) v[t] = votes[t][r];
    out[r] = modal_label(v, n_classes);
  }
  return out;
}

void validate_config(const ExperimentConfig& cfg) {
  if (cfg.runs < 1) throw InputError("runs must be at least 1");
  if (cfg.ks.empty()) throw InputError("empty k sweep");
  if (cfg.n_trees < 2) throw InputError("experiment needs at least 2 trees");
  if (cfg.k_lof < 1 || cfg.k_lof > cfg.n_trees - 1) throw InputError("k_lof out of range");
  for (size_t k : cfg.ks) {
    if (k < 1 || k > cfg.n_trees) throw InputError("k out of range");
  }
  if (!(cfg.train_fraction > 0.0 && cfg.train_fraction < 1.0)) {
    throw InputError("train fraction must lie strictly between 0 and 1");
  }
  if (cfg.format != "csv" && cfg.format != "markdown" && cfg.format != "both") {
    throw InputError("unknown report format: " + cfg.format);
  }
}

}  // namespace

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
  validate_config(cfg);
  SchemaOverride overrides;
  if (!cfg.schema_path.empty()) overrides = parse_schema_file(cfg.schema_path);
  Dataset data = load_table(cfg.data_path, cfg.label_column, overrides);

  ExperimentReport rep;
  rep.dataset = cfg.data_path.stem().string();
  rep.config = cfg;
  auto& ks = rep.config.ks;
  std::sort(ks.begin(), ks.end());
  ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
  rep.n_rows = data.n_rows();
  rep.n_classes = data.class_labels.size();

  uint64_t split_base = mix64(cfg.master_seed ^ kSplitStreamSalt);
  std::vector<RunMetrics> rf_runs;
  std::vector<std::vector<RunMetrics>> k_runs(ks.size());

  for (size_t r = 0; r < cfg.runs; ++r) {
    SplitPair split =
        holdout_split(data, cfg.train_fraction, derive_seed(split_base, cfg.fixed_split ? 0 : r));
    Forest forest = build_forest(split.train, cfg.n_trees, cfg.s_per_node,
                                 derive_seed(cfg.master_seed, r), cfg.threads);
    rep.resolved_s = forest.s_per_node;

    std::vector<std::vector<int32_t>> votes(forest.size());
    parallel_for(forest.size(), cfg.threads,
                 [&](size_t t) { votes[t] = prediction_vector(forest.trees[t], split.test); });

    std::vector<size_t> all(forest.size());
    std::iota(all.begin(), all.end(), 0);
    rf_runs.push_back(
        evaluate_votes(fractions_from_votes(votes, all, split.test.n_rows(), rep.n_classes),
                       split.test.labels, rep.n_classes));

    std::vector<WeightedTree> weights = weight_trees(forest, split.train, cfg.k_lof, cfg.threads);
    for (size_t ki = 0; ki < ks.size(); ++ki) {
      PrunedForest p = select_top_k(forest, weights, ks[ki]);
      k_runs[ki].push_back(evaluate_votes(
          fractions_from_votes(votes, p.selected, split.test.n_rows(), rep.n_classes),
          split.test.labels, rep.n_classes));
    }
  }

  rep.rf = aggregate_runs(rf_runs);
  rep.rows.reserve(ks.size());
  for (size_t ki = 0; ki < ks.size(); ++ki) {
    KRow row;
    row.k = ks[ki];
    row.metrics = aggregate_runs(k_runs[ki]);
    row.pruning = pruning_level(cfg.n_trees, ks[ki]);
    row.beats_rf = row.metrics.avg > rep.rf.avg;
    rep.rows.push_back(row);
  }

  rep.best_k = rep.rows[0].k;
  double best_avg = rep.rows[0].metrics.avg;
  for (const KRow& row : rep.rows) {
    if (row.metrics.avg > best_avg) {
      best_avg = row.metrics.avg;
      rep.best_k = row.k;
    }
  }

  if (cfg.runs >= 2) {
    // Both decompositions replay the identical resample stream, so each
    // resampled forest is trained once and shared through the cache.
    struct CachedModel {
      Forest forest;
      std::vector<WeightedTree> weights;
    };
    std::map<uint64_t, std::shared_ptr<CachedModel>> cache;
    auto get_model = [&](const Dataset& train, uint64_t seed) {
      auto it = cache.find(seed);
      if (it != cache.end()) return it->second;
      auto m = std::make_shared<CachedModel>();
      m->forest = build_forest(train, cfg.n_trees, cfg.s_per_node, seed, cfg.threads);
      m->weights = weight_trees(m->forest, train, cfg.k_lof, cfg.threads);
      cache.emplace(seed, m);
      return m;
    };

    TrainProcedure rf_builder = [&](const Dataset& train, const Dataset& test, uint64_t seed) {
      auto m = get_model(train, seed);
      std::vector<size_t> all(m->forest.size());
      std::iota(all.begin(), all.end(), 0);
      return predict_subset(m->forest, all, test, cfg.threads);
    };
    TrainProcedure lofb_builder = [&](const Dataset& train, const Dataset& test, uint64_t seed) {
      auto m = get_model(train, seed);
      PrunedForest p = select_top_k(m->forest, m->weights, rep.best_k);
      return predict_subset(m->forest, p.selected, test, cfg.threads);
    };

    uint64_t bv_seed = mix64(cfg.master_seed ^ kBiasVarianceSalt);
    BiasVariance rf_bv = bias_variance(rf_builder, data, cfg.runs, bv_seed, cfg.train_fraction);
    BiasVariance lofb_bv = bias_variance(lofb_builder, data, cfg.runs, bv_seed, cfg.train_fraction);
    rep.rf.bias = rf_bv.bias;
    rep.rf.variance = rf_bv.variance;
    for (KRow& row : rep.rows) {
      if (row.k == rep.best_k) {
        row.metrics.bias = lofb_bv.bias;
        row.metrics.variance = lofb_bv.variance;
      }
    }
    rep.has_bias_variance = true;
  }
  return rep;
}

namespace {

const KRow& best_row(const ExperimentReport& rep) {
  for (const KRow& row : rep.rows) {
    if (row.k == rep.best_k) return row;
  }
  throw RuntimeError("report has no best k row");
}

std::string metrics_csv(const ExperimentReport& rep) {
  auto pct = [](double v) { return fixed(100.0 * v, 2); };
  std::string s = "ensemble,size,avg,min,max,sd,f_measure,auc,beats_rf\n";
  s += "RF," + std::to_string(rep.config.n_trees) + "," + pct(rep.rf.avg) + ",,,," +
       pct(rep.rf.f_measure) + "," + pct(rep.rf.auc) + ",\n";
  for (const KRow& row : rep.rows) {
    s += "LOFB-DRF," + std::to_string(row.k) + "," + pct(row.metrics.avg) + "," +
         pct(row.metrics.min) + "," + pct(row.metrics.max) + "," + pct(row.metrics.sd) + "," +
         pct(row.metrics.f_measure) + "," + pct(row.metrics.auc) + "," +
         (row.beats_rf ? "yes" : "no") + "\n";
  }
  return s;
}

std::string pruning_csv(const ExperimentReport& rep) {
  std::string s = "k,pruning_level\n";
  for (const KRow& row : rep.rows) {
    s += std::to_string(row.k) + "," + fixed(row.pruning, 2) + "\n";
  }
  return s;
}

std::string bias_variance_csv(const ExperimentReport& rep) {
  auto pct = [](double v) { return fixed(100.0 * v, 2); };
  const KRow& best = best_row(rep);
  std::string s = "ensemble,size,bias,variance\n";
  s += "RF," + std::to_string(rep.config.n_trees) + "," + pct(rep.rf.bias) + "," +
       pct(rep.rf.variance) + "\n";
  s += "LOFB-DRF," + std::to_string(best.k) + "," + pct(best.metrics.bias) + "," +
       pct(best.metrics.variance) + "\n";
  return s;
}

std::string markdown_report(const ExperimentReport& rep) {
  auto pct = [](double v) { return fixed(100.0 * v, 2); };
  const ExperimentConfig& cfg = rep.config;
  std::string s = "# LOFB-DRF experiment: " + rep.dataset + "\n\n## Settings\n\n";
  s += "- dataset: `" + cfg.data_path.generic_string() + "` (" + std::to_string(rep.n_rows) +
       " rows, " + std::to_string(rep.n_classes) + " classes)\n";
  s += "- parent forest: " + std::to_string(cfg.n_trees) + " trees, " +
       std::to_string(rep.resolved_s) + " candidate features per node\n";
  s += "- lof neighborhood: " + std::to_string(cfg.k_lof) + "\n";
  s += "- runs: " + std::to_string(cfg.runs) +
       (cfg.fixed_split ? " (fixed split)" : " (fresh split per run)") + "\n";
  s += "- train fraction: " + fixed(cfg.train_fraction, 2) + "\n";
  s += "- master seed: " + std::to_string(cfg.master_seed) + "\n";

  s += "\n## LOFB-DRF accuracy by ensemble size\n\n";
  s += "| k | AVG | MIN | MAX | SD | F-measure | AUC |\n";
  s += "|--:|--:|--:|--:|--:|--:|--:|\n";
  for (const KRow& row : rep.rows) {
    std::string avg = pct(row.metrics.avg);
    if (row.beats_rf) avg = "**" + avg + "**";
    s += "| " + std::to_string(row.k) + " | " + avg + " | " + pct(row.metrics.min) + " | " +
         pct(row.metrics.max) + " | " + pct(row.metrics.sd) + " | " + pct(row.metrics.f_measure) +
         " | " + pct(row.metrics.auc) + " |\n";
  }
  s += "\nBold AVG marks sizes whose mean accuracy beats the parent forest.\n";

  s += "\n## Parent forest\n\n| ensemble | AVG | F-measure | AUC |\n|---|--:|--:|--:|\n";
  s += "| RF (" + std::to_string(cfg.n_trees) + " trees) | " + pct(rep.rf.avg) + " | " +
       pct(rep.rf.f_measure) + " | " + pct(rep.rf.auc) + " |\n";

  s += "\n## Pruning level\n\n| k | pruning level |\n|--:|--:|\n";
  for (const KRow& row : rep.rows) {
    s += "| " + std::to_string(row.k) + " | " + fixed(row.pruning, 2) + "% |\n";
  }

  if (rep.has_bias_variance) {
    const KRow& best = best_row(rep);
    s += "\n## Bias and variance\n\n| ensemble | size | bias | variance |\n|---|--:|--:|--:|\n";
    s += "| RF | " + std::to_string(cfg.n_trees) + " | " + pct(rep.rf.bias) + " | " +
         pct(rep.rf.variance) + " |\n";
    s += "| LOFB-DRF | " + std::to_string(best.k) + " | " + pct(best.metrics.bias) + " | " +
         pct(best.metrics.variance) + " |\n";
  }
  return s;
}

}  // namespace

std::vector<std::filesystem::path> emit_report(const ExperimentReport& rep) {
  if (rep.rows.empty()) throw InputError("empty k sweep");
  const ExperimentConfig& cfg = rep.config;
  bool want_csv = cfg.format == "csv" || cfg.format == "both";
  bool want_md = cfg.format == "markdown" || cfg.format == "both";
  if (!want_csv && !want_md) throw InputError("unknown report format: " + cfg.format);

  std::error_code ec;
  std::filesystem::create_directories(cfg.out_dir, ec);
  if (ec) throw RuntimeError("cannot create output directory: " + cfg.out_dir.string());

  std::vector<std::filesystem::path> written;
  auto emit = [&](const std::string& suffix, const std::string& content) {
    std::filesystem::path p = cfg.out_dir / (rep.dataset + suffix);
    write_text_file(p, content);
    written.push_back(p);
  };
  if (want_csv) {
    emit("_metrics.csv", metrics_csv(rep));
    emit("_pruning.csv", pruning_csv(rep));
    if (rep.has_bias_variance) emit("_bias_variance.csv", bias_variance_csv(rep));
  }
  if (want_md) emit("_report.md", markdown_report(rep));
  return written;
}

}  // namespace lofdrf
