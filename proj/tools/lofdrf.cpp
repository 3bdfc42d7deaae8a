#include <charconv>
#include <chrono>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "lofdrf/dataset.hpp"
#include "lofdrf/error.hpp"
#include "lofdrf/eval.hpp"
#include "lofdrf/experiment.hpp"
#include "lofdrf/forest.hpp"
#include "lofdrf/io.hpp"
#include "lofdrf/prune.hpp"

namespace {

using namespace lofdrf;

SchemaOverride overrides_from(const std::string& schema_path) {
  if (schema_path.empty()) return {};
  return parse_schema_file(schema_path);
}

std::string pct(double v) { return fixed(100.0 * v, 2); }

std::string trim_copy(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::map<std::string, std::string> parse_flat_config(const std::string& path) {
  std::map<std::string, std::string> kv;
  std::string text = read_text_file(path);
  size_t pos = 0, line_no = 0;
  while (pos <= text.size()) {
    size_t end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    std::string line = trim_copy(text.substr(pos, end - pos));
    pos = end + 1;
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw InputError("config line " + std::to_string(line_no) + " is not key=value");
    }
    kv[trim_copy(line.substr(0, eq))] = trim_copy(line.substr(eq + 1));
  }
  return kv;
}

uint64_t config_u64(const std::string& key, const std::string& value) {
  uint64_t out{};
  auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc{} || p != value.data() + value.size()) {
    throw InputError("bad config value for " + key + ": " + value);
  }
  return out;
}

double config_f64(const std::string& key, const std::string& value) {
  auto v = parse_double(value);
  if (!v) throw InputError("bad config value for " + key + ": " + value);
  return *v;
}

bool config_bool(const std::string& key, const std::string& value) {
  if (value == "1" || value == "true" || value == "yes" || value == "on") return true;
  if (value == "0" || value == "false" || value == "no" || value == "off") return false;
  throw InputError("bad config value for " + key + ": " + value);
}

std::vector<size_t> config_ks(const std::string& key, const std::string& value) {
  std::vector<size_t> out;
  size_t pos = 0;
  while (pos <= value.size()) {
    size_t end = value.find(',', pos);
    if (end == std::string::npos) end = value.size();
    out.push_back(size_t(config_u64(key, trim_copy(value.substr(pos, end - pos)))));
    pos = end + 1;
  }
  return out;
}

struct TrainArgs {
  std::string data;
  std::string label = "class";
  std::string schema;
  std::string out;
  size_t trees = 500;
  uint32_t features = 0;
  uint64_t seed = 1;
  size_t threads = 0;
};

void cmd_train(const TrainArgs& a) {
  Dataset data = load_table(a.data, a.label, overrides_from(a.schema));
  impute_missing(data, train_medians(data));
  auto t0 = std::chrono::steady_clock::now();
  Forest f = build_forest(data, a.trees, a.features, a.seed, a.threads);
  auto ms =
      std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0)
          .count();
  save_forest(f, a.out);
  std::cout << "trees: " << f.size() << "\n"
            << "features_per_node: " << f.s_per_node << "\n"
            << "build_time_ms: " << ms << "\n"
            << "model: " << a.out << "\n";
}

struct PruneArgs {
  std::string model;
  std::string data;
  std::string label = "class";
  std::string schema;
  std::string out;
  size_t k = 0;
  size_t k_lof = 10;
  bool invert = false;
  size_t threads = 0;
};

void cmd_prune(const PruneArgs& a) {
  Forest f = load_forest(a.model);
  Dataset train = remap_to_schema(f.schema, load_table(a.data, a.label, overrides_from(a.schema)));
  std::vector<WeightedTree> weights = weight_trees(f, train, a.k_lof, a.threads);
  PrunedForest p = select_top_k(f, weights, a.k, a.invert);
  save_pruned(p, a.model, a.out);

  if (a.invert) {
    std::cout << "note: --invert-ranking keeps the least outlying trees; this is a diagnostic"
                 " baseline, not the standard ranking\n";
  }
  std::cout << "parent_trees: " << f.size() << "\n"
            << "selected_k: " << p.selected.size() << "\n"
            << "pruning_level: " << fixed(pruning_level(f.size(), p.selected.size()), 2) << "%\n"
            << "tree\traw_lof\tnormalized_lof\taccuracy\tweight\n";
  for (const WeightedTree& w : p.weights) {
    std::cout << w.tree_index << "\t" << fixed(w.raw_lof, 4) << "\t" << fixed(w.normalized_lof, 4)
              << "\t" << fixed(w.accuracy, 4) << "\t" << fixed(w.weight, 4) << "\n";
  }
  std::cout << "model: " << a.out << "\n";
}

struct EvalArgs {
  std::string model;
  std::string data;
  std::string label = "class";
  std::string schema;
  std::string dump;
  size_t threads = 0;
};

void cmd_evaluate(const EvalArgs& a) {
  Dataset raw = load_table(a.data, a.label, overrides_from(a.schema));
  RunMetrics m;
  Dataset test;
  std::vector<int32_t> preds;
  bool want_dump = !a.dump.empty();

  if (model_kind(a.model) == kModelKindForest) {
    Forest f = load_forest(a.model);
    test = remap_to_schema(f.schema, raw);
    m = evaluate_forest(f, test, a.threads);
    if (want_dump) {
      preds.resize(test.n_rows());
      for (size_t r = 0; r < test.n_rows(); ++r) preds[r] = predict_forest(f, test, r);
    }
  } else {
    PrunedModel pm = load_pruned(a.model);
    test = remap_to_schema(pm.parent->schema, raw);
    m = evaluate_pruned(pm.pruned, test, a.threads);
    if (want_dump) {
      preds.resize(test.n_rows());
      for (size_t r = 0; r < test.n_rows(); ++r) preds[r] = classify_pruned(pm.pruned, test, r);
    }
  }

  std::cout << "accuracy: " << pct(m.accuracy) << "\n"
            << "f_measure: " << pct(m.f_measure) << "\n"
            << "auc: " << pct(m.auc) << "\n";
  if (want_dump) {
    std::string s = "row,truth,prediction\n";
    for (size_t r = 0; r < test.n_rows(); ++r) {
      s += std::to_string(r) + "," + test.class_labels[size_t(test.labels[r])] + "," +
           test.class_labels[size_t(preds[r])] + "\n";
    }
    write_text_file(a.dump, s);
    std::cout << "predictions: " << a.dump << "\n";
  }
}

void cmd_experiment(ExperimentConfig cfg, const std::string& data, const std::string& schema,
                    const std::string& out_dir) {
  cfg.data_path = data;
  cfg.schema_path = schema;
  cfg.out_dir = out_dir;
  ExperimentReport rep = run_experiment(cfg);

  std::cout << "dataset: " << rep.dataset << " (" << rep.n_rows << " rows, " << rep.n_classes
            << " classes)\n"
            << "parent rf: " << rep.config.n_trees << " trees, avg " << pct(rep.rf.avg) << ", f "
            << pct(rep.rf.f_measure) << ", auc " << pct(rep.rf.auc) << "\n";
  for (const KRow& row : rep.rows) {
    std::cout << "k " << row.k << ": avg " << pct(row.metrics.avg) << ", sd "
              << pct(row.metrics.sd) << ", f " << pct(row.metrics.f_measure) << ", auc "
              << pct(row.metrics.auc) << ", pruning " << fixed(row.pruning, 2) << "%"
              << (row.beats_rf ? " (beats rf)" : "") << "\n";
  }
  std::cout << "best k: " << rep.best_k << "\n";
  if (rep.has_bias_variance) {
    std::cout << "rf bias/variance: " << pct(rep.rf.bias) << "/" << pct(rep.rf.variance) << "\n";
  }
  for (const std::filesystem::path& p : emit_report(rep)) {
    std::cout << "wrote: " << p.generic_string() << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"LOFB-DRF: prune a random forest down to its most outlying accurate trees"};
  app.require_subcommand(1);

  TrainArgs train_args;
  CLI::App* train = app.add_subcommand("train", "grow a random forest and save it");
  train->add_option("--data", train_args.data, "training table (.csv or .arff)")->required();
  train->add_option("--label", train_args.label, "label column name or 0-based index")
      ->capture_default_str();
  train->add_option("--schema", train_args.schema, "feature kind override file (name:kind lines)");
  train->add_option("--trees", train_args.trees, "ensemble size")->capture_default_str();
  train->add_option("--features", train_args.features,
                    "candidate features per node (0 = sqrt of feature count)")
      ->capture_default_str();
  train->add_option("--seed", train_args.seed, "master seed")->capture_default_str();
  train->add_option("--threads", train_args.threads, "worker threads (0 = all cores)")
      ->capture_default_str();
  train->add_option("--out", train_args.out, "output model path")->required();
  train->callback([&] { cmd_train(train_args); });

  PruneArgs prune_args;
  CLI::App* prune = app.add_subcommand("prune", "select the top-k weighted trees of a forest");
  prune->add_option("--model", prune_args.model, "parent forest model file")->required();
  prune->add_option("--data", prune_args.data, "training table used for weighting")->required();
  prune->add_option("--label", prune_args.label, "label column name or 0-based index")
      ->capture_default_str();
  prune->add_option("--schema", prune_args.schema, "feature kind override file");
  prune->add_option("--k", prune_args.k, "trees to keep")->required();
  prune->add_option("--k-lof", prune_args.k_lof, "LOF neighborhood size")->capture_default_str();
  prune->add_flag("--invert-ranking", prune_args.invert,
                  "keep the least outlying trees (diagnostic baseline)");
  prune->add_option("--threads", prune_args.threads, "worker threads (0 = all cores)")
      ->capture_default_str();
  prune->add_option("--out", prune_args.out, "output model path")->required();
  prune->callback([&] { cmd_prune(prune_args); });

  EvalArgs eval_args;
  CLI::App* evaluate = app.add_subcommand("evaluate", "score a forest or pruned model on a table");
  evaluate->add_option("--model", eval_args.model, "forest or pruned model file")->required();
  evaluate->add_option("--data", eval_args.data, "test table")->required();
  evaluate->add_option("--label", eval_args.label, "label column name or 0-based index")
      ->capture_default_str();
  evaluate->add_option("--schema", eval_args.schema, "feature kind override file");
  evaluate->add_option("--threads", eval_args.threads, "worker threads (0 = all cores)")
      ->capture_default_str();
  evaluate->add_option("--dump-predictions", eval_args.dump, "write per-row predictions here");
  evaluate->callback([&] { cmd_evaluate(eval_args); });

  ExperimentConfig cfg;
  std::string exp_data, exp_schema, exp_config, exp_out_dir = ".";
  CLI::App* experiment =
      app.add_subcommand("experiment", "full sweep: repeated splits, forests, and k values");
  experiment->add_option("--data", exp_data, "dataset table (.csv or .arff)");
  experiment->add_option("--label", cfg.label_column, "label column name or 0-based index")
      ->capture_default_str();
  experiment->add_option("--schema", exp_schema, "feature kind override file");
  experiment->add_option("--trees", cfg.n_trees, "parent ensemble size")->capture_default_str();
  experiment->add_option("--features", cfg.s_per_node,
                         "candidate features per node (0 = sqrt of feature count)")
      ->capture_default_str();
  experiment->add_option("--k-lof", cfg.k_lof, "LOF neighborhood size")->capture_default_str();
  experiment->add_option("--ks", cfg.ks, "comma-separated ensemble sizes to sweep")
      ->delimiter(',')
      ->capture_default_str();
  experiment->add_option("--runs", cfg.runs, "independent runs")->capture_default_str();
  experiment->add_option("--train-fraction", cfg.train_fraction, "holdout training share")
      ->capture_default_str();
  experiment->add_option("--seed", cfg.master_seed, "master seed")->capture_default_str();
  experiment->add_flag("--fixed-split", cfg.fixed_split, "reuse one holdout split across runs");
  experiment->add_option("--threads", cfg.threads, "worker threads (0 = all cores)")
      ->capture_default_str();
  experiment->add_option("--out-dir", exp_out_dir, "report directory")->capture_default_str();
  experiment->add_option("--format", cfg.format, "report format: csv, markdown, or both")
      ->capture_default_str();
  experiment->add_option("--config", exp_config, "flat key=value config file; flags override it");
  experiment->callback([&] {
    if (!exp_config.empty()) {
      auto unset = [&](const std::string& flag) { return experiment->count(flag) == 0; };
      for (const auto& [key, value] : parse_flat_config(exp_config)) {
        if (key == "data") {
          if (unset("--data")) exp_data = value;
        } else if (key == "label") {
          if (unset("--label")) cfg.label_column = value;
        } else if (key == "schema") {
          if (unset("--schema")) exp_schema = value;
        } else if (key == "trees") {
          if (unset("--trees")) cfg.n_trees = size_t(config_u64(key, value));
        } else if (key == "features") {
          if (unset("--features")) cfg.s_per_node = uint32_t(config_u64(key, value));
        } else if (key == "k-lof") {
          if (unset("--k-lof")) cfg.k_lof = size_t(config_u64(key, value));
        } else if (key == "ks") {
          if (unset("--ks")) cfg.ks = config_ks(key, value);
        } else if (key == "runs") {
          if (unset("--runs")) cfg.runs = size_t(config_u64(key, value));
        } else if (key == "train-fraction") {
          if (unset("--train-fraction")) cfg.train_fraction = config_f64(key, value);
        } else if (key == "seed") {
          if (unset("--seed")) cfg.master_seed = config_u64(key, value);
        } else if (key == "fixed-split") {
          if (unset("--fixed-split")) cfg.fixed_split = config_bool(key, value);
        } else if (key == "threads") {
          if (unset("--threads")) cfg.threads = size_t(config_u64(key, value));
        } else if (key == "out-dir") {
          if (unset("--out-dir")) exp_out_dir = value;
        } else if (key == "format") {
          if (unset("--format")) cfg.format = value;
        } else {
          throw InputError("unknown config key: " + key);
        }
      }
    }
    if (exp_data.empty()) throw InputError("no dataset given (use --data or a config file)");
    cmd_experiment(cfg, exp_data, exp_schema, exp_out_dir);
  });

  try {
    app.parse(argc, argv);
    return 0;
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
