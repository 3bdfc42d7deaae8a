#include <doctest.h>

#include <cmath>
#include <vector>

#include "lofdrf/error.hpp"
#include "lofdrf/eval.hpp"
#include "lofdrf/rng.hpp"
#include "support/helpers.hpp"
#include "support/oracles.hpp"

using namespace lofdrf;
using testutil::make_numeric_dataset;

namespace {

// Ten rows, first five of class 0, ranking scores chosen so every metric has
// a clean closed form: accuracy 0.7, macro F1 23/33, macro AUC 0.84.
struct Fixture {
  std::vector<int32_t> truth = {0, 0, 0, 0, 0, 1, 1, 1, 1, 1};
  std::vector<double> score_a = {0.9, 0.8, 0.8, 0.4, 0.2, 0.7, 0.3, 0.3, 0.1, 0.0};

  std::vector<std::vector<double>> fractions() const {
    std::vector<std::vector<double>> out;
    for (double s : score_a) out.push_back({s, 1.0 - s});
    return out;
  }
};

}  // namespace

TEST_SUITE("eval") {
  TEST_CASE("diversity is the pairwise disagreement fraction") {
    std::vector<int32_t> u = {0, 0, 1, 2, 2, 0, 1, 2, 1, 1};
    std::vector<int32_t> v = {0, 0, 1, 1, 0, 0, 1, 2, 2, 2};
    CHECK(diversity(u, v) == 0.4);
    CHECK(diversity(v, u) == 0.4);
    CHECK(diversity(u, u) == 0.0);

    // Agreement and diversity partition the rows.
    size_t agree = 0;
    for (size_t i = 0; i < u.size(); ++i) agree += (u[i] == v[i]);
    CHECK(diversity(u, v) == 1.0 - double(agree) / double(u.size()));
  }

  TEST_CASE("contingency counts split correctness four ways") {
    std::vector<int32_t> truth = {0, 0, 0, 0, 1, 1, 1, 1, 1, 1};
    std::vector<int32_t> a = {0, 0, 1, 1, 1, 1, 0, 0, 1, 0};
    std::vector<int32_t> b = {0, 1, 0, 1, 1, 0, 1, 0, 1, 1};
    ContingencyCounts c = contingency(a, b, truth, 2);
    CHECK(c.n11 == 3);  // rows 0, 4, 8
    CHECK(c.n10 == 2);  // rows 1, 5
    CHECK(c.n01 == 3);  // rows 2, 6, 9
    CHECK(c.n00 == 2);  // rows 3, 7
    CHECK(disagreement(c) == 0.5);
    CHECK(double_fault(c) == 0.2);

    ContingencyCounts fixed{4, 3, 2, 1};
    CHECK(disagreement(fixed) == 0.5);
    CHECK(double_fault(fixed) == 0.1);

    std::vector<int32_t> three = {0, 1, 2, 0, 1, 2, 0, 1, 2, 0};
    CHECK_THROWS_WITH_AS(contingency(a, b, three, 3), doctest::Contains("binary"), InputError);
  }

  TEST_CASE("contingency identities hold on random binary predictions") {
    Rng gen(55);
    for (int trial = 0; trial < 20; ++trial) {
      size_t n = 5 + gen.below(40);
      std::vector<int32_t> truth(n), a(n), b(n);
      for (size_t i = 0; i < n; ++i) {
        truth[i] = int32_t(gen.below(2));
        a[i] = int32_t(gen.below(2));
        b[i] = int32_t(gen.below(2));
      }
      ContingencyCounts c = contingency(a, b, truth, 2);
      CHECK(c.total() == n);
      size_t both_right = 0, both_wrong = 0;
      for (size_t i = 0; i < n; ++i) {
        both_right += (a[i] == truth[i] && b[i] == truth[i]);
        both_wrong += (a[i] != truth[i] && b[i] != truth[i]);
      }
      CHECK(c.n11 == both_right);
      CHECK(c.n00 == both_wrong);
      CHECK(disagreement(c) + double_fault(c) <= 1.0 + 1e-15);
      CHECK(disagreement(c) == double(c.n10 + c.n01) / double(n));
      CHECK(disagreement(c) ==
            doctest::Approx(1.0 - double(c.n11 + c.n00) / double(n)).epsilon(1e-12));
    }
  }

  TEST_CASE("the ten-row fixture reproduces its closed-form metrics") {
    Fixture fx;
    RunMetrics m = evaluate_votes(fx.fractions(), fx.truth, 2);
    CHECK(m.accuracy == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(m.f_measure == doctest::Approx(23.0 / 33.0).epsilon(1e-12));
    CHECK(m.auc == doctest::Approx(0.84).epsilon(1e-12));

    // Reversing the ranking flips the AUC around one half.
    std::vector<std::vector<double>> reversed;
    for (double s : fx.score_a) reversed.push_back({1.0 - s, s});
    CHECK(macro_auc(reversed, fx.truth, 2) == doctest::Approx(0.16).epsilon(1e-12));

    // A perfect ranker and a constant one bracket it.
    std::vector<std::vector<double>> perfect, flat;
    for (int32_t t : fx.truth) {
      perfect.push_back(t == 0 ? std::vector<double>{1.0, 0.0} : std::vector<double>{0.0, 1.0});
      flat.push_back({0.5, 0.5});
    }
    CHECK(macro_auc(perfect, fx.truth, 2) == 1.0);
    CHECK(macro_auc(flat, fx.truth, 2) == 0.5);
  }

  TEST_CASE("macro statistics cover absent and degenerate classes") {
    // Class 2 never appears in truth or predictions: its F1 term is 0.
    std::vector<int32_t> truth = {0, 0, 1, 1};
    std::vector<int32_t> perfect = {0, 0, 1, 1};
    CHECK(macro_f1(perfect, truth, 2) == 1.0);
    CHECK(macro_f1(perfect, truth, 3) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(accuracy_rate(perfect, truth) == 1.0);

    // One-class truth leaves no valid one-vs-rest split: fall back to 0.5.
    std::vector<int32_t> ones = {1, 1, 1};
    std::vector<std::vector<double>> scores = {{0.2, 0.8}, {0.6, 0.4}, {0.5, 0.5}};
    CHECK(macro_auc(scores, ones, 2) == 0.5);

    CHECK_THROWS_AS(evaluate_votes({}, truth, 2), InputError);
    std::vector<std::vector<double>> ragged = {{0.5, 0.5}, {1.0}};
    std::vector<int32_t> two = {0, 1};
    CHECK_THROWS_AS(evaluate_votes(ragged, two, 2), InputError);
  }

  TEST_CASE("vote ties resolve to the earliest class") {
    std::vector<std::vector<double>> fractions = {{0.5, 0.5}, {0.4, 0.6}};
    std::vector<int32_t> truth = {0, 1};
    RunMetrics m = evaluate_votes(fractions, truth, 2);
    CHECK(m.accuracy == 1.0);  // the tied row goes to class 0
  }

  TEST_CASE("run aggregation gives population statistics") {
    std::vector<RunMetrics> two = {{0.6, 0.5, 0.7}, {0.8, 0.7, 0.9}};
    MetricsReport r = aggregate_runs(two);
    CHECK(r.avg == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(r.min == 0.6);
    CHECK(r.max == 0.8);
    CHECK(r.sd == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(r.f_measure == doctest::Approx(0.6).epsilon(1e-12));
    CHECK(r.auc == doctest::Approx(0.8).epsilon(1e-12));
    CHECK(r.bias == 0.0);
    CHECK(r.variance == 0.0);

    std::vector<RunMetrics> one = {{0.42, 0.4, 0.5}};
    MetricsReport single = aggregate_runs(one);
    CHECK(single.avg == 0.42);
    CHECK(single.sd == 0.0);

    Rng gen(7);
    std::vector<RunMetrics> runs;
    std::vector<double> accs;
    for (int i = 0; i < 10; ++i) {
      double a = gen.unit();
      runs.push_back({a, gen.unit(), gen.unit()});
      accs.push_back(a);
    }
    MetricsReport agg = aggregate_runs(runs);
    oracle::Aggregate ref = oracle::naive_aggregate(accs);
    CHECK(agg.avg == doctest::Approx(ref.avg).epsilon(1e-12));
    CHECK(agg.min == ref.min);
    CHECK(agg.max == ref.max);
    CHECK(agg.sd == doctest::Approx(ref.sd).epsilon(1e-12));

    CHECK_THROWS_AS(aggregate_runs(std::vector<RunMetrics>{}), InputError);
  }

  TEST_CASE("bias and variance decompose 0/1 loss against the modal prediction") {
    // One test row of class 0, three runs predicting 0, 0, 1: the modal
    // prediction is right (bias 0) and one run in three strays (variance 1/3).
    std::vector<std::vector<int32_t>> per_run = {{0}, {0}, {1}};
    std::vector<int32_t> truth = {0};
    BiasVariance bv = bias_variance_from_predictions(per_run, truth, 2);
    CHECK(bv.bias == 0.0);
    CHECK(bv.variance == doctest::Approx(1.0 / 3.0).epsilon(1e-12));

    std::vector<std::vector<int32_t>> stubborn = {{1, 1}, {1, 1}};
    std::vector<int32_t> truth2 = {0, 1};
    BiasVariance bv2 = bias_variance_from_predictions(stubborn, truth2, 2);
    CHECK(bv2.bias == 0.5);
    CHECK(bv2.variance == 0.0);

    std::vector<std::vector<int32_t>> ideal = {{0, 1}, {0, 1}, {0, 1}};
    BiasVariance bv3 = bias_variance_from_predictions(ideal, truth2, 2);
    CHECK(bv3.bias == 0.0);
    CHECK(bv3.variance == 0.0);

    CHECK_THROWS_AS(bias_variance_from_predictions({{0}}, truth, 2), InputError);
  }

  TEST_CASE("bias-variance harness drives a training procedure over resamples") {
    Rng gen(91);
    std::vector<std::vector<double>> rows;
    std::vector<std::string> labels;
    for (int i = 0; i < 30; ++i) {
      rows.push_back({gen.unit()});
      labels.push_back(i % 3 == 0 ? "b" : "a");
    }
    Dataset d = make_numeric_dataset(rows, labels);

    TrainProcedure constant = [](const Dataset&, const Dataset& test, uint64_t) {
      return std::vector<int32_t>(test.n_rows(), 0);
    };
    BiasVariance bv = bias_variance(constant, d, 4, 17);
    CHECK(bv.variance == 0.0);
    CHECK(bv.bias >= 0.0);
    CHECK(bv.bias <= 1.0);

    CHECK_THROWS_AS(bias_variance(constant, d, 1, 17), InputError);

    TrainProcedure miscounted = [](const Dataset&, const Dataset& test, uint64_t) {
      return std::vector<int32_t>(test.n_rows() + 1, 0);
    };
    CHECK_THROWS_AS(bias_variance(miscounted, d, 2, 17), RuntimeError);
  }

  TEST_CASE("forest evaluation equals metrics over its own vote fractions") {
    Rng gen(12);
    std::vector<std::vector<double>> rows;
    std::vector<std::string> labels;
    for (int i = 0; i < 40; ++i) {
      double cls = double(gen.below(2));
      rows.push_back({cls * 2.0 + gen.unit(), gen.unit()});
      labels.push_back(cls == 0.0 ? "a" : "b");
    }
    Dataset d = make_numeric_dataset(rows, labels);
    Forest f = build_forest(d, 9, 1, 3);

    std::vector<size_t> all(f.size());
    for (size_t i = 0; i < all.size(); ++i) all[i] = i;
    std::vector<std::vector<double>> fractions;
    for (size_t r = 0; r < d.n_rows(); ++r) fractions.push_back(vote_fractions(f, all, d, r));

    RunMetrics direct = evaluate_forest(f, d);
    RunMetrics via_votes = evaluate_votes(fractions, d.labels, d.class_labels.size());
    CHECK(direct.accuracy == via_votes.accuracy);
    CHECK(direct.f_measure == via_votes.f_measure);
    CHECK(direct.auc == via_votes.auc);
  }
}
