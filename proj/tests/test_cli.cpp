#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "support/helpers.hpp"

namespace fs = std::filesystem;
using testutil::TempDir;

namespace {

struct CliResult {
  int exit_code = -1;
  std::string output;  // stdout and stderr interleaved
};

CliResult run_cli(const TempDir& tmp, const std::string& args) {
  fs::path log = tmp.path / "cli_output.log";
  std::string cmd = testutil::cli_path().string() + " " + args + " > " + log.string() + " 2>&1";
  int status = std::system(cmd.c_str());
  CliResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream in(log);
  std::ostringstream ss;
  ss << in.rdbuf();
  r.output = ss.str();
  return r;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string iris() { return (testutil::data_dir() / "iris.csv").string(); }

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("train, prune, and evaluate chain together on real data") {
    TempDir tmp;
    fs::path model = tmp.file("forest.bin");
    CliResult train = run_cli(
        tmp, "train --data " + iris() + " --trees 50 --seed 3 --out " + model.string());
    REQUIRE(train.exit_code == 0);
    CHECK(fs::exists(model));
    CHECK(train.output.find("trees: 50") != std::string::npos);

    // Retraining with the same seed reproduces the file byte for byte.
    fs::path model2 = tmp.file("forest2.bin");
    run_cli(tmp, "train --data " + iris() + " --trees 50 --seed 3 --out " + model2.string());
    CHECK(read_file(model) == read_file(model2));

    fs::path pruned = tmp.file("pruned.bin");
    CliResult prune = run_cli(tmp, "prune --model " + model.string() + " --data " + iris() +
                                       " --k 5 --k-lof 10 --out " + pruned.string());
    REQUIRE(prune.exit_code == 0);
    CHECK(prune.output.find("pruning_level: 90.00%") != std::string::npos);
    CHECK(prune.output.find("selected_k: 5") != std::string::npos);

    fs::path dump = tmp.file("preds.csv");
    CliResult eval = run_cli(tmp, "evaluate --model " + pruned.string() + " --data " + iris() +
                                      " --dump-predictions " + dump.string());
    REQUIRE(eval.exit_code == 0);
    CHECK(eval.output.find("accuracy:") != std::string::npos);
    CHECK(eval.output.find("f_measure:") != std::string::npos);
    CHECK(eval.output.find("auc:") != std::string::npos);

    std::ifstream preds(dump);
    std::string line;
    size_t lines = 0;
    while (std::getline(preds, line)) ++lines;
    CHECK(lines == 151);  // header plus one row per instance

    CliResult eval_parent = run_cli(tmp, "evaluate --model " + model.string() + " --data " + iris());
    CHECK(eval_parent.exit_code == 0);
  }

  TEST_CASE("inverted ranking is labeled as a diagnostic") {
    TempDir tmp;
    fs::path model = tmp.file("forest.bin");
    run_cli(tmp, "train --data " + iris() + " --trees 20 --seed 5 --out " + model.string());
    CliResult prune = run_cli(tmp, "prune --model " + model.string() + " --data " + iris() +
                                       " --k 4 --k-lof 5 --invert-ranking --out " +
                                       tmp.file("inv.bin").string());
    REQUIRE(prune.exit_code == 0);
    CHECK(prune.output.find("least outlying") != std::string::npos);
  }

  TEST_CASE("failures map to distinct exit codes") {
    TempDir tmp;
    CliResult missing = run_cli(tmp, "train --data /nonexistent.csv --out " +
                                         tmp.file("x.bin").string());
    CHECK(missing.exit_code == 2);
    CHECK(missing.output.find("error:") != std::string::npos);

    fs::path junk = tmp.file("junk.bin");
    std::ofstream(junk) << "this is not a model";
    CliResult corrupt = run_cli(tmp, "evaluate --model " + junk.string() + " --data " + iris());
    CHECK(corrupt.exit_code == 2);
    CHECK(corrupt.output.find("not a lofdrf model") != std::string::npos);

    CliResult bad_flag = run_cli(tmp, "train --no-such-flag");
    CHECK(bad_flag.exit_code == 2);

    CliResult no_subcommand = run_cli(tmp, "");
    CHECK(no_subcommand.exit_code == 2);

    CliResult help = run_cli(tmp, "--help");
    CHECK(help.exit_code == 0);
    CHECK(help.output.find("experiment") != std::string::npos);

    CliResult bad_k = run_cli(tmp, "experiment --data " + iris() + " --trees 10 --ks 99 --runs 1" +
                                       " --out-dir " + tmp.path.string());
    CHECK(bad_k.exit_code == 2);
  }

  TEST_CASE("experiment flags override config file values") {
    TempDir tmp;
    fs::path config = tmp.file("exp.conf");
    {
      std::ofstream out(config);
      out << "# small sweep\n";
      out << "data = " << iris() << "\n";
      out << "trees = 60\n";
      out << "ks = 5,15\n";
      out << "runs = 2\n";
      out << "k-lof = 5\n";
      out << "seed = 21\n";
    }

    fs::path dir_a = tmp.file("a");
    CliResult from_config = run_cli(tmp, "experiment --config " + config.string() +
                                             " --out-dir " + dir_a.string());
    REQUIRE(from_config.exit_code == 0);
    CHECK(from_config.output.find("60 trees") != std::string::npos);
    CHECK(fs::exists(dir_a / "iris_metrics.csv"));
    CHECK(fs::exists(dir_a / "iris_report.md"));

    fs::path dir_b = tmp.file("b");
    CliResult overridden = run_cli(tmp, "experiment --config " + config.string() +
                                            " --trees 70 --out-dir " + dir_b.string());
    REQUIRE(overridden.exit_code == 0);
    CHECK(overridden.output.find("70 trees") != std::string::npos);

    fs::path bad = tmp.file("bad.conf");
    std::ofstream(bad) << "no_such_key = 1\n";
    CliResult unknown = run_cli(tmp, "experiment --config " + bad.string());
    CHECK(unknown.exit_code == 2);
    CHECK(unknown.output.find("unknown config key") != std::string::npos);

    CliResult no_data = run_cli(tmp, "experiment --runs 1");
    CHECK(no_data.exit_code == 2);
    CHECK(no_data.output.find("no dataset given") != std::string::npos);
  }

  TEST_CASE("experiment reports are identical across reruns and thread counts") {
    TempDir tmp;
    std::string base = "experiment --data " + iris() +
                       " --trees 30 --ks 5,10 --runs 2 --k-lof 5 --seed 9 --format both";
    fs::path dir_a = tmp.file("a");
    fs::path dir_b = tmp.file("b");
    CliResult ra = run_cli(tmp, base + " --threads 1 --out-dir " + dir_a.string());
    CliResult rb = run_cli(tmp, base + " --threads 4 --out-dir " + dir_b.string());
    REQUIRE(ra.exit_code == 0);
    REQUIRE(rb.exit_code == 0);

    for (const char* name :
         {"iris_metrics.csv", "iris_pruning.csv", "iris_bias_variance.csv", "iris_report.md"}) {
      CAPTURE(name);
      REQUIRE(fs::exists(dir_a / name));
      REQUIRE(fs::exists(dir_b / name));
      CHECK(read_file(dir_a / name) == read_file(dir_b / name));
    }
    CHECK(ra.output.find("best k:") != std::string::npos);
  }
}
