#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <string>
#include <vector>

#include "evotree/util.hpp"
#include "support/oracles.hpp"

using testsupport::CliResult;
using testsupport::ModelOracle;
using testsupport::SimpleArff;
using testsupport::dot_well_formed;
using testsupport::run_cli;
using testsupport::simple_arff_read;
using testsupport::slurp_file;
using testsupport::spit_file;
using testsupport::temp_path;

namespace {

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    const std::size_t nl = text.find('\n', start);
    if (nl == std::string::npos) {
      lines.push_back(text.substr(start));
      break;
    }
    lines.push_back(text.substr(start, nl - start));
    start = nl + 1;
  }
  return lines;
}

// Value of the first "prefix<value>" line; empty when absent.
std::string value_after(const std::string& text, const std::string& prefix) {
  for (const std::string& line : split_lines(text)) {
    if (line.rfind(prefix, 0) == 0) return line.substr(prefix.size());
  }
  return "";
}

bool contains_line(const std::string& text, const std::string& line) {
  for (const std::string& l : split_lines(text))
    if (l == line) return true;
  return false;
}

// One small generated dataset and one trained model, built once and shared.
struct Fixture {
  std::string data_path = temp_path("fixture-data.arff");
  std::string test_path = temp_path("fixture-test.arff");
  std::string model_path = temp_path("fixture-model.json");
  std::string stats_path = temp_path("fixture-stats.csv");
  std::string train_stdout;

  Fixture() {
    CliResult g1 = run_cli({"datagen", "--n", "80", "--seed", "7", "--out", data_path});
    REQUIRE(g1.exit_code == 0);
    CliResult g2 = run_cli({"datagen", "--n", "40", "--seed", "8", "--out", test_path});
    REQUIRE(g2.exit_code == 0);
    CliResult t = run_cli({"train", "--data", data_path, "--model", model_path, "--stats",
                           stats_path, "--population", "20", "--generations", "8", "--seed", "5"});
    REQUIRE_MESSAGE(t.exit_code == 0, t.err);
    train_stdout = t.out;
  }
};

const Fixture& fixture() {
  static Fixture f;
  return f;
}

}  // namespace

TEST_CASE("version flag prints the tool identity") {
  const CliResult r = run_cli({"--version"});
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("evotree 0.1.0") != std::string::npos);
}

TEST_CASE("usage errors exit with the configuration code") {
  CHECK(run_cli({}).exit_code == 2);
  CHECK(run_cli({"explode"}).exit_code == 2);
  CHECK(run_cli({"datagen", "--bogus"}).exit_code == 2);
  CHECK(run_cli({"train", "--model", temp_path("no-data.json")}).exit_code == 2);
}

TEST_CASE("datagen writes the same bytes to stdout and to a file") {
  const CliResult direct = run_cli({"datagen", "--n", "30", "--seed", "3"});
  REQUIRE(direct.exit_code == 0);

  const std::string out = temp_path("gen.arff");
  const CliResult filed = run_cli({"datagen", "--n", "30", "--seed", "3", "--out", out});
  REQUIRE(filed.exit_code == 0);
  CHECK(slurp_file(out) == direct.out);

  const std::string manifest = slurp_file(out + ".manifest");
  CHECK(contains_line(manifest, "command=datagen"));
  CHECK(contains_line(manifest, "n=30"));
  CHECK(contains_line(manifest, "seed=3"));
  CHECK(contains_line(manifest, "noise=0"));
  CHECK(contains_line(manifest, "table=usda-11-v1"));
  CHECK(contains_line(manifest, "out=" + out));

  const SimpleArff parsed = simple_arff_read(direct.out);
  const std::vector<std::string> names = {"Depth",      "Sand",       "Silt",
                                          "Clay",       "Sandbysilt", "Sandbyclay",
                                          "Sandbysiltclay", "TextureClass"};
  CHECK(parsed.names == names);
  CHECK(parsed.rows.size() == 30);

  // Same seed, same bytes; different seed, different bytes.
  const CliResult again = run_cli({"datagen", "--n", "30", "--seed", "3"});
  CHECK(again.out == direct.out);
  const CliResult other = run_cli({"datagen", "--n", "30", "--seed", "4"});
  CHECK(other.out != direct.out);
}

TEST_CASE("datagen rejects invalid settings") {
  CHECK(run_cli({"datagen", "--n", "5", "--noise", "1.5"}).exit_code == 2);
  CHECK(run_cli({"datagen", "--n", "0"}).exit_code == 2);
  CHECK(run_cli({"datagen", "--n", "5", "--depth-min", "2", "--depth-max", "1"}).exit_code == 2);
}

TEST_CASE("training reports its result and writes model, stats, and manifest") {
  const Fixture& f = fixture();
  CHECK(value_after(f.train_stdout, "best_fitness=") != "");
  CHECK(value_after(f.train_stdout, "best_size=") != "");
  CHECK(value_after(f.train_stdout, "train_accuracy=") != "");
  CHECK(value_after(f.train_stdout, "test_accuracy=") == "");

  // Stats: exact header, one line per generation plus the initial population,
  // empty held-out column.
  const std::vector<std::string> lines = split_lines(slurp_file(f.stats_path));
  REQUIRE(lines.size() == 10);
  CHECK(lines[0] == "generation,best_fitness,avg_fitness,best_size,train_acc,test_acc");
  for (std::size_t i = 1; i < lines.size(); ++i) {
    CHECK(lines[i].rfind(std::to_string(i - 1) + ",", 0) == 0);
    CHECK(lines[i].back() == ',');
  }

  const std::string manifest = slurp_file(f.model_path + ".manifest");
  CHECK(contains_line(manifest, "tool=evotree 0.1.0"));
  CHECK(contains_line(manifest, "command=train"));
  CHECK(contains_line(manifest, "data=" + f.data_path));
  CHECK(contains_line(manifest, "population=20"));
  CHECK(contains_line(manifest, "generations=8"));
  CHECK(contains_line(manifest, "seed=5"));
  // Default cap: 10 * 8 attributes * 11 classes.
  CHECK(contains_line(manifest, "max_tree_size=880"));
  CHECK(contains_line(manifest, "model=" + f.model_path));
  CHECK(contains_line(manifest, "stats=" + f.stats_path));
  const std::string digest =
      "fnv1a64:" + evotree::to_hex(evotree::fnv1a64(slurp_file(f.data_path)));
  CHECK(contains_line(manifest, "data_digest=" + digest));
}

TEST_CASE("training with a held-out set fills the test accuracy column") {
  const Fixture& f = fixture();
  const std::string model = temp_path("tested-model.json");
  const std::string stats = temp_path("tested-stats.csv");
  const CliResult t =
      run_cli({"train", "--data", f.data_path, "--test", f.test_path, "--model", model,
               "--stats", stats, "--population", "15", "--generations", "5", "--seed", "2"});
  REQUIRE_MESSAGE(t.exit_code == 0, t.err);
  const std::string test_acc = value_after(t.out, "test_accuracy=");
  REQUIRE(test_acc != "");
  const double acc = std::strtod(test_acc.c_str(), nullptr);
  CHECK(acc >= 0.0);
  CHECK(acc <= 1.0);

  const std::vector<std::string> lines = split_lines(slurp_file(stats));
  REQUIRE(lines.size() == 7);
  for (std::size_t i = 1; i < lines.size(); ++i) CHECK(lines[i].back() != ',');
  // The last stats row carries the reported held-out accuracy.
  const std::string last = lines.back();
  CHECK(last.substr(last.rfind(',') + 1) == test_acc);

  const std::string manifest = slurp_file(model + ".manifest");
  CHECK(contains_line(manifest, "test=" + f.test_path));
}

TEST_CASE("verbose training logs per-generation progress to stderr") {
  const Fixture& f = fixture();
  const std::string model = temp_path("verbose-model.json");
  const CliResult t = run_cli({"train", "--data", f.data_path, "--model", model, "--population",
                               "10", "--generations", "3", "--seed", "1", "--verbose"});
  REQUIRE(t.exit_code == 0);
  CHECK(t.err.find("gen 0 best ") != std::string::npos);
  CHECK(t.err.find("gen 3 best ") != std::string::npos);
}

TEST_CASE("prediction on the training data matches the reported accuracy byte for byte") {
  const Fixture& f = fixture();
  const CliResult p = run_cli({"predict", "--model", f.model_path, "--data", f.data_path});
  REQUIRE_MESSAGE(p.exit_code == 0, p.err);

  const std::vector<std::string> lines = split_lines(p.out);
  REQUIRE(lines.size() == 81);  // one label per row, then the accuracy line
  CHECK("accuracy=" + value_after(p.out, "accuracy=") == lines.back());
  CHECK(value_after(p.out, "accuracy=") == value_after(f.train_stdout, "train_accuracy="));

  // Independent check: replay the serialized model over the data file and
  // compare with every printed label.
  const ModelOracle oracle(slurp_file(f.model_path));
  const SimpleArff file = simple_arff_read(slurp_file(f.data_path));
  REQUIRE(file.rows.size() == 80);
  std::size_t correct = 0;
  for (std::size_t r = 0; r < file.rows.size(); ++r) {
    const std::string want = oracle.classify(file, r);
    CHECK(lines[r] == want);
    if (want == file.rows[r].back()) ++correct;
  }
  const double acc = static_cast<double>(correct) / 80.0;
  const double reported = std::strtod(value_after(p.out, "accuracy=").c_str(), nullptr);
  CHECK(std::abs(acc - reported) <= 1e-15);
}

TEST_CASE("prediction accepts rows without the class attribute") {
  const Fixture& f = fixture();
  // Drop the class attribute declaration and the final field of each row.
  const std::string labelled = slurp_file(f.data_path);
  std::string unlabelled;
  bool in_data = false;
  for (const std::string& line : split_lines(labelled)) {
    if (line.rfind("@attribute TextureClass", 0) == 0) continue;
    if (!in_data) {
      unlabelled += line + "\n";
      if (line == "@data") in_data = true;
      continue;
    }
    unlabelled += line.substr(0, line.rfind(',')) + "\n";
  }
  const std::string path = temp_path("unlabelled.arff");
  spit_file(path, unlabelled);

  const CliResult p = run_cli({"predict", "--model", f.model_path, "--data", path});
  REQUIRE_MESSAGE(p.exit_code == 0, p.err);
  const std::vector<std::string> lines = split_lines(p.out);
  REQUIRE(lines.size() == 80);  // labels only, no accuracy line

  const CliResult labelled_run = run_cli({"predict", "--model", f.model_path, "--data",
                                          f.data_path});
  const std::vector<std::string> labelled_lines = split_lines(labelled_run.out);
  for (std::size_t r = 0; r < 80; ++r) CHECK(lines[r] == labelled_lines[r]);

  // The label-free layout cannot support a confusion matrix.
  CHECK(run_cli({"predict", "--model", f.model_path, "--data", path, "--confusion"}).exit_code ==
        2);
}

TEST_CASE("prediction can write labels to a file with a manifest") {
  const Fixture& f = fixture();
  const std::string out = temp_path("labels.txt");
  const CliResult p =
      run_cli({"predict", "--model", f.model_path, "--data", f.data_path, "--out", out});
  REQUIRE(p.exit_code == 0);
  const std::vector<std::string> labels = split_lines(slurp_file(out));
  CHECK(labels.size() == 80);
  CHECK(p.out == "accuracy=" + value_after(p.out, "accuracy=") + "\n");
  const std::string manifest = slurp_file(out + ".manifest");
  CHECK(contains_line(manifest, "command=predict"));
  CHECK(contains_line(manifest, "model=" + f.model_path));
  CHECK(contains_line(manifest, "out=" + out));
}

TEST_CASE("prediction prints a confusion matrix on request") {
  const Fixture& f = fixture();
  const CliResult p =
      run_cli({"predict", "--model", f.model_path, "--data", f.data_path, "--confusion"});
  REQUIRE(p.exit_code == 0);
  const std::vector<std::string> lines = split_lines(p.out);
  // 80 labels, accuracy, header, 11 count rows.
  REQUIRE(lines.size() == 80 + 1 + 1 + 11);
  CHECK(lines[81] == "confusion rows=actual cols=predicted classes=s,sicl,sic,c,sl,cl,sil,l,ls,"
                     "scl,sc");
  std::size_t total = 0;
  for (std::size_t i = 82; i < lines.size(); ++i) {
    std::size_t fields = 0;
    std::string field;
    for (char c : lines[i] + ",") {
      if (c == ',') {
        total += std::strtoull(field.c_str(), nullptr, 10);
        ++fields;
        field.clear();
      } else {
        field += c;
      }
    }
    CHECK(fields == 11);
  }
  CHECK(total == 80);
}

TEST_CASE("prediction refuses data with a different attribute layout") {
  const Fixture& f = fixture();
  const std::string path = temp_path("other-layout.arff");
  spit_file(path,
            "@relation other\n@attribute a numeric\n@attribute cls {u,v}\n@data\n1,u\n");
  const CliResult p = run_cli({"predict", "--model", f.model_path, "--data", path});
  CHECK(p.exit_code == 3);
  CHECK(p.err.find("error:") != std::string::npos);
}

TEST_CASE("cross-validation reports per-fold results and their mean") {
  const Fixture& f = fixture();
  const std::string report = temp_path("cv-report.txt");
  const CliResult r =
      run_cli({"crossval", "--data", f.data_path, "--k", "3", "--report", report,
               "--population", "10", "--generations", "3", "--seed", "9"});
  REQUIRE_MESSAGE(r.exit_code == 0, r.err);

  const std::vector<std::string> lines = split_lines(r.out);
  REQUIRE(lines.size() == 4);
  double sum = 0.0;
  for (std::size_t fold = 0; fold < 3; ++fold) {
    const std::string& line = lines[fold];
    REQUIRE(line.rfind("fold " + std::to_string(fold) + ": accuracy=", 0) == 0);
    const std::size_t acc_pos = line.find("accuracy=") + 9;
    const std::size_t space = line.find(' ', acc_pos);
    sum += std::strtod(line.substr(acc_pos, space - acc_pos).c_str(), nullptr);
    REQUIRE(line.find("best_size=") != std::string::npos);
  }
  const double mean = std::strtod(value_after(r.out, "mean accuracy=").c_str(), nullptr);
  CHECK(std::abs(mean - sum / 3.0) <= 1e-12);

  CHECK(slurp_file(report) == r.out);
  const std::string manifest = slurp_file(report + ".manifest");
  CHECK(contains_line(manifest, "command=crossval"));
  CHECK(contains_line(manifest, "k=3"));

  CHECK(run_cli({"crossval", "--data", f.data_path, "--k", "1"}).exit_code == 2);
}

TEST_CASE("pruning writes a model no larger than the original") {
  const Fixture& f = fixture();
  const std::string out = temp_path("pruned-model.json");
  const CliResult p = run_cli({"prune", "--model", f.model_path, "--data", f.data_path,
                               "--out", out});
  REQUIRE_MESSAGE(p.exit_code == 0, p.err);
  const std::size_t pruned_size =
      std::strtoull(value_after(p.out, "pruned_size=").c_str(), nullptr, 10);
  const std::size_t original_size =
      std::strtoull(value_after(f.train_stdout, "best_size=").c_str(), nullptr, 10);
  CHECK(pruned_size >= 1);
  CHECK(pruned_size <= original_size);

  // Accuracy on the pruning data never drops; check via the replayed models.
  const SimpleArff file = simple_arff_read(slurp_file(f.data_path));
  const ModelOracle before(slurp_file(f.model_path));
  const ModelOracle after(slurp_file(out));
  std::size_t correct_before = 0, correct_after = 0;
  for (std::size_t r = 0; r < file.rows.size(); ++r) {
    if (before.classify(file, r) == file.rows[r].back()) ++correct_before;
    if (after.classify(file, r) == file.rows[r].back()) ++correct_after;
  }
  CHECK(correct_after >= correct_before);

  const std::string manifest = slurp_file(out + ".manifest");
  CHECK(contains_line(manifest, "command=prune"));

  // Pruning data whose attributes differ from the model layout is refused.
  const std::string renamed = temp_path("renamed.arff");
  std::string text = slurp_file(f.data_path);
  const std::size_t pos = text.find("@attribute Depth");
  REQUIRE(pos != std::string::npos);
  text.replace(pos, 16, "@attribute Depthx");
  spit_file(renamed, text);
  CHECK(run_cli({"prune", "--model", f.model_path, "--data", renamed, "--out",
                 temp_path("never.json")})
            .exit_code == 3);
}

TEST_CASE("export renders rules and well-formed graph output") {
  const Fixture& f = fixture();
  const CliResult rules = run_cli({"export", "--model", f.model_path, "--format", "rules"});
  REQUIRE(rules.exit_code == 0);
  const std::vector<std::string> lines = split_lines(rules.out);
  CHECK(!lines.empty());
  for (const std::string& line : lines) {
    CHECK(line.rfind("IF ", 0) == 0);
    CHECK(line.find(" THEN ") != std::string::npos);
  }

  const CliResult dot = run_cli({"export", "--model", f.model_path, "--format", "dot"});
  REQUIRE(dot.exit_code == 0);
  std::string why;
  CHECK_MESSAGE(dot_well_formed(dot.out, why), why);

  // Default format is rules; --out writes the same bytes plus a manifest.
  const CliResult deflt = run_cli({"export", "--model", f.model_path});
  CHECK(deflt.out == rules.out);
  const std::string out = temp_path("export.dot");
  const CliResult filed =
      run_cli({"export", "--model", f.model_path, "--format", "dot", "--out", out});
  REQUIRE(filed.exit_code == 0);
  CHECK(slurp_file(out) == dot.out);
  const std::string manifest = slurp_file(out + ".manifest");
  CHECK(contains_line(manifest, "command=export"));
  CHECK(contains_line(manifest, "format=dot"));

  CHECK(run_cli({"export", "--model", f.model_path, "--format", "png"}).exit_code == 2);
}

TEST_CASE("data and file problems exit with the general error code") {
  const Fixture& f = fixture();
  CHECK(run_cli({"train", "--data", temp_path("missing.arff"), "--model",
                 temp_path("never2.json")})
            .exit_code == 1);

  const std::string bad = temp_path("bad.arff");
  spit_file(bad, "@relation x\n@attribute a numeric\n@attribute c {u,v}\n@data\n1,2,3\n");
  const CliResult r = run_cli({"train", "--data", bad, "--model", temp_path("never3.json")});
  CHECK(r.exit_code == 1);
  CHECK(r.err.find("error:") != std::string::npos);

  CHECK(run_cli({"predict", "--model", temp_path("missing-model.json"), "--data", f.data_path})
            .exit_code == 1);
}

TEST_CASE("invalid evolution settings exit with the configuration code") {
  const Fixture& f = fixture();
  const std::string model = temp_path("never4.json");
  CHECK(run_cli({"train", "--data", f.data_path, "--model", model, "--replace", "0"}).exit_code ==
        2);
  CHECK(run_cli({"train", "--data", f.data_path, "--model", model, "--crossover", "1.5"})
            .exit_code == 2);
  CHECK(run_cli({"train", "--data", f.data_path, "--model", model, "--population", "1"})
            .exit_code == 2);
}

TEST_CASE("training is reproducible and thread-count independent") {
  const Fixture& f = fixture();
  const std::string m1 = temp_path("repro1.json"), s1 = temp_path("repro1.csv");
  const std::string m2 = temp_path("repro2.json"), s2 = temp_path("repro2.csv");
  const std::string m3 = temp_path("repro3.json"), s3 = temp_path("repro3.csv");
  const std::string m4 = temp_path("repro4.json"), s4 = temp_path("repro4.csv");

  const std::vector<std::string> base = {"--data", f.data_path, "--population", "16",
                                         "--generations", "6"};
  auto with = [&](const std::string& model, const std::string& stats,
                  const std::vector<std::string>& extra) {
    std::vector<std::string> args = {"train", "--model", model, "--stats", stats};
    args.insert(args.end(), base.begin(), base.end());
    args.insert(args.end(), extra.begin(), extra.end());
    return run_cli(args);
  };

  REQUIRE(with(m1, s1, {"--seed", "11", "--threads", "1"}).exit_code == 0);
  REQUIRE(with(m2, s2, {"--seed", "11", "--threads", "1"}).exit_code == 0);
  REQUIRE(with(m3, s3, {"--seed", "11", "--threads", "4"}).exit_code == 0);
  REQUIRE(with(m4, s4, {"--seed", "12"}).exit_code == 0);

  CHECK(slurp_file(m1) == slurp_file(m2));
  CHECK(slurp_file(s1) == slurp_file(s2));
  CHECK(slurp_file(m1) == slurp_file(m3));
  CHECK(slurp_file(s1) == slurp_file(s3));
  CHECK(slurp_file(s1) != slurp_file(s4));
}
