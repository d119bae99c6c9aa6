#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "evotree/arff.hpp"
#include "evotree/crossval.hpp"
#include "evotree/errors.hpp"
#include "evotree/evolve.hpp"
#include "evotree/soilgen.hpp"
#include "evotree/tree_io.hpp"
#include "evotree/util.hpp"
#include "evotree/version.hpp"

namespace {

using namespace evotree;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "' for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw DataError("failed while reading '" + path + "'");
  return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot open '" + path + "' for writing");
  out << content;
  out.flush();
  if (!out) throw DataError("failed while writing '" + path + "'");
}

std::string digest_of(const std::string& bytes) { return "fnv1a64:" + to_hex(fnv1a64(bytes)); }

// Shared evolution flags. The struct mirrors EvolutionConfig plus the thread
// count, which affects only speed, never results.
struct GaFlags {
  EvolutionConfig config;
  int threads = 0;

  void attach(CLI::App& cmd) {
    cmd.add_option("--population", config.population_size, "Population size");
    cmd.add_option("--generations", config.generations, "Evolution steps to run");
    cmd.add_option("--crossover", config.crossover_prob, "Crossover probability");
    cmd.add_option("--mutation", config.mutation_prob, "Per-node mutation probability");
    cmd.add_option("--replace", config.replacement_fraction,
                   "Fraction of the population replaced per generation");
    cmd.add_option("--size-bias", config.size_bias_x,
                   "Size bias x in fitness = acc^2 * x / (size^2 + x)");
    cmd.add_option("--elitism", config.elitism, "Individuals kept unchanged per generation");
    cmd.add_option("--seed", config.seed, "Random seed");
    cmd.add_option("--max-size", config.max_tree_size,
                   "Tree size cap (0 = 10 * attributes * classes)");
    cmd.add_option("--threads", threads, "Evaluation threads (0 = default, 1 = serial)");
  }

  void append_manifest(std::string& m, std::size_t resolved_max_size) const {
    m += "population=" + std::to_string(config.population_size) + "\n";
    m += "generations=" + std::to_string(config.generations) + "\n";
    m += "crossover=" + format_double(config.crossover_prob) + "\n";
    m += "mutation=" + format_double(config.mutation_prob) + "\n";
    m += "replace=" + format_double(config.replacement_fraction) + "\n";
    m += "size_bias=" + format_double(config.size_bias_x) + "\n";
    m += "elitism=" + std::to_string(config.elitism) + "\n";
    m += "seed=" + std::to_string(config.seed) + "\n";
    m += "max_tree_size=" + std::to_string(resolved_max_size) + "\n";
  }
};

std::string manifest_header(const char* command) {
  std::string m;
  m += "tool=" + std::string(kToolName) + " " + std::string(kToolVersion) + "\n";
  m += "command=" + std::string(command) + "\n";
  return m;
}

std::string stats_csv(const std::vector<GenerationStats>& history) {
  std::string out = "generation,best_fitness,avg_fitness,best_size,train_acc,test_acc\n";
  for (const GenerationStats& s : history) {
    out += std::to_string(s.generation) + "," + format_double(s.best_fitness) + "," +
           format_double(s.avg_fitness) + "," + std::to_string(s.best_size) + "," +
           format_double(s.train_accuracy) + ",";
    if (s.test_accuracy) out += format_double(*s.test_accuracy);
    out += "\n";
  }
  return out;
}

std::size_t resolved_max_size(const EvolutionConfig& config, const Schema& schema) {
  return config.max_tree_size != 0
             ? config.max_tree_size
             : 10 * schema.attributes().size() * schema.n_classes();
}

int cmd_train(const std::string& data_path, const std::string& test_path,
              const std::string& model_path, const std::string& stats_path, GaFlags& ga,
              bool verbose) {
  const std::string data_text = read_file(data_path);
  const Dataset train = parse_arff(data_text);

  std::optional<Dataset> test;
  std::string test_text;
  if (!test_path.empty()) {
    test_text = read_file(test_path);
    test = parse_arff(test_text);
  }

  const ProgressSink sink = [verbose](const GenerationStats& s) {
    if (!verbose) return;
    std::cerr << "gen " << s.generation << " best " << format_double(s.best_fitness) << " avg "
              << format_double(s.avg_fitness) << "\n";
  };

  const EvolveResult result =
      evolve(ga.config, train, test ? &*test : nullptr, sink, ga.threads);

  write_file(model_path, serialize_model(Model{train.schema(), result.best}));
  if (!stats_path.empty()) write_file(stats_path, stats_csv(result.history));

  std::string m = manifest_header("train");
  m += "data=" + data_path + "\n";
  m += "data_digest=" + digest_of(data_text) + "\n";
  if (!test_path.empty()) {
    m += "test=" + test_path + "\n";
    m += "test_digest=" + digest_of(test_text) + "\n";
  }
  ga.append_manifest(m, resolved_max_size(ga.config, train.schema()));
  m += "model=" + model_path + "\n";
  if (!stats_path.empty()) m += "stats=" + stats_path + "\n";
  write_file(model_path + ".manifest", m);

  const GenerationStats& last = result.history.back();
  std::cout << "best_fitness=" << format_double(last.best_fitness) << "\n";
  std::cout << "best_size=" << result.best.size() << "\n";
  std::cout << "train_accuracy=" << format_double(last.train_accuracy) << "\n";
  if (last.test_accuracy)
    std::cout << "test_accuracy=" << format_double(*last.test_accuracy) << "\n";
  return 0;
}

int cmd_predict(const std::string& model_path, const std::string& data_path,
                const std::string& out_path, bool confusion) {
  const std::string model_text = read_file(model_path);
  const Model model = deserialize_model(model_text);
  const std::string data_text = read_file(data_path);
  const Table table = parse_arff_table(data_text);

  const auto& want = model.schema.attributes();
  std::vector<AttributeSpec> predictors_only = want;
  predictors_only.erase(predictors_only.begin() +
                        static_cast<std::ptrdiff_t>(model.schema.class_index()));

  bool labelled = false;
  std::vector<Row> rows;
  if (table.attributes == want) {
    labelled = true;
    // Full validation, including the class column.
    const Dataset data = Dataset::from_table(table, model.schema.class_index());
    rows = data.rows();
  } else if (table.attributes == predictors_only) {
    // Label-free input: pad each row with a missing class cell so attribute
    // indices line up with the model schema. Trees never test the class
    // attribute, so the padding is never read.
    rows = table.rows;
    for (Row& row : rows)
      row.insert(row.begin() + static_cast<std::ptrdiff_t>(model.schema.class_index()),
                 Cell::missing());
  } else {
    throw SchemaMismatchError("data attributes match neither the model schema nor the model "
                              "schema without its class attribute");
  }
  if (confusion && !labelled)
    throw ConfigError("--confusion needs data with class labels");

  const auto& classes = model.schema.class_attribute().categories;
  std::string labels_text;
  std::size_t correct = 0;
  for (const Row& row : rows) {
    const std::int32_t predicted = classify(model.tree, row);
    labels_text += classes[static_cast<std::size_t>(predicted)] + "\n";
    if (labelled && predicted == row[model.schema.class_index()].cat) ++correct;
  }

  if (out_path.empty()) {
    std::cout << labels_text;
  } else {
    write_file(out_path, labels_text);
    std::string m = manifest_header("predict");
    m += "model=" + model_path + "\n";
    m += "model_digest=" + digest_of(model_text) + "\n";
    m += "data=" + data_path + "\n";
    m += "data_digest=" + digest_of(data_text) + "\n";
    m += "out=" + out_path + "\n";
    write_file(out_path + ".manifest", m);
  }

  if (labelled) {
    const double acc = rows.empty() ? 0.0
                                    : static_cast<double>(correct) /
                                          static_cast<double>(rows.size());
    std::cout << "accuracy=" << format_double(acc) << "\n";
  }
  if (confusion) {
    std::vector<std::vector<std::uint64_t>> counts(
        classes.size(), std::vector<std::uint64_t>(classes.size(), 0));
    for (const Row& row : rows) {
      const auto actual = static_cast<std::size_t>(row[model.schema.class_index()].cat);
      const auto predicted = static_cast<std::size_t>(classify(model.tree, row));
      ++counts[actual][predicted];
    }
    std::cout << "confusion rows=actual cols=predicted classes=";
    for (std::size_t i = 0; i < classes.size(); ++i) {
      if (i != 0) std::cout << ",";
      std::cout << classes[i];
    }
    std::cout << "\n";
    for (const auto& row : counts) {
      for (std::size_t i = 0; i < row.size(); ++i) {
        if (i != 0) std::cout << ",";
        std::cout << row[i];
      }
      std::cout << "\n";
    }
  }
  return 0;
}

int cmd_crossval(const std::string& data_path, std::size_t k, const std::string& report_path,
                 GaFlags& ga) {
  const std::string data_text = read_file(data_path);
  const Dataset data = parse_arff(data_text);

  const CvReport report = cross_validate(ga.config, data, k, ga.threads);

  std::string text;
  for (std::size_t f = 0; f < report.fold_accuracy.size(); ++f) {
    text += "fold " + std::to_string(f) + ": accuracy=" + format_double(report.fold_accuracy[f]) +
            " best_size=" + std::to_string(report.fold_best_size[f]) + "\n";
  }
  text += "mean accuracy=" + format_double(report.mean_accuracy) + "\n";
  std::cout << text;

  if (!report_path.empty()) {
    write_file(report_path, text);
    std::string m = manifest_header("crossval");
    m += "data=" + data_path + "\n";
    m += "data_digest=" + digest_of(data_text) + "\n";
    m += "k=" + std::to_string(k) + "\n";
    ga.append_manifest(m, resolved_max_size(ga.config, data.schema()));
    m += "report=" + report_path + "\n";
    write_file(report_path + ".manifest", m);
  }
  return 0;
}

int cmd_prune(const std::string& model_path, const std::string& data_path,
              const std::string& out_path) {
  const std::string model_text = read_file(model_path);
  const Model model = deserialize_model(model_text);
  const std::string data_text = read_file(data_path);
  const Dataset data = parse_arff(data_text, model.schema.class_index());
  if (data.schema().fingerprint() != model.schema.fingerprint())
    throw SchemaMismatchError("pruning data does not match the model schema");

  const DecisionTree pruned = prune(model.tree, data);
  write_file(out_path, serialize_model(Model{model.schema, pruned}));

  std::string m = manifest_header("prune");
  m += "model=" + model_path + "\n";
  m += "model_digest=" + digest_of(model_text) + "\n";
  m += "data=" + data_path + "\n";
  m += "data_digest=" + digest_of(data_text) + "\n";
  m += "out=" + out_path + "\n";
  write_file(out_path + ".manifest", m);

  std::cout << "pruned_size=" << pruned.size() << "\n";
  return 0;
}

int cmd_export(const std::string& model_path, const std::string& format,
               const std::string& out_path) {
  const std::string model_text = read_file(model_path);
  const Model model = deserialize_model(model_text);

  std::string text;
  if (format == "rules") {
    text = render_rules(extract_rules(model.tree), model.schema);
  } else if (format == "dot") {
    text = to_dot(model.tree, model.schema);
  } else {
    throw ConfigError("unknown export format '" + format + "' (expected rules or dot)");
  }

  if (out_path.empty()) {
    std::cout << text;
  } else {
    write_file(out_path, text);
    std::string m = manifest_header("export");
    m += "model=" + model_path + "\n";
    m += "model_digest=" + digest_of(model_text) + "\n";
    m += "format=" + format + "\n";
    m += "out=" + out_path + "\n";
    write_file(out_path + ".manifest", m);
  }
  return 0;
}

int cmd_datagen(const GenConfig& config, const std::string& out_path) {
  const Dataset data = generate_soil_dataset(config, TextureBoundaryTable::usda());
  const std::string text = write_arff(data);
  if (out_path.empty()) {
    std::cout << text;
  } else {
    write_file(out_path, text);
    std::string m = manifest_header("datagen");
    m += "n=" + std::to_string(config.n) + "\n";
    m += "seed=" + std::to_string(config.seed) + "\n";
    m += "noise=" + format_double(config.noise_rate) + "\n";
    m += "depth_min=" + format_double(config.depth_min) + "\n";
    m += "depth_max=" + format_double(config.depth_max) + "\n";
    m += "table=" + TextureBoundaryTable::usda().version() + "\n";
    m += "out=" + out_path + "\n";
    write_file(out_path + ".manifest", m);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Genetic-programming induction of binary decision trees"};
  app.set_version_flag("--version", std::string(kToolName) + " " + std::string(kToolVersion));
  app.require_subcommand(1);

  // train
  auto* train = app.add_subcommand("train", "Evolve a decision tree from a labelled dataset");
  std::string train_data, train_test, train_model, train_stats;
  bool train_verbose = false;
  GaFlags train_ga;
  train->add_option("--data", train_data, "Training data (attribute-relation text)")->required();
  train->add_option("--test", train_test, "Held-out data; adds the test_acc stats column");
  train->add_option("--model", train_model, "Output model path")->required();
  train->add_option("--stats", train_stats, "Per-generation stats CSV path");
  train->add_flag("--verbose", train_verbose, "Log per-generation progress to stderr");
  train_ga.attach(*train);

  // predict
  auto* predict = app.add_subcommand("predict", "Classify rows with a trained model");
  std::string predict_model, predict_data, predict_out;
  bool predict_confusion = false;
  predict->add_option("--model", predict_model, "Model path")->required();
  predict->add_option("--data", predict_data, "Rows to classify (labels optional)")->required();
  predict->add_option("--out", predict_out, "Write labels here instead of stdout");
  predict->add_flag("--confusion", predict_confusion, "Also print the confusion matrix");

  // crossval
  auto* crossval = app.add_subcommand("crossval", "k-fold cross-validated evolution");
  std::string cv_data, cv_report;
  std::size_t cv_k = 10;
  GaFlags cv_ga;
  crossval->add_option("--data", cv_data, "Labelled dataset")->required();
  crossval->add_option("--k", cv_k, "Number of folds");
  crossval->add_option("--report", cv_report, "Write the fold report here as well");
  cv_ga.attach(*crossval);

  // prune
  auto* prune_cmd = app.add_subcommand("prune", "Reduced-error pruning against a held-out set");
  std::string prune_model, prune_data, prune_out;
  prune_cmd->add_option("--model", prune_model, "Model path")->required();
  prune_cmd->add_option("--data", prune_data, "Labelled pruning set")->required();
  prune_cmd->add_option("--out", prune_out, "Output model path")->required();

  // export
  auto* export_cmd = app.add_subcommand("export", "Render a model as rules or Graphviz");
  std::string export_model, export_format = "rules", export_out;
  export_cmd->add_option("--model", export_model, "Model path")->required();
  export_cmd->add_option("--format", export_format, "rules or dot");
  export_cmd->add_option("--out", export_out, "Write here instead of stdout");

  // datagen
  auto* datagen = app.add_subcommand("datagen", "Generate synthetic soil-texture data");
  GenConfig gen_config;
  std::string datagen_out;
  datagen->add_option("--n", gen_config.n, "Number of rows");
  datagen->add_option("--seed", gen_config.seed, "Random seed");
  datagen->add_option("--noise", gen_config.noise_rate, "Label noise rate in [0, 1]");
  datagen->add_option("--depth-min", gen_config.depth_min, "Minimum depth (metres)");
  datagen->add_option("--depth-max", gen_config.depth_max, "Maximum depth (metres)");
  datagen->add_option("--out", datagen_out, "Write the dataset here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (app.got_subcommand(train))
      return cmd_train(train_data, train_test, train_model, train_stats, train_ga, train_verbose);
    if (app.got_subcommand(predict))
      return cmd_predict(predict_model, predict_data, predict_out, predict_confusion);
    if (app.got_subcommand(crossval)) return cmd_crossval(cv_data, cv_k, cv_report, cv_ga);
    if (app.got_subcommand(prune_cmd)) return cmd_prune(prune_model, prune_data, prune_out);
    if (app.got_subcommand(export_cmd)) return cmd_export(export_model, export_format, export_out);
    if (app.got_subcommand(datagen)) return cmd_datagen(gen_config, datagen_out);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const SchemaMismatchError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
