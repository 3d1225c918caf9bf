#include "cli.hpp"

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "elmsol/dataset.hpp"
#include "elmsol/diagnostics.hpp"
#include "elmsol/elm.hpp"
#include "elmsol/error.hpp"
#include "elmsol/metrics.hpp"
#include "elmsol/numfmt.hpp"
#include "elmsol/selection.hpp"
#include "elmsol/synth.hpp"

namespace elmsol::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// Every tunable of every subcommand. Values come from, in increasing
// priority: these defaults, the --config JSON file, explicit flags.
struct RunConfig {
  std::uint64_t seed = 42;
  double train_fraction = 0.75;
  int hidden_nodes = 30;
  std::optional<double> regularization;
  std::string node_range = "1:60:1";
  int repeats = 5;
  unsigned threads = 0;
  bool percent = false;
  bool ion_columns = false;
  bool intercept = false;
  std::string subset = "all";
  std::size_t count = 1000;
  double noise = 0.05;
  std::string data;
  std::string model;
  std::string input;
  std::string out;
  std::string out_json;
  std::string train_report;
  std::string test_report;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

json read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw UsageError("config file '" + path + "' is not valid JSON: " + e.what());
  }
}

// Applies a config-file key unless the corresponding flag was given.
template <typename T>
void merge(const json& cfg, const char* key, T& field, const CLI::App& app, const char* flag) {
  if (!cfg.contains(key)) return;
  if (app.get_option(flag)->count() > 0) return;
  try {
    field = cfg.at(key).get<T>();
  } catch (const json::exception& e) {
    throw UsageError(std::string("config key '") + key + "': " + e.what());
  }
}

void merge_config(const json& cfg, RunConfig& rc, const CLI::App& root, const CLI::App& sub) {
  if (!cfg.is_object()) throw UsageError("config file must hold a JSON object");
  merge(cfg, "seed", rc.seed, root, "--seed");
  auto has = [&](const char* flag) { return sub.get_option_no_throw(flag) != nullptr; };
  auto apply = [&](const char* key, auto& field, const char* flag) {
    if (has(flag)) merge(cfg, key, field, sub, flag);
  };
  apply("train_fraction", rc.train_fraction, "--train-fraction");
  apply("hidden_nodes", rc.hidden_nodes, "--hidden-nodes");
  apply("node_range", rc.node_range, "--node-range");
  apply("repeats", rc.repeats, "--repeats");
  apply("threads", rc.threads, "--threads");
  apply("percent", rc.percent, "--percent");
  apply("ion_columns", rc.ion_columns, "--ion-columns");
  apply("intercept", rc.intercept, "--intercept");
  apply("subset", rc.subset, "--subset");
  apply("count", rc.count, "--count");
  apply("noise", rc.noise, "--noise");
  apply("data", rc.data, "--data");
  apply("model", rc.model, "--model");
  apply("input", rc.input, "--input");
  apply("out", rc.out, "--out");
  if (has("--C") && cfg.contains("C") && sub.get_option("--C")->count() == 0) {
    if (cfg.at("C").is_null()) {
      rc.regularization.reset();
    } else if (cfg.at("C").is_number()) {
      rc.regularization = cfg.at("C").get<double>();
    } else {
      throw UsageError("config key 'C' must be a number or null");
    }
  }
}

void require(const std::string& value, const char* flag) {
  if (value.empty()) throw UsageError(std::string(flag) + " is required");
}

CsvOptions csv_options(const RunConfig& rc) { return CsvOptions{rc.percent, rc.ion_columns}; }

ElmConfig elm_config(const RunConfig& rc) {
  ElmConfig cfg;
  cfg.hidden_nodes = rc.hidden_nodes;
  cfg.regularization = rc.regularization;
  cfg.seed = rc.seed;
  return cfg;
}

Dataset load_data(const RunConfig& rc, std::ostream& err) {
  require(rc.data, "--data");
  auto loaded = load_csv_with_warnings(rc.data, csv_options(rc));
  constexpr std::size_t kMaxShown = 5;
  for (std::size_t i = 0; i < loaded.warnings.size() && i < kMaxShown; ++i)
    err << "warning: " << loaded.warnings[i] << '\n';
  if (loaded.warnings.size() > kMaxShown)
    err << "warning: ... " << loaded.warnings.size() - kMaxShown << " more values outside documented ranges\n";
  return std::move(loaded.dataset);
}

EvalReport evaluate_model(const ElmModel& model, const Dataset& data) {
  const Eigen::VectorXd t = data.targets();
  const Eigen::VectorXd p = model.predict(data.features());
  return evaluate(std::span<const double>(t.data(), static_cast<std::size_t>(t.size())),
                  std::span<const double>(p.data(), static_cast<std::size_t>(p.size())));
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  f << text;
  if (!f) throw IoError("write to '" + path + "' failed");
}

std::string sibling(const std::string& model_path, const char* suffix) {
  fs::path p(model_path);
  return (p.parent_path() / (p.stem().string() + suffix)).string();
}

// --- subcommands -----------------------------------------------------------

void cmd_gen_synth(const RunConfig& rc, std::ostream& out) {
  require(rc.out, "--out");
  const Dataset data = gen_synth(SynthSpec{rc.count, rc.seed, rc.noise});
  write_csv(data, rc.out);
  out << "wrote " << data.size() << " synthetic records to " << rc.out << '\n';
}

void cmd_train(const RunConfig& rc, std::ostream& out, std::ostream& err) {
  require(rc.model, "--model");
  const Dataset data = load_data(rc, err);
  const auto [train_part, test_part] = split(data, rc.train_fraction, rc.seed);
  const ElmModel model = train(elm_config(rc), train_part);
  save_model(model, rc.model);

  const EvalReport train_eval = evaluate_model(model, train_part);
  const EvalReport test_eval = evaluate_model(model, test_part);
  const std::string train_path = rc.train_report.empty() ? sibling(rc.model, ".train.json") : rc.train_report;
  const std::string test_path = rc.test_report.empty() ? sibling(rc.model, ".test.json") : rc.test_report;
  write_text(train_path, to_json(train_eval));
  write_text(test_path, to_json(test_eval));

  const std::vector<std::pair<std::string, EvalReport>> rows = {{"Training", train_eval}, {"Testing", test_eval}};
  out << format_table(rows);
  out << "model: " << rc.model << "\n";
}

void cmd_predict(const RunConfig& rc, std::ostream& out) {
  require(rc.model, "--model");
  require(rc.input, "--input");
  const ElmModel model = load_model(rc.model);
  if (model.n_inputs() != static_cast<Eigen::Index>(kFeatureCount) || model.n_outputs() != 1)
    throw SchemaError("model '" + rc.model + "' expects " + std::to_string(model.n_inputs()) +
                          " inputs; the solubility feature schema has 8",
                      "");
  const auto records = load_feature_csv(rc.input, csv_options(rc));
  Eigen::MatrixXd x(static_cast<Eigen::Index>(records.size()), static_cast<Eigen::Index>(kFeatureCount));
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto f = feature_vector(records[i]);
    for (std::size_t k = 0; k < kFeatureCount; ++k) x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = f[k];
  }
  const Eigen::VectorXd p = model.predict(x);
  std::ostringstream csv;
  csv << "predicted_solubility\n";
  for (Eigen::Index i = 0; i < p.size(); ++i) csv << format_exact(p(i)) << '\n';
  if (rc.out.empty())
    out << csv.str();
  else
    write_text(rc.out, csv.str());
}

void cmd_evaluate(const RunConfig& rc, std::ostream& out, std::ostream& err) {
  require(rc.model, "--model");
  const ElmModel model = load_model(rc.model);
  const Dataset data = load_data(rc, err);
  const EvalReport report = evaluate_model(model, data);
  if (!rc.out.empty()) write_text(rc.out, to_json(report));
  const std::vector<std::pair<std::string, EvalReport>> rows = {{"Dataset", report}};
  out << format_table(rows);
}

void cmd_sweep(const RunConfig& rc, std::ostream& out, std::ostream& err) {
  require(rc.out, "--out");
  const Dataset data = load_data(rc, err);
  const auto [train_part, test_part] = split(data, rc.train_fraction, rc.seed);
  SweepOptions opts;
  opts.nodes = NodeRange::parse(rc.node_range);
  opts.repeats = rc.repeats;
  opts.threads = rc.threads;
  const SweepReport report = sweep(train_part, test_part, opts, elm_config(rc));
  write_sweep_csv(report, rc.out);
  std::size_t failed = 0;
  for (const auto& p : report.points) failed += p.failed ? 1 : 0;
  if (failed) err << "warning: " << failed << " sweep cells failed and were excluded\n";
  out << "selected hidden nodes: " << report.selected_nodes << " (mean test RMSE "
      << format_exact(report.mean_test_rmse(report.selected_nodes)) << ")\n";
}

void cmd_diagnose(const RunConfig& rc, std::ostream& out, std::ostream& err) {
  require(rc.model, "--model");
  require(rc.out, "--out");
  const ElmModel model = load_model(rc.model);
  const Dataset all = load_data(rc, err);
  std::optional<Dataset> chosen;
  if (rc.subset == "all") {
    chosen = all;
  } else if (rc.subset == "train" || rc.subset == "test") {
    auto parts = split(all, rc.train_fraction, rc.seed);
    chosen = rc.subset == "train" ? std::move(parts.first) : std::move(parts.second);
  } else {
    throw UsageError("--subset must be all, train or test");
  }
  const Eigen::MatrixXd x = chosen->features();
  const Eigen::VectorXd t = chosen->targets();
  const Eigen::VectorXd p = model.predict(x);
  LeverageReport report;
  try {
    report = williams_report(model.scaler().transform(x), std::span<const double>(t.data(), static_cast<std::size_t>(t.size())),
                             std::span<const double>(p.data(), static_cast<std::size_t>(p.size())),
                             WilliamsOptions{rc.intercept});
  } catch (const DegenerateError& e) {
    throw DegenerateError(std::string(e.what()) +
                          ". The Williams plot needs nonzero residual spread: check that the data are not "
                          "reproduced exactly by the model (e.g. noise-free synthetic data fitted with as many "
                          "hidden nodes as points).");
  }
  const std::string json_path = rc.out_json.empty() ? (fs::path(rc.out).replace_extension(".json")).string() : rc.out_json;
  write_leverage(report, rc.out, json_path);
  out << "H* = " << format_exact(report.critical_leverage) << ", valid " << report.count(PointFlag::valid)
      << ", outlier " << report.count(PointFlag::outlier) << ", high_leverage "
      << report.count(PointFlag::high_leverage) << " of " << report.flags.size() << '\n';
}

void cmd_sensitivity(const RunConfig& rc, std::ostream& out, std::ostream& err) {
  require(rc.out, "--out");
  const Dataset data = load_data(rc, err);
  const SensitivityReport report = sensitivity_report(data);
  write_sensitivity_csv(report, rc.out);
  for (std::size_t k = 0; k < kFeatureCount; ++k)
    out << kFeatureNames[k] << ' ' << (report.factors[k] ? format_exact(*report.factors[k]) : "undefined") << '\n';
}

int exit_code_for(const Error& e) {
  if (dynamic_cast<const IoError*>(&e) || dynamic_cast<const SchemaError*>(&e) ||
      dynamic_cast<const ParseError*>(&e) || dynamic_cast<const ValidationError*>(&e) ||
      dynamic_cast<const EmptyDatasetError*>(&e) || dynamic_cast<const ModelFormatError*>(&e) ||
      dynamic_cast<const ConfigError*>(&e))
    return kExitUsage;
  return kExitComputation;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig rc;
  std::string config_path;
  double c_value = 0.0;

  CLI::App app{"Extreme learning machine toolkit for hydrocarbon solubility in brines", "elmsol"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--seed", rc.seed, "Seed for splitting, initialisation and generation")->capture_default_str();
  app.add_option("--config", config_path, "JSON file with run settings (flags override it)");

  auto add_data_flags = [&](CLI::App* sub) {
    sub->add_option("--data", rc.data, "Dataset CSV");
    sub->add_flag("--percent", rc.percent, "Gas mole fractions are given in percent");
    sub->add_flag("--ion-columns", rc.ion_columns, "Read cation/anion molality and charge instead of ionic_strength");
  };
  auto add_model_flags = [&](CLI::App* sub) {
    sub->add_option("--hidden-nodes", rc.hidden_nodes, "Hidden nodes L")->capture_default_str();
    sub->add_option("--C", c_value, "Regularization C (omit for the Moore-Penrose solution)");
    sub->add_option("--train-fraction", rc.train_fraction, "Training share of the split")->capture_default_str();
  };

  auto* gen = app.add_subcommand("gen-synth", "Write a synthetic dataset CSV");
  gen->add_option("--count", rc.count, "Number of points")->capture_default_str();
  gen->add_option("--noise", rc.noise, "Relative noise standard deviation")->capture_default_str();
  gen->add_option("--out", rc.out, "Output CSV");

  auto* trn = app.add_subcommand("train", "Split, train and evaluate an ELM");
  add_data_flags(trn);
  add_model_flags(trn);
  trn->add_option("--model", rc.model, "Output model JSON");
  trn->add_option("--train-report", rc.train_report, "Training EvalReport JSON (default <model>.train.json)");
  trn->add_option("--test-report", rc.test_report, "Testing EvalReport JSON (default <model>.test.json)");

  auto* prd = app.add_subcommand("predict", "Predict solubility for feature rows");
  prd->add_option("--model", rc.model, "Model JSON");
  prd->add_option("--input", rc.input, "Feature CSV (solubility column optional)");
  prd->add_option("--out", rc.out, "Output CSV (default: stdout)");
  prd->add_flag("--percent", rc.percent, "Gas mole fractions are given in percent");
  prd->add_flag("--ion-columns", rc.ion_columns, "Read ion columns instead of ionic_strength");

  auto* evl = app.add_subcommand("evaluate", "Score a model on a dataset");
  add_data_flags(evl);
  evl->add_option("--model", rc.model, "Model JSON");
  evl->add_option("--out", rc.out, "EvalReport JSON");

  auto* swp = app.add_subcommand("sweep", "Hidden-node sweep (train/test RMSE per count)");
  add_data_flags(swp);
  add_model_flags(swp);
  swp->add_option("--node-range", rc.node_range, "first:last[:step]")->capture_default_str();
  swp->add_option("--repeats", rc.repeats, "Seeds per node count")->capture_default_str();
  swp->add_option("--threads", rc.threads, "Worker threads (0 = hardware)");
  swp->add_option("--out", rc.out, "Sweep CSV");

  auto* dia = app.add_subcommand("diagnose", "Leverage / Williams-plot report");
  add_data_flags(dia);
  dia->add_option("--model", rc.model, "Model JSON");
  dia->add_option("--subset", rc.subset, "all, train or test")->capture_default_str();
  dia->add_option("--train-fraction", rc.train_fraction, "Split used for --subset train/test")->capture_default_str();
  dia->add_flag("--intercept", rc.intercept, "Append a constant column to the design matrix");
  dia->add_option("--out", rc.out, "Leverage CSV");
  dia->add_option("--out-json", rc.out_json, "Header JSON (default: --out with .json)");

  auto* sen = app.add_subcommand("sensitivity", "Relevancy factor of each input");
  add_data_flags(sen);
  sen->add_option("--out", rc.out, "Sensitivity CSV");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    CLI::App* sub = app.get_subcommands().front();
    if (const auto* c_opt = sub->get_option_no_throw("--C"); c_opt && c_opt->count() > 0) rc.regularization = c_value;
    if (!config_path.empty()) merge_config(read_json_file(config_path), rc, app, *sub);

    const std::string name = sub->get_name();
    if (name == "gen-synth") cmd_gen_synth(rc, out);
    else if (name == "train") cmd_train(rc, out, err);
    else if (name == "predict") cmd_predict(rc, out);
    else if (name == "evaluate") cmd_evaluate(rc, out, err);
    else if (name == "sweep") cmd_sweep(rc, out, err);
    else if (name == "diagnose") cmd_diagnose(rc, out, err);
    else if (name == "sensitivity") cmd_sensitivity(rc, out, err);
    return kExitOk;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitComputation;
  }
}

}  // namespace elmsol::cli
