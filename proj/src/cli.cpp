#include "pauc/cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "pauc/dataset.hpp"
#include "pauc/gmm.hpp"
#include "pauc/metrics.hpp"
#include "pauc/modelsel.hpp"
#include "pauc/objective.hpp"
#include "pauc/report.hpp"
#include "pauc/serialize.hpp"
#include "pauc/trainer.hpp"

namespace pauc::cli {

namespace fs = std::filesystem;
using nlohmann::json;

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidConfig:
    case ErrorCode::InvalidRange:
    case ErrorCode::BadShape:
      return kUsage;
    case ErrorCode::NonFiniteObjective:
      return kNumericFailure;
    default:
      return kDataError;
  }
}

json RunConfig::defaults() {
  const TrainConfig t;
  const EmOptions em;
  return json{
      {"version", "1"},
      {"seed", nullptr},
      {"data.train", nullptr},
      {"data.valid", nullptr},
      {"data.valid_fraction", 0.2},
      {"data.label_column", "label"},
      {"data.positive_value", "1"},
      {"data.standardize", true},
      {"scorer.family", "linear"},
      {"scorer.widths", json::array({50})},
      {"scorer.activation", "tanh"},
      {"scorer.k_pos", 2},
      {"scorer.k_neg", 2},
      {"train.alpha", t.range.alpha()},
      {"train.beta", t.range.beta()},
      {"train.learning_rate", t.learning_rate},
      {"train.adam_beta1", t.adam_beta1},
      {"train.adam_beta2", t.adam_beta2},
      {"train.adam_eps", t.adam_eps},
      {"train.l1_weight", t.l1_weight},
      {"train.max_epochs", t.max_epochs},
      {"train.patience", t.patience},
      {"em.tol", em.tol},
      {"em.max_iter", em.max_iter},
      {"cv.k", 5},
      {"cv.grid", "desk"},
      {"grid.layers", nullptr},
      {"grid.widths", nullptr},
      {"grid.activations", nullptr},
      {"grid.ks", nullptr},
      {"grid.l1", nullptr},
      {"output.dir", "out"},
  };
}

namespace {

[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorCode::InvalidConfig, "InvalidConfig: " + what); }

void merge_key(json& into, const std::string& key, const json& value) {
  if (!into.contains(key)) invalid("unknown config key '" + key + "'");
  into[key] = value;
}

template <class T>
T get(const RunConfig& rc, const std::string& key) {
  const auto& v = rc.values.at(key);
  if (v.is_null()) invalid("config key '" + key + "' is required");
  try {
    return v.get<T>();
  } catch (const json::exception&) {
    invalid("config key '" + key + "' has the wrong type: " + v.dump());
  }
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(ErrorCode::MissingFile, "MissingFile: cannot open " + p.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_file(const fs::path& p, const std::string& contents) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error(ErrorCode::MissingFile, "cannot write " + p.string());
  out << contents;
}

json parse_json(const std::string& text, const std::string& origin) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::BadFormat, "BadFormat: " + origin + ": " + e.what());
  }
}

CsvOptions csv_options(const RunConfig& rc) {
  CsvOptions o;
  o.label_column = get<std::string>(rc, "data.label_column");
  o.positive_value = get<std::string>(rc, "data.positive_value");
  return o;
}

TrainConfig train_config(const RunConfig& rc) {
  TrainConfig t;
  t.range = PaucRange(get<double>(rc, "train.alpha"), get<double>(rc, "train.beta"));
  t.learning_rate = get<double>(rc, "train.learning_rate");
  t.adam_beta1 = get<double>(rc, "train.adam_beta1");
  t.adam_beta2 = get<double>(rc, "train.adam_beta2");
  t.adam_eps = get<double>(rc, "train.adam_eps");
  t.l1_weight = get<double>(rc, "train.l1_weight");
  t.max_epochs = get<std::size_t>(rc, "train.max_epochs");
  t.patience = get<std::size_t>(rc, "train.patience");
  t.seed = get<std::uint64_t>(rc, "seed");
  t.validate();
  return t;
}

EmOptions em_options(const RunConfig& rc) {
  EmOptions em;
  em.tol = get<double>(rc, "em.tol");
  em.max_iter = get<std::size_t>(rc, "em.max_iter");
  return em;
}

RunStamp stamp_of(const RunConfig& rc) { return {rc.hash(), get<std::uint64_t>(rc, "seed")}; }

std::string stamp_comment(const std::vector<RunStamp>& runs) {
  std::string s = "#";
  for (const auto& r : runs) s += " config_hash=" + r.config_hash + " seed=" + std::to_string(r.seed);
  return s + "\n";
}

// (training data, validation data) as configured, before standardization.
std::pair<Dataset, Dataset> training_data(const RunConfig& rc) {
  const auto opts = csv_options(rc);
  Dataset full = load_csv(rc.path("data.train"), opts);
  if (!rc.values.at("data.valid").is_null()) return {std::move(full), load_csv(rc.path("data.valid"), opts)};
  const double valid_fraction = get<double>(rc, "data.valid_fraction");
  return split_stratified(full, 1.0 - valid_fraction, get<std::uint64_t>(rc, "seed"));
}

int cmd_synth(const fs::path& out_path, std::size_t n_pos, std::size_t n_neg, double spread, std::uint64_t seed,
              std::ostream& out) {
  const Dataset ds = synth_xor_gmm(n_pos, n_neg, spread, seed);
  write_csv(ds, out_path);
  out << "wrote " << ds.n_pos() << " positives and " << ds.n_neg() << " negatives to " << out_path.string() << '\n';
  return kOk;
}

int cmd_train(const RunConfig& rc, std::ostream& out) {
  const TrainConfig cfg = train_config(rc);
  const std::uint64_t seed = cfg.seed;
  auto [tr, va] = training_data(rc);

  std::optional<Standardizer> st;
  if (get<bool>(rc, "data.standardize")) {
    st = fit_standardizer(tr);
    tr = apply_standardizer(*st, tr);
    va = apply_standardizer(*st, va);
  }

  const Family family = parse_family(get<std::string>(rc, "scorer.family"));
  Scorer init = init_linear(tr.dim());
  if (family == Family::Mlp) {
    init = init_mlp(tr.dim(), get<std::vector<std::size_t>>(rc, "scorer.widths"),
                    parse_activation(get<std::string>(rc, "scorer.activation")), seed);
  } else if (family == Family::GmmRatio) {
    init = init_gmm_ratio(tr, get<std::size_t>(rc, "scorer.k_pos"), get<std::size_t>(rc, "scorer.k_neg"), seed,
                          em_options(rc));
  }

  TrainedModel model = train(init, tr, va, cfg);
  model.standardizer = st;

  const fs::path dir = rc.path("output.dir");
  const fs::path model_path = dir / "model.json";
  write_file(model_path, to_json(model, stamp_of(rc)).dump(2) + "\n");
  out << method_label(family, cfg.range) << ": " << model.history.size() << " epochs, best epoch "
      << model.best_epoch;
  if (model.best_epoch > 0) out << " (validation pAUC " << model.history[model.best_epoch - 1].valid_pauc << ")";
  out << "\nmodel written to " << model_path.string() << '\n';
  return kOk;
}

struct LoadedModel {
  TrainedModel model;
  RunStamp stamp;
};

LoadedModel load_model(const fs::path& p) {
  Json j;
  try {
    j = Json::parse(read_file(p));
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::BadFormat, "BadFormat: " + p.string() + ": " + e.what());
  }
  return {trained_model_from_json(j), run_stamp_from_json(j)};
}

int cmd_eval(const std::vector<std::string>& model_paths, const std::vector<std::string>& data_paths,
             const fs::path& out_dir, const CsvOptions& csv, std::ostream& out) {
  if (data_paths.size() != 1 && data_paths.size() != model_paths.size()) {
    invalid("give one --data per --model, or a single --data for all models");
  }
  std::vector<MetricsReport> reports;
  std::vector<RunStamp> stamps;
  std::string method;
  for (std::size_t i = 0; i < model_paths.size(); ++i) {
    const auto loaded = load_model(model_paths[i]);
    const Dataset test = load_csv(data_paths.size() == 1 ? data_paths[0] : data_paths[i], csv);
    reports.push_back(evaluate(loaded.model, test));
    stamps.push_back(loaded.stamp);
    const auto label = method_label(loaded.model.scorer.family(), loaded.model.config.range);
    if (i == 0) method = label;
  }
  const ReportSummary summary = summarize(reports);
  const std::string table = format_report_table(method, summary);
  write_file(out_dir / "report.json", to_json(summary, method, stamps).dump(2) + "\n");
  write_file(out_dir / "report.txt", stamp_comment(stamps) + table);
  out << table;
  return kOk;
}

int cmd_roc(const fs::path& model_path, const fs::path& data_path, const fs::path& out_path, const CsvOptions& csv,
            std::ostream& out) {
  const auto loaded = load_model(model_path);
  Dataset ds = load_csv(data_path, csv);
  if (loaded.model.standardizer) ds = apply_standardizer(*loaded.model.standardizer, ds);
  const auto fp = score_rows(loaded.model.scorer, ds.positives());
  const auto fn = score_rows(loaded.model.scorer, ds.negatives());
  const RocCurve roc = roc_curve({fp, fn});
  std::ostringstream s;
  s << stamp_comment({loaded.stamp});
  write_roc_csv(roc, s);
  write_file(out_path, s.str());
  out << "wrote " << roc.points.size() << " ROC points to " << out_path.string() << '\n';
  return kOk;
}

HyperGrid grid_from_config(const RunConfig& rc, Family family) {
  const auto which = get<std::string>(rc, "cv.grid");
  HyperGrid g;
  if (which == "desk") {
    g = HyperGrid::desk(family);
  } else if (which == "full") {
    g = HyperGrid::full(family);
  } else {
    invalid("cv.grid must be 'desk' or 'full'");
  }
  if (!rc.values.at("grid.layers").is_null()) g.layers = get<std::vector<std::size_t>>(rc, "grid.layers");
  if (!rc.values.at("grid.widths").is_null()) g.widths = get<std::vector<std::size_t>>(rc, "grid.widths");
  if (!rc.values.at("grid.ks").is_null()) g.ks = get<std::vector<std::size_t>>(rc, "grid.ks");
  if (!rc.values.at("grid.l1").is_null()) g.l1 = get<std::vector<double>>(rc, "grid.l1");
  if (!rc.values.at("grid.activations").is_null()) {
    g.activations.clear();
    for (const auto& a : get<std::vector<std::string>>(rc, "grid.activations")) g.activations.push_back(parse_activation(a));
  }
  return g;
}

int cmd_cv(const RunConfig& rc, std::ostream& out) {
  GridSearchOptions opts;
  opts.base = train_config(rc);
  opts.seed = opts.base.seed;
  opts.k = get<std::size_t>(rc, "cv.k");
  opts.em = em_options(rc);
  opts.standardize = get<bool>(rc, "data.standardize");
  const Family family = parse_family(get<std::string>(rc, "scorer.family"));
  const HyperGrid grid = grid_from_config(rc, family);
  const Dataset ds = load_csv(rc.path("data.train"), csv_options(rc));

  const CvResult cv = grid_search(grid, ds, opts);
  const RunStamp stamp = stamp_of(rc);
  const fs::path dir = rc.path("output.dir");
  std::ostringstream csv;
  csv << stamp_comment({stamp});
  write_cv_csv(cv, csv);
  write_file(dir / "cv.csv", csv.str());
  write_file(dir / "cv.json", to_json(cv, stamp).dump(2) + "\n");

  for (std::size_t i = 0; i < cv.table.size(); ++i) {
    const auto& r = cv.table[i];
    out << (i == cv.best ? "* " : "  ") << describe(r.point) << "  mean pAUC " << r.mean << " (std " << r.stddev
        << ")\n";
  }
  out << "results written to " << (dir / "cv.csv").string() << '\n';
  return kOk;
}

}  // namespace

RunConfig RunConfig::load(const fs::path& config_path, const std::vector<std::string>& overrides) {
  RunConfig rc;
  rc.values = defaults();
  rc.base_dir = config_path.has_parent_path() ? config_path.parent_path() : fs::path(".");
  const json file = parse_json(read_file(config_path), config_path.string());
  if (!file.is_object()) invalid("config must be a JSON object");
  for (const auto& [key, value] : file.items()) merge_key(rc.values, key, value);
  for (const auto& o : overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos || eq == 0) invalid("override '" + o + "' is not key=value");
    const std::string key = o.substr(0, eq);
    const std::string text = o.substr(eq + 1);
    json value = json::parse(text, nullptr, false);
    if (value.is_discarded()) value = text;
    merge_key(rc.values, key, value);
  }
  if (rc.values.at("version") != "1") invalid("unsupported config version");
  if (rc.values.at("seed").is_null()) invalid("config key 'seed' is required");
  return rc;
}

// The output location does not change what is computed, so it is left out.
std::string RunConfig::hash() const {
  json v = values;
  v.erase("output.dir");
  return fnv1a_hex(v.dump());
}

fs::path RunConfig::path(const std::string& key) const {
  const fs::path p = get<std::string>(*this, key);
  return p.is_absolute() ? p : base_dir / p;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"pauc: partial-AUC maximizing scoring functions"};
  app.require_subcommand(1);

  std::string out_csv;
  std::size_t n_pos = 100, n_neg = 2000;
  double spread = 0.5;
  std::uint64_t seed = 0;
  auto* synth = app.add_subcommand("synth", "write the two-dimensional XOR mixture dataset as CSV");
  synth->add_option("--out", out_csv, "output CSV path")->required();
  synth->add_option("--n-pos", n_pos, "number of positives");
  synth->add_option("--n-neg", n_neg, "number of negatives");
  synth->add_option("--spread", spread, "isotropic noise stddev");
  synth->add_option("--seed", seed, "generator seed")->required();

  std::string config_path;
  std::vector<std::string> overrides;
  std::string out_dir;
  const auto add_config_options = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "JSON run configuration")->required();
    cmd->add_option("--set", overrides, "override a config key (key=value, value parsed as JSON)");
    cmd->add_option("--out-dir", out_dir, "output directory (overrides output.dir)");
  };
  auto* train_cmd = app.add_subcommand("train", "train a scoring function; writes model.json");
  add_config_options(train_cmd);
  auto* cv_cmd = app.add_subcommand("cv", "k-fold grid search; writes cv.csv and cv.json");
  add_config_options(cv_cmd);

  std::vector<std::string> model_paths, data_paths;
  std::string eval_dir = ".";
  CsvOptions csv;
  auto* eval_cmd = app.add_subcommand("eval", "evaluate stored models; writes report.json and report.txt");
  eval_cmd->add_option("--model", model_paths, "model JSON (repeatable)")->required();
  eval_cmd->add_option("--data", data_paths, "test CSV (repeatable)")->required();
  eval_cmd->add_option("--out-dir", eval_dir, "output directory");
  eval_cmd->add_option("--label-column", csv.label_column, "label column name");
  eval_cmd->add_option("--positive-value", csv.positive_value, "label value of the positive class");

  std::string roc_model, roc_data, roc_out;
  auto* roc_cmd = app.add_subcommand("roc", "write the ROC staircase (fpr,tpr) of a model on a dataset");
  roc_cmd->add_option("--model", roc_model, "model JSON")->required();
  roc_cmd->add_option("--data", roc_data, "CSV dataset")->required();
  roc_cmd->add_option("--out", roc_out, "output CSV path")->required();
  roc_cmd->add_option("--label-column", csv.label_column, "label column name");
  roc_cmd->add_option("--positive-value", csv.positive_value, "label value of the positive class");

  std::vector<std::string> argv_storage{"pauc"};
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_storage) argv.push_back(a.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*synth) return cmd_synth(out_csv, n_pos, n_neg, spread, seed, out);
    if (*eval_cmd) return cmd_eval(model_paths, data_paths, eval_dir, csv, out);
    if (*roc_cmd) return cmd_roc(roc_model, roc_data, roc_out, csv, out);
    if (!out_dir.empty()) overrides.push_back("output.dir=" + json(fs::absolute(out_dir).string()).dump());
    const RunConfig rc = RunConfig::load(config_path, overrides);
    if (*train_cmd) return cmd_train(rc, out);
    return cmd_cv(rc, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kDataError;
  }
}

}  // namespace pauc::cli
