#include "pauc/serialize.hpp"

#include <cstdio>

#include "pauc/error.hpp"

namespace pauc {

namespace {

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorCode::BadFormat, "BadFormat: " + what); }

template <class T>
T field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) bad(std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    bad(std::string("field '") + key + "': " + e.what());
  }
}

void check_version(const Json& j) {
  if (field<std::string>(j, "version") != kFormatVersion) bad("unsupported version");
}

Json readout(const std::array<double, 3>& values) {
  Json j = Json::object();
  for (std::size_t i = 0; i < values.size(); ++i) {
    char key[16];
    std::snprintf(key, sizeof key, "%g", kReadoutFprs[i]);
    j[key] = values[i];
  }
  return j;
}

}  // namespace

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Json to_json(const Scorer& sc) {
  Json shape;
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        shape["dim"] = s.dim;
        if constexpr (std::is_same_v<T, MlpShape>) {
          shape["widths"] = s.widths;
          shape["activation"] = to_string(s.activation);
        } else if constexpr (std::is_same_v<T, GmmShape>) {
          shape["k_pos"] = s.k_pos;
          shape["k_neg"] = s.k_neg;
          shape["covariance"] = "diagonal";
        }
      },
      sc.shape());
  Json j;
  j["version"] = kFormatVersion;
  j["family"] = to_string(sc.family());
  j["shape"] = shape;
  j["params"] = std::vector<double>(sc.params().begin(), sc.params().end());
  return j;
}

Scorer scorer_from_json(const Json& j) {
  check_version(j);
  const auto family = parse_family(field<std::string>(j, "family"));
  const auto shape_j = field<Json>(j, "shape");
  const auto dim = field<std::size_t>(shape_j, "dim");
  Shape shape = LinearShape{dim};
  if (family == Family::Mlp) {
    shape = MlpShape{dim, field<std::vector<std::size_t>>(shape_j, "widths"),
                     parse_activation(field<std::string>(shape_j, "activation"))};
  } else if (family == Family::GmmRatio) {
    shape = GmmShape{dim, field<std::size_t>(shape_j, "k_pos"), field<std::size_t>(shape_j, "k_neg")};
  }
  return Scorer(std::move(shape), field<std::vector<double>>(j, "params"));
}

Json to_json(const TrainConfig& cfg) {
  Json j;
  j["alpha"] = cfg.range.alpha();
  j["beta"] = cfg.range.beta();
  j["learning_rate"] = cfg.learning_rate;
  j["adam_beta1"] = cfg.adam_beta1;
  j["adam_beta2"] = cfg.adam_beta2;
  j["adam_eps"] = cfg.adam_eps;
  j["l1_weight"] = cfg.l1_weight;
  j["max_epochs"] = cfg.max_epochs;
  j["patience"] = cfg.patience;
  j["seed"] = cfg.seed;
  return j;
}

TrainConfig train_config_from_json(const Json& j) {
  TrainConfig cfg;
  cfg.range = PaucRange(field<double>(j, "alpha"), field<double>(j, "beta"));
  cfg.learning_rate = field<double>(j, "learning_rate");
  cfg.adam_beta1 = field<double>(j, "adam_beta1");
  cfg.adam_beta2 = field<double>(j, "adam_beta2");
  cfg.adam_eps = field<double>(j, "adam_eps");
  cfg.l1_weight = field<double>(j, "l1_weight");
  cfg.max_epochs = field<std::size_t>(j, "max_epochs");
  cfg.patience = field<std::size_t>(j, "patience");
  cfg.seed = field<std::uint64_t>(j, "seed");
  return cfg;
}

Json to_json(const Standardizer& st) {
  Json j;
  j["mean"] = st.mean;
  j["stddev"] = st.stddev;
  return j;
}

Standardizer standardizer_from_json(const Json& j) {
  Standardizer st{field<std::vector<double>>(j, "mean"), field<std::vector<double>>(j, "stddev")};
  if (st.mean.size() != st.stddev.size()) bad("standardizer mean/stddev lengths differ");
  return st;
}

Json to_json(const TrainedModel& model, const RunStamp& stamp) {
  Json j;
  j["version"] = kFormatVersion;
  j["config_hash"] = stamp.config_hash;
  j["seed"] = stamp.seed;
  j["scorer"] = to_json(model.scorer);
  j["config"] = to_json(model.config);
  j["standardizer"] = model.standardizer ? to_json(*model.standardizer) : Json(nullptr);
  j["best_epoch"] = model.best_epoch;
  Json history = Json::array();
  for (const auto& h : model.history) {
    history.push_back({{"epoch", h.epoch}, {"train_objective", h.train_objective}, {"valid_pauc", h.valid_pauc}});
  }
  j["history"] = history;
  return j;
}

TrainedModel trained_model_from_json(const Json& j) {
  check_version(j);
  TrainedModel m{scorer_from_json(field<Json>(j, "scorer")), {}, train_config_from_json(field<Json>(j, "config")),
                 std::nullopt, field<std::size_t>(j, "best_epoch")};
  const auto st = field<Json>(j, "standardizer");
  if (!st.is_null()) m.standardizer = standardizer_from_json(st);
  for (const auto& h : field<Json>(j, "history")) {
    m.history.push_back({field<std::size_t>(h, "epoch"), field<double>(h, "train_objective"),
                         field<double>(h, "valid_pauc")});
  }
  return m;
}

RunStamp run_stamp_from_json(const Json& j) {
  return {field<std::string>(j, "config_hash"), field<std::uint64_t>(j, "seed")};
}

Json to_json(const MetricsReport& r) {
  Json j;
  j["pauc"] = readout(r.pauc);
  j["tpr"] = readout(r.tpr);
  j["auc"] = r.auc;
  return j;
}

Json to_json(const ReportSummary& s, const std::string& method, const std::vector<RunStamp>& runs) {
  Json j;
  j["version"] = kFormatVersion;
  Json stamps = Json::array();
  for (const auto& r : runs) stamps.push_back({{"config_hash", r.config_hash}, {"seed", r.seed}});
  j["runs"] = stamps;
  j["method"] = method;
  j["splits"] = s.splits;
  j["mean"] = to_json(s.mean);
  j["stddev"] = to_json(s.stddev);
  return j;
}

Json to_json(const CvResult& cv, const RunStamp& stamp) {
  Json j;
  j["version"] = kFormatVersion;
  j["config_hash"] = stamp.config_hash;
  j["seed"] = stamp.seed;
  Json rows = Json::array();
  for (const auto& r : cv.table) {
    Json row;
    row["family"] = to_string(r.point.family);
    if (r.point.family == Family::Mlp) {
      row["layers"] = r.point.layers;
      row["width"] = r.point.width;
      row["activation"] = to_string(r.point.activation);
    }
    if (r.point.family == Family::GmmRatio) row["k"] = r.point.k;
    row["l1"] = r.point.l1;
    row["fold_pauc"] = r.fold_pauc;
    row["mean"] = r.mean;
    row["std"] = r.stddev;
    rows.push_back(row);
  }
  j["table"] = rows;
  j["best"] = cv.best;
  return j;
}

}  // namespace pauc
