#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "pauc/dataset.hpp"
#include "pauc/modelsel.hpp"
#include "pauc/report.hpp"
#include "pauc/scoring.hpp"
#include "pauc/trainer.hpp"

namespace pauc {

using Json = nlohmann::ordered_json;

inline constexpr const char* kFormatVersion = "1";

// Identifies the run that produced an artifact.
struct RunStamp {
  std::string config_hash;
  std::uint64_t seed = 0;
};

// 64-bit FNV-1a, rendered as 16 lowercase hex digits.
std::string fnv1a_hex(std::string_view bytes);

// Documents follow {"version": "1", "family", "shape", "params": [...]};
// reals are written with round-trip precision. Parsing failures throw
// BadFormat.
Json to_json(const Scorer& sc);
Scorer scorer_from_json(const Json& j);

Json to_json(const TrainConfig& cfg);
TrainConfig train_config_from_json(const Json& j);

Json to_json(const Standardizer& st);
Standardizer standardizer_from_json(const Json& j);

Json to_json(const TrainedModel& model, const RunStamp& stamp);
TrainedModel trained_model_from_json(const Json& j);
RunStamp run_stamp_from_json(const Json& j);

Json to_json(const MetricsReport& r);
Json to_json(const ReportSummary& s, const std::string& method, const std::vector<RunStamp>& runs);
Json to_json(const CvResult& cv, const RunStamp& stamp);

}  // namespace pauc
