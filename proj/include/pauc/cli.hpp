#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "pauc/error.hpp"

namespace pauc::cli {

// Exit statuses of `pauc`.
enum ExitCode : int { kOk = 0, kUsage = 1, kDataError = 2, kNumericFailure = 3 };

int exit_code_for(ErrorCode code);

// Merged run configuration: built-in defaults, then the JSON config file,
// then `--set key=value` overrides. Keys are flat and dotted
// ("train.beta", "scorer.family", ...); unknown keys are rejected.
struct RunConfig {
  nlohmann::json values;  // sorted keys, so dump() is canonical
  std::filesystem::path base_dir;  // relative data paths resolve against this

  static RunConfig load(const std::filesystem::path& config_path, const std::vector<std::string>& overrides);
  static nlohmann::json defaults();

  std::string hash() const;  // FNV-1a of the canonical dump, output.dir excluded
  std::filesystem::path path(const std::string& key) const;
};

// Entry point behind the `pauc` binary. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pauc::cli
