#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "apmarkov/config.hpp"

namespace apmarkov {

std::string_view version() noexcept;

enum ExitCode : int { kExitOk = 0, kExitValidation = 2, kExitNumeric = 3 };

struct RunRequest {
  /// Empty with expect_kind set: the built-in default config of that kind.
  std::filesystem::path config_path;
  std::filesystem::path out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  std::optional<std::vector<std::size_t>> k_list;  // survival only
  std::optional<std::string> output;               // artifact file name
  /// Subcommands pin the kind; a config of another kind is a validation error.
  std::optional<ExperimentKind> expect_kind;
};

struct RunResult {
  int exit_code = kExitOk;
  std::vector<std::filesystem::path> artifacts;
  std::string message;
};

/// Reads and validates the config, applies overrides, runs the experiment and
/// appends one record to `out_dir/manifest.jsonl`. Diagnostics go to `diag`.
RunResult run(const RunRequest& req, std::ostream& diag);

/// Same, from an already parsed config.
RunResult run_experiment(const ExperimentConfig& cfg, const std::filesystem::path& out_dir, std::ostream& diag);

/// FNV-1a 64-bit hash, as 16 lowercase hex digits.
std::string fnv1a_hex(std::string_view bytes);

}  // namespace apmarkov
