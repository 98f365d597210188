#pragma once

// Command-line front end: simulate, fit and design subcommands driven by
// JSON recipes.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

namespace qsagnac::cli {

inline constexpr const char* version = "0.1.0";
inline constexpr int schema_version = 1;

enum ExitCode : int { Success = 0, ConfigError = 2, FitFailure = 3 };

struct Options {
  std::filesystem::path config;
  std::optional<std::uint64_t> seed;
  std::filesystem::path out = ".";
  bool fast = false;
  bool optimize_gfring = false;
};

// 64-bit FNV-1a.
std::uint64_t fnv1a(const std::string& bytes);

// Each returns an exit code; diagnostics go to `err`, a summary to `log`.
int cmd_simulate(const Options& options, std::ostream& log, std::ostream& err);
int cmd_fit(const Options& options, std::ostream& log, std::ostream& err);
int cmd_design(const Options& options, std::ostream& log, std::ostream& err);

int run(int argc, char** argv);

}  // namespace qsagnac::cli
