#ifndef BSEL_COMMANDS_HPP
#define BSEL_COMMANDS_HPP

#include "bsel/config.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace bsel {

inline constexpr std::string_view kVersion = "0.1.0";

struct CommandOptions {
  std::filesystem::path config;
  std::optional<std::filesystem::path> qtable;
  std::optional<std::uint64_t> seed;      // overrides the config seed
  std::optional<std::string> out;         // overrides the config output_dir
  std::string mode = "trained";           // eval only
};

struct Summary {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation (n - 1); 0 for a single row
  std::size_t n = 0;
};

Summary summarize(const std::vector<double>& values);

/// Output file names inside the run directory.
namespace files {
inline constexpr const char* kQTable = "qtable.json";
inline constexpr const char* kConfig = "config.json";
inline constexpr const char* kTrainRewards = "train_rewards.csv";
inline constexpr const char* kTrainManifest = "train_manifest.json";
inline constexpr const char* kCompare = "compare.csv";
inline constexpr const char* kCompareSummary = "compare_summary.json";
inline constexpr const char* kCompareManifest = "compare_manifest.json";
std::string eval_rewards(std::string_view mode);
std::string eval_summary(std::string_view mode);
std::string eval_manifest(std::string_view mode);
}  // namespace files

/// Each command returns a process exit status and reports problems on err.
int cmd_train(const CommandOptions& opts, std::ostream& out, std::ostream& err);
int cmd_eval(const CommandOptions& opts, std::ostream& out, std::ostream& err);
int cmd_compare(const CommandOptions& opts, std::ostream& out, std::ostream& err);

}  // namespace bsel

#endif  // BSEL_COMMANDS_HPP
