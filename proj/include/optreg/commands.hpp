#pragma once

// CLI subcommands. Each validates its configuration before computing,
// writes its exports into the output directory and returns an exit code:
// 0 ok, 2 usage or configuration error, 3 numerical failure.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include <json.hpp>

#include "optreg/config.hpp"

namespace optreg {

struct CommandOptions {
  std::string command;
  std::filesystem::path config;
  std::filesystem::path out = ".";
  std::optional<std::size_t> samples;
  std::optional<std::uint64_t> seed;
  std::optional<double> target;
  std::optional<std::string> mode;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNumerical = 3;

// Runs one subcommand, mapping exceptions to exit codes and messages on err.
int run_command(const CommandOptions& options, std::ostream& out, std::ostream& err);

// Export formats.
std::string curve_csv(const BlrCurve& curve, const SizeFit* fit);
std::string coin_curve_csv(const CoinCurve& curve);
std::string contour_csv(const Contour& contour);
nlohmann::json fit_json(const SizeFit& fit);
nlohmann::json tiling_json(const Tiling& tiling);

}  // namespace optreg
