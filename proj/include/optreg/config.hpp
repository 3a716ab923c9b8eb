#pragma once

// Experiment configuration: one JSON document shared by every CLI subcommand.
//
// {
//   "pom": "crosshair4",
//   "prior": "jeffreys",                      // or {"kind": "conjugate", "target": [...], "alpha": 4}
//   "counts": [6, 3, 10, 5],                  // or "simulation": {"true_point": [0.6, 0.2], "N": 24, "seed": 7}
//   "budget": {"samples": 200000, "seed": 1, "angles": 512, "method": "monte-carlo"},
//   "lambda_grid": {"points": 101},           // or an explicit increasing list
//   "direct_credibility": true,
//   "contour_angles": 256,
//   "point": [0.6, 0.2], "lambda": 0.5, "mode": "credibility", "target": 0.9,
//   "tiling": {"rings": 8, "slices": 12, "variant": "radial-rays", "check_samples": 0},
//   "region_set": {"N": 2, "regions": {"0": [[0, 0.4]], "1": [[0.2, 0.8]], "2": [[0.6, 1]]}},
//   "scr": {"N": 2, "credibility": 0.8, "prior": "primitive"},
//   "confidence_grid": 10000
// }

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "optreg/blr.hpp"
#include "optreg/confidence.hpp"
#include "optreg/curvefit.hpp"
#include "optreg/errors.hpp"
#include "optreg/oracle.hpp"
#include "optreg/tiling.hpp"

namespace optreg {

// Configuration problem; the message names the offending field or the
// line and column of a JSON syntax error.
class ConfigError : public UsageError {
 public:
  explicit ConfigError(const std::string& what) : UsageError(what) {}
};

struct SimulationSpec {
  ReconstructionPoint true_point;
  long clicks = 0;
  std::uint64_t seed = 0;
};

struct ScrSetSpec {
  long copies = 0;
  double credibility = 0.8;
  CoinPrior prior = CoinPrior::Primitive;
};

struct ExperimentConfig {
  Pom pom{PomKind::Coin};
  PriorSpec prior;
  std::optional<Counts> counts;
  std::optional<SimulationSpec> simulation;
  IntegrationBudget budget;
  std::vector<double> lambdas;  // empty: default grid
  std::size_t lambda_points = 101;
  bool direct_credibility = true;
  std::size_t contour_angles = 256;
  std::optional<ReconstructionPoint> point;
  std::optional<double> lambda;
  std::optional<TargetMode> mode;
  std::optional<double> target;
  TilingOptions tiling;
  std::size_t tiling_check_samples = 0;
  std::optional<RegionSet> region_set;
  std::optional<ScrSetSpec> scr;
  std::size_t confidence_grid = 10000;

  // Counts from the "counts" block or a simulation run.
  Counts data() const;
};

ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);

TargetMode parse_mode(const std::string& mode);

nlohmann::json region_set_to_json(const RegionSet& set);
RegionSet region_set_from_json(const nlohmann::json& doc);

}  // namespace optreg
