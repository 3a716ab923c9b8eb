#include "optreg/commands.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>

namespace optreg {

using nlohmann::json;

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw UsageError("cannot write " + path.string());
  f << content;
}

void write_json(const std::filesystem::path& path, const json& doc) { write_file(path, doc.dump(2) + "\n"); }

json point_json(const ReconstructionPoint& pt) {
  json a = json::array();
  for (double v : pt.values()) a.push_back(v);
  return a;
}

struct RegionsResult {
  Counts counts;
  MleResult peak;
  BlrCurve curve;
  SizeFit fit;
};

RegionsResult run_regions_pipeline(const ExperimentConfig& cfg) {
  RegionsResult r;
  r.counts = cfg.data();
  r.peak = mle(cfg.pom, r.counts);
  const double lam0 = lambda0(cfg.pom, r.counts);
  const std::vector<double> grid = cfg.lambdas.empty() ? default_lambda_grid(lam0, cfg.lambda_points) : cfg.lambdas;
  r.curve = blr_curve(cfg.pom, cfg.prior, r.counts, grid, cfg.budget, cfg.direct_credibility);
  r.fit = fit_size(r.curve, cfg.pom);
  return r;
}

std::pair<TargetMode, double> resolve_target(const ExperimentConfig& cfg) {
  if (!cfg.mode) throw ConfigError("config field 'mode': needed (or pass --mode size|credibility)");
  if (!cfg.target) throw ConfigError("config field 'target': needed (or pass --target x)");
  if (!(*cfg.target > 0.0 && *cfg.target < 1.0))
    throw ConfigError("config field 'target': must lie strictly between 0 and 1");
  return {*cfg.mode, *cfg.target};
}

std::string mode_name(TargetMode m) { return m == TargetMode::Size ? "size" : "credibility"; }

int cmd_simulate(const ExperimentConfig& cfg, const std::filesystem::path& dir, std::ostream& out) {
  if (!cfg.simulation) throw ConfigError("config field 'simulation': needed by simulate");
  const Counts counts = cfg.data();
  write_json(dir / "counts.json", {{"counts", counts.n}, {"seed", cfg.simulation->seed}});
  out << "counts:";
  for (long v : counts.n) out << ' ' << v;
  out << '\n';
  return kExitOk;
}

int cmd_regions(const ExperimentConfig& cfg, const std::filesystem::path& dir, std::ostream& out) {
  const RegionsResult r = run_regions_pipeline(cfg);
  write_file(dir / "curve.csv", curve_csv(r.curve, &r.fit));
  write_json(dir / "fit.json", fit_json(r.fit));
  json summary = {
      {"pom", cfg.pom.key()},
      {"prior", cfg.prior.key()},
      {"counts", r.counts.n},
      {"mle", point_json(r.peak.point)},
      {"on_boundary", r.peak.on_boundary},
      {"lambda0", r.curve.lambda0},
      {"log_L_max", r.peak.log_L_max},
      {"log_L_D", implied_log_prior_likelihood(r.fit, r.peak.log_L_max)},
      {"log_L_D_direct", r.curve.log_L_D},
      {"log_L_D_direct_stderr", r.curve.log_L_D_stderr},
      {"ratio_limit", ratio_limit(r.fit)},
      {"samples", cfg.budget.samples},
      {"seed", cfg.budget.seed},
  };
  write_json(dir / "summary.json", summary);
  out << "mle " << point_json(r.peak.point).dump() << (r.peak.on_boundary ? " (boundary)" : "")
      << ", ratio_limit " << fmt(ratio_limit(r.fit)) << (r.fit.fallback_used() ? ", monotone-cubic fit" : "")
      << '\n';
  return kExitOk;
}

int cmd_find(const ExperimentConfig& cfg, const std::filesystem::path& dir, std::ostream& out) {
  const auto [mode, target] = resolve_target(cfg);
  const RegionsResult r = run_regions_pipeline(cfg);
  const double lambda = find_lambda(r.fit, target, mode);
  json result = {{"mode", mode_name(mode)},
                 {"target", target},
                 {"lambda", lambda},
                 {"size", r.fit.size(lambda)},
                 {"credibility", r.fit.credibility(lambda)}};
  if (cfg.pom.is_disk()) {
    const Contour contour = boundary_contour(cfg.pom, r.counts, lambda, cfg.contour_angles);
    write_file(dir / "contour.csv", contour_csv(contour));
    result["contour_approximate"] = contour.approximate;
  } else {
    const auto [lo, hi] = coin_interval(r.counts, lambda);
    result["interval_u"] = {lo, hi};
  }
  write_json(dir / "find.json", result);
  out << "lambda " << fmt(lambda) << '\n';
  return kExitOk;
}

int cmd_member(const ExperimentConfig& cfg, const std::filesystem::path& dir, std::ostream& out) {
  if (!cfg.point) throw ConfigError("config field 'point': needed by member");
  if (!cfg.pom.contains(*cfg.point)) throw DomainError("point is not in the reconstruction space");
  const auto [mode, target] = resolve_target(cfg);
  const RegionsResult r = run_regions_pipeline(cfg);
  const double lambda = find_lambda(r.fit, target, mode);
  const bool inside = membership(cfg.pom, r.counts, *cfg.point, lambda, r.peak.log_L_max);
  write_json(dir / "member.json", {{"point", point_json(*cfg.point)},
                                   {"mode", mode_name(mode)},
                                   {"target", target},
                                   {"lambda", lambda},
                                   {"member", inside}});
  out << (inside ? "inside" : "outside") << '\n';
  return kExitOk;
}

int cmd_boundary(const ExperimentConfig& cfg, const std::filesystem::path& dir, std::ostream& out) {
  if (!cfg.pom.is_disk()) throw ConfigError("config field 'pom': boundary contours need a disk model");
  double lambda = 0.0;
  if (cfg.lambda) {
    lambda = *cfg.lambda;
  } else {
    const auto [mode, target] = resolve_target(cfg);
    lambda = find_lambda(run_regions_pipeline(cfg).fit, target, mode);
  }
  const Contour contour = boundary_contour(cfg.pom, cfg.data(), lambda, cfg.contour_angles);
  write_file(dir / "contour.csv", contour_csv(contour));
  out << "lambda " << fmt(lambda) << ", " << contour.points.size() << " points"
      << (contour.approximate ? " (approximate)" : "") << '\n';
  return kExitOk;
}

int cmd_tiling(const ExperimentConfig& cfg, const std::filesystem::path& dir, std::ostream& out) {
  const Tiling tiling = make_tiling(cfg.prior, cfg.pom, cfg.tiling);
  json doc = tiling_json(tiling);
  doc["prior"] = cfg.prior.key();
  doc["pom"] = cfg.pom.key();
  if (cfg.tiling_check_samples > 0) {
    const auto sizes = cell_sizes_monte_carlo(tiling, cfg.prior, cfg.pom, cfg.tiling_check_samples, cfg.budget.seed);
    json cells = json::array();
    for (const Estimate& e : sizes) cells.push_back({{"size", e.value}, {"stderr", e.std_error}});
    doc["cell_check"] = cells;
  }
  write_json(dir / "tiling.json", doc);
  out << tiling.cell_count() << " cells\n";
  return kExitOk;
}

int cmd_oracle(const ExperimentConfig& cfg, const std::filesystem::path& dir, std::ostream& out) {
  if (cfg.pom.kind() != PomKind::Coin) throw ConfigError("config field 'pom': the oracle is for the coin");
  const CoinPrior prior = coin_prior_from(cfg.prior);
  const Counts counts = cfg.data();
  const std::vector<double> grid = cfg.lambdas.empty() ? default_lambda_grid(0.0, cfg.lambda_points) : cfg.lambdas;
  const CoinCurve curve = coin_quadrature(prior, counts, grid);
  write_file(dir / "oracle.csv", coin_curve_csv(curve));
  out << curve.lambdas.size() << " oracle points\n";
  return kExitOk;
}

int cmd_confidence(const ExperimentConfig& cfg, const std::filesystem::path& dir, std::ostream& out) {
  RegionSet set;
  if (cfg.region_set) {
    set = *cfg.region_set;
  } else if (cfg.scr) {
    set = scr_interval_set(cfg.scr->copies, cfg.scr->prior, cfg.scr->credibility);
  } else {
    throw ConfigError("config field 'region_set': confidence needs 'region_set' or 'scr'");
  }
  const double gamma = confidence_level(set, cfg.confidence_grid);
  json doc = region_set_to_json(set);
  doc["gamma"] = gamma;
  doc["grid"] = cfg.confidence_grid;
  write_json(dir / "confidence.json", doc);
  out << "gamma " << fmt(gamma) << '\n';
  return kExitOk;
}

}  // namespace

std::string curve_csv(const BlrCurve& curve, const SizeFit* fit) {
  std::string csv = "lambda,s,s_stderr,c_direct,c_fit\n";
  for (std::size_t i = 0; i < curve.lambdas.size(); ++i) {
    csv += fmt(curve.lambdas[i]) + "," + fmt(curve.s[i]) + "," + fmt(curve.s_stderr[i]) + ",";
    if (!curve.c_direct.empty()) csv += fmt(curve.c_direct[i]);
    csv += ",";
    if (fit) csv += fmt(fit->credibility(curve.lambdas[i]));
    csv += "\n";
  }
  return csv;
}

std::string coin_curve_csv(const CoinCurve& curve) {
  std::string csv = "lambda,s,s_stderr,c_direct,c_fit\n";
  for (std::size_t i = 0; i < curve.lambdas.size(); ++i)
    csv += fmt(curve.lambdas[i]) + "," + fmt(curve.s[i]) + ",0," + fmt(curve.c[i]) + ",\n";
  return csv;
}

std::string contour_csv(const Contour& contour) {
  std::string csv = "angle,x,y,clipped\n";
  for (const ContourPoint& p : contour.points)
    csv += fmt(p.angle) + "," + fmt(p.x) + "," + fmt(p.y) + "," + (p.clipped ? "1" : "0") + "\n";
  return csv;
}

json fit_json(const SizeFit& fit) {
  return {{"zeta", fit.zeta()},
          {"zeta_fitted", fit.zeta_fitted()},
          {"lambda0", fit.lambda0()},
          {"num_coeffs", fit.num_coeffs()},
          {"den_coeffs", fit.den_coeffs()},
          {"integral_total", fit.integral_total()},
          {"residual", fit.residual()},
          {"fallback_used", fit.fallback_used()}};
}

json tiling_json(const Tiling& tiling) {
  json doc = {{"variant", tiling.variant == TilingVariant::RadialRays ? "radial-rays" : "concentric-rings"},
              {"rings", tiling.rings},
              {"slices", tiling.slices},
              {"ring_radii", tiling.ring_radii},
              {"slice_boundaries", tiling.slice_boundaries}};
  if (!tiling.ring_curves.empty()) {
    doc["curve_angles"] = tiling.curve_grid;
    doc["ring_curves"] = tiling.ring_curves;
  }
  if (!tiling.slice_curves.empty()) {
    doc["curve_radii"] = tiling.curve_grid;
    doc["slice_curves"] = tiling.slice_curves;
  }
  return doc;
}

int run_command(const CommandOptions& options, std::ostream& out, std::ostream& err) {
  try {
    ExperimentConfig cfg = load_config(options.config);
    if (options.samples) {
      if (*options.samples == 0) throw ConfigError("--samples must be positive");
      cfg.budget.samples = *options.samples;
    }
    if (options.seed) cfg.budget.seed = *options.seed;
    if (options.mode) cfg.mode = parse_mode(*options.mode);
    if (options.target) cfg.target = *options.target;
    std::filesystem::create_directories(options.out);
    const auto& c = options.command;
    if (c == "simulate") return cmd_simulate(cfg, options.out, out);
    if (c == "regions") return cmd_regions(cfg, options.out, out);
    if (c == "find") return cmd_find(cfg, options.out, out);
    if (c == "member") return cmd_member(cfg, options.out, out);
    if (c == "boundary") return cmd_boundary(cfg, options.out, out);
    if (c == "tiling") return cmd_tiling(cfg, options.out, out);
    if (c == "oracle") return cmd_oracle(cfg, options.out, out);
    if (c == "confidence") return cmd_confidence(cfg, options.out, out);
    throw UsageError("unknown subcommand '" + c + "'");
  } catch (const IntegrationError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}

}  // namespace optreg
