#include "optreg/config.hpp"

#include <fstream>
#include <sstream>

#include "optreg/likelihood.hpp"

namespace optreg {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& field, const std::string& why) {
  throw ConfigError("config field '" + field + "': " + why);
}

double number(const json& j, const std::string& field) {
  if (!j.is_number()) fail(field, "expected a number");
  return j.get<double>();
}

long integer(const json& j, const std::string& field) {
  if (!j.is_number_integer()) fail(field, "expected an integer");
  return j.get<long>();
}

std::size_t positive(const json& j, const std::string& field) {
  const long v = integer(j, field);
  if (v <= 0) fail(field, "must be positive");
  return static_cast<std::size_t>(v);
}

std::string text(const json& j, const std::string& field) {
  if (!j.is_string()) fail(field, "expected a string");
  return j.get<std::string>();
}

std::vector<double> numbers(const json& j, const std::string& field) {
  if (!j.is_array()) fail(field, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number(j[i], field + "[" + std::to_string(i) + "]"));
  return out;
}

ReconstructionPoint point(const json& j, const Pom& pom, const std::string& field) {
  const std::vector<double> v = numbers(j, field);
  if (v.size() != pom.dimension())
    fail(field, "needs " + std::to_string(pom.dimension()) + " coordinates for pom '" + pom.key() + "'");
  return pom.dimension() == 1 ? ReconstructionPoint::segment(v[0]) : ReconstructionPoint::disk(v[0], v[1]);
}

template <typename F>
auto guarded(const std::string& field, F&& f) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    fail(field, e.what());
  }
}

PriorSpec parse_prior(const json& doc, const Pom& pom) {
  if (!doc.contains("prior")) return PriorSpec::primitive();
  const json& p = doc["prior"];
  std::string key;
  std::vector<double> target;
  double alpha = 0.0;
  const json* params = &doc;
  if (p.is_string()) {
    key = p.get<std::string>();
  } else if (p.is_object()) {
    if (!p.contains("kind")) fail("prior.kind", "missing");
    key = text(p["kind"], "prior.kind");
    params = &p;
  } else {
    fail("prior", "expected a key string or an object");
  }
  if (key == "conjugate") {
    if (!params->contains("target")) fail("prior.target", "conjugate prior needs target probabilities");
    if (!params->contains("alpha")) fail("prior.alpha", "conjugate prior needs alpha");
    target = numbers((*params)["target"], "prior.target");
    alpha = number((*params)["alpha"], "prior.alpha");
  }
  return guarded("prior", [&] { return PriorSpec::from_key(key, pom, target, alpha); });
}

}  // namespace

Counts ExperimentConfig::data() const {
  if (counts) return *counts;
  if (simulation) return simulate(pom, simulation->true_point, simulation->clicks, simulation->seed);
  throw ConfigError("config field 'counts': this command needs either 'counts' or 'simulation'");
}

TargetMode parse_mode(const std::string& mode) {
  if (mode == "size") return TargetMode::Size;
  if (mode == "credibility") return TargetMode::Credibility;
  throw ConfigError("mode must be 'size' or 'credibility', got '" + mode + "'");
}

json region_set_to_json(const RegionSet& set) {
  json regions = json::object();
  for (std::size_t n1 = 0; n1 < set.regions.size(); ++n1) {
    json list = json::array();
    for (const Interval& iv : set.regions[n1]) list.push_back({iv.lo, iv.hi});
    regions[std::to_string(n1)] = list;
  }
  return {{"N", set.copies}, {"regions", regions}};
}

RegionSet region_set_from_json(const json& doc) {
  if (!doc.is_object()) fail("region_set", "expected an object");
  if (!doc.contains("N")) fail("region_set.N", "missing");
  RegionSet set;
  set.copies = integer(doc["N"], "region_set.N");
  if (set.copies < 0) fail("region_set.N", "must be nonnegative");
  if (!doc.contains("regions") || !doc["regions"].is_object()) fail("region_set.regions", "expected an object");
  set.regions.assign(static_cast<std::size_t>(set.copies + 1), {});
  for (const auto& [key, value] : doc["regions"].items()) {
    const std::string field = "region_set.regions." + key;
    long n1 = -1;
    try {
      std::size_t used = 0;
      n1 = std::stol(key, &used);
      if (used != key.size()) n1 = -1;
    } catch (const std::exception&) {
    }
    if (n1 < 0 || n1 > set.copies) fail(field, "key must be an outcome n1 in 0..N");
    if (!value.is_array()) fail(field, "expected a list of [lo, hi] pairs");
    for (std::size_t i = 0; i < value.size(); ++i) {
      const std::vector<double> pair = numbers(value[i], field + "[" + std::to_string(i) + "]");
      if (pair.size() != 2) fail(field, "each interval needs two endpoints");
      set.regions[static_cast<std::size_t>(n1)].push_back({pair[0], pair[1]});
    }
  }
  guarded("region_set", [&] {
    set.validate();
    return 0;
  });
  return set;
}

ExperimentConfig parse_config(const json& doc) {
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  ExperimentConfig cfg;
  if (!doc.contains("pom")) fail("pom", "missing");
  cfg.pom = guarded("pom", [&] { return Pom::from_key(text(doc["pom"], "pom")); });
  cfg.prior = parse_prior(doc, cfg.pom);

  if (doc.contains("counts") && doc.contains("simulation"))
    fail("counts", "give either 'counts' or 'simulation', not both");
  if (doc.contains("counts")) {
    const json& c = doc["counts"];
    if (!c.is_array()) fail("counts", "expected an array of integers");
    Counts counts;
    for (std::size_t i = 0; i < c.size(); ++i) {
      const long v = integer(c[i], "counts[" + std::to_string(i) + "]");
      if (v < 0) fail("counts[" + std::to_string(i) + "]", "must be nonnegative");
      counts.n.push_back(v);
    }
    guarded("counts", [&] {
      cfg.pom.check_counts(counts);
      return 0;
    });
    cfg.counts = counts;
  }
  if (doc.contains("simulation")) {
    const json& s = doc["simulation"];
    if (!s.is_object()) fail("simulation", "expected an object");
    if (!s.contains("true_point")) fail("simulation.true_point", "missing");
    if (!s.contains("N")) fail("simulation.N", "missing");
    SimulationSpec sim;
    sim.true_point = point(s["true_point"], cfg.pom, "simulation.true_point");
    if (!cfg.pom.contains(sim.true_point)) fail("simulation.true_point", "outside the reconstruction space");
    sim.clicks = integer(s["N"], "simulation.N");
    if (sim.clicks < 0) fail("simulation.N", "must be nonnegative");
    sim.seed = s.contains("seed") ? static_cast<std::uint64_t>(integer(s["seed"], "simulation.seed")) : 0;
    cfg.simulation = sim;
  }

  cfg.budget.method = IntegrationBudget::Method::MonteCarlo;
  cfg.budget.samples = 200000;
  if (doc.contains("budget")) {
    const json& b = doc["budget"];
    if (!b.is_object()) fail("budget", "expected an object");
    if (b.contains("samples")) cfg.budget.samples = positive(b["samples"], "budget.samples");
    if (b.contains("seed")) cfg.budget.seed = static_cast<std::uint64_t>(integer(b["seed"], "budget.seed"));
    if (b.contains("angles")) cfg.budget.angles = positive(b["angles"], "budget.angles");
    if (b.contains("tolerance")) {
      cfg.budget.tolerance = number(b["tolerance"], "budget.tolerance");
      if (!(cfg.budget.tolerance > 0.0)) fail("budget.tolerance", "must be positive");
    }
    if (b.contains("method")) {
      const std::string m = text(b["method"], "budget.method");
      if (m == "monte-carlo") cfg.budget.method = IntegrationBudget::Method::MonteCarlo;
      else if (m == "quadrature") cfg.budget.method = IntegrationBudget::Method::Quadrature;
      else fail("budget.method", "expected 'monte-carlo' or 'quadrature'");
    }
  }

  if (doc.contains("lambda_grid")) {
    const json& g = doc["lambda_grid"];
    if (g.is_array()) {
      cfg.lambdas = numbers(g, "lambda_grid");
      for (std::size_t i = 0; i < cfg.lambdas.size(); ++i) {
        if (!(cfg.lambdas[i] >= 0.0 && cfg.lambdas[i] <= 1.0)) fail("lambda_grid", "values must lie in [0, 1]");
        if (i > 0 && !(cfg.lambdas[i] > cfg.lambdas[i - 1])) fail("lambda_grid", "must be strictly increasing");
      }
    } else if (g.is_object()) {
      if (g.contains("points")) cfg.lambda_points = positive(g["points"], "lambda_grid.points");
      if (cfg.lambda_points < 2) fail("lambda_grid.points", "needs at least 2 points");
    } else {
      fail("lambda_grid", "expected an array or {\"points\": n}");
    }
  }
  if (doc.contains("direct_credibility")) {
    if (!doc["direct_credibility"].is_boolean()) fail("direct_credibility", "expected true or false");
    cfg.direct_credibility = doc["direct_credibility"].get<bool>();
  }
  if (doc.contains("contour_angles")) cfg.contour_angles = positive(doc["contour_angles"], "contour_angles");
  if (doc.contains("point")) cfg.point = point(doc["point"], cfg.pom, "point");
  if (doc.contains("lambda")) {
    cfg.lambda = number(doc["lambda"], "lambda");
    if (!(*cfg.lambda > 0.0 && *cfg.lambda < 1.0)) fail("lambda", "must lie in (0, 1)");
  }
  if (doc.contains("mode")) cfg.mode = guarded("mode", [&] { return parse_mode(text(doc["mode"], "mode")); });
  if (doc.contains("target")) cfg.target = number(doc["target"], "target");

  if (doc.contains("tiling")) {
    const json& t = doc["tiling"];
    if (!t.is_object()) fail("tiling", "expected an object");
    if (t.contains("rings")) cfg.tiling.rings = positive(t["rings"], "tiling.rings");
    if (t.contains("slices")) cfg.tiling.slices = positive(t["slices"], "tiling.slices");
    if (t.contains("curve_points")) cfg.tiling.curve_points = positive(t["curve_points"], "tiling.curve_points");
    if (t.contains("check_samples"))
      cfg.tiling_check_samples = static_cast<std::size_t>(integer(t["check_samples"], "tiling.check_samples"));
    if (t.contains("variant")) {
      const std::string v = text(t["variant"], "tiling.variant");
      if (v == "radial-rays") cfg.tiling.variant = TilingVariant::RadialRays;
      else if (v == "concentric-rings") cfg.tiling.variant = TilingVariant::ConcentricRings;
      else fail("tiling.variant", "expected 'radial-rays' or 'concentric-rings'");
    }
  }

  if (doc.contains("region_set")) cfg.region_set = region_set_from_json(doc["region_set"]);
  if (doc.contains("scr")) {
    const json& s = doc["scr"];
    if (!s.is_object()) fail("scr", "expected an object");
    ScrSetSpec scr;
    if (!s.contains("N")) fail("scr.N", "missing");
    scr.copies = integer(s["N"], "scr.N");
    if (scr.copies < 0) fail("scr.N", "must be nonnegative");
    if (s.contains("credibility")) scr.credibility = number(s["credibility"], "scr.credibility");
    if (!(scr.credibility > 0.0 && scr.credibility < 1.0)) fail("scr.credibility", "must lie in (0, 1)");
    const std::string key = s.contains("prior") ? text(s["prior"], "scr.prior") : std::string("primitive");
    if (key == "primitive") scr.prior = CoinPrior::Primitive;
    else if (key == "jeffreys") scr.prior = CoinPrior::Jeffreys;
    else fail("scr.prior", "expected 'primitive' or 'jeffreys'");
    cfg.scr = scr;
  }
  if (doc.contains("confidence_grid")) cfg.confidence_grid = positive(doc["confidence_grid"], "confidence_grid");
  return cfg;
}

ExperimentConfig parse_config_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, column = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw ConfigError("config is not valid JSON at line " + std::to_string(line) + ", column " +
                      std::to_string(column) + ": " + e.what());
  }
  return parse_config(doc);
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str());
}

}  // namespace optreg
