#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "cli.hpp"
#include "twave/error.hpp"

namespace twave::cli {

namespace {

[[noreturn]] void field_error(const std::string& field, const std::string& why) {
  throw ValidationError(field + ": " + why);
}

template <class T>
T get_as(const json& j, const std::string& field) {
  try {
    return j.get<T>();
  } catch (const json::exception&) {
    if constexpr (std::is_same_v<T, std::string>) {
      field_error(field, "expected a string");
    } else {
      field_error(field, "expected a number");
    }
  }
}

std::uint64_t get_count(const json& j, const std::string& field) {
  if (!j.is_number_integer() && !j.is_number_unsigned()) {
    if (j.is_number_float() && std::floor(j.get<double>()) == j.get<double>() &&
        j.get<double>() >= 0.0) {
      return static_cast<std::uint64_t>(j.get<double>());
    }
    field_error(field, "expected a nonnegative integer");
  }
  if (j.is_number_integer() && j.get<std::int64_t>() < 0) {
    field_error(field, "expected a nonnegative integer");
  }
  return j.get<std::uint64_t>();
}

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  for (const auto& [key, value] : j.items()) {
    if (!allowed.count(key)) {
      field_error(where.empty() ? key : where + "." + key, "unknown field");
    }
  }
}

JumpLaw jumps_from_json(const json& j) {
  try {
    if (j.is_string()) return JumpLaw::parse(j.get<std::string>());
    if (!j.is_object() || !j.contains("kind")) {
      field_error("jumps", "expected a string like \"exp:1\" or an object with a \"kind\"");
    }
    const auto kind = get_as<std::string>(j.at("kind"), "jumps.kind");
    auto num = [&](const char* key) {
      if (!j.contains(key)) field_error(std::string("jumps.") + key, "missing");
      return get_as<double>(j.at(key), std::string("jumps.") + key);
    };
    if (kind == "exponential") {
      reject_unknown(j, {"kind", "rate"}, "jumps");
      return JumpLaw::exponential(num("rate"));
    }
    if (kind == "deterministic") {
      reject_unknown(j, {"kind", "value"}, "jumps");
      return JumpLaw::deterministic(num("value"));
    }
    if (kind == "gamma") {
      reject_unknown(j, {"kind", "shape", "rate"}, "jumps");
      return JumpLaw::gamma(num("shape"), num("rate"));
    }
    if (kind == "tabulated") {
      reject_unknown(j, {"kind", "x", "cdf"}, "jumps");
      if (!j.contains("x") || !j.contains("cdf")) field_error("jumps", "tabulated needs x and cdf");
      return JumpLaw::tabulated(get_as<std::vector<double>>(j.at("x"), "jumps.x"),
                                get_as<std::vector<double>>(j.at("cdf"), "jumps.cdf"));
    }
    field_error("jumps.kind", "must be exponential, deterministic, gamma or tabulated");
  } catch (const ValidationError& e) {
    const std::string what = e.what();
    if (what.rfind("jumps", 0) == 0) throw;
    field_error("jumps", what);
  }
}

json jumps_to_json(const JumpLaw& law) {
  if (const auto* t = std::get_if<TabulatedJumps>(&law.kind())) {
    return json{{"kind", "tabulated"}, {"x", t->x}, {"cdf", t->cdf}};
  }
  return law.describe();
}

}  // namespace

GridSpec parse_grid(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(item);
  if (parts.size() != 3) field_error("grid", "expected lo:hi:n, got '" + text + "'");
  GridSpec g;
  try {
    std::size_t used = 0;
    g.lo = std::stod(parts[0], &used);
    if (used != parts[0].size()) throw std::invalid_argument("lo");
    g.hi = std::stod(parts[1], &used);
    if (used != parts[1].size()) throw std::invalid_argument("hi");
    const long n = std::stol(parts[2], &used);
    if (used != parts[2].size() || n < 0) throw std::invalid_argument("n");
    g.n = static_cast<std::size_t>(n);
  } catch (const std::exception&) {
    field_error("grid", "expected lo:hi:n, got '" + text + "'");
  }
  if (!(g.hi > g.lo) || g.n < 2) field_error("grid", "needs lo < hi and n >= 2");
  return g;
}

void RunConfig::validate() const {
  if (model != "power2" && model != "bs" && model != "fkpp") {
    field_error("model", "must be power2, bs or fkpp (got '" + model + "')");
  }
  if (!(sigma2 >= 0.0) || !std::isfinite(sigma2)) field_error("sigma2", "must be nonnegative");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) field_error("lambda", "must be nonnegative");
  if (k < 2) field_error("k", "must be at least 2");
  if (!(rho > 0.0) || !std::isfinite(rho)) field_error("rho", "must be positive");
  if (c && !std::isfinite(*c)) field_error("c", "must be finite");
  if (gamma && (!(*gamma > 0.0) || !std::isfinite(*gamma))) field_error("gamma", "must be positive");
  if (!mode.empty() && mode != "minimal" && mode != "from_gamma" && mode != "from_speed") {
    field_error("mode", "must be minimal, from_gamma or from_speed");
  }
  if (mode == "from_gamma" && !gamma) field_error("gamma", "required by mode from_gamma");
  if (mode == "from_speed" && !c) field_error("c", "required by mode from_speed");
  if (workers < 1) field_error("workers", "must be at least 1");
  if (pool_size < kMinPoolSize) field_error("pool_size", "must be at least 10000");
  if (iterations < 1) field_error("iterations", "must be at least 1");
  if (samples < 1) field_error("samples", "must be at least 1");
  if (grid && (!(grid->hi > grid->lo) || grid->n < 2)) field_error("grid", "needs lo < hi and n >= 2");

  if (model == "power2") {
    if (!jumps) field_error("jumps", "required for the power2 model");
    if (std::abs(jumps->mean() - 1.0) > 1e-9) {
      std::ostringstream os;
      os.precision(12);
      os << "power-of-2 model requires mean-one jumps, E[X] = 1 within 1e-9 (got " << jumps->mean()
         << ")";
      field_error("jumps", os.str());
    }
    if (lambda > 0.0) field_error("lambda", "not used by the power2 model");
  } else if (model == "bs") {
    if (lambda > 0.0 && !jumps) field_error("jumps", "required when lambda > 0");
    if (sigma2 > 0.0) field_error("sigma2", "the bs model has no Brownian part");
  } else {
    if (lambda > 0.0) field_error("lambda", "not used by the fkpp model");
  }

  const auto& s = simulation;
  if (s.n < 2) field_error("simulation.n", "need at least 2 particles");
  if (!(s.horizon > 0.0)) field_error("simulation.horizon", "must be positive");
  if (!(s.burn_in >= 0.0) || s.burn_in >= s.horizon) {
    field_error("simulation.burn_in", "must lie in [0, horizon)");
  }
  if (!(s.median_interval > 0.0)) field_error("simulation.median_interval", "must be positive");
  if (s.snapshots < 1) field_error("simulation.snapshots", "must be at least 1");
}

json RunConfig::to_json() const {
  json j;
  j["model"] = model;
  j["jumps"] = jumps ? jumps_to_json(*jumps) : json(nullptr);
  j["sigma2"] = sigma2;
  j["lambda"] = lambda;
  j["c"] = c ? json(*c) : json(nullptr);
  j["gamma"] = gamma ? json(*gamma) : json(nullptr);
  j["k"] = k;
  j["rho"] = rho;
  j["mode"] = mode;
  j["seed"] = seed;
  j["workers"] = workers;
  j["pool_size"] = pool_size;
  j["iterations"] = iterations;
  j["samples"] = samples;
  j["grid"] = grid ? json{{"lo", grid->lo}, {"hi", grid->hi}, {"n", grid->n}} : json(nullptr);
  j["simulation"] = {{"n", simulation.n},
                     {"horizon", simulation.horizon},
                     {"burn_in", simulation.burn_in},
                     {"median_interval", simulation.median_interval},
                     {"snapshots", simulation.snapshots},
                     {"max_events", simulation.max_events},
                     {"initial_profile", simulation.initial_profile}};
  return j;
}

void apply_json(RunConfig& cfg, const json& j) {
  if (!j.is_object()) throw ValidationError("config: top level must be a JSON object");
  reject_unknown(j,
                 {"model", "jumps", "sigma2", "lambda", "c", "gamma", "k", "rho", "mode", "seed",
                  "workers", "pool_size", "iterations", "samples", "grid", "simulation"},
                 "");
  auto opt_num = [&](const char* key, std::optional<double>& out) {
    if (!j.contains(key)) return;
    if (j.at(key).is_null()) out.reset(); else out = get_as<double>(j.at(key), key);
  };
  if (j.contains("model")) cfg.model = get_as<std::string>(j.at("model"), "model");
  if (j.contains("jumps")) {
    if (j.at("jumps").is_null()) cfg.jumps.reset(); else cfg.jumps = jumps_from_json(j.at("jumps"));
  }
  if (j.contains("sigma2")) cfg.sigma2 = get_as<double>(j.at("sigma2"), "sigma2");
  if (j.contains("lambda")) cfg.lambda = get_as<double>(j.at("lambda"), "lambda");
  opt_num("c", cfg.c);
  opt_num("gamma", cfg.gamma);
  if (j.contains("k")) cfg.k = static_cast<int>(get_count(j.at("k"), "k"));
  if (j.contains("rho")) cfg.rho = get_as<double>(j.at("rho"), "rho");
  if (j.contains("mode")) cfg.mode = get_as<std::string>(j.at("mode"), "mode");
  if (j.contains("seed")) cfg.seed = get_count(j.at("seed"), "seed");
  if (j.contains("workers")) cfg.workers = static_cast<int>(get_count(j.at("workers"), "workers"));
  if (j.contains("pool_size")) cfg.pool_size = get_count(j.at("pool_size"), "pool_size");
  if (j.contains("iterations")) {
    cfg.iterations = static_cast<int>(get_count(j.at("iterations"), "iterations"));
  }
  if (j.contains("samples")) cfg.samples = get_count(j.at("samples"), "samples");
  if (j.contains("grid")) {
    const auto& g = j.at("grid");
    if (g.is_null()) {
      cfg.grid.reset();
    } else if (g.is_string()) {
      cfg.grid = parse_grid(g.get<std::string>());
    } else if (g.is_object()) {
      reject_unknown(g, {"lo", "hi", "n"}, "grid");
      if (!g.contains("lo") || !g.contains("hi") || !g.contains("n")) {
        field_error("grid", "needs lo, hi and n");
      }
      cfg.grid = GridSpec{get_as<double>(g.at("lo"), "grid.lo"), get_as<double>(g.at("hi"), "grid.hi"),
                          get_count(g.at("n"), "grid.n")};
    } else {
      field_error("grid", "expected \"lo:hi:n\" or an object");
    }
  }
  if (j.contains("simulation")) {
    const auto& s = j.at("simulation");
    if (!s.is_object()) field_error("simulation", "expected an object");
    reject_unknown(s,
                   {"n", "horizon", "burn_in", "median_interval", "snapshots", "max_events",
                    "initial_profile"},
                   "simulation");
    auto& sim = cfg.simulation;
    if (s.contains("n")) sim.n = get_count(s.at("n"), "simulation.n");
    if (s.contains("horizon")) sim.horizon = get_as<double>(s.at("horizon"), "simulation.horizon");
    if (s.contains("burn_in")) sim.burn_in = get_as<double>(s.at("burn_in"), "simulation.burn_in");
    if (s.contains("median_interval")) {
      sim.median_interval = get_as<double>(s.at("median_interval"), "simulation.median_interval");
    }
    if (s.contains("snapshots")) {
      sim.snapshots = static_cast<int>(get_count(s.at("snapshots"), "simulation.snapshots"));
    }
    if (s.contains("max_events")) sim.max_events = get_count(s.at("max_events"), "simulation.max_events");
    if (s.contains("initial_profile")) {
      sim.initial_profile = get_as<std::string>(s.at("initial_profile"), "simulation.initial_profile");
    }
  }
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("config: cannot open '" + path.string() + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError("config: '" + path.string() + "' is not valid JSON (" + e.what() + ")");
  }
  if (j.is_object() && j.contains("manifest_version") && j.contains("config")) j = j.at("config");
  RunConfig cfg;
  apply_json(cfg, j);
  cfg.validate();
  return cfg;
}

std::vector<std::string> preset_names() {
  return {"fkpp-brownian", "bs-exp", "power2-exp", "power2-det"};
}

RunConfig preset(const std::string& name) {
  RunConfig cfg;
  cfg.pool_size = 1'000'000;
  if (name == "fkpp-brownian") {
    cfg.model = "fkpp";
    cfg.sigma2 = 1.0;
    cfg.c = 2.0;
    cfg.iterations = 60;
  } else if (name == "bs-exp") {
    cfg.model = "bs";
    cfg.lambda = 1.0;
    cfg.jumps = JumpLaw::exponential(1.0);
    cfg.c = 4.5;
    cfg.iterations = 120;
  } else if (name == "power2-exp") {
    cfg.model = "power2";
    cfg.jumps = JumpLaw::exponential(1.0);
    cfg.sigma2 = 0.0;
  } else if (name == "power2-det") {
    cfg.model = "power2";
    cfg.jumps = JumpLaw::deterministic(1.0);
    cfg.sigma2 = 0.0;
  } else {
    std::string names;
    for (const auto& n : preset_names()) names += (names.empty() ? "" : ", ") + n;
    throw ValidationError("preset: unknown preset '" + name + "' (known: " + names + ")");
  }
  return cfg;
}

}  // namespace twave::cli
