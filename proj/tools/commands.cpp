#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>

#include <CLI11.hpp>

#include "cli.hpp"
#include "twave/dispersion.hpp"
#include "twave/error.hpp"
#include "twave/smoothing.hpp"
#include "twave/stats.hpp"

namespace twave::cli {

namespace {

struct Flags {
  std::string config;
  std::string out = "out";
  std::string preset;
  std::string pool;
  std::string empirical;
  std::string profile;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::optional<std::size_t> samples;
  std::optional<std::size_t> pool_size;
  std::optional<int> iterations;
  std::optional<std::string> grid;
  std::optional<std::string> model;
  std::optional<std::string> jumps;
  std::optional<std::string> mode;
  std::optional<double> lambda;
  std::optional<double> sigma2;
  std::optional<double> c;
  std::optional<double> gamma;
  std::optional<double> rho;
  std::optional<int> k;
  std::optional<std::size_t> n;
  std::optional<double> horizon;
  std::optional<double> burn_in;
  std::optional<double> t_lo;
  std::optional<double> t_hi;
};

RunConfig resolve_config(const Flags& f) {
  RunConfig cfg = f.preset.empty() ? RunConfig{} : preset(f.preset);
  if (!f.config.empty()) {
    std::ifstream in(f.config);
    if (!in) throw ValidationError("config: cannot open '" + f.config + "'");
    json j;
    try {
      j = json::parse(in);
    } catch (const json::parse_error& e) {
      throw ValidationError("config: '" + f.config + "' is not valid JSON (" + e.what() + ")");
    }
    if (j.is_object() && j.contains("manifest_version") && j.contains("config")) j = j.at("config");
    apply_json(cfg, j);
  }
  if (f.model) cfg.model = *f.model;
  if (f.jumps) {
    try {
      cfg.jumps = JumpLaw::parse(*f.jumps);
    } catch (const ValidationError& e) {
      const std::string what = e.what();
      throw ValidationError(what.rfind("jumps", 0) == 0 ? what : "jumps: " + what);
    }
  }
  if (f.mode) cfg.mode = *f.mode;
  if (f.lambda) cfg.lambda = *f.lambda;
  if (f.sigma2) cfg.sigma2 = *f.sigma2;
  if (f.c) cfg.c = *f.c;
  if (f.gamma) cfg.gamma = *f.gamma;
  if (f.rho) cfg.rho = *f.rho;
  if (f.k) cfg.k = *f.k;
  if (f.seed) cfg.seed = *f.seed;
  if (f.workers) cfg.workers = *f.workers;
  if (f.samples) cfg.samples = *f.samples;
  if (f.pool_size) cfg.pool_size = *f.pool_size;
  if (f.iterations) cfg.iterations = *f.iterations;
  if (f.grid) cfg.grid = parse_grid(*f.grid);
  if (f.n) cfg.simulation.n = *f.n;
  if (f.horizon) cfg.simulation.horizon = *f.horizon;
  if (f.burn_in) cfg.simulation.burn_in = *f.burn_in;
  cfg.validate();
  return cfg;
}

DispersionOptions dispersion_options(const RunConfig& cfg) { return {.k = cfg.k, .rho = cfg.rho}; }

JumpLaw jumps_or_unit(const RunConfig& cfg) {
  return cfg.jumps ? *cfg.jumps : JumpLaw::deterministic(1.0);
}

IncrementLaw make_increment(const RunConfig& cfg, double c) {
  if (cfg.model == "power2") return IncrementLaw::power2(*cfg.jumps, cfg.sigma2);
  if (cfg.model == "bs") {
    return IncrementLaw::sync(
        cfg.lambda > 0.0 ? LevySpec::compound_poisson(cfg.lambda, *cfg.jumps) : LevySpec::none(), c,
        cfg.rho);
  }
  return IncrementLaw::sync(cfg.sigma2 > 0.0 ? LevySpec::brownian(cfg.sigma2) : LevySpec::none(), c,
                            cfg.rho);
}

Orientation orientation_of(const RunConfig& cfg) {
  return cfg.model == "power2" ? Orientation::Power2 : Orientation::SyncRight;
}

Mechanism mechanism_of(const RunConfig& cfg) {
  if (cfg.model == "power2") return Mechanism::Power2;
  if (cfg.model == "bs") return Mechanism::BSModel;
  return Mechanism::Sync;
}

SpeedDecayResult critical(const RunConfig& cfg) {
  const auto opt = dispersion_options(cfg);
  if (cfg.model == "bs") return critical_point_bs(cfg.lambda, jumps_or_unit(cfg), opt);
  if (cfg.model == "fkpp") {
    if (cfg.sigma2 > 0.0) return brownian_dispersion(cfg.sigma2, BrownianMinimal{}, opt);
    return critical_point_bs(0.0, jumps_or_unit(cfg), opt);
  }
  throw ValidationError("model: the power2 speed is fixed at 1; use solve-gamma");
}

SpeedDecayResult from_speed(const RunConfig& cfg, double c) {
  const auto opt = dispersion_options(cfg);
  if (cfg.model == "fkpp" && cfg.sigma2 > 0.0) {
    return brownian_dispersion(cfg.sigma2, BrownianFromSpeed{c}, opt);
  }
  return gamma_from_speed_bs(c, cfg.model == "bs" ? cfg.lambda : 0.0, jumps_or_unit(cfg), opt);
}

SpeedDecayResult from_gamma(const RunConfig& cfg, double gamma) {
  const auto opt = dispersion_options(cfg);
  if (cfg.model == "fkpp" && cfg.sigma2 > 0.0) {
    return brownian_dispersion(cfg.sigma2, BrownianFromGamma{gamma}, opt);
  }
  const double lambda = cfg.model == "bs" ? cfg.lambda : 0.0;
  const double c = speed_from_gamma_bs(gamma, lambda, jumps_or_unit(cfg), opt);
  SpeedDecayResult res = regime_classify(make_increment(cfg, c), gamma, opt);
  res.c = c;
  res.model = Model::BS;
  return res;
}

SpeedDecayResult resolve_dispersion(const RunConfig& cfg) {
  const auto opt = dispersion_options(cfg);
  if (cfg.model == "power2") {
    if (cfg.gamma) return regime_classify(make_increment(cfg, 1.0), *cfg.gamma, opt);
    return solve_gamma_power2(*cfg.jumps, cfg.sigma2, opt);
  }
  if (cfg.mode == "minimal") return critical(cfg);
  if (cfg.mode == "from_gamma") return from_gamma(cfg, *cfg.gamma);
  if (cfg.mode == "from_speed") return from_speed(cfg, *cfg.c);
  if (cfg.gamma && cfg.c) return regime_classify(make_increment(cfg, *cfg.c), *cfg.gamma, opt);
  if (cfg.gamma) return from_gamma(cfg, *cfg.gamma);
  if (cfg.c) return from_speed(cfg, *cfg.c);
  return critical(cfg);
}

json nullable(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json dispersion_json(const SpeedDecayResult& r) {
  const auto& d = r.diagnostics;
  json diag{{"psi1", nullable(d.psi1)},
            {"mean_tilt", nullable(d.mean_tilt)},
            {"moment2", nullable(d.moment2)},
            {"domain_bound", nullable(d.domain_bound)},
            {"r", nullable(d.r)},
            {"monte_carlo", d.monte_carlo}};
  if (d.monte_carlo) {
    diag["psi1_se"] = d.psi1_se;
    diag["mean_tilt_se"] = d.mean_tilt_se;
    diag["moment2_se"] = d.moment2_se;
  }
  return json{{"model", to_string(r.model)},
              {"gamma", r.gamma},
              {"c", r.c},
              {"regime", to_string(r.regime)},
              {"diagnostics", diag},
              {"notes", r.notes}};
}

SamplePool build_pool(const RunConfig& cfg, const SpeedDecayResult& disp) {
  PoolOptions opt;
  opt.pool_size = cfg.pool_size;
  opt.iterations = cfg.iterations;
  opt.k = cfg.k;
  opt.seed = cfg.seed;
  opt.workers = cfg.workers;
  return iterate_pool(make_increment(cfg, disp.c), disp.gamma, opt);
}

json pool_json(const SamplePool& pool) {
  const auto s = stats::summarize(pool.samples);
  return json{{"gamma", pool.gamma},
              {"mean", s.mean},
              {"stddev", s.stddev},
              {"size", pool.samples.size()},
              {"ks_trace", pool.ks_trace},
              {"mean_trace", pool.mean_trace},
              {"mean_se_trace", pool.mean_se_trace},
              {"iterations", pool.iterations},
              {"early_stopped", pool.early_stopped},
              {"k", pool.k},
              {"increment", pool.increment},
              {"regime", to_string(pool.regime)},
              {"warnings", pool.warnings},
              {"seed", pool.seed}};
}

/// Pool from --pool CSV (column v) or a fresh iteration.
SamplePool obtain_pool(const RunConfig& cfg, const Flags& f, const SpeedDecayResult& disp) {
  if (f.pool.empty()) return build_pool(cfg, disp);
  SamplePool pool;
  pool.samples = read_csv_columns(f.pool, {"v"}).front();
  if (pool.samples.empty()) throw ValidationError("pool: '" + f.pool + "' has no rows");
  std::sort(pool.samples.begin(), pool.samples.end());
  pool.gamma = disp.gamma;
  pool.k = cfg.k;
  pool.seed = cfg.seed;
  pool.regime = disp.regime;
  pool.increment = make_increment(cfg, disp.c).describe();
  return pool;
}

std::vector<double> profile_grid(const RunConfig& cfg, const SamplePool& pool, double gamma) {
  if (cfg.grid) return linear_grid(cfg.grid->lo, cfg.grid->hi, cfg.grid->n);
  const double mean = stats::summarize(pool.samples).mean;
  const double sign = cfg.model == "power2" ? -1.0 : 1.0;
  const double x0 = mean > 0.0 ? sign * std::log(mean) / gamma : 0.0;
  return linear_grid(x0 - 12.0 / gamma, x0 + 12.0 / gamma, 481);
}

json tail_json(const SamplePool& pool, double gamma, Orientation o, int workers) {
  try {
    const TailFit t = tail_asymptotics(pool.samples, gamma, o, workers);
    return json{{"right_slope", nullable(t.right_slope)},
                {"right_prefactor", nullable(t.right_prefactor)},
                {"left_slope", nullable(t.left_slope)},
                {"left_prefactor", nullable(t.left_prefactor)},
                {"pool_mean", t.pool_mean},
                {"density_at_zero", nullable(t.density_at_zero)},
                {"right_points", t.right_points},
                {"left_points", t.left_points},
                {"reference_slope", o == Orientation::SyncRight ? -gamma : gamma}};
  } catch (const NumericalError& e) {
    return json{{"error", e.what()}};
  }
}

void write_profile(OutputDir& out, const WaveProfile& p, const json& tail,
                   const std::string& csv = "profile.csv", const std::string& sidecar = "profile.json") {
  out.write_csv(csv, {"x", "h", "stderr"}, {&p.grid, &p.values, &p.stderr_values});
  out.write_json(sidecar, json{{"gamma", p.gamma},
                               {"orientation", to_string(p.orientation)},
                               {"pool_size", p.pool_size},
                               {"pool_mean", p.pool_mean},
                               {"grid_points", p.grid.size()},
                               {"tail", tail}});
}

json ks_entry(const std::string& name, const stats::KsResult& r, bool control) {
  const bool pass = control ? !r.pass : r.pass;
  return json{{"test", name},
              {"statistic", r.statistic},
              {"critical_value", r.critical_value},
              {"p_value", r.p_value},
              {"control", control},
              {"expected", control ? "reject" : "accept"},
              {"pass", pass}};
}

json run_verification(const RunConfig& cfg, const SamplePool& pool, const SpeedDecayResult& disp) {
  if (cfg.samples < kMinVerifySamples) {
    throw ValidationError("samples: verification needs at least 100000 samples");
  }
  const Orientation o = orientation_of(cfg);
  const WaveSamples ws = sample_wave(pool.samples, disp.gamma, o, cfg.samples, cfg.seed, cfg.workers);
  json tests = json::array();
  const std::uint64_t s = cfg.seed;
  if (cfg.model == "power2") {
    tests.push_back(ks_entry("fixed_point_power2",
                             verify_fixed_point_power2(ws.xi, *cfg.jumps, cfg.sigma2, s + 1), false));
    tests.push_back(ks_entry(
        "fixed_point_power2_mean2_jumps",
        verify_fixed_point_power2(ws.xi, cfg.jumps->scaled(2.0), cfg.sigma2, s + 2), true));
    tests.push_back(ks_entry("equivalence_power2",
                             verify_equivalence_power2(ws.xi, *cfg.jumps, cfg.sigma2, s + 3), false));
    if (cfg.sigma2 > 0.0) {
      tests.push_back(ks_entry(
          "equivalence_power2_without_z",
          verify_equivalence_power2(ws.xi, *cfg.jumps, cfg.sigma2, s + 4, false), true));
    }
  } else {
    const IncrementLaw inc = make_increment(cfg, disp.c);
    tests.push_back(ks_entry("fixed_point_sync", verify_fixed_point_sync(ws.xi, inc, s + 1, cfg.k),
                             false));
    tests.push_back(ks_entry("fixed_point_sync_shifted",
                             verify_fixed_point_sync(ws.xi, inc, s + 2, cfg.k, 0.5), true));
  }
  return tests;
}

ParticleSystemConfig particle_config(const RunConfig& cfg) {
  ParticleSystemConfig pc;
  pc.n = cfg.simulation.n;
  pc.mechanism = mechanism_of(cfg);
  pc.sigma2 = cfg.model == "bs" ? 0.0 : cfg.sigma2;
  pc.jump_rate = cfg.model == "bs" ? cfg.lambda : 0.0;
  pc.copy_rate = cfg.rho;
  pc.jumps = cfg.jumps;
  pc.horizon = cfg.simulation.horizon;
  pc.burn_in = cfg.simulation.burn_in;
  pc.median_interval = cfg.simulation.median_interval;
  pc.seed = cfg.seed;
  pc.max_events = cfg.simulation.max_events;
  const int ns = cfg.simulation.snapshots;
  for (int i = 0; i < ns; ++i) {
    pc.snapshot_times.push_back(pc.burn_in + (pc.horizon - pc.burn_in) * (i + 1) / ns);
  }
  if (!cfg.simulation.initial_profile.empty()) {
    pc.initial_positions = read_csv_columns(cfg.simulation.initial_profile, {"position"}).front();
    pc.n = pc.initial_positions.size();
  }
  return pc;
}

json simulate_into(OutputDir& out, const RunConfig& cfg, SimulationResult& res) {
  const ParticleSystemConfig pc = particle_config(cfg);
  res = simulate(pc);
  std::vector<double> t, x;
  for (std::size_t s = 0; s < res.snapshots.size(); ++s) {
    for (double v : res.snapshots[s]) {
      t.push_back(res.snapshot_times[s]);
      x.push_back(v);
    }
  }
  out.write_csv("snapshots.csv", {"t", "position"}, {&t, &x});
  std::vector<double> mt, mm;
  for (const auto& p : res.median_path) {
    mt.push_back(p.t);
    mm.push_back(p.median);
  }
  out.write_csv("median_path.csv", {"t", "median"}, {&mt, &mm});
  json speed;
  try {
    const SpeedEstimate e = estimate_speed(res.median_path, pc.burn_in, cfg.seed);
    speed = json{{"c_hat", e.c_hat}, {"ci_lo", e.ci_lo}, {"ci_hi", e.ci_hi}, {"points", e.points}};
  } catch (const ValidationError& e) {
    speed = json{{"error", e.what()}};
  }
  json j{{"mechanism", to_string(pc.mechanism)},
         {"n", pc.n},
         {"events", res.events},
         {"end_time", res.end_time},
         {"truncated", res.truncated},
         {"snapshots", res.snapshots.size()},
         {"speed", speed}};
  out.write_json("simulate.json", j);
  return j;
}

json comparison_json(const ProfileComparison& c) {
  return json{{"w1_after_shift", c.w1_after_shift},
              {"ks_after_shift", c.ks_after_shift},
              {"shift", c.shift},
              {"w1_unshifted", c.w1_unshifted}};
}

void print(const json& j) { std::cout << j.dump(2) << '\n'; }

// Subcommands --------------------------------------------------------------

int cmd_solve_gamma(const Flags& f) {
  const RunConfig cfg = resolve_config(f);
  SpeedDecayResult res;
  if (cfg.model == "power2") {
    res = solve_gamma_power2(*cfg.jumps, cfg.sigma2, dispersion_options(cfg));
  } else {
    if (!cfg.c) throw ValidationError("c: required by solve-gamma for the " + cfg.model + " model");
    res = from_speed(cfg, *cfg.c);
  }
  OutputDir out(f.out, "solve-gamma", cfg.to_json(), cfg.seed);
  const json j = dispersion_json(res);
  out.write_json("dispersion.json", j);
  out.finish();
  print(j);
  return 0;
}

int cmd_critical_speed(const Flags& f) {
  const RunConfig cfg = resolve_config(f);
  const SpeedDecayResult res = critical(cfg);
  json j = dispersion_json(res);
  j["gamma_star"] = res.gamma;
  j["c_star"] = res.c;
  OutputDir out(f.out, "critical-speed", cfg.to_json(), cfg.seed);
  out.write_json("dispersion.json", j);
  out.finish();
  print(j);
  return 0;
}

int cmd_dispersion(const Flags& f) {
  const RunConfig cfg = resolve_config(f);
  const json j = dispersion_json(resolve_dispersion(cfg));
  OutputDir out(f.out, "dispersion", cfg.to_json(), cfg.seed);
  out.write_json("dispersion.json", j);
  out.finish();
  print(j);
  return 0;
}

int cmd_sample_pool(const Flags& f) {
  const RunConfig cfg = resolve_config(f);
  const SpeedDecayResult disp = resolve_dispersion(cfg);
  const SamplePool pool = build_pool(cfg, disp);
  OutputDir out(f.out, "sample-pool", cfg.to_json(), cfg.seed);
  out.write_csv("pool.csv", {"v"}, {&pool.samples});
  const json side = pool_json(pool);
  out.write_json("pool.json", side);
  out.finish();
  print(json{{"gamma", side["gamma"]}, {"mean", side["mean"]}, {"stddev", side["stddev"]},
             {"iterations", side["iterations"]}, {"warnings", side["warnings"]}});
  return 0;
}

int cmd_wave_profile(const Flags& f) {
  const RunConfig cfg = resolve_config(f);
  const SpeedDecayResult disp = resolve_dispersion(cfg);
  const SamplePool pool = obtain_pool(cfg, f, disp);
  const Orientation o = orientation_of(cfg);
  const auto grid = profile_grid(cfg, pool, disp.gamma);
  const WaveProfile p = profile_eval(pool.samples, disp.gamma, o, grid, cfg.workers);
  OutputDir out(f.out, "wave-profile", cfg.to_json(), cfg.seed);
  const json tail = tail_json(pool, disp.gamma, o, cfg.workers);
  write_profile(out, p, tail);
  out.finish();
  print(json{{"gamma", p.gamma}, {"orientation", to_string(o)}, {"points", p.grid.size()},
             {"tail", tail}});
  return 0;
}

int cmd_sample_wave(const Flags& f) {
  const RunConfig cfg = resolve_config(f);
  const SpeedDecayResult disp = resolve_dispersion(cfg);
  const SamplePool pool = obtain_pool(cfg, f, disp);
  const WaveSamples ws =
      sample_wave(pool.samples, disp.gamma, orientation_of(cfg), cfg.samples, cfg.seed, cfg.workers);
  OutputDir out(f.out, "sample-wave", cfg.to_json(), cfg.seed);
  out.write_csv("wave_samples.csv", {"xi"}, {&ws.xi});
  const json j{{"gamma", disp.gamma},
               {"orientation", to_string(orientation_of(cfg))},
               {"samples", ws.xi.size()},
               {"zero_rejections", ws.zero_rejections}};
  out.write_json("wave_samples.json", j);
  out.finish();
  print(j);
  return 0;
}

int cmd_verify(const Flags& f) {
  const RunConfig cfg = resolve_config(f);
  const SpeedDecayResult disp = resolve_dispersion(cfg);
  const SamplePool pool = obtain_pool(cfg, f, disp);
  const json tests = run_verification(cfg, pool, disp);
  OutputDir out(f.out, "verify", cfg.to_json(), cfg.seed);
  out.write_json("verify.json", tests);
  out.finish();
  print(tests);
  return 0;
}

int cmd_simulate(const Flags& f) {
  const RunConfig cfg = resolve_config(f);
  OutputDir out(f.out, "simulate", cfg.to_json(), cfg.seed);
  SimulationResult res;
  const json j = simulate_into(out, cfg, res);
  out.finish();
  print(j);
  return 0;
}

int cmd_compare(const Flags& f) {
  const RunConfig cfg = resolve_config(f);
  if (f.empirical.empty()) throw ValidationError("empirical: a snapshots CSV is required");
  if (f.profile.empty()) throw ValidationError("profile: a profile CSV is required");
  const auto snap = read_csv_columns(f.empirical, {"t", "position"});
  const auto prof = read_csv_columns(f.profile, {"x", "h"});
  const double lo = f.t_lo.value_or(cfg.simulation.burn_in);
  const double hi = f.t_hi.value_or(std::numeric_limits<double>::infinity());
  std::vector<double> times;
  std::vector<std::vector<double>> snapshots;
  for (std::size_t i = 0; i < snap[0].size(); ++i) {
    if (times.empty() || snap[0][i] != times.back()) {
      times.push_back(snap[0][i]);
      snapshots.emplace_back();
    }
    snapshots.back().push_back(snap[1][i]);
  }
  const EmpiricalCDF emp = centered_profile(times, snapshots, lo, hi);
  WaveProfile predicted;
  predicted.grid = prof[0];
  predicted.values = prof[1];
  const json j = comparison_json(compare_profiles(emp, predicted));
  OutputDir out(f.out, "compare", cfg.to_json(), cfg.seed);
  out.write_json("compare.json", j);
  out.finish();
  print(j);
  return 0;
}

int cmd_pipeline(const Flags& f) {
  const RunConfig cfg = resolve_config(f);
  OutputDir out(f.out, "pipeline", cfg.to_json(), cfg.seed);
  json summary;

  const SpeedDecayResult disp = resolve_dispersion(cfg);
  out.write_json("dispersion.json", dispersion_json(disp));
  summary["dispersion"] = {{"gamma", disp.gamma}, {"c", disp.c}, {"regime", to_string(disp.regime)}};

  const SamplePool pool = obtain_pool(cfg, f, disp);
  out.write_csv("pool.csv", {"v"}, {&pool.samples});
  out.write_json("pool.json", pool_json(pool));

  const Orientation o = orientation_of(cfg);
  const auto grid = profile_grid(cfg, pool, disp.gamma);
  const WaveProfile profile = profile_eval(pool.samples, disp.gamma, o, grid, cfg.workers);
  const json tail = tail_json(pool, disp.gamma, o, cfg.workers);
  write_profile(out, profile, tail);

  const json tests = run_verification(cfg, pool, disp);
  out.write_json("verify.json", tests);
  bool all_pass = true;
  for (const auto& t : tests) all_pass = all_pass && t["pass"].get<bool>();
  summary["verify_all_pass"] = all_pass;

  SimulationResult sim;
  summary["simulate"] = simulate_into(out, cfg, sim);

  const ParticleSystemConfig pc = particle_config(cfg);
  const EmpiricalCDF emp =
      centered_profile(sim.snapshot_times, sim.snapshots, pc.burn_in, pc.horizon);
  json cmp = comparison_json(compare_profiles(emp, profile));
  const auto wrong_grid = profile_grid(cfg, pool, 2.0 * disp.gamma);
  const WaveProfile wrong = profile_eval(pool.samples, 2.0 * disp.gamma, o, wrong_grid, cfg.workers);
  cmp["wrong_gamma_control"] = comparison_json(compare_profiles(emp, wrong));
  cmp["wrong_gamma_control"]["gamma"] = 2.0 * disp.gamma;
  out.write_json("compare.json", cmp);
  summary["compare"] = cmp;

  out.finish();
  print(summary);
  return 0;
}

void add_model_flags(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config, "JSON config file (or a run manifest)");
  sub->add_option("--out", f.out, "Output directory")->capture_default_str();
  sub->add_option("--preset", f.preset, "Named preset: fkpp-brownian, bs-exp, power2-exp, power2-det");
  sub->add_option("--seed", f.seed, "Random seed");
  sub->add_option("--workers", f.workers, "Worker threads");
  sub->add_option("--samples", f.samples, "Wave samples for sample-wave and verify");
  sub->add_option("--pool-size", f.pool_size, "Pool size M");
  sub->add_option("--iterations", f.iterations, "Pool iterations n");
  sub->add_option("--grid", f.grid, "Profile grid lo:hi:n");
  sub->add_option("--model", f.model, "power2, bs or fkpp");
  sub->add_option("--jumps", f.jumps, "Jump law: exp:RATE, det:VALUE, gamma:SHAPE:RATE");
  sub->add_option("--lambda", f.lambda, "Individual jump rate (bs)");
  sub->add_option("--sigma2", f.sigma2, "Brownian variance");
  sub->add_option("--c", f.c, "Wave speed");
  sub->add_option("--gamma", f.gamma, "Decay rate");
  sub->add_option("--k", f.k, "Number of interacting particles");
  sub->add_option("--rho", f.rho, "Copying / interaction rate");
  sub->add_option("--mode", f.mode, "Dispersion mode: minimal, from_gamma, from_speed");
  sub->add_option("--pool", f.pool, "Reuse a pool CSV (column v) instead of iterating");
  sub->add_option("--n", f.n, "Number of particles (simulate)");
  sub->add_option("--horizon", f.horizon, "Simulation horizon");
  sub->add_option("--burn-in", f.burn_in, "Burn-in time");
}

}  // namespace

int run(const std::vector<std::string>& args) {
  std::vector<char*> argv;
  std::vector<std::string> storage = args;
  for (auto& a : storage) argv.push_back(a.data());
  return run(static_cast<int>(argv.size()), argv.data());
}

int run(int argc, char** argv) {
  CLI::App app{"twave: travelling waves from distributional fixed points and particle systems"};
  app.require_subcommand(1);
  Flags f;
  struct Entry {
    const char* name;
    const char* help;
    int (*fn)(const Flags&);
  };
  const Entry entries[] = {
      {"solve-gamma", "Decay rate gamma for a given model and speed", cmd_solve_gamma},
      {"critical-speed", "Critical pair (gamma*, c*)", cmd_critical_speed},
      {"dispersion", "Speed-decay relation and regime diagnostics", cmd_dispersion},
      {"sample-pool", "Iterate the smoothing transform and write the pool", cmd_sample_pool},
      {"wave-profile", "Evaluate h(x) on a grid", cmd_wave_profile},
      {"sample-wave", "Draw wave variables xi", cmd_sample_wave},
      {"verify", "Kolmogorov-Smirnov checks of the nonlinear fixed points", cmd_verify},
      {"simulate", "Event-driven N-particle simulation", cmd_simulate},
      {"compare", "Compare an empirical profile with a predicted wave", cmd_compare},
      {"pipeline", "dispersion, pool, profile, verify, simulate and compare in one run",
       cmd_pipeline},
  };
  std::vector<std::pair<CLI::App*, int (*)(const Flags&)>> subs;
  for (const auto& e : entries) {
    CLI::App* sub = app.add_subcommand(e.name, e.help);
    add_model_flags(sub, f);
    if (std::string(e.name) == "compare") {
      sub->add_option("--empirical", f.empirical, "Snapshots CSV (t, position)");
      sub->add_option("--profile", f.profile, "Profile CSV (x, h)");
      sub->add_option("--t-lo", f.t_lo, "Earliest snapshot time (default burn-in)");
      sub->add_option("--t-hi", f.t_hi, "Latest snapshot time");
    }
    subs.emplace_back(sub, e.fn);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(ExitCode::Validation);
  }
  try {
    for (const auto& [sub, fn] : subs) {
      if (sub->parsed()) return fn(f);
    }
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(ExitCode::Validation);
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return static_cast<int>(ExitCode::Numerical);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(ExitCode::Failure);
  }
  return static_cast<int>(ExitCode::Failure);
}

}  // namespace twave::cli
