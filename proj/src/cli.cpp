#include "dmkp/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <numbers>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "dmkp/duhamel.hpp"
#include "dmkp/error.hpp"
#include "dmkp/illposed.hpp"
#include "dmkp/init.hpp"
#include "dmkp/io.hpp"
#include "dmkp/norms.hpp"
#include "dmkp/propagator.hpp"

namespace dmkp {

namespace fs = std::filesystem;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::string numbered(const char* stem, long n) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s_%06ld.fld", stem, n);
  return buf;
}

fs::path output_dir(const std::string& flag_value) {
  if (const char* env = std::getenv(kOutputDirEnv); env && *env) return fs::path(env);
  return fs::path(flag_value);
}

void save_snapshot(const fs::path& dir, const std::string& name, const SpectralField& field, double time,
                   const ModelParams& params, const std::map<std::string, std::string>& provenance) {
  const fs::path path = dir / name;
  write_fld1(path, inverse(field), time);
  write_manifest(path, time, params, provenance);
}

// ---- simulate -------------------------------------------------------------

int cmd_simulate(const std::string& config_path, std::ostream& out) {
  const RunConfig cfg = load_run_config(config_path);
  const GridPtr grid = cfg.make_grid();
  const SpectralField phi = make_initial(grid, cfg.init);
  const fs::path dir = resolve_output_dir(cfg);
  const long steps = std::lround(cfg.time.t_final / cfg.time.dt);
  if (steps < 4) throw ConfigError("simulate: the energy monitor needs at least 4 steps");
  const int every = cfg.time.output_every;

  EnergyMonitor monitor(cfg.model);
  std::map<long, double> sobolev;
  const std::map<std::string, std::string> provenance{{"command", "simulate"}, {"config", config_path}};
  simulate(phi, cfg.time.t_final, cfg.time.dt, cfg.model, [&](const SimState& s) {
    monitor.record(s);
    const long n = std::lround(s.time / cfg.time.dt);
    if (n % every != 0) return;
    sobolev[n] = sobolev_norm(s.field, cfg.output.s1, cfg.output.s2);
    save_snapshot(dir, numbered("snap", n), s.field, s.time, cfg.model, provenance);
  });

  CsvTable table("simulate", {"t", "l2", "h_s1_s2", "energy_lhs", "energy_rhs", "energy_residual"});
  long n = 0;
  for (const auto& row : monitor.rows(every)) {
    table.add_row(std::vector<double>{row.t, row.l2, sobolev.at(n), row.energy_lhs, row.energy_rhs, row.residual});
    n += every;
  }
  table.write(dir / "simulate.csv");
  out << "simulate: " << table.rows() << " observations written to " << dir.string() << "\n";
  return kExitOk;
}

// ---- norms ----------------------------------------------------------------

struct NormsArgs {
  std::string path;
  double b = 0.0, s1 = 0.0, s2 = 0.0;
  std::string preset = "dmkp";
  double alpha = 1.0, epsilon = 1.0;
  int pad = 4;
};

int cmd_norms(const NormsArgs& a, std::ostream& out) {
  const ModelParams params = preset_by_name(a.preset, a.alpha, a.epsilon);
  params.validate();
  if (!fs::exists(a.path)) throw ConfigError("norms: no such file or directory: " + a.path);

  if (!fs::is_directory(a.path)) {
    if (a.b != 0.0) throw ConfigError("norms: --b needs a trajectory directory");
    const Snapshot snap = read_fld1(a.path);
    const SpectralField F = forward(snap.field);
    CsvTable table("norms", {"source", "t", "s1", "s2", "l2", "h_s1_s2"});
    table.add_row({fs::path(a.path).filename().string(), format_number(snap.time), format_number(a.s1),
                   format_number(a.s2), format_number(l2_norm(F)), format_number(sobolev_norm(F, a.s1, a.s2))});
    out << table.str();
    return kExitOk;
  }

  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(a.path)) {
    if (entry.is_regular_file() && entry.path().extension() == ".fld") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  if (files.size() < 3) throw ConfigError("norms: a trajectory needs at least three snapshots");

  std::vector<Snapshot> snaps;
  for (const auto& f : files) snaps.push_back(read_fld1(f));
  const double t_start = snaps.front().time;
  const double t_end = snaps.back().time;
  const double dt = (t_end - t_start) / static_cast<double>(snaps.size() - 1);
  if (!(dt > 0.0)) throw ConfigError("norms: snapshot times must increase");
  for (std::size_t n = 0; n < snaps.size(); ++n) {
    if (std::abs(snaps[n].time - (t_start + dt * n)) > 1e-9 * std::max(1.0, std::abs(t_end))) {
      throw ConfigError("norms: snapshot times are not uniformly spaced");
    }
  }

  // Re-centre on the midpoint and cut off smoothly inside the recorded span;
  // a time shift changes no Bourgain norm.
  const double mid = 0.5 * (t_start + t_end);
  const CutoffSpec cutoff{0.25 * (t_end - t_start)};
  SpaceTimeField f;
  f.pad_factor = a.pad;
  f.trajectory.t0 = t_start - mid;
  f.trajectory.dt = dt;
  const GridPtr grid = snaps.front().field.grid;
  for (const auto& s : snaps) {
    const auto& g = *s.field.grid;
    if (g.nx() != grid->nx() || g.ny() != grid->ny() || g.lx() != grid->lx() || g.ly() != grid->ly()) {
      throw ConfigError("norms: snapshots live on different grids");
    }
    RealField r(grid);
    r.values = s.field.values;
    f.trajectory.fields.push_back(forward(r));
  }
  apply_window(f, cutoff);

  CsvTable table("norms trajectory", {"snapshots", "t_start", "t_end", "b", "s1", "s2", "bourgain"});
  table.add_row(std::vector<double>{static_cast<double>(snaps.size()), t_start, t_end, a.b, a.s1, a.s2,
                                    bourgain_norm(f, NormSpec{a.b, a.s1, a.s2}, params)});
  out << table.str();
  return kExitOk;
}

// ---- picard ---------------------------------------------------------------

struct PicardArgs {
  std::string config;
  double tol = 1e-10;
  int max_iter = 50;
  int steps = 0;
};

int cmd_picard(const PicardArgs& a, std::ostream& out) {
  const RunConfig cfg = load_run_config(a.config);
  const GridPtr grid = cfg.make_grid();
  const SpectralField phi = make_initial(grid, cfg.init);
  const fs::path dir = resolve_output_dir(cfg);
  const int steps = a.steps > 0 ? a.steps : static_cast<int>(std::lround(cfg.time.t_final / cfg.time.dt));

  CsvTable table("picard", {"iteration", "residual", "ratio"});
  double previous = 0.0;
  PicardOptions options;
  options.tol = a.tol;
  options.max_iter = a.max_iter;
  options.on_iteration = [&](int k, double res) {
    const std::string ratio = k > 0 && previous > 0.0 ? format_number(res / previous) : "";
    table.add_row({std::to_string(k), format_number(res), ratio});
    previous = res;
  };

  PicardResult result;
  try {
    result = picard_solve(phi, cfg.time.t_final, steps, cfg.model, options);
  } catch (const NonConvergence&) {
    table.write(dir / "picard.csv");
    throw;
  }
  table.write(dir / "picard.csv");
  const std::map<std::string, std::string> provenance{{"command", "picard"}, {"config", a.config}};
  const auto& traj = result.trajectory;
  for (std::size_t n = 0; n < traj.size(); ++n) {
    if (n % static_cast<std::size_t>(cfg.time.output_every) != 0 && n + 1 != traj.size()) continue;
    save_snapshot(dir, numbered("picard", static_cast<long>(n)), traj.fields[n], traj.time(n), cfg.model,
                  provenance);
  }
  out << "picard: converged after " << result.residuals.size() << " iterations, residual "
      << format_number(result.residuals.back()) << "\n";
  return kExitOk;
}

// ---- illposed -------------------------------------------------------------

struct IllposedArgs {
  std::vector<double> n_list{16, 32, 64, 128};
  std::vector<double> s_list{-0.75, -0.25};
  double eps = 0.1;
  int orders = 8;
  int inner_orders = 0;
  std::string preset = "dmkp";
  std::string out_dir = "dmkp_out";
};

int cmd_illposed(const IllposedArgs& a, std::ostream& out) {
  ScanConfig cfg;
  cfg.n_values = a.n_list;
  cfg.s_values = a.s_list;
  cfg.eps = a.eps;
  cfg.outer_xi = cfg.outer_eta = a.orders;
  cfg.inner_xi = cfg.inner_eta = a.inner_orders > 0 ? a.inner_orders : a.orders;
  const ModelParams params = preset_by_name(a.preset, 1.0, 1.0);
  const ScanResult result = scan_and_fit(cfg, params);

  CsvTable table("illposed scan", {"N", "s", "eps", "norm", "phi_norm", "slope"});
  for (const auto& r : result.rows) {
    table.add_row(std::vector<double>{r.N, r.s, r.eps, r.norm, r.phi_norm, result.slopes.at(r.s)});
  }
  table.write(output_dir(a.out_dir) / "illposed.csv");

  CsvTable slopes("illposed slopes", {"s", "eps", "slope", "reference"});
  for (const auto& [s, slope] : result.slopes) slopes.add_row(std::vector<double>{s, a.eps, slope, -s - 0.5 - a.eps});
  out << slopes.str();
  return kExitOk;
}

// ---- probe ----------------------------------------------------------------

struct ProbeArgs {
  std::string kind;
  std::string data = "random";
  int ensemble = 100;
  std::uint64_t seed = 1;
  int nx = 16, ny = 16;
  double lx = 0.0, ly = 0.0;
  double dt = 2e-3;
  int band = 3;
  double slope = -1.0;
  double s1 = 0.0, s2 = 0.0;
  double delta = 0.1;
  double T = 1.0;
  double half_window = 2.5;
  std::vector<double> n_list{8, 16, 32};
  std::string preset = "dmkp";
  std::string out_dir = "dmkp_out";
};

int cmd_probe(const ProbeArgs& a, std::ostream& out) {
  const ModelParams params = preset_by_name(a.preset, 1.0, 1.0);
  CsvTable samples("probe", {"kind", "N", "sample", "ratio"});
  CsvTable stats("probe stats", {"kind", "N", "count", "min", "median", "max"});
  auto add_stats = [&](double N, const RatioStats& s) {
    stats.add_row({a.kind, format_number(N), std::to_string(s.count), format_number(s.min), format_number(s.median),
                   format_number(s.max)});
  };

  if (a.data == "phiN") {
    if (a.kind != "bilinear") throw ConfigError("probe: phiN data is only defined for the bilinear probe");
    for (double N : a.n_list) {
      const double r = phi_bilinear_ratio(N, a.s1, a.delta, params);
      samples.add_row({a.kind, format_number(N), "0", format_number(r)});
      add_stats(N, summarize({r}));
    }
  } else if (a.data == "random") {
    if (a.ensemble < 1) throw ConfigError("probe: ensemble must be >= 1");
    const GridPtr grid = build_grid(a.nx, a.ny, a.lx > 0.0 ? a.lx : kTwoPi, a.ly > 0.0 ? a.ly : kTwoPi);
    auto draw = [&](std::uint64_t seed) { return random_field(grid, seed, a.slope, a.band, 1.0); };
    std::vector<double> ratios;
    if (a.kind == "linear") {
      std::vector<SpectralField> phis;
      for (int e = 0; e < a.ensemble; ++e) phis.push_back(draw(a.seed + e));
      probe_linear_estimate(phis, NormSpec{0.5, a.s1, a.s2}, params, a.half_window, a.dt, &ratios);
    } else if (a.kind == "retarded") {
      if (a.half_window < 2.0) throw ConfigError("probe: --half-window must be >= 2");
      auto ws = [&](std::size_t e) {
        return windowed_free_wave(draw(a.seed + e), 1.0, a.half_window - 2.0, a.dt, params);
      };
      probe_retarded_estimate(a.ensemble, ws, NormSpec{0.5, a.s1, a.s2}, a.delta, params, &ratios);
    } else if (a.kind == "bilinear") {
      if (a.half_window < 2.0 * a.T) throw ConfigError("probe: --half-window must be >= 2T");
      const double margin = a.half_window - 2.0 * a.T;
      auto us = [&](std::size_t e) { return windowed_free_wave(draw(a.seed + e), a.T, margin, a.dt, params); };
      auto vs = [&](std::size_t e) {
        return windowed_free_wave(draw(a.seed + 100000 + e), a.T, margin, a.dt, params);
      };
      probe_bilinear_estimate(a.ensemble, us, vs, a.s1, a.s2, a.delta, a.T, params, &ratios);
    } else {
      throw ConfigError("probe: kind must be linear, retarded or bilinear");
    }
    for (std::size_t i = 0; i < ratios.size(); ++i) {
      samples.add_row({a.kind, "0", std::to_string(i), format_number(ratios[i])});
    }
    add_stats(0.0, summarize(ratios));
  } else {
    throw ConfigError("probe: --data must be random or phiN");
  }
  samples.write(output_dir(a.out_dir) / ("probe_" + a.kind + ".csv"));
  out << stats.str();
  return kExitOk;
}

void report(std::ostream& err, const char* kind, const std::string& message) {
  err << nlohmann::json{{"error", kind}, {"message", message}}.dump() << "\n";
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"dmkp-lab: numerical experiments for the dissipation-modified KP equation"};
  app.require_subcommand(1);

  std::string sim_config;
  auto* sim = app.add_subcommand("simulate", "Run the IF-RK4 solver, write snapshots and simulate.csv");
  sim->add_option("--config", sim_config, "JSON run configuration")->required();

  NormsArgs na;
  auto* norms = app.add_subcommand("norms", "Norms of a snapshot (H^{s1,s2}) or a snapshot directory (X^{b,s1,s2})");
  norms->add_option("path", na.path, "FLD1 file or directory of FLD1 files")->required();
  norms->add_option("--b", na.b);
  norms->add_option("--s1", na.s1);
  norms->add_option("--s2", na.s2);
  norms->add_option("--preset", na.preset);
  norms->add_option("--alpha", na.alpha);
  norms->add_option("--epsilon", na.epsilon);
  norms->add_option("--pad", na.pad, "time zero-padding factor (>= 4)");

  PicardArgs pa;
  auto* picard = app.add_subcommand("picard", "Picard iteration of the Duhamel formula");
  picard->add_option("--config", pa.config, "JSON run configuration")->required();
  picard->add_option("--tol", pa.tol);
  picard->add_option("--max-iter", pa.max_iter);
  picard->add_option("--steps", pa.steps, "time intervals (default t_final / dt)");

  IllposedArgs ia;
  auto* ill = app.add_subcommand("illposed", "Second-iterate norm scan over N and the log-log slope fit");
  ill->add_option("--N-list", ia.n_list)->delimiter(',');
  ill->add_option("--s-list", ia.s_list)->delimiter(',');
  ill->add_option("--eps", ia.eps);
  ill->add_option("--orders", ia.orders, "outer Gauss-Legendre order per axis");
  ill->add_option("--inner-orders", ia.inner_orders, "inner order per axis (default: --orders)");
  ill->add_option("--preset", ia.preset);
  ill->add_option("--output-dir", ia.out_dir);

  ProbeArgs pr;
  auto* probe = app.add_subcommand("probe", "Ensemble ratio statistics for the linear, retarded and bilinear estimates");
  probe->add_option("kind", pr.kind, "linear | retarded | bilinear")->required();
  probe->add_option("--data", pr.data, "random | phiN");
  probe->add_option("--ensemble", pr.ensemble);
  probe->add_option("--seed", pr.seed);
  probe->add_option("--nx", pr.nx);
  probe->add_option("--ny", pr.ny);
  probe->add_option("--lx", pr.lx);
  probe->add_option("--ly", pr.ly);
  probe->add_option("--dt", pr.dt);
  probe->add_option("--band", pr.band);
  probe->add_option("--slope", pr.slope, "spectral slope of the random data");
  probe->add_option("--s1", pr.s1);
  probe->add_option("--s2", pr.s2);
  probe->add_option("--delta", pr.delta);
  probe->add_option("--T", pr.T);
  probe->add_option("--half-window", pr.half_window);
  probe->add_option("--N-list", pr.n_list)->delimiter(',');
  probe->add_option("--preset", pr.preset);
  probe->add_option("--output-dir", pr.out_dir);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    report(err, "config", e.what());
    return kExitConfig;
  }

  try {
    if (*sim) return cmd_simulate(sim_config, out);
    if (*norms) return cmd_norms(na, out);
    if (*picard) return cmd_picard(pa, out);
    if (*ill) return cmd_illposed(ia, out);
    if (*probe) return cmd_probe(pr, out);
  } catch (const ConfigError& e) {
    report(err, "config", e.what());
    return kExitConfig;
  } catch (const NonConvergence& e) {
    report(err, "non_convergence", e.what());
    return kExitNumerical;
  } catch (const Instability& e) {
    report(err, "instability", e.what());
    return kExitNumerical;
  } catch (const NumericalError& e) {
    report(err, "numerical", e.what());
    return kExitNumerical;
  } catch (const fs::filesystem_error& e) {
    report(err, "config", e.what());
    return kExitConfig;
  }
  return kExitConfig;
}

}  // namespace dmkp
