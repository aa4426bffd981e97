#include "bohmq/commands.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "bohmq/calculus.hpp"
#include "bohmq/config.hpp"
#include "bohmq/errors.hpp"
#include "bohmq/field_io.hpp"
#include "bohmq/symmetry.hpp"

namespace fs = std::filesystem;

namespace bohmq {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct LoadedRun {
  RunConfig cfg;
  GridSpec grid;
  std::string provenance;
};

LoadedRun load_run(const std::string& config_path, const CommandOptions& opts) {
  LoadedRun run{parse_run_config(config_path), GridSpec{}, ""};
  if (!opts.output_dir.empty()) run.cfg.output_dir = opts.output_dir;
  run.cfg.scf.eikonal.threads = std::max<std::size_t>(1, opts.threads);
  run.grid = run.cfg.grid();
  run.provenance = "config=" + file_hash_hex(config_path) +
                   (run.cfg.name.empty() ? "" : " name=" + run.cfg.name);
  return run;
}

ScalarField single_particle_potential(const RunConfig& cfg, const GridSpec& grid,
                                      const DensityModel& model) {
  if (cfg.potential == PotentialType::none)
    return ScalarField(grid.particle_subgrid());
  return hartree_potential(one_particle_density(model, grid), cfg.n_total,
                           cfg.constants);
}

void write_field(const RunConfig& cfg, const std::string& base,
                 const ScalarField& field, const std::string& provenance,
                 bool force_binary = false) {
  const fs::path dir(cfg.output_dir);
  if (cfg.write_csv) write_field_csv(field, (dir / (base + ".csv")).string(), provenance);
  if (cfg.write_binary || force_binary)
    write_field_binary(field, (dir / (base + ".bqf")).string());
}

struct ConditionalSummary {
  double max_norm_deviation = 0.0;
  std::size_t flagged = 0;
  std::size_t marginal_nodes = 0;
  double floor = 0.0;
};

// Deviation of integral |beta(r'|r)|^2 dr' from 1 over unflagged r nodes.
ConditionalSummary conditional_norm_check(const DensityModel& model,
                                          const GridSpec& grid) {
  ConditionalSummary out;
  MarginalFunction marg = marginal_function(model, grid);
  out.floor = default_conditional_floor(marg.phi);
  if (out.floor == 0.0) out.floor = 1e-300;
  ConditionalFunction cond = conditional_function(model, grid, out.floor);
  out.flagged = cond.flagged;
  out.marginal_nodes = cond.marginal_mask.size();
  if (grid.particles() == 1) return out;

  ScalarField beta_sq(grid);
  for (std::size_t i = 0; i < beta_sq.size(); ++i) {
    const double b = cond.beta.values[i];
    beta_sq.values[i] = b * b;
  }
  std::vector<std::size_t> rest;
  for (std::size_t p = 1; p < grid.particles(); ++p)
    for (std::size_t a : particle_axes(grid, p)) rest.push_back(a);
  ScalarField norms = marginalize(beta_sq, rest);
  for (std::size_t r = 0; r < norms.size(); ++r) {
    if (cond.marginal_mask[r]) continue;
    out.max_norm_deviation =
        std::max(out.max_norm_deviation, std::abs(norms.values[r] - 1.0));
  }
  return out;
}

int guarded(const std::function<int()>& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const ConvergenceError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
}

}  // namespace

int cmd_validate(const std::string& config_path, const CommandOptions& opts) {
  return guarded([&]() -> int {
    LoadedRun run = load_run(config_path, opts);
    const RunConfig& cfg = run.cfg;
    DensityModel model = cfg.build_model();

    std::ostringstream grid_desc;
    for (std::size_t a = 0; a < cfg.axes.size(); ++a)
      grid_desc << (a ? "x" : "") << cfg.axes[a].n;
    std::cout << "problem '" << cfg.name << "': N=" << cfg.n_total
              << " M=" << cfg.particles << " d=" << cfg.dims << " mode="
              << (cfg.mode == ModelMode::slater ? "slater" : "product")
              << " grid=" << grid_desc.str() << "^" << cfg.particles << "\n";

    const double rho_m = total_integral(m_particle_density(model, run.grid));
    const double n = static_cast<double>(cfg.n_total);
    std::cout << "amplitude norm   : integral N|phi_M|^2 = " << rho_m
              << " (deviation from N: " << std::abs(rho_m - n) << ")\n";

    MarginalFunction marg = marginal_function(model, run.grid);
    ScalarField marg_sq(marg.phi.grid);
    for (std::size_t i = 0; i < marg_sq.size(); ++i)
      marg_sq.values[i] = marg.phi.values[i] * marg.phi.values[i];
    const double marg_norm = total_integral(marg_sq);
    std::cout << "marginal norm    : integral |phi(r)|^2 = " << marg_norm
              << " (deviation from 1: " << std::abs(marg_norm - 1.0) << ")\n";

    ConditionalSummary cond = conditional_norm_check(model, run.grid);
    std::cout << "conditional norm : max_r |integral |beta|^2 - 1| = "
              << cond.max_norm_deviation << " (flagged r nodes: " << cond.flagged
              << "/" << cond.marginal_nodes << ")\n";

    std::cout << "sources          : " << cfg.resolve_sources(model).size()
              << " resolved\nconfig ok\n";
    return 0;
  });
}

int cmd_qpot(const std::string& config_path, const CommandOptions& opts) {
  return guarded([&]() -> int {
    LoadedRun run = load_run(config_path, opts);
    const RunConfig& cfg = run.cfg;
    DensityModel model = cfg.build_model();
    fs::create_directories(cfg.output_dir);

    ScalarField amp = eval_on_grid(
        [&](std::span<const double> c) { return model.amplitude(c); }, run.grid);
    MaskedField q0 = bohm_potential(amp, all_axes(run.grid), cfg.constants);
    if (q0.masked_fraction() > 0.1)
      std::cout << "warning: amplitude below floor on "
                << 100.0 * q0.masked_fraction()
                << "% of nodes (model likely nodal)\n";
    write_field(cfg, "q0", q0.field, run.provenance);

    write_field(cfg, "density1", one_particle_density(model, run.grid),
                run.provenance);
    MarginalFunction marg = marginal_function(model, run.grid);
    write_field(cfg, "marginal", marg.phi, run.provenance);

    ConditionalSummary cond = conditional_norm_check(model, run.grid);
    std::ofstream report(fs::path(cfg.output_dir) / "conditional_report.txt");
    report << "# " << run.provenance << "\n"
           << "floor " << fmt(cond.floor) << "\n"
           << "flagged_marginal_nodes " << cond.flagged << " of "
           << cond.marginal_nodes << "\n"
           << "max_conditional_norm_deviation " << fmt(cond.max_norm_deviation)
           << "\n"
           << "q0_flagged_fraction " << fmt(q0.masked_fraction()) << "\n";

    if (opts.verbose)
      std::cout << "wrote q0, density1, marginal, conditional_report to "
                << cfg.output_dir << "\n";
    return 0;
  });
}

int cmd_scf(const std::string& config_path, const CommandOptions& opts) {
  return guarded([&]() -> int {
    LoadedRun run = load_run(config_path, opts);
    const RunConfig& cfg = run.cfg;
    DensityModel model = cfg.build_model();
    fs::create_directories(cfg.output_dir);

    ScalarField v_single = single_particle_potential(cfg, run.grid, model);
    std::vector<FieldSource> sources = cfg.resolve_sources(model);

    ScfConfig scf_cfg = cfg.scf;
    std::vector<SliceStat> slice_log;
    if (opts.slice_log) scf_cfg.slice_log = &slice_log;

    ScfState state = scf_init(model, run.grid, cfg.constants);
    ScfOutcome outcome;
    try {
      outcome = scf_run(state, v_single, sources, cfg.constants, scf_cfg);
    } catch (const NumericalError& e) {
      std::cerr << "numerical failure: " << e.what() << "\n";
      return 4;
    }

    write_field(cfg, "q_final", state.q, run.provenance, /*force_binary=*/true);
    write_field(cfg, "s_final", state.phase.s, run.provenance,
                /*force_binary=*/true);

    MarginalFunction marg = marginal_function(model, run.grid);
    double floor = default_conditional_floor(marg.phi);
    if (floor == 0.0) floor = 1e-300;
    ConditionalFunction cond = conditional_function(model, run.grid, floor);
    MaskedField reduced = reduce_potential(state.q, state.q_mask, cond);
    write_field(cfg, "q_reduced", reduced.field, run.provenance);

    {
      std::ofstream res(fs::path(cfg.output_dir) / "residuals.csv");
      res << "# " << run.provenance << "\n"
          << "step,equation,residual,clamped_fraction,flagged_fraction\n";
      for (const auto& r : state.history)
        res << r.step << "," << r.equation << "," << fmt(r.residual) << ","
            << fmt(r.clamped_fraction) << "," << fmt(r.flagged_fraction) << "\n";
    }
    {
      std::ofstream diag(fs::path(cfg.output_dir) / "diagnostics.txt");
      diag << "# " << run.provenance << "\n"
           << "converged " << (outcome.converged ? "true" : "false") << "\n"
           << "steps " << outcome.steps << "\n"
           << "stages " << state.stages << "\n"
           << "final_delta_q " << fmt(outcome.final_residual) << "\n"
           << "q0_flagged_fraction " << fmt(state.q0_flagged_fraction) << "\n"
           << "reduced_flagged_nodes " << reduced.masked_count() << "\n";
      diag << "step_delta_q";
      for (double d : state.step_delta_q) diag << " " << fmt(d);
      diag << "\n";
    }
    if (opts.slice_log) {
      std::ofstream sl(fs::path(cfg.output_dir) / "slices.csv");
      sl << "# " << run.provenance << "\n"
         << "slice,sweeps,residual\n";
      for (const auto& s : slice_log)
        sl << s.slice << "," << s.sweeps << "," << fmt(s.residual) << "\n";
    }

    std::cout << (outcome.converged ? "converged" : "not converged") << " after "
              << outcome.steps << " step(s), final dQ = "
              << outcome.final_residual << "\n";
    return outcome.converged ? 0 : 3;
  });
}

int cmd_trajectories(const std::string& config_path, const std::string& starts_path,
                     const CommandOptions& opts) {
  return guarded([&]() -> int {
    LoadedRun run = load_run(config_path, opts);
    const RunConfig& cfg = run.cfg;

    const fs::path checkpoint = fs::path(cfg.output_dir) / "s_final.bqf";
    if (!fs::exists(checkpoint))
      throw ConfigError("phase checkpoint not found: " + checkpoint.string() +
                        " (run the scf command first)");
    PhaseField phase;
    phase.s = read_field_binary(checkpoint.string());
    if (!(phase.s.grid == run.grid))
      throw ConfigError("checkpoint grid does not match the configuration");

    VectorField v = velocity_field(phase, cfg.constants);

    std::ifstream starts(starts_path);
    if (!starts) throw ConfigError("cannot open starts file: " + starts_path);
    std::vector<std::vector<double>> start_points;
    std::string line;
    int line_no = 0;
    while (std::getline(starts, line)) {
      ++line_no;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line = line.substr(0, hash);
      for (char& c : line)
        if (c == ',') c = ' ';
      std::istringstream ls(line);
      std::vector<double> p;
      double x;
      while (ls >> x) p.push_back(x);
      if (p.empty()) continue;
      if (p.size() != run.grid.total_axes())
        throw ConfigError("start point needs " +
                              std::to_string(run.grid.total_axes()) +
                              " coordinates",
                          line_no);
      start_points.push_back(std::move(p));
    }

    for (std::size_t t = 0; t < start_points.size(); ++t) {
      Trajectory traj = integrate_trajectory(v, start_points[t], cfg.trajectory_dt,
                                             cfg.trajectory_steps);
      char name[64];
      std::snprintf(name, sizeof(name), "trajectory_%03zu.csv", t);
      std::ofstream os(fs::path(cfg.output_dir) / name);
      os << "# " << run.provenance << "\n"
         << "# truncated=" << (traj.truncated ? "true" : "false") << "\n"
         << "t";
      for (std::size_t a = 0; a < run.grid.total_axes(); ++a) os << ",axis" << a;
      os << "\n";
      for (std::size_t i = 0; i < traj.points.size(); ++i) {
        os << fmt(traj.times[i]);
        for (double c : traj.points[i]) os << "," << fmt(c);
        os << "\n";
      }
    }
    std::cout << "integrated " << start_points.size() << " trajectories\n";
    return 0;
  });
}

}  // namespace bohmq
