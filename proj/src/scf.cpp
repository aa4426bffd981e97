#include "bohmq/scf.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "bohmq/calculus.hpp"
#include "bohmq/errors.hpp"
#include "bohmq/symmetry.hpp"

namespace bohmq {

double relative_change(const ScalarField& a, const ScalarField& b) {
  if (a.size() != b.size())
    throw std::invalid_argument("relative_change: size mismatch");
  double diff = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    diff = std::max(diff, std::abs(a.values[i] - b.values[i]));
  const double scale = std::max({a.max_abs(), b.max_abs(), 1e-300});
  return diff / scale;
}

ScfState scf_init(const DensityModel& model, const GridSpec& grid,
                  const PhysicalConstants& constants, double amplitude_floor) {
  if (!model.matches(grid))
    throw std::invalid_argument("scf_init: grid does not match the model");
  ScalarField amp = eval_on_grid(
      [&](std::span<const double> coords) { return model.amplitude(coords); },
      grid);
  MaskedField q0 =
      bohm_potential(amp, all_axes(grid), constants, amplitude_floor);
  ScfState state;
  state.q = std::move(q0.field);
  state.q_mask = std::move(q0.mask);
  state.q0_flagged_fraction =
      static_cast<double>(std::count_if(state.q_mask.begin(), state.q_mask.end(),
                                        [](std::uint8_t m) { return m != 0; })) /
      static_cast<double>(state.q.size());
  state.phase.s = ScalarField(grid);
  return state;
}

ScalarField recover_potential(const ScalarField& s, std::size_t k,
                              const ScalarField& v_single,
                              const PhysicalConstants& constants) {
  const GridSpec& g = s.grid;
  const std::size_t m = g.particles();
  if (k >= m)
    throw std::invalid_argument("recover_potential: equation index out of range");
  const auto axes = particle_axes(g, k);
  ScalarField gsq = upwind_grad_sq(s, axes);
  const std::size_t d = g.dims_per_particle();
  const double inv_2m = 1.0 / (2.0 * constants.mass);
  ScalarField out(g);
  std::vector<std::size_t> multi(g.total_axes());
  std::vector<std::size_t> block(d);
  for (std::size_t i = 0; i < out.size(); ++i) {
    g.unravel(i, multi);
    for (std::size_t a = 0; a < d; ++a) block[a] = multi[k * d + a];
    const double v = v_single.values[v_single.grid.ravel(block)];
    out.values[i] = constants.energy_offset -
                    static_cast<double>(m) * (gsq.values[i] * inv_2m + v);
  }
  return out;
}

void scf_solve_stage(ScfState& state, std::size_t k, const ScalarField& v_single,
                     std::span<const FieldSource> sources,
                     const PhysicalConstants& constants, const ScfConfig& config) {
  const GridSpec& g = state.q.grid;
  const std::size_t m = g.particles();
  if (k >= m)
    throw std::invalid_argument("scf_solve_stage: equation index out of range");
  const bool solve_for_s = state.stages % 2 == 0;

  StageRecord rec;
  rec.step = state.step + 1;
  rec.equation = k;

  if (solve_for_s) {
    ClampedField rhs = per_particle_rhs(v_single, state.q, k, constants);
    rec.clamped_fraction = rhs.clamped_fraction();
    SliceSolveResult solved =
        solve_equation_k(rhs.field, k, sources, config.eikonal);
    rec.flagged_fraction = static_cast<double>(solved.zero_speed_count) /
                           static_cast<double>(solved.s.size());
    if (config.slice_log)
      config.slice_log->insert(config.slice_log->end(), solved.stats.begin(),
                               solved.stats.end());
    if (!solved.s.all_finite())
      throw NumericalError("scf: non-finite S at step " +
                           std::to_string(rec.step) + " equation " +
                           std::to_string(k));
    ScalarField s_new =
        config.symmetrize_each_stage ? symmetrize(solved.s) : solved.s;
    rec.residual = state.phase_valid ? relative_change(s_new, state.phase.s)
                                     : relative_change(s_new, ScalarField(g));
    state.s_raw = std::move(solved.s);
    state.phase.s = std::move(s_new);
    state.phase.equations.push_back(static_cast<int>(k));
    state.phase.symmetrized = config.symmetrize_each_stage;
    state.phase_valid = true;
  } else {
    if (!state.phase_valid)
      throw std::invalid_argument("scf: Q recovery requires a solved phase");
    ScalarField q_new = recover_potential(state.s_raw, k, v_single, constants);
    if (config.symmetrize_each_stage) q_new = symmetrize(q_new);
    if (config.mixing != 1.0) {
      for (std::size_t i = 0; i < q_new.size(); ++i)
        q_new.values[i] = (1.0 - config.mixing) * state.q.values[i] +
                          config.mixing * q_new.values[i];
    }
    if (!q_new.all_finite())
      throw NumericalError("scf: non-finite Q at step " +
                           std::to_string(rec.step) + " equation " +
                           std::to_string(k));
    rec.residual = relative_change(q_new, state.q);
    state.q = std::move(q_new);
    // Recovered Q carries no guarded divisions; the initial-guess mask no
    // longer applies.
    std::fill(state.q_mask.begin(), state.q_mask.end(), 0);
  }

  state.history.push_back(rec);
  ++state.stages;
  state.equation = (k + 1) % m;
  if (state.equation == 0) ++state.step;
}

ScfOutcome scf_run(ScfState& state, const ScalarField& v_single,
                   std::span<const FieldSource> sources,
                   const PhysicalConstants& constants, const ScfConfig& config) {
  if (!(config.tolerance > 0.0))
    throw std::invalid_argument("scf: tolerance must be positive");
  const std::size_t m = state.q.grid.particles();
  ScfOutcome outcome;
  for (std::size_t step = 0; step < config.max_steps; ++step) {
    const ScalarField q_before = state.q;
    for (std::size_t i = 0; i < m; ++i)
      scf_solve_stage(state, state.equation, v_single, sources, constants, config);
    const double delta = relative_change(state.q, q_before);
    state.step_delta_q.push_back(delta);
    outcome.final_residual = delta;
    outcome.steps = step + 1;
    if (delta < config.tolerance) {
      outcome.converged = true;
      break;
    }
  }
  return outcome;
}

std::pair<ScfState, ScfOutcome> scf_run(const DensityModel& model,
                                        const GridSpec& grid,
                                        const PhysicalConstants& constants,
                                        const ScalarField& v_single,
                                        std::span<const FieldSource> sources,
                                        const ScfConfig& config) {
  ScfState state = scf_init(model, grid, constants);
  ScfOutcome outcome = scf_run(state, v_single, sources, constants, config);
  return {std::move(state), outcome};
}

MaskedField reduce_potential(const ScalarField& q,
                             std::span<const std::uint8_t> q_mask,
                             const ConditionalFunction& beta) {
  const GridSpec& g = q.grid;
  if (!(beta.beta.grid == g))
    throw std::invalid_argument("reduce_potential: beta grid mismatch");
  MaskedField out;
  if (g.particles() == 1) {
    out.field = q;
    out.mask.assign(q_mask.begin(), q_mask.end());
    if (out.mask.empty()) out.mask.assign(q.size(), 0);
    return out;
  }
  const GridSpec sub = g.particle_subgrid();
  const std::size_t sub_points = sub.total_points();
  const std::size_t tail_points = g.total_points() / sub_points;

  // Trapezoid weight of each tail node over the particle-2..M axes.
  std::vector<double> tail_weights(tail_points, 1.0);
  {
    const std::size_t d = g.dims_per_particle();
    std::vector<std::size_t> multi(g.total_axes() - d);
    for (std::size_t t = 0; t < tail_points; ++t) {
      std::size_t rem = t;
      double w = 1.0;
      for (std::size_t a = g.total_axes(); a-- > d;) {
        const AxisSpec& ax = g.axis(a);
        const std::size_t idx = rem % ax.n;
        rem /= ax.n;
        const double h = ax.spacing();
        w *= (idx == 0 || idx + 1 == ax.n) ? 0.5 * h : h;
      }
      tail_weights[t] = w;
    }
    (void)multi;
  }

  out.field = ScalarField(sub);
  out.mask.assign(sub_points, 0);
  for (std::size_t r = 0; r < sub_points; ++r) {
    const std::size_t base = r * tail_points;
    double acc = 0.0;
    std::uint8_t flag = beta.marginal_mask.empty() ? 0 : beta.marginal_mask[r];
    for (std::size_t t = 0; t < tail_points; ++t) {
      const std::size_t i = base + t;
      const double b = beta.beta.values[i];
      acc += tail_weights[t] * q.values[i] * b * b;
      if (!q_mask.empty() && q_mask[i]) flag = 1;
    }
    out.field.values[r] = acc;
    out.mask[r] = flag;
  }
  return out;
}

AxisDecomposition separate_additive(const ScalarField& rhs, std::size_t ref_node,
                                    double rel_tol) {
  const GridSpec& g = rhs.grid;
  if (ref_node >= g.total_points())
    throw std::invalid_argument("separate_additive: reference node out of range");
  const std::size_t k = g.total_axes();
  std::vector<std::size_t> ref_multi(k);
  g.unravel(ref_node, ref_multi);
  const double rhs_ref = rhs.values[ref_node];

  AxisDecomposition out;
  std::vector<std::vector<double>> line(k);
  for (std::size_t a = 0; a < k; ++a) {
    const std::size_t n = g.axis(a).n;
    line[a].resize(n);
    const std::size_t base = ref_node - ref_multi[a] * g.stride(a);
    for (std::size_t i = 0; i < n; ++i)
      line[a][i] = rhs.values[base + i * g.stride(a)] - rhs_ref;
  }

  std::vector<std::size_t> multi(k);
  const double scale = std::max(1.0, rhs.max_abs());
  for (std::size_t i = 0; i < rhs.size(); ++i) {
    g.unravel(i, multi);
    double rec = rhs_ref;
    for (std::size_t a = 0; a < k; ++a) rec += line[a][multi[a]];
    out.defect = std::max(out.defect, std::abs(rhs.values[i] - rec));
  }
  if (out.defect > rel_tol * scale)
    throw std::invalid_argument(
        "separate_additive: field is not additively separable (defect " +
        std::to_string(out.defect) + ")");

  const double share = rhs_ref / static_cast<double>(k);
  for (std::size_t a = 0; a < k; ++a) {
    GridSpec axis_grid(1, {g.axis(a)});
    ScalarField f(axis_grid);
    for (std::size_t i = 0; i < line[a].size(); ++i) {
      double v = line[a][i] + share;
      if (v < 0.0) {
        v = 0.0;
        ++out.clamped;
      }
      f.values[i] = v;
    }
    out.axis_rhs.push_back(std::move(f));
  }
  return out;
}

PhaseField separable_solve(const ScalarField& rhs, const FieldSource& source,
                           double rel_tol) {
  const GridSpec& g = rhs.grid;
  AxisDecomposition decomp = separate_additive(rhs, source.node, rel_tol);
  const std::size_t k = g.total_axes();
  std::vector<std::size_t> src_multi(k);
  g.unravel(source.node, src_multi);
  const double share = source.value / static_cast<double>(k);

  // Cumulative trapezoid of sqrt(rhs_axis) outward from the source component.
  std::vector<std::vector<double>> s_axis(k);
  for (std::size_t a = 0; a < k; ++a) {
    const std::size_t n = g.axis(a).n;
    const double h = g.axis(a).spacing();
    const auto& f = decomp.axis_rhs[a].values;
    auto& s = s_axis[a];
    s.assign(n, 0.0);
    const std::size_t c = src_multi[a];
    s[c] = share;
    for (std::size_t i = c + 1; i < n; ++i)
      s[i] = s[i - 1] + 0.5 * h * (std::sqrt(f[i - 1]) + std::sqrt(f[i]));
    for (std::size_t i = c; i-- > 0;)
      s[i] = s[i + 1] + 0.5 * h * (std::sqrt(f[i + 1]) + std::sqrt(f[i]));
  }

  PhaseField out;
  out.s = ScalarField(g);
  std::vector<std::size_t> multi(k);
  for (std::size_t i = 0; i < out.s.size(); ++i) {
    g.unravel(i, multi);
    double acc = 0.0;
    for (std::size_t a = 0; a < k; ++a) acc += s_axis[a][multi[a]];
    out.s.values[i] = acc;
  }
  for (std::size_t p = 0; p < g.particles(); ++p)
    out.equations.push_back(static_cast<int>(p));
  return out;
}

}  // namespace bohmq
