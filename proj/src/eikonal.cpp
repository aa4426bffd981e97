#include "bohmq/eikonal.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <stdexcept>
#include <string>

#include "bohmq/calculus.hpp"
#include "bohmq/errors.hpp"

namespace bohmq {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Upwind neighbor minima per axis, then the causal Godunov solve:
// sum over the active axes of ((x - a_i)/h_i)^2 = f^2, adding axes in
// ascending a_i order while x stays above the next candidate.
double local_update(const std::vector<double>& s, const GridSpec& g,
                    std::span<const std::size_t> multi, std::size_t flat,
                    double f) {
  const std::size_t k = g.total_axes();
  double a[6];
  double h[6];
  std::size_t cnt = 0;
  for (std::size_t ax = 0; ax < k; ++ax) {
    const std::size_t n = g.axis(ax).n;
    const std::size_t st = g.stride(ax);
    double best = kInf;
    if (multi[ax] > 0) best = s[flat - st];
    if (multi[ax] + 1 < n) best = std::min(best, s[flat + st]);
    if (best < kInf) {
      a[cnt] = best;
      h[cnt] = g.axis(ax).spacing();
      ++cnt;
    }
  }
  if (cnt == 0) return kInf;
  // insertion sort by candidate value
  for (std::size_t i = 1; i < cnt; ++i) {
    const double av = a[i], hv = h[i];
    std::size_t j = i;
    while (j > 0 && a[j - 1] > av) {
      a[j] = a[j - 1];
      h[j] = h[j - 1];
      --j;
    }
    a[j] = av;
    h[j] = hv;
  }
  double x = a[0] + h[0] * f;
  if (cnt == 1) return x;
  double sum_inv_h2 = 1.0 / (h[0] * h[0]);
  double sum_a = a[0] / (h[0] * h[0]);
  double sum_a2 = a[0] * a[0] / (h[0] * h[0]);
  for (std::size_t m = 1; m < cnt; ++m) {
    if (x <= a[m]) break;
    sum_inv_h2 += 1.0 / (h[m] * h[m]);
    sum_a += a[m] / (h[m] * h[m]);
    sum_a2 += a[m] * a[m] / (h[m] * h[m]);
    const double disc =
        std::max(0.0, sum_a * sum_a - sum_inv_h2 * (sum_a2 - f * f));
    x = (sum_a + std::sqrt(disc)) / sum_inv_h2;
  }
  return x;
}

}  // namespace

void EikonalProblem::validate() const {
  if (!(speed_sq.grid == grid))
    throw std::invalid_argument("eikonal: speed field grid mismatch");
  for (double v : speed_sq.values)
    if (!(v >= 0.0) || !std::isfinite(v))
      throw std::invalid_argument("eikonal: speed squared must be finite and >= 0");
  if (sources.empty())
    throw std::invalid_argument("eikonal: at least one source required");
  for (const auto& src : sources) {
    if (src.node >= grid.total_points())
      throw std::invalid_argument("eikonal: source node out of range");
    if (!std::isfinite(src.value))
      throw std::invalid_argument("eikonal: source value must be finite");
  }
  if (!(tolerance > 0.0))
    throw std::invalid_argument("eikonal: tolerance must be positive");
}

EikonalResult solve_eikonal(const EikonalProblem& problem) {
  problem.validate();
  const GridSpec& g = problem.grid;
  const std::size_t k = g.total_axes();
  const std::size_t points = g.total_points();

  EikonalResult result;
  result.s = ScalarField(g);
  auto& s = result.s.values;
  std::fill(s.begin(), s.end(), kInf);
  std::vector<std::uint8_t> pinned(points, 0);
  for (const auto& src : problem.sources) {
    s[src.node] = pinned[src.node] ? std::min(s[src.node], src.value) : src.value;
    pinned[src.node] = 1;
  }

  result.zero_speed.assign(points, 0);
  for (std::size_t i = 0; i < points; ++i) {
    if (problem.speed_sq.values[i] == 0.0) {
      result.zero_speed[i] = 1;
      ++result.zero_speed_count;
    }
  }

  const std::size_t orderings = std::size_t{1} << k;
  std::vector<std::size_t> multi(k);
  double round_change = kInf;
  std::size_t sweeps_in_round = 0;
  while (true) {
    const std::size_t dir = sweeps_in_round % orderings;
    if (dir == 0) round_change = 0.0;
    for (std::size_t c = 0; c < points; ++c) {
      std::size_t flat = 0;
      std::size_t rem = c;
      for (std::size_t ax = 0; ax < k; ++ax) {
        const std::size_t n = g.axis(ax).n;
        std::size_t idx = (rem / g.stride(ax)) % n;
        rem -= idx * g.stride(ax);
        if (dir & (std::size_t{1} << ax)) idx = n - 1 - idx;
        multi[ax] = idx;
        flat += idx * g.stride(ax);
      }
      if (pinned[flat]) continue;
      const double f = std::sqrt(problem.speed_sq.values[flat]);
      const double x = local_update(s, g, multi, flat, f);
      if (x < s[flat]) {
        if (s[flat] < kInf) round_change = std::max(round_change, s[flat] - x);
        else round_change = kInf;  // first assignment, keep sweeping
        s[flat] = x;
      }
    }
    ++result.sweeps;
    ++sweeps_in_round;
    if (sweeps_in_round == orderings) {
      sweeps_in_round = 0;
      result.residual = round_change;
      if (round_change < problem.tolerance) break;
    }
    if (result.sweeps >= problem.max_sweeps) {
      throw ConvergenceError("eikonal: sweep budget exhausted (residual " +
                                 std::to_string(round_change) + ")",
                             round_change);
    }
  }
  return result;
}

double godunov_residual(const ScalarField& s, const ScalarField& speed_sq,
                        std::span<const FieldSource> sources) {
  const GridSpec& g = s.grid;
  std::vector<std::uint8_t> pinned(g.total_points(), 0);
  for (const auto& src : sources) pinned[src.node] = 1;
  std::vector<std::size_t> multi(g.total_axes());
  double worst = 0.0;
  for (std::size_t i = 0; i < g.total_points(); ++i) {
    if (pinned[i]) continue;
    g.unravel(i, multi);
    const double x =
        local_update(s.values, g, multi, i, std::sqrt(speed_sq.values[i]));
    worst = std::max(worst, std::abs(x - s.values[i]));
  }
  return worst;
}

ScalarField upwind_grad_sq(const ScalarField& s, std::span<const std::size_t> axes) {
  const GridSpec& g = s.grid;
  for (std::size_t a : axes)
    if (a >= g.total_axes())
      throw std::invalid_argument("upwind_grad_sq: axis out of range");
  ScalarField out(g);
  std::vector<std::size_t> multi(g.total_axes());
  for (std::size_t i = 0; i < s.size(); ++i) {
    g.unravel(i, multi);
    double acc = 0.0;
    for (std::size_t a : axes) {
      const std::size_t n = g.axis(a).n;
      const std::size_t st = g.stride(a);
      double nb = kInf;
      if (multi[a] > 0) nb = s.values[i - st];
      if (multi[a] + 1 < n) nb = std::min(nb, s.values[i + st]);
      const double rise = std::max(s.values[i] - nb, 0.0);
      const double slope = rise / g.axis(a).spacing();
      acc += slope * slope;
    }
    out.values[i] = acc;
  }
  return out;
}

SliceSolveResult solve_equation_k(const ScalarField& rhs, std::size_t k,
                                  std::span<const FieldSource> particle_sources,
                                  const EikonalSettings& settings) {
  const GridSpec& g = rhs.grid;
  if (k >= g.particles())
    throw std::invalid_argument("solve_equation_k: particle index out of range");
  const std::size_t d = g.dims_per_particle();
  const GridSpec sub = g.particle_subgrid();
  const std::size_t sub_points = sub.total_points();

  // Offsets of the k-th particle's block nodes relative to a slice base.
  std::vector<std::size_t> inner_offsets(sub_points);
  {
    std::vector<std::size_t> sm(d);
    for (std::size_t j = 0; j < sub_points; ++j) {
      sub.unravel(j, sm);
      std::size_t off = 0;
      for (std::size_t a = 0; a < d; ++a) off += sm[a] * g.stride(k * d + a);
      inner_offsets[j] = off;
    }
  }

  std::vector<std::size_t> outer_axes;
  for (std::size_t a = 0; a < g.total_axes(); ++a)
    if (a / d != k) outer_axes.push_back(a);
  std::size_t outer_count = 1;
  for (std::size_t a : outer_axes) outer_count *= g.axis(a).n;

  SliceSolveResult out;
  out.s = ScalarField(g);
  out.zero_speed.assign(g.total_points(), 0);
  out.stats.resize(outer_count);
  std::vector<std::string> failures(outer_count);

  auto solve_range = [&](std::size_t lo, std::size_t hi) {
    std::vector<double> slice(sub_points);
    for (std::size_t o = lo; o < hi; ++o) {
      std::size_t base = 0;
      std::size_t rem = o;
      for (std::size_t idx = outer_axes.size(); idx-- > 0;) {
        const std::size_t a = outer_axes[idx];
        const std::size_t n = g.axis(a).n;
        base += (rem % n) * g.stride(a);
        rem /= n;
      }
      for (std::size_t j = 0; j < sub_points; ++j)
        slice[j] = rhs.values[base + inner_offsets[j]];
      EikonalProblem prob;
      prob.grid = sub;
      prob.speed_sq = ScalarField(sub, std::move(slice));
      prob.sources.assign(particle_sources.begin(), particle_sources.end());
      prob.tolerance = settings.tolerance;
      prob.max_sweeps = settings.max_sweeps;
      try {
        EikonalResult res = solve_eikonal(prob);
        for (std::size_t j = 0; j < sub_points; ++j) {
          out.s.values[base + inner_offsets[j]] = res.s.values[j];
          out.zero_speed[base + inner_offsets[j]] = res.zero_speed[j];
        }
        out.stats[o] = SliceStat{o, res.sweeps, res.residual};
      } catch (const ConvergenceError& e) {
        failures[o] = e.what();
      }
      slice = std::move(prob.speed_sq.values);
    }
  };

  const std::size_t workers =
      std::max<std::size_t>(1, std::min(settings.threads, outer_count));
  if (workers == 1) {
    solve_range(0, outer_count);
  } else {
    std::vector<std::future<void>> tasks;
    const std::size_t chunk = (outer_count + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
      const std::size_t lo = w * chunk;
      const std::size_t hi = std::min(outer_count, lo + chunk);
      if (lo >= hi) break;
      tasks.push_back(std::async(std::launch::async, solve_range, lo, hi));
    }
    for (auto& t : tasks) t.get();
  }

  for (std::size_t o = 0; o < outer_count; ++o) {
    if (!failures[o].empty())
      throw ConvergenceError("slice " + std::to_string(o) + ": " + failures[o], 0.0);
  }
  for (auto z : out.zero_speed) out.zero_speed_count += (z != 0);
  return out;
}

VectorField velocity_field(const PhaseField& phase,
                           const PhysicalConstants& constants) {
  constants.validate();
  const auto axes = all_axes(phase.s.grid);
  VectorField v = gradient(phase.s, axes);
  const double inv_m = 1.0 / constants.mass;
  for (auto& comp : v.components)
    for (double& x : comp.values) x *= inv_m;
  return v;
}

double interpolate(const ScalarField& field, std::span<const double> point) {
  const GridSpec& g = field.grid;
  const std::size_t k = g.total_axes();
  if (point.size() != k)
    throw std::invalid_argument("interpolate: coordinate count mismatch");
  std::size_t cell[6];
  double frac[6];
  for (std::size_t a = 0; a < k; ++a) {
    const AxisSpec& ax = g.axis(a);
    if (point[a] < ax.lo || point[a] > ax.hi)
      throw std::invalid_argument("interpolate: point outside grid");
    const double t = (point[a] - ax.lo) / ax.spacing();
    std::size_t c = static_cast<std::size_t>(t);
    if (c >= ax.n - 1) c = ax.n - 2;
    cell[a] = c;
    frac[a] = t - static_cast<double>(c);
  }
  double acc = 0.0;
  const std::size_t corners = std::size_t{1} << k;
  for (std::size_t mask = 0; mask < corners; ++mask) {
    double w = 1.0;
    std::size_t flat = 0;
    for (std::size_t a = 0; a < k; ++a) {
      const bool hi = mask & (std::size_t{1} << a);
      w *= hi ? frac[a] : 1.0 - frac[a];
      flat += (cell[a] + (hi ? 1 : 0)) * g.stride(a);
    }
    acc += w * field.values[flat];
  }
  return acc;
}

Trajectory integrate_trajectory(const VectorField& v, std::span<const double> start,
                                double dt, std::size_t steps) {
  const GridSpec& g = v.grid;
  const std::size_t k = g.total_axes();
  if (v.components.size() != k)
    throw std::invalid_argument("trajectory: velocity must cover all axes");
  if (!g.contains(start))
    throw std::invalid_argument("trajectory: start point outside grid");

  Trajectory out;
  std::vector<double> p(start.begin(), start.end());
  out.times.push_back(0.0);
  out.points.push_back(p);

  std::vector<double> mid(k), next(k);
  for (std::size_t step = 1; step <= steps; ++step) {
    for (std::size_t a = 0; a < k; ++a)
      mid[a] = p[a] + 0.5 * dt * interpolate(v.components[a], p);
    if (!g.contains(mid)) {
      out.truncated = true;
      break;
    }
    for (std::size_t a = 0; a < k; ++a)
      next[a] = p[a] + dt * interpolate(v.components[a], mid);
    if (!g.contains(next)) {
      out.truncated = true;
      break;
    }
    p = next;
    out.times.push_back(dt * static_cast<double>(step));
    out.points.push_back(p);
  }
  return out;
}

}  // namespace bohmq
