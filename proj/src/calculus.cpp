#include "bohmq/calculus.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "bohmq/errors.hpp"

namespace bohmq {

namespace {

void check_axes(const GridSpec& grid, std::span<const std::size_t> axes) {
  if (axes.empty()) throw std::invalid_argument("axis subset must be nonempty");
  for (std::size_t a : axes) {
    if (a >= grid.total_axes())
      throw std::invalid_argument("axis index " + std::to_string(a) +
                                  " out of range");
  }
  for (std::size_t i = 0; i < axes.size(); ++i)
    for (std::size_t j = i + 1; j < axes.size(); ++j)
      if (axes[i] == axes[j])
        throw std::invalid_argument("duplicate axis index in subset");
}

// Applies a 1D stencil op along one axis of a flat row-major array.
template <typename LineOp>
void for_each_line(const GridSpec& grid, std::size_t axis, LineOp&& op) {
  const std::size_t s = grid.stride(axis);
  const std::size_t n = grid.axis(axis).n;
  const std::size_t block = n * s;
  const std::size_t nblocks = grid.total_points() / block;
  for (std::size_t b = 0; b < nblocks; ++b) {
    const std::size_t base_block = b * block;
    for (std::size_t after = 0; after < s; ++after) op(base_block + after, s, n);
  }
}

// Second derivative along one axis, accumulated into out.
void accumulate_d2(const ScalarField& f, std::size_t axis, ScalarField& out) {
  const double h = f.grid.axis(axis).spacing();
  const double inv_h2 = 1.0 / (h * h);
  const auto& v = f.values;
  for_each_line(f.grid, axis, [&](std::size_t base, std::size_t s, std::size_t n) {
    auto at = [&](std::size_t k) { return v[base + k * s]; };
    if (n == 3) {
      // With three points the quadratic fit gives one value everywhere.
      const double d2 = (at(0) - 2.0 * at(1) + at(2)) * inv_h2;
      out.values[base] += d2;
      out.values[base + s] += d2;
      out.values[base + 2 * s] += d2;
      return;
    }
    out.values[base] +=
        (2.0 * at(0) - 5.0 * at(1) + 4.0 * at(2) - at(3)) * inv_h2;
    for (std::size_t k = 1; k + 1 < n; ++k)
      out.values[base + k * s] += (at(k - 1) - 2.0 * at(k) + at(k + 1)) * inv_h2;
    out.values[base + (n - 1) * s] +=
        (2.0 * at(n - 1) - 5.0 * at(n - 2) + 4.0 * at(n - 3) - at(n - 4)) * inv_h2;
  });
}

// First derivative along one axis.
ScalarField d1(const ScalarField& f, std::size_t axis) {
  ScalarField out(f.grid);
  const double h = f.grid.axis(axis).spacing();
  const double inv_2h = 0.5 / h;
  const auto& v = f.values;
  for_each_line(f.grid, axis, [&](std::size_t base, std::size_t s, std::size_t n) {
    auto at = [&](std::size_t k) { return v[base + k * s]; };
    out.values[base] = (-3.0 * at(0) + 4.0 * at(1) - at(2)) * inv_2h;
    for (std::size_t k = 1; k + 1 < n; ++k)
      out.values[base + k * s] = (at(k + 1) - at(k - 1)) * inv_2h;
    out.values[base + (n - 1) * s] =
        (3.0 * at(n - 1) - 4.0 * at(n - 2) + at(n - 3)) * inv_2h;
  });
  return out;
}

double trapezoid_weight(const AxisSpec& ax, std::size_t idx) {
  const double h = ax.spacing();
  return (idx == 0 || idx + 1 == ax.n) ? 0.5 * h : h;
}

}  // namespace

ScalarField eval_on_grid(const std::function<double(std::span<const double>)>& f,
                         const GridSpec& grid) {
  ScalarField out(grid);
  std::vector<double> coords(grid.total_axes());
  for (std::size_t i = 0; i < grid.total_points(); ++i) {
    grid.node_coords(i, coords);
    const double v = f(coords);
    if (!std::isfinite(v)) {
      std::ostringstream msg;
      msg << "non-finite value at node " << i << " (";
      for (std::size_t a = 0; a < coords.size(); ++a)
        msg << (a ? ", " : "") << coords[a];
      msg << ")";
      throw EvaluationError(msg.str());
    }
    out.values[i] = v;
  }
  return out;
}

ScalarField laplacian(const ScalarField& field, std::span<const std::size_t> axes) {
  check_axes(field.grid, axes);
  ScalarField out(field.grid);
  for (std::size_t a : axes) accumulate_d2(field, a, out);
  return out;
}

VectorField gradient(const ScalarField& field, std::span<const std::size_t> axes) {
  check_axes(field.grid, axes);
  VectorField out;
  out.grid = field.grid;
  out.axes.assign(axes.begin(), axes.end());
  out.components.reserve(axes.size());
  for (std::size_t a : axes) out.components.push_back(d1(field, a));
  return out;
}

ScalarField marginalize(const ScalarField& field,
                        std::span<const std::size_t> integrate_axes) {
  const GridSpec& g = field.grid;
  check_axes(g, integrate_axes);
  if (integrate_axes.size() >= g.total_axes())
    throw std::invalid_argument(
        "marginalize: cannot integrate every axis; use total_integral");

  std::vector<bool> integrated(g.total_axes(), false);
  for (std::size_t a : integrate_axes) integrated[a] = true;

  std::vector<std::size_t> kept;
  for (std::size_t a = 0; a < g.total_axes(); ++a)
    if (!integrated[a]) kept.push_back(a);

  // Result keeps the particle structure when whole particle blocks were
  // integrated out; otherwise it is a single-particle grid over what remains.
  const std::size_t d = g.dims_per_particle();
  std::vector<std::size_t> removed_per_particle(g.particles(), 0);
  for (std::size_t a : integrate_axes) removed_per_particle[a / d]++;
  bool block_aligned = true;
  std::size_t removed_blocks = 0;
  for (std::size_t c : removed_per_particle) {
    if (c == d)
      ++removed_blocks;
    else if (c != 0)
      block_aligned = false;
  }
  GridSpec out_grid;
  if (block_aligned) {
    out_grid = GridSpec(g.particles() - removed_blocks, g.per_particle_axes());
  } else {
    std::vector<AxisSpec> axes_left;
    for (std::size_t a : kept) axes_left.push_back(g.axis(a));
    out_grid = GridSpec(1, std::move(axes_left));
  }

  ScalarField out(out_grid);

  // Inner iteration space: integrated axes in ascending order.
  std::vector<std::size_t> in_axes(integrate_axes.begin(), integrate_axes.end());
  std::sort(in_axes.begin(), in_axes.end());
  std::size_t inner_count = 1;
  for (std::size_t a : in_axes) inner_count *= g.axis(a).n;

  std::vector<std::size_t> out_multi(kept.size());
  std::vector<std::size_t> in_multi(in_axes.size());
  for (std::size_t o = 0; o < out.size(); ++o) {
    out_grid.unravel(o, out_multi);
    std::size_t base = 0;
    for (std::size_t k = 0; k < kept.size(); ++k)
      base += out_multi[k] * g.stride(kept[k]);

    double acc = 0.0;
    std::fill(in_multi.begin(), in_multi.end(), 0);
    for (std::size_t it = 0; it < inner_count; ++it) {
      std::size_t flat = base;
      double w = 1.0;
      for (std::size_t k = 0; k < in_axes.size(); ++k) {
        flat += in_multi[k] * g.stride(in_axes[k]);
        w *= trapezoid_weight(g.axis(in_axes[k]), in_multi[k]);
      }
      acc += w * field.values[flat];
      for (std::size_t k = in_axes.size(); k-- > 0;) {
        if (++in_multi[k] < g.axis(in_axes[k]).n) break;
        in_multi[k] = 0;
      }
    }
    out.values[o] = acc;
  }
  return out;
}

double total_integral(const ScalarField& field) {
  const GridSpec& g = field.grid;
  std::vector<std::size_t> multi(g.total_axes());
  double acc = 0.0;
  for (std::size_t i = 0; i < field.size(); ++i) {
    g.unravel(i, multi);
    double w = 1.0;
    for (std::size_t a = 0; a < g.total_axes(); ++a)
      w *= trapezoid_weight(g.axis(a), multi[a]);
    acc += w * field.values[i];
  }
  return acc;
}

std::vector<std::size_t> all_axes(const GridSpec& grid) {
  std::vector<std::size_t> v(grid.total_axes());
  std::iota(v.begin(), v.end(), std::size_t{0});
  return v;
}

std::vector<std::size_t> particle_axes(const GridSpec& grid, std::size_t particle) {
  const std::size_t d = grid.dims_per_particle();
  std::vector<std::size_t> v(d);
  std::iota(v.begin(), v.end(), particle * d);
  return v;
}

}  // namespace bohmq
