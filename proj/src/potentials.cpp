#include "bohmq/potentials.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "bohmq/calculus.hpp"
#include "bohmq/errors.hpp"

namespace bohmq {

void PhysicalConstants::validate() const {
  if (!(hbar > 0.0)) throw std::invalid_argument("constants: hbar must be > 0");
  if (!(mass > 0.0)) throw std::invalid_argument("constants: mass must be > 0");
  if (!(softening > 0.0))
    throw std::invalid_argument("constants: softening must be > 0");
  if (!std::isfinite(energy_offset))
    throw std::invalid_argument("constants: energy offset must be finite");
}

MaskedField bohm_potential(const ScalarField& amplitude,
                           std::span<const std::size_t> axes,
                           const PhysicalConstants& constants, double floor) {
  constants.validate();
  if (!amplitude.all_finite())
    throw std::invalid_argument("bohm_potential: amplitude must be finite");
  const double prefactor =
      -constants.hbar * constants.hbar / (2.0 * constants.mass);
  ScalarField lap = laplacian(amplitude, axes);
  MaskedField out;
  out.field = ScalarField(amplitude.grid);
  out.mask.assign(amplitude.size(), 0);
  const double cutoff = floor * amplitude.max_abs();
  if (cutoff == 0.0) {
    // Identically zero amplitude: nothing to divide by, flag everything.
    out.mask.assign(amplitude.size(), 1);
    return out;
  }
  for (std::size_t i = 0; i < amplitude.size(); ++i) {
    const double phi = amplitude.values[i];
    double denom = phi;
    if (std::abs(phi) < cutoff) {
      denom = std::copysign(cutoff, phi == 0.0 ? 1.0 : phi);
      out.mask[i] = 1;
    }
    out.field.values[i] = prefactor * lap.values[i] / denom;
  }
  return out;
}

MaskedField conditional_potential(const ScalarField& beta,
                                  const PhysicalConstants& constants,
                                  double floor) {
  const auto axes = all_axes(beta.grid);
  return bohm_potential(beta, axes, constants, floor);
}

namespace {

double trapezoid_weight(const AxisSpec& ax, std::size_t idx) {
  const double h = ax.spacing();
  return (idx == 0 || idx + 1 == ax.n) ? 0.5 * h : h;
}

// Average of 1/|u| over the grid cell centered at the origin, by midpoint
// subsampling (even counts never hit the singularity).
double self_cell_kernel(const GridSpec& grid) {
  const std::size_t d = grid.dims_per_particle();
  const std::size_t sub = d == 3 ? 16 : 32;
  std::vector<double> h(d);
  for (std::size_t a = 0; a < d; ++a) h[a] = grid.axis(a).spacing();
  std::vector<std::size_t> idx(d, 0);
  std::size_t count = 1;
  for (std::size_t a = 0; a < d; ++a) count *= sub;
  double acc = 0.0;
  for (std::size_t it = 0; it < count; ++it) {
    double r2 = 0.0;
    for (std::size_t a = 0; a < d; ++a) {
      const double u = (static_cast<double>(idx[a]) + 0.5) / sub - 0.5;
      const double x = u * h[a];
      r2 += x * x;
    }
    acc += 1.0 / std::sqrt(r2);
    for (std::size_t a = d; a-- > 0;) {
      if (++idx[a] < sub) break;
      idx[a] = 0;
    }
  }
  return acc / static_cast<double>(count);
}

}  // namespace

ScalarField hartree_potential(const ScalarField& rho_one, std::size_t n_total,
                              const PhysicalConstants& constants) {
  constants.validate();
  const GridSpec& g = rho_one.grid;
  if (g.particles() != 1)
    throw std::invalid_argument("hartree: density must live on a one-particle grid");
  for (double v : rho_one.values)
    if (v < 0.0)
      throw std::invalid_argument("hartree: density must be nonnegative");
  const std::size_t d = g.dims_per_particle();
  const std::size_t points = g.total_points();
  const double scale = 0.5 / static_cast<double>(n_total);

  std::vector<double> weights(points);
  std::vector<double> coords(points * d);
  {
    std::vector<std::size_t> multi(d);
    std::vector<double> c(d);
    for (std::size_t i = 0; i < points; ++i) {
      g.unravel(i, multi);
      double w = 1.0;
      for (std::size_t a = 0; a < d; ++a) w *= trapezoid_weight(g.axis(a), multi[a]);
      weights[i] = w;
      g.node_coords(i, c);
      for (std::size_t a = 0; a < d; ++a) coords[i * d + a] = c[a];
    }
  }

  ScalarField out(g);
  if (d == 1) {
    const double a2 = constants.softening * constants.softening;
    for (std::size_t i = 0; i < points; ++i) {
      const double x = coords[i];
      double acc = 0.0;
      for (std::size_t j = 0; j < points; ++j) {
        const double u = x - coords[j];
        acc += weights[j] * rho_one.values[j] / std::sqrt(u * u + a2);
      }
      out.values[i] = scale * acc;
    }
    return out;
  }

  const double self_kernel = self_cell_kernel(g);
  for (std::size_t i = 0; i < points; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < points; ++j) {
      if (j == i) {
        acc += weights[j] * rho_one.values[j] * self_kernel;
        continue;
      }
      double r2 = 0.0;
      for (std::size_t a = 0; a < d; ++a) {
        const double u = coords[i * d + a] - coords[j * d + a];
        r2 += u * u;
      }
      acc += weights[j] * rho_one.values[j] / std::sqrt(r2);
    }
    out.values[i] = scale * acc;
  }
  return out;
}

ScalarField split_potential(const ScalarField& v_single, std::size_t particles) {
  const GridSpec& sub = v_single.grid;
  if (sub.particles() != 1)
    throw std::invalid_argument("split: input must live on a one-particle grid");
  GridSpec full(particles, sub.per_particle_axes());
  ScalarField out(full);
  const std::size_t d = sub.dims_per_particle();
  std::vector<std::size_t> multi(full.total_axes());
  std::vector<std::size_t> block(d);
  for (std::size_t i = 0; i < out.size(); ++i) {
    full.unravel(i, multi);
    double acc = 0.0;
    for (std::size_t p = 0; p < particles; ++p) {
      for (std::size_t a = 0; a < d; ++a) block[a] = multi[p * d + a];
      acc += v_single.values[sub.ravel(block)];
    }
    out.values[i] = acc;
  }
  return out;
}

ClampedField per_particle_rhs(const ScalarField& v_single, const ScalarField& q,
                              std::size_t k, const PhysicalConstants& constants) {
  constants.validate();
  const GridSpec& g = q.grid;
  const std::size_t m = g.particles();
  if (k >= m) throw std::invalid_argument("per_particle_rhs: equation index out of range");
  if (!(v_single.grid == g.particle_subgrid()))
    throw std::invalid_argument("per_particle_rhs: potential grid mismatch");
  const double two_m = 2.0 * constants.mass;
  const double e_share = constants.energy_offset / static_cast<double>(m);
  const double inv_m = 1.0 / static_cast<double>(m);
  const std::size_t d = g.dims_per_particle();

  ClampedField out;
  out.field = ScalarField(g);
  std::vector<std::size_t> multi(g.total_axes());
  std::vector<std::size_t> block(d);
  for (std::size_t i = 0; i < q.size(); ++i) {
    g.unravel(i, multi);
    for (std::size_t a = 0; a < d; ++a) block[a] = multi[k * d + a];
    const double v = v_single.values[v_single.grid.ravel(block)];
    double rhs = two_m * (e_share - v - q.values[i] * inv_m);
    if (rhs < 0.0) {
      rhs = 0.0;
      ++out.clamped;
    }
    out.field.values[i] = rhs;
  }
  if (out.clamped == q.size())
    throw NumericalError(
        "per_particle_rhs: classically forbidden everywhere; raise energy_offset");
  return out;
}

}  // namespace bohmq
