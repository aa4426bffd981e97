#include "bohmq/wavefunction.hpp"

#include <cmath>
#include <stdexcept>

#include "bohmq/calculus.hpp"

namespace bohmq {

namespace {

// Determinant by Gaussian elimination with partial pivoting; M <= 6.
double det_small(double a[6][6], std::size_t m) {
  double det = 1.0;
  for (std::size_t col = 0; col < m; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < m; ++r)
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    if (a[piv][col] == 0.0) return 0.0;
    if (piv != col) {
      for (std::size_t c = col; c < m; ++c) std::swap(a[piv][c], a[col][c]);
      det = -det;
    }
    det *= a[col][col];
    for (std::size_t r = col + 1; r < m; ++r) {
      const double f = a[r][col] / a[col][col];
      for (std::size_t c = col; c < m; ++c) a[r][c] -= f * a[col][c];
    }
  }
  return det;
}

double factorial(std::size_t n) {
  double f = 1.0;
  for (std::size_t k = 2; k <= n; ++k) f *= static_cast<double>(k);
  return f;
}

}  // namespace

DensityModel::DensityModel(std::vector<Orbital> orbitals, std::size_t n_total,
                           ModelMode mode)
    : orbitals_(std::move(orbitals)), n_total_(n_total), mode_(mode) {
  if (orbitals_.empty())
    throw std::invalid_argument("model: at least one orbital required");
  if (orbitals_.size() > 6)
    throw std::invalid_argument("model: at most 6 explicit particles supported");
  if (n_total_ < orbitals_.size())
    throw std::invalid_argument("model: N must be at least M");
  const std::size_t d = orbitals_.front().dims();
  for (const auto& o : orbitals_)
    if (o.dims() != d)
      throw std::invalid_argument("model: orbitals disagree on dimension");
  if (mode_ == ModelMode::slater) {
    for (std::size_t i = 0; i < orbitals_.size(); ++i)
      for (std::size_t j = i + 1; j < orbitals_.size(); ++j)
        if (orbitals_[i].same_shape(orbitals_[j]))
          throw std::invalid_argument(
              "model: slater mode needs distinct orbitals (determinant "
              "vanishes identically)");
  }
  det_scale_ = 1.0 / std::sqrt(factorial(orbitals_.size()));
}

double DensityModel::amplitude(std::span<const double> coords) const {
  const std::size_t m = particles();
  const std::size_t d = dims();
  if (coords.size() != m * d)
    throw std::invalid_argument("amplitude: coordinate count mismatch");
  if (mode_ == ModelMode::product) {
    double prod = 1.0;
    for (std::size_t j = 0; j < m; ++j)
      prod *= orbitals_[j].value(coords.subspan(j * d, d));
    return prod;
  }
  // Columns (one per particle) are brought into a canonical order first, so
  // exchanging particles only flips the tracked parity and antisymmetry holds
  // exactly, not merely to rounding.
  double col[6][6];
  std::size_t order[6];
  for (std::size_t k = 0; k < m; ++k) {
    order[k] = k;
    for (std::size_t j = 0; j < m; ++j)
      col[k][j] = orbitals_[j].value(coords.subspan(k * d, d));
  }
  double parity = 1.0;
  for (std::size_t i = 0; i + 1 < m; ++i) {
    std::size_t best = i;
    for (std::size_t k = i + 1; k < m; ++k) {
      const double* a = col[order[k]];
      const double* b = col[order[best]];
      for (std::size_t j = 0; j < m; ++j) {
        if (a[j] < b[j]) {
          best = k;
          break;
        }
        if (a[j] > b[j]) break;
      }
    }
    if (best != i) {
      std::swap(order[i], order[best]);
      parity = -parity;
    }
  }
  double a[6][6];
  for (std::size_t j = 0; j < m; ++j)
    for (std::size_t k = 0; k < m; ++k) a[j][k] = col[order[k]][j];
  return det_scale_ * parity * det_small(a, m);
}

bool DensityModel::matches(const GridSpec& grid) const {
  return grid.particles() == particles() && grid.dims_per_particle() == dims();
}

ScalarField m_particle_density(const DensityModel& model, const GridSpec& grid) {
  if (!model.matches(grid))
    throw std::invalid_argument("density: grid does not match the model");
  const double n = static_cast<double>(model.n_total());
  return eval_on_grid(
      [&](std::span<const double> coords) {
        const double a = model.amplitude(coords);
        return n * a * a;
      },
      grid);
}

ScalarField one_particle_density(const DensityModel& model, const GridSpec& grid) {
  ScalarField rho = m_particle_density(model, grid);
  if (grid.particles() == 1) return rho;
  std::vector<std::size_t> rest;
  for (std::size_t p = 1; p < grid.particles(); ++p)
    for (std::size_t a : particle_axes(grid, p)) rest.push_back(a);
  return marginalize(rho, rest);
}

MarginalFunction marginal_function(const DensityModel& model, const GridSpec& grid) {
  ScalarField rho1 = one_particle_density(model, grid);
  const double inv_n = 1.0 / static_cast<double>(model.n_total());
  MarginalFunction out;
  out.phi = ScalarField(rho1.grid);
  for (std::size_t i = 0; i < rho1.size(); ++i) {
    double v = rho1.values[i] * inv_n;
    if (v < 0.0) {
      v = 0.0;
      ++out.clamped;
    }
    out.phi.values[i] = std::sqrt(v);
  }
  return out;
}

ConditionalFunction conditional_function(const DensityModel& model,
                                         const GridSpec& grid, double floor) {
  if (!(floor > 0.0))
    throw std::invalid_argument("conditional_function: floor must be positive");
  ConditionalFunction out;
  out.floor = floor;
  if (grid.particles() == 1) {
    out.beta = ScalarField(grid);
    std::fill(out.beta.values.begin(), out.beta.values.end(), 1.0);
    out.marginal_mask.assign(grid.total_points(), 0);
    return out;
  }
  MarginalFunction marg = marginal_function(model, grid);
  const ScalarField& phi = marg.phi;
  out.marginal_mask.assign(phi.size(), 0);
  for (std::size_t i = 0; i < phi.size(); ++i) {
    if (phi.values[i] < floor) {
      out.marginal_mask[i] = 1;
      ++out.flagged;
    }
  }
  ScalarField amp = eval_on_grid(
      [&](std::span<const double> coords) { return model.amplitude(coords); },
      grid);
  // Row-major with particle-1 axes slowest: the particle-1 node index is the
  // flat index divided by the point count of the remaining axes.
  std::size_t tail_points = 1;
  for (std::size_t a = grid.dims_per_particle(); a < grid.total_axes(); ++a)
    tail_points *= grid.axis(a).n;
  out.beta = ScalarField(grid);
  for (std::size_t i = 0; i < amp.size(); ++i) {
    const double denom = std::max(phi.values[i / tail_points], floor);
    out.beta.values[i] = amp.values[i] / denom;
  }
  return out;
}

double default_conditional_floor(const ScalarField& phi) {
  return 1e-8 * phi.max_abs();
}

}  // namespace bohmq
