#include "bohmq/grid.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace bohmq {

GridSpec::GridSpec(std::size_t particles, std::vector<AxisSpec> per_particle_axes)
    : m_(particles), per_particle_(std::move(per_particle_axes)) {
  if (m_ < 1) throw std::invalid_argument("grid: particle count must be >= 1");
  if (per_particle_.empty())
    throw std::invalid_argument("grid: at least one axis per particle required");
  const std::size_t total = m_ * per_particle_.size();
  if (total > 6)
    throw std::invalid_argument("grid: dimension bound exceeded (M*d = " +
                                std::to_string(total) + " > 6)");
  for (const auto& ax : per_particle_) {
    if (ax.n < 3) throw std::invalid_argument("grid: axes need at least 3 points");
    if (!(ax.hi > ax.lo))
      throw std::invalid_argument("grid: axis upper bound must exceed lower bound");
  }
  strides_.assign(total, 1);
  total_points_ = 1;
  for (std::size_t a = total; a-- > 0;) {
    strides_[a] = total_points_;
    total_points_ *= axis(a).n;
  }
}

void GridSpec::unravel(std::size_t flat, std::span<std::size_t> out) const {
  for (std::size_t a = 0; a < total_axes(); ++a) {
    out[a] = (flat / strides_[a]) % axis(a).n;
  }
}

std::size_t GridSpec::ravel(std::span<const std::size_t> multi) const {
  std::size_t flat = 0;
  for (std::size_t a = 0; a < total_axes(); ++a) flat += multi[a] * strides_[a];
  return flat;
}

void GridSpec::node_coords(std::size_t flat, std::span<double> out) const {
  for (std::size_t a = 0; a < total_axes(); ++a) {
    const AxisSpec& ax = axis(a);
    out[a] = ax.coord((flat / strides_[a]) % ax.n);
  }
}

std::size_t GridSpec::nearest_node(std::span<const double> coords) const {
  if (coords.size() != total_axes())
    throw std::invalid_argument("nearest_node: coordinate count does not match axes");
  std::size_t flat = 0;
  for (std::size_t a = 0; a < total_axes(); ++a) {
    const AxisSpec& ax = axis(a);
    if (coords[a] < ax.lo || coords[a] > ax.hi)
      throw std::invalid_argument("nearest_node: point outside grid box on axis " +
                                  std::to_string(a));
    auto idx = static_cast<std::size_t>(
        std::lround((coords[a] - ax.lo) / ax.spacing()));
    if (idx >= ax.n) idx = ax.n - 1;
    flat += idx * strides_[a];
  }
  return flat;
}

bool GridSpec::contains(std::span<const double> coords) const {
  if (coords.size() != total_axes()) return false;
  for (std::size_t a = 0; a < total_axes(); ++a) {
    const AxisSpec& ax = axis(a);
    if (coords[a] < ax.lo || coords[a] > ax.hi) return false;
  }
  return true;
}

ScalarField::ScalarField(GridSpec g, std::vector<double> v)
    : grid(std::move(g)), values(std::move(v)) {
  if (values.size() != grid.total_points())
    throw std::invalid_argument("field: value count does not match grid points");
}

double ScalarField::max_abs() const {
  double m = 0.0;
  for (double v : values) m = std::max(m, std::abs(v));
  return m;
}

bool ScalarField::all_finite() const {
  for (double v : values)
    if (!std::isfinite(v)) return false;
  return true;
}

std::size_t MaskedField::masked_count() const {
  std::size_t c = 0;
  for (auto m : mask) c += (m != 0);
  return c;
}

}  // namespace bohmq
