#ifndef BOHMQ_GRID_HPP
#define BOHMQ_GRID_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace bohmq {

/// One uniformly sampled axis: n nodes from lo to hi inclusive.
struct AxisSpec {
  double lo = 0.0;
  double hi = 1.0;
  std::size_t n = 3;

  double spacing() const { return (hi - lo) / static_cast<double>(n - 1); }
  double coord(std::size_t i) const { return lo + static_cast<double>(i) * spacing(); }
  bool operator==(const AxisSpec&) const = default;
};

/// Uniform tensor-product grid over the configuration space of M identical
/// particles, each living in a d-dimensional box.  Axis ordering is
/// (particle 1 axes..., particle 2 axes..., ...) and every particle block
/// repeats the same per-particle axis specs.  Values attached to the grid are
/// stored row-major (axis 0 slowest, last axis fastest).
class GridSpec {
 public:
  GridSpec() = default;

  /// Build from an explicit particle count and the d axis specs shared by
  /// every particle.  Throws std::invalid_argument on violated invariants:
  /// n >= 3 per axis, hi > lo, and M*d <= 6.
  GridSpec(std::size_t particles, std::vector<AxisSpec> per_particle_axes);

  std::size_t particles() const { return m_; }
  std::size_t dims_per_particle() const { return per_particle_.size(); }
  std::size_t total_axes() const { return m_ * per_particle_.size(); }
  std::size_t total_points() const { return total_points_; }

  /// Axis spec for a global axis index in [0, total_axes()).
  const AxisSpec& axis(std::size_t global_axis) const {
    return per_particle_[global_axis % per_particle_.size()];
  }
  const std::vector<AxisSpec>& per_particle_axes() const { return per_particle_; }

  /// Row-major stride of a global axis.
  std::size_t stride(std::size_t global_axis) const { return strides_[global_axis]; }
  const std::vector<std::size_t>& strides() const { return strides_; }

  /// Decompose a flat node index into per-axis indices (out.size() == total_axes()).
  void unravel(std::size_t flat, std::span<std::size_t> out) const;
  std::size_t ravel(std::span<const std::size_t> multi) const;

  /// Physical coordinates of a node (out.size() == total_axes()).
  void node_coords(std::size_t flat, std::span<double> out) const;

  /// Flat index of the node nearest to the given coordinates; throws if the
  /// point lies outside the box.
  std::size_t nearest_node(std::span<const double> coords) const;

  bool contains(std::span<const double> coords) const;

  /// Sub-grid of a single particle (M = 1, same per-particle axes).
  GridSpec particle_subgrid() const { return GridSpec(1, per_particle_); }

  bool operator==(const GridSpec& o) const {
    return m_ == o.m_ && per_particle_ == o.per_particle_;
  }

 private:
  std::size_t m_ = 1;
  std::vector<AxisSpec> per_particle_;
  std::vector<std::size_t> strides_;
  std::size_t total_points_ = 0;
};

/// Real values sampled on every node of a grid, row-major.
struct ScalarField {
  GridSpec grid;
  std::vector<double> values;

  ScalarField() = default;
  explicit ScalarField(GridSpec g)
      : grid(std::move(g)), values(grid.total_points(), 0.0) {}
  ScalarField(GridSpec g, std::vector<double> v);

  double& operator[](std::size_t i) { return values[i]; }
  double operator[](std::size_t i) const { return values[i]; }
  std::size_t size() const { return values.size(); }

  double max_abs() const;
  bool all_finite() const;
};

/// One scalar component per differentiated axis; `axes` records which global
/// axes the components refer to (all of them for a full gradient).
struct VectorField {
  GridSpec grid;
  std::vector<std::size_t> axes;
  std::vector<ScalarField> components;
};

/// Field plus a per-node reliability mask (mask[i] != 0 means node i was
/// produced by a guarded division or a zero-speed plateau and should be
/// treated as diagnostic-only).
struct MaskedField {
  ScalarField field;
  std::vector<std::uint8_t> mask;

  std::size_t masked_count() const;
  double masked_fraction() const {
    return field.size() == 0 ? 0.0
                             : static_cast<double>(masked_count()) /
                                   static_cast<double>(field.size());
  }
};

/// Field produced by an operation that clamps negative values to zero.
struct ClampedField {
  ScalarField field;
  std::size_t clamped = 0;

  double clamped_fraction() const {
    return field.size() == 0 ? 0.0
                             : static_cast<double>(clamped) /
                                   static_cast<double>(field.size());
  }
};

}  // namespace bohmq

#endif
