#ifndef BOHMQ_ORBITAL_HPP
#define BOHMQ_ORBITAL_HPP

#include <span>
#include <string>
#include <vector>

#include "bohmq/grid.hpp"

namespace bohmq {

enum class OrbitalKind { gaussian, exponential, oscillator, box_wave };

OrbitalKind orbital_kind_from_string(const std::string& s);
std::string to_string(OrbitalKind k);

struct OrbitalParams {
  std::vector<double> center;  // size d; ignored by box_wave
  double width = 0.0;          // sigma / decay length; unused by box_wave
  std::vector<int> index;      // per-axis quantum index (oscillator, box_wave)
};

/// Analytic single-particle orbital, normalized on the configured box by
/// quadrature at construction.  Closed-form first and second derivatives are
/// available for oracle-style checks.
class Orbital {
 public:
  /// Throws std::invalid_argument on malformed parameters or when the box
  /// quadrature cannot normalize the orbital.
  static Orbital create(OrbitalKind kind, OrbitalParams params,
                        std::vector<AxisSpec> box);

  double value(std::span<const double> r) const;
  double derivative(std::span<const double> r, std::size_t axis) const;
  double second_derivative(std::span<const double> r, std::size_t axis) const;

  std::size_t dims() const { return box_.size(); }
  OrbitalKind kind() const { return kind_; }
  const OrbitalParams& params() const { return params_; }
  const std::vector<AxisSpec>& box() const { return box_; }
  double norm_scale() const { return scale_; }

  /// True when the two orbitals are the same function (kind and parameters).
  bool same_shape(const Orbital& other) const;

 private:
  Orbital(OrbitalKind kind, OrbitalParams params, std::vector<AxisSpec> box)
      : kind_(kind), params_(std::move(params)), box_(std::move(box)) {}

  double unnormalized(std::span<const double> r) const;
  // Per-axis separable factor and its derivatives (gaussian/oscillator/box_wave).
  void factor(std::size_t axis, double x, double& f, double& df, double& d2f) const;

  OrbitalKind kind_;
  OrbitalParams params_;
  std::vector<AxisSpec> box_;
  double scale_ = 1.0;
};

/// Physicists' Hermite polynomial H_n.
double hermite(int n, double x);

}  // namespace bohmq

#endif
