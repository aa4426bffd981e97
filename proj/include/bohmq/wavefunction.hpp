#ifndef BOHMQ_WAVEFUNCTION_HPP
#define BOHMQ_WAVEFUNCTION_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "bohmq/grid.hpp"
#include "bohmq/orbital.hpp"

namespace bohmq {

enum class ModelMode { slater, product };

/// Real M-particle amplitude built from an orbital set: antisymmetrized
/// determinant (slater) or plain per-particle product (independent particles,
/// mostly for oracles).  M explicit particles out of an N-particle system.
class DensityModel {
 public:
  /// Throws std::invalid_argument if slater mode receives duplicate orbitals
  /// (the determinant would vanish identically) or if counts are inconsistent.
  DensityModel(std::vector<Orbital> orbitals, std::size_t n_total, ModelMode mode);

  /// Amplitude at one configuration-space point (coords.size() == M*d).
  /// Slater mode: det[orbital_j(r_k)] / sqrt(M!); product mode: prod_j o_j(r_j).
  double amplitude(std::span<const double> coords) const;

  std::size_t particles() const { return orbitals_.size(); }
  std::size_t n_total() const { return n_total_; }
  std::size_t dims() const { return orbitals_.front().dims(); }
  ModelMode mode() const { return mode_; }
  const std::vector<Orbital>& orbitals() const { return orbitals_; }

  /// True when the grid shares the model's particle count and dimensions.
  bool matches(const GridSpec& grid) const;

 private:
  std::vector<Orbital> orbitals_;
  std::size_t n_total_;
  ModelMode mode_;
  double det_scale_;  // 1/sqrt(M!)
};

/// rho(r1..rM) = N * |amplitude|^2 sampled on the grid.
ScalarField m_particle_density(const DensityModel& model, const GridSpec& grid);

/// rho(r) = integral of the M-particle density over particles 2..M.
ScalarField one_particle_density(const DensityModel& model, const GridSpec& grid);

struct MarginalFunction {
  ScalarField phi;          // on the particle-1 subgrid
  std::size_t clamped = 0;  // nodes where numerical negativity was clamped to 0
};

/// phi(r) = sqrt(one_particle_density / N).
MarginalFunction marginal_function(const DensityModel& model, const GridSpec& grid);

struct ConditionalFunction {
  ScalarField beta;                        // on the full M-particle grid
  std::vector<std::uint8_t> marginal_mask; // per particle-1 node: phi below floor
  std::size_t flagged = 0;                 // flagged particle-1 nodes
  double floor = 0.0;
};

/// beta(r'|r) = amplitude(r, r') / max(phi(r), floor).  Nodes where the
/// marginal sits below the floor are flagged instead of trusted.
ConditionalFunction conditional_function(const DensityModel& model,
                                         const GridSpec& grid, double floor);

/// Default guard for conditional_function: 1e-8 * max(phi).
double default_conditional_floor(const ScalarField& phi);

}  // namespace bohmq

#endif
