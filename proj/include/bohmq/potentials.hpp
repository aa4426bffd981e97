#ifndef BOHMQ_POTENTIALS_HPP
#define BOHMQ_POTENTIALS_HPP

#include <span>

#include "bohmq/grid.hpp"

namespace bohmq {

struct PhysicalConstants {
  double hbar = 1.0;
  double mass = 1.0;
  double softening = 1.0;      // 1D Coulomb regularization length
  double energy_offset = 0.0;  // separation constant E of the phase equation

  void validate() const;
};

/// Quantum potential of a sampled amplitude:
///   Q = -(hbar^2 / 2m) * sum_axes lap(phi) / phi
/// with the division guarded at |phi| < floor * max|phi| (sign preserved).
/// Guarded nodes are masked.  A masked fraction above 10% usually means the
/// amplitude is nodal on this grid.
MaskedField bohm_potential(const ScalarField& amplitude,
                           std::span<const std::size_t> axes,
                           const PhysicalConstants& constants,
                           double floor = 1e-8);

/// Same operator applied to the conditional function beta(r'|r).
MaskedField conditional_potential(const ScalarField& beta,
                                  const PhysicalConstants& constants,
                                  double floor = 1e-8);

/// Average electrostatic potential per particle from the one-particle
/// density:  V(r) = (1/N) * (1/2) * integral rho(w) k(r,w) dw with a softened
/// kernel in 1D and the bare Coulomb kernel (cell-averaged at the self node)
/// in 2D/3D.
ScalarField hartree_potential(const ScalarField& rho_one, std::size_t n_total,
                              const PhysicalConstants& constants);

/// Tensor-sum broadcast V(r1) + ... + V(rM) onto the M-particle grid.
ScalarField split_potential(const ScalarField& v_single, std::size_t particles);

/// Squared-gradient target of equation k:
///   rhs = 2m (E/M - V(r_k) - Q/M), clamped below at zero.
/// Throws NumericalError when every node clamps (classically forbidden
/// everywhere; raise the energy offset).
ClampedField per_particle_rhs(const ScalarField& v_single, const ScalarField& q,
                              std::size_t k, const PhysicalConstants& constants);

}  // namespace bohmq

#endif
