#ifndef BOHMQ_EIKONAL_HPP
#define BOHMQ_EIKONAL_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "bohmq/grid.hpp"
#include "bohmq/potentials.hpp"

namespace bohmq {

/// A node where the phase is pinned to a boundary value.
struct FieldSource {
  std::size_t node = 0;  // flat index on the problem grid
  double value = 0.0;
};

/// One |grad S| = F problem: Godunov upwind discretization solved by
/// Gauss-Seidel sweeps over all 2^d axis orderings.
struct EikonalProblem {
  GridSpec grid;
  ScalarField speed_sq;  // F^2 >= 0 (zero means a flat plateau)
  std::vector<FieldSource> sources;
  double tolerance = 1e-10;
  std::size_t max_sweeps = 4096;  // individual directional passes

  void validate() const;
};

struct EikonalResult {
  ScalarField s;
  std::size_t sweeps = 0;
  double residual = 0.0;  // max update during the last sweep round
  std::vector<std::uint8_t> zero_speed;
  std::size_t zero_speed_count = 0;
};

/// Solves the problem to its viscosity solution; monotone causal updates,
/// min over upwind candidates.  Throws ConvergenceError if the sweep budget
/// is exhausted.
EikonalResult solve_eikonal(const EikonalProblem& problem);

/// Max |local Godunov update - stored value| over non-source nodes: a direct
/// check that S solves the discretized equation.
double godunov_residual(const ScalarField& s, const ScalarField& speed_sq,
                        std::span<const FieldSource> sources);

/// Godunov upwind squared gradient over the given axes,
///   sum_a (max(S - min(neighbors_a), 0) / h_a)^2.
/// This is the discrete operator the sweeping solver inverts: applied along
/// the solved axes it reproduces the speed field exactly at non-source nodes.
ScalarField upwind_grad_sq(const ScalarField& s, std::span<const std::size_t> axes);

struct EikonalSettings {
  double tolerance = 1e-10;
  std::size_t max_sweeps = 4096;
  std::size_t threads = 1;
};

struct SliceStat {
  std::size_t slice = 0;
  std::size_t sweeps = 0;
  double residual = 0.0;
};

struct SliceSolveResult {
  ScalarField s;  // on the full M-particle grid
  std::vector<std::uint8_t> zero_speed;
  std::size_t zero_speed_count = 0;
  std::vector<SliceStat> stats;
};

/// Solves equation k of the coupled system: for every combination of the
/// other particles' coordinates, extracts the d-dimensional slice of rhs,
/// solves the eikonal problem on it with the given per-particle sources, and
/// writes the slice back.  Slices are independent subproblems; `threads`
/// only distributes them, the result does not depend on scheduling.
SliceSolveResult solve_equation_k(const ScalarField& rhs, std::size_t k,
                                  std::span<const FieldSource> particle_sources,
                                  const EikonalSettings& settings);

/// Solved phase with bookkeeping about which equations produced it.
struct PhaseField {
  ScalarField s;
  std::vector<int> equations;
  bool symmetrized = false;
};

/// v = grad(S) / m over all configuration axes.
VectorField velocity_field(const PhaseField& phase,
                           const PhysicalConstants& constants);

/// Multilinear interpolation of a sampled field at an interior point.
double interpolate(const ScalarField& field, std::span<const double> point);

struct Trajectory {
  std::vector<double> times;
  std::vector<std::vector<double>> points;
  bool truncated = false;  // hit the domain boundary before finishing
};

/// Explicit midpoint integration of dx/dt = v(x) with multilinear velocity
/// interpolation; stops (flagged, not an error) when a step leaves the box.
Trajectory integrate_trajectory(const VectorField& v, std::span<const double> start,
                                double dt, std::size_t steps);

}  // namespace bohmq

#endif
