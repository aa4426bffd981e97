#ifndef BOHMQ_SCF_HPP
#define BOHMQ_SCF_HPP

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "bohmq/eikonal.hpp"
#include "bohmq/grid.hpp"
#include "bohmq/potentials.hpp"
#include "bohmq/wavefunction.hpp"

namespace bohmq {

struct ScfConfig {
  double tolerance = 1e-6;       // relative sup-norm change of Q between STEPs
  std::size_t max_steps = 50;
  bool symmetrize_each_stage = true;
  double mixing = 1.0;           // 1 = direct substitution
  EikonalSettings eikonal;
  std::vector<SliceStat>* slice_log = nullptr;  // optional per-slice residual sink
};

struct StageRecord {
  std::size_t step = 0;      // STEP the stage belongs to (1-based)
  std::size_t equation = 0;  // equation handled (0-based)
  double residual = 0.0;     // relative sup-norm change of the updated object
  double clamped_fraction = 0.0;
  double flagged_fraction = 0.0;
};

/// Iteration bookkeeping.  Stages alternate between solving one equation for
/// S and recovering Q from the next, wrapping across STEPs; one STEP is a
/// full pass over all M equations.
struct ScfState {
  std::size_t step = 0;      // completed STEPs
  std::size_t equation = 0;  // next equation index
  std::size_t stages = 0;    // stages executed so far
  ScalarField q;
  std::vector<std::uint8_t> q_mask;
  PhaseField phase;          // symmetrized when so configured
  ScalarField s_raw;         // last slice solution before symmetrization;
                             // Q recovery differentiates this one (the
                             // symmetrized field has zero-gradient valleys
                             // along source hyperplanes that poison the
                             // recovered Q with grid-scale spikes)
  bool phase_valid = false;
  std::vector<StageRecord> history;        // append-only, one entry per stage
  std::vector<double> step_delta_q;        // Q change at each STEP boundary
  double q0_flagged_fraction = 0.0;
};

/// Q_current = initial-guess quantum potential of the model amplitude.
ScfState scf_init(const DensityModel& model, const GridSpec& grid,
                  const PhysicalConstants& constants,
                  double amplitude_floor = 1e-8);

/// Executes one stage for equation k: either an S-solve (slice-wise eikonal
/// on the clamped squared-gradient target) or a Q-recovery from the current
/// phase, each followed by symmetrization when configured.  Throws
/// NumericalError if the updated field goes non-finite, ConvergenceError on
/// slice solver failure.
void scf_solve_stage(ScfState& state, std::size_t k, const ScalarField& v_single,
                     std::span<const FieldSource> sources,
                     const PhysicalConstants& constants, const ScfConfig& config);

struct ScfOutcome {
  bool converged = false;
  double final_residual = 0.0;
  std::size_t steps = 0;
};

/// Repeats STEPs until the relative sup-norm change of Q between consecutive
/// STEPs drops below tolerance or max_steps is reached.
ScfOutcome scf_run(ScfState& state, const ScalarField& v_single,
                   std::span<const FieldSource> sources,
                   const PhysicalConstants& constants, const ScfConfig& config);

std::pair<ScfState, ScfOutcome> scf_run(const DensityModel& model,
                                        const GridSpec& grid,
                                        const PhysicalConstants& constants,
                                        const ScalarField& v_single,
                                        std::span<const FieldSource> sources,
                                        const ScfConfig& config);

/// Q implied by a solved phase through equation k:
///   Q = E - M (|grad_k S|^2 / 2m + V(r_k)),
/// using the Godunov upwind gradient, the exact discrete inverse of the
/// sweeping solver: recovering through the solved equation reproduces its
/// input rhs to solver tolerance at non-source nodes.
ScalarField recover_potential(const ScalarField& s, std::size_t k,
                              const ScalarField& v_single,
                              const PhysicalConstants& constants);

/// Effective one-particle potential: Q averaged over the other particles'
/// conditional density, Q_red(r) = integral Q(r,r') |beta(r'|r)|^2 dr'.
/// Masks propagate: a reduced node is flagged when its marginal was guarded
/// or any contributing Q node was.
MaskedField reduce_potential(const ScalarField& q,
                             std::span<const std::uint8_t> q_mask,
                             const ConditionalFunction& beta);

/// Additive split rhs(x) = sum_axis rhs_axis(x_axis) extracted along axis
/// lines through a reference node; throws std::invalid_argument when the
/// reconstruction defect exceeds the tolerance.
struct AxisDecomposition {
  std::vector<ScalarField> axis_rhs;  // one 1D field per global axis
  double defect = 0.0;
  std::size_t clamped = 0;  // negative per-axis values clamped to zero
};
AxisDecomposition separate_additive(const ScalarField& rhs, std::size_t ref_node,
                                    double rel_tol);

/// Fast path for additively separable problems: per-axis 1D integrals of
/// sqrt(rhs_axis) outward from the source, composed additively.
PhaseField separable_solve(const ScalarField& rhs, const FieldSource& source,
                           double rel_tol = 1e-9);

/// Relative sup-norm distance used for convergence decisions.
double relative_change(const ScalarField& a, const ScalarField& b);

}  // namespace bohmq

#endif
