#ifndef BOHMQ_CALCULUS_HPP
#define BOHMQ_CALCULUS_HPP

#include <functional>
#include <span>
#include <vector>

#include "bohmq/grid.hpp"

namespace bohmq {

/// Sample a coordinate function on every grid node.  Throws EvaluationError
/// naming the node if f returns a non-finite value anywhere.
ScalarField eval_on_grid(const std::function<double(std::span<const double>)>& f,
                         const GridSpec& grid);

/// Sum of second derivatives over the requested axes.  Central second-order
/// stencils on interior nodes, one-sided second-order at the boundary.
ScalarField laplacian(const ScalarField& field, std::span<const std::size_t> axes);

/// First derivatives along the requested axes, one component per axis.
VectorField gradient(const ScalarField& field, std::span<const std::size_t> axes);

/// Trapezoidal integration over the given axes; the result lives on the
/// remaining axes.  Requires a nonempty proper subset of the axes (use
/// total_integral to integrate everything).
ScalarField marginalize(const ScalarField& field,
                        std::span<const std::size_t> integrate_axes);

/// Trapezoidal integral over the whole grid.
double total_integral(const ScalarField& field);

/// All axis indices of a grid (convenience for full-space operators).
std::vector<std::size_t> all_axes(const GridSpec& grid);

/// Axis indices of one particle's block.
std::vector<std::size_t> particle_axes(const GridSpec& grid, std::size_t particle);

}  // namespace bohmq

#endif
