#ifndef BOHMQ_FIELD_IO_HPP
#define BOHMQ_FIELD_IO_HPP

#include <string>

#include "bohmq/grid.hpp"

namespace bohmq {

/// CSV layout: optional '#' comment lines (grid structure plus caller
/// provenance), a header row `axis0,axis1,...,value`, then one node per line
/// in storage order with full-precision coordinates and value.
void write_field_csv(const ScalarField& field, const std::string& path,
                     const std::string& provenance = "");
ScalarField read_field_csv(const std::string& path);

/// Compact binary layout: magic "BQF1", then axis count, particle count and
/// dims per particle as 64-bit integers, per-axis (lo, hi) as 64-bit floats
/// with the point count as a 64-bit integer, then all values as little-endian
/// 64-bit floats in storage order.
void write_field_binary(const ScalarField& field, const std::string& path);
ScalarField read_field_binary(const std::string& path);

}  // namespace bohmq

#endif
