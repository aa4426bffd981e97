#ifndef BOHMQ_CONFIG_HPP
#define BOHMQ_CONFIG_HPP

#include <string>
#include <vector>

#include "bohmq/eikonal.hpp"
#include "bohmq/grid.hpp"
#include "bohmq/orbital.hpp"
#include "bohmq/potentials.hpp"
#include "bohmq/scf.hpp"
#include "bohmq/wavefunction.hpp"

namespace bohmq {

/// Phase boundary condition: either resolved automatically (a single
/// zero-valued source at the node of maximum initial density) or an explicit
/// per-particle position with a pinned value.
struct SourceSpec {
  bool automatic = true;
  std::vector<double> position;  // d coordinates
  double value = 0.0;
};

enum class PotentialType { none, hartree };

struct OrbitalSpec {
  OrbitalKind kind = OrbitalKind::gaussian;
  OrbitalParams params;
  int line = 0;  // config line of the section header, for error messages
};

/// A full problem definition parsed from one flat sectioned key/value file.
struct RunConfig {
  std::string name;
  std::size_t n_total = 0;
  std::size_t particles = 0;
  std::size_t dims = 0;
  ModelMode mode = ModelMode::product;
  std::vector<AxisSpec> axes;  // per-particle
  PhysicalConstants constants;
  std::vector<OrbitalSpec> orbitals;
  PotentialType potential = PotentialType::hartree;
  std::vector<SourceSpec> sources;  // defaults to one automatic source
  ScfConfig scf;                    // includes the eikonal settings
  double trajectory_dt = 0.01;
  std::size_t trajectory_steps = 100;
  std::string output_dir = "out";
  bool write_csv = true;
  bool write_binary = true;

  GridSpec grid() const { return GridSpec(particles, axes); }
  DensityModel build_model() const;

  /// Snaps sources to per-particle grid nodes; automatic entries resolve to
  /// the density maximum (its particle-1 block; all blocks coincide for a
  /// symmetric density).
  std::vector<FieldSource> resolve_sources(const DensityModel& model) const;
};

/// Parses and validates a configuration file.  Throws ConfigError with a
/// line-level message on any defect.
RunConfig parse_run_config(const std::string& path);

/// FNV-1a 64-bit hash of the file bytes, as 16 hex characters; embedded in
/// every text output for provenance.
std::string file_hash_hex(const std::string& path);

}  // namespace bohmq

#endif
