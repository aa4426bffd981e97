#include "bohmq/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <fstream>
#include <sstream>

#include "bohmq/calculus.hpp"
#include "bohmq/errors.hpp"

namespace bohmq {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

double to_double(const std::string& v, int line) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (trim(v.substr(pos)).empty()) return x;
  } catch (const std::exception&) {
  }
  throw ConfigError("expected a number, got '" + v + "'", line);
}

std::size_t to_size(const std::string& v, int line) {
  const double x = to_double(v, line);
  if (x < 0 || x != static_cast<double>(static_cast<std::size_t>(x)))
    throw ConfigError("expected a nonnegative integer, got '" + v + "'", line);
  return static_cast<std::size_t>(x);
}

bool to_bool(const std::string& v, int line) {
  if (v == "true" || v == "yes" || v == "1") return true;
  if (v == "false" || v == "no" || v == "0") return false;
  throw ConfigError("expected true/false, got '" + v + "'", line);
}

std::vector<std::string> split_ws(const std::string& v) {
  std::vector<std::string> out;
  std::istringstream is(v);
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

}  // namespace

DensityModel RunConfig::build_model() const {
  std::vector<Orbital> orbs;
  orbs.reserve(orbitals.size());
  for (const auto& spec : orbitals) {
    try {
      orbs.push_back(Orbital::create(spec.kind, spec.params, axes));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("orbital: ") + e.what(), spec.line);
    }
  }
  try {
    return DensityModel(std::move(orbs), n_total, mode);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

std::vector<FieldSource> RunConfig::resolve_sources(const DensityModel& model) const {
  const GridSpec full = grid();
  const GridSpec sub = full.particle_subgrid();
  std::vector<FieldSource> out;
  for (const auto& spec : sources) {
    if (spec.automatic) {
      ScalarField rho = m_particle_density(model, full);
      std::size_t best = 0;
      for (std::size_t i = 1; i < rho.size(); ++i)
        if (rho.values[i] > rho.values[best]) best = i;
      std::vector<std::size_t> multi(full.total_axes());
      full.unravel(best, multi);
      std::vector<std::size_t> block(multi.begin(), multi.begin() + dims);
      out.push_back({sub.ravel(block), 0.0});
    } else {
      out.push_back({sub.nearest_node(spec.position), spec.value});
    }
  }
  return out;
}

RunConfig parse_run_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file: " + path);

  RunConfig cfg;
  cfg.constants = PhysicalConstants{};
  std::string section;
  std::string line;
  int line_no = 0;
  std::size_t axis_lines = 0;
  bool any_source_key = false;

  auto current_orbital = [&]() -> OrbitalSpec& {
    if (cfg.orbitals.empty())
      throw ConfigError("orbital key outside an [orbital] section", line_no);
    return cfg.orbitals.back();
  };

  while (std::getline(is, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("malformed section header", line_no);
      section = trim(line.substr(1, line.size() - 2));
      if (section == "orbital") {
        cfg.orbitals.push_back(OrbitalSpec{});
        cfg.orbitals.back().line = line_no;
      } else if (section != "problem" && section != "grid" &&
                 section != "constants" && section != "potential" &&
                 section != "eikonal" && section != "scf" &&
                 section != "trajectories" && section != "output") {
        throw ConfigError("unknown section [" + section + "]", line_no);
      }
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("expected key = value", line_no);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw ConfigError("empty key or value", line_no);

    if (section.empty()) {
      if (key == "name") {
        cfg.name = value;
      } else {
        throw ConfigError("unknown top-level key '" + key + "'", line_no);
      }
    } else if (section == "problem") {
      if (key == "N") cfg.n_total = to_size(value, line_no);
      else if (key == "M") cfg.particles = to_size(value, line_no);
      else if (key == "d") cfg.dims = to_size(value, line_no);
      else if (key == "mode") {
        if (value == "slater") cfg.mode = ModelMode::slater;
        else if (value == "product") cfg.mode = ModelMode::product;
        else throw ConfigError("mode must be slater or product", line_no);
      } else throw ConfigError("unknown [problem] key '" + key + "'", line_no);
    } else if (section == "grid") {
      if (key != "axis")
        throw ConfigError("unknown [grid] key '" + key + "'", line_no);
      const auto toks = split_ws(value);
      if (toks.size() != 3)
        throw ConfigError("axis needs: lower upper points", line_no);
      AxisSpec ax;
      ax.lo = to_double(toks[0], line_no);
      ax.hi = to_double(toks[1], line_no);
      ax.n = to_size(toks[2], line_no);
      cfg.axes.push_back(ax);
      ++axis_lines;
    } else if (section == "constants") {
      if (key == "hbar") cfg.constants.hbar = to_double(value, line_no);
      else if (key == "mass") cfg.constants.mass = to_double(value, line_no);
      else if (key == "softening") cfg.constants.softening = to_double(value, line_no);
      else if (key == "energy_offset")
        cfg.constants.energy_offset = to_double(value, line_no);
      else throw ConfigError("unknown [constants] key '" + key + "'", line_no);
    } else if (section == "orbital") {
      OrbitalSpec& orb = current_orbital();
      if (key == "kind") {
        try {
          orb.kind = orbital_kind_from_string(value);
        } catch (const std::invalid_argument& e) {
          throw ConfigError(e.what(), line_no);
        }
      } else if (key == "center") {
        orb.params.center.clear();
        for (const auto& t : split_ws(value))
          orb.params.center.push_back(to_double(t, line_no));
      } else if (key == "width") {
        orb.params.width = to_double(value, line_no);
      } else if (key == "index") {
        orb.params.index.clear();
        for (const auto& t : split_ws(value))
          orb.params.index.push_back(static_cast<int>(to_double(t, line_no)));
      } else {
        throw ConfigError("unknown [orbital] key '" + key + "'", line_no);
      }
    } else if (section == "potential") {
      if (key != "type")
        throw ConfigError("unknown [potential] key '" + key + "'", line_no);
      if (value == "none") cfg.potential = PotentialType::none;
      else if (value == "hartree") cfg.potential = PotentialType::hartree;
      else throw ConfigError("potential type must be none or hartree", line_no);
    } else if (section == "eikonal") {
      if (key == "source") {
        any_source_key = true;
        SourceSpec src;
        if (value == "auto") {
          src.automatic = true;
        } else {
          src.automatic = false;
          auto toks = split_ws(value);
          // optional "@ value" suffix pins a nonzero phase at the source
          auto at = std::find(toks.begin(), toks.end(), "@");
          if (at != toks.end()) {
            if (at + 1 == toks.end() || at + 2 != toks.end())
              throw ConfigError("source: expected coords @ value", line_no);
            src.value = to_double(*(at + 1), line_no);
            toks.erase(at, toks.end());
          }
          for (const auto& t : toks) src.position.push_back(to_double(t, line_no));
        }
        cfg.sources.push_back(std::move(src));
      } else if (key == "tolerance") {
        cfg.scf.eikonal.tolerance = to_double(value, line_no);
      } else if (key == "max_sweeps") {
        cfg.scf.eikonal.max_sweeps = to_size(value, line_no);
      } else {
        throw ConfigError("unknown [eikonal] key '" + key + "'", line_no);
      }
    } else if (section == "scf") {
      if (key == "tolerance") cfg.scf.tolerance = to_double(value, line_no);
      else if (key == "max_steps") cfg.scf.max_steps = to_size(value, line_no);
      else if (key == "mixing") cfg.scf.mixing = to_double(value, line_no);
      else if (key == "symmetrize_each_stage")
        cfg.scf.symmetrize_each_stage = to_bool(value, line_no);
      else throw ConfigError("unknown [scf] key '" + key + "'", line_no);
    } else if (section == "trajectories") {
      if (key == "dt") cfg.trajectory_dt = to_double(value, line_no);
      else if (key == "steps") cfg.trajectory_steps = to_size(value, line_no);
      else throw ConfigError("unknown [trajectories] key '" + key + "'", line_no);
    } else if (section == "output") {
      if (key == "directory") cfg.output_dir = value;
      else if (key == "format") {
        if (value == "csv") { cfg.write_csv = true; cfg.write_binary = false; }
        else if (value == "binary") { cfg.write_csv = false; cfg.write_binary = true; }
        else if (value == "both") { cfg.write_csv = true; cfg.write_binary = true; }
        else throw ConfigError("format must be csv, binary or both", line_no);
      } else throw ConfigError("unknown [output] key '" + key + "'", line_no);
    }
  }

  // Structural validation.
  if (cfg.particles == 0) throw ConfigError("[problem] M is required");
  if (cfg.n_total == 0) throw ConfigError("[problem] N is required");
  if (cfg.dims == 0) throw ConfigError("[problem] d is required");
  if (cfg.n_total < cfg.particles)
    throw ConfigError("[problem] requires N >= M");
  if (cfg.particles * cfg.dims > 6)
    throw ConfigError("dimension bound exceeded: M*d = " +
                      std::to_string(cfg.particles * cfg.dims) + " > 6");
  if (axis_lines != cfg.dims)
    throw ConfigError("[grid] needs exactly d = " + std::to_string(cfg.dims) +
                      " axis lines, got " + std::to_string(axis_lines));
  if (cfg.orbitals.size() != cfg.particles)
    throw ConfigError("expected M = " + std::to_string(cfg.particles) +
                      " [orbital] sections, got " +
                      std::to_string(cfg.orbitals.size()));
  try {
    cfg.constants.validate();
    (void)cfg.grid();  // axis invariants
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  for (const auto& src : cfg.sources) {
    if (!src.automatic && src.position.size() != cfg.dims)
      throw ConfigError("source needs d = " + std::to_string(cfg.dims) +
                        " coordinates");
  }
  if (!any_source_key) cfg.sources.push_back(SourceSpec{});  // default: auto
  if (!(cfg.scf.tolerance > 0.0)) throw ConfigError("[scf] tolerance must be > 0");
  if (!(cfg.scf.eikonal.tolerance > 0.0))
    throw ConfigError("[eikonal] tolerance must be > 0");
  if (cfg.scf.mixing <= 0.0 || cfg.scf.mixing > 1.0)
    throw ConfigError("[scf] mixing must be in (0, 1]");
  return cfg;
}

std::string file_hash_hex(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError("cannot open config file: " + path);
  std::uint64_t h = 1469598103934665603ull;
  char c;
  while (is.get(c)) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ull;
  }
  static const char* hex = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[i] = hex[h & 0xf];
    h >>= 4;
  }
  return out;
}

}  // namespace bohmq
