#include "bohmq/field_io.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace bohmq {

namespace {

std::string fmt17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void put_u64(std::ostream& os, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
  os.write(reinterpret_cast<const char*>(b), 8);
}

void put_f64(std::ostream& os, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, 8);
  put_u64(os, bits);
}

std::uint64_t get_u64(std::istream& is) {
  unsigned char b[8];
  is.read(reinterpret_cast<char*>(b), 8);
  if (!is) throw std::runtime_error("binary field: truncated file");
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
  return v;
}

double get_f64(std::istream& is) {
  std::uint64_t bits = get_u64(is);
  double v;
  std::memcpy(&v, &bits, 8);
  return v;
}

}  // namespace

void write_field_csv(const ScalarField& field, const std::string& path,
                     const std::string& provenance) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  if (!provenance.empty()) os << "# " << provenance << "\n";
  const GridSpec& g = field.grid;
  os << "# grid M=" << g.particles() << " d=" << g.dims_per_particle();
  for (const auto& ax : g.per_particle_axes())
    os << " axis=" << fmt17(ax.lo) << ":" << fmt17(ax.hi) << ":" << ax.n;
  os << "\n";
  for (std::size_t a = 0; a < g.total_axes(); ++a) os << "axis" << a << ",";
  os << "value\n";
  std::vector<double> coords(g.total_axes());
  for (std::size_t i = 0; i < field.size(); ++i) {
    g.node_coords(i, coords);
    for (double c : coords) os << fmt17(c) << ",";
    os << fmt17(field.values[i]) << "\n";
  }
  if (!os) throw std::runtime_error("write failed: " + path);
}

ScalarField read_field_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path);
  std::string line;
  std::size_t m = 0, d = 0;
  std::vector<AxisSpec> axes;
  bool header_seen = false;
  std::vector<double> values;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream ls(line.substr(1));
      std::string tok;
      while (ls >> tok) {
        if (tok.rfind("M=", 0) == 0) m = std::stoul(tok.substr(2));
        if (tok.rfind("d=", 0) == 0) d = std::stoul(tok.substr(2));
        if (tok.rfind("axis=", 0) == 0) {
          AxisSpec ax;
          std::string spec = tok.substr(5);
          auto c1 = spec.find(':');
          auto c2 = spec.find(':', c1 + 1);
          if (c1 == std::string::npos || c2 == std::string::npos)
            throw std::runtime_error(path + ": malformed axis spec");
          ax.lo = std::stod(spec.substr(0, c1));
          ax.hi = std::stod(spec.substr(c1 + 1, c2 - c1 - 1));
          ax.n = std::stoul(spec.substr(c2 + 1));
          axes.push_back(ax);
        }
      }
      continue;
    }
    if (!header_seen) {  // "axis0,...,value"
      header_seen = true;
      continue;
    }
    auto last = line.rfind(',');
    if (last == std::string::npos)
      throw std::runtime_error(path + ": malformed data row");
    values.push_back(std::stod(line.substr(last + 1)));
  }
  if (m == 0 || axes.size() != d)
    throw std::runtime_error(path + ": missing or inconsistent grid comment");
  GridSpec grid(m, axes);
  if (values.size() != grid.total_points())
    throw std::runtime_error(path + ": row count does not match grid");
  return ScalarField(std::move(grid), std::move(values));
}

void write_field_binary(const ScalarField& field, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  os.write("BQF1", 4);
  const GridSpec& g = field.grid;
  put_u64(os, g.total_axes());
  put_u64(os, g.particles());
  put_u64(os, g.dims_per_particle());
  for (const auto& ax : g.per_particle_axes()) {
    put_f64(os, ax.lo);
    put_f64(os, ax.hi);
    put_u64(os, ax.n);
  }
  for (double v : field.values) put_f64(os, v);
  if (!os) throw std::runtime_error("write failed: " + path);
}

ScalarField read_field_binary(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path);
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, "BQF1", 4) != 0)
    throw std::runtime_error(path + ": not a BQF1 field file");
  const std::uint64_t total_axes = get_u64(is);
  const std::uint64_t m = get_u64(is);
  const std::uint64_t d = get_u64(is);
  if (m * d != total_axes)
    throw std::runtime_error(path + ": inconsistent axis structure");
  std::vector<AxisSpec> axes(d);
  for (auto& ax : axes) {
    ax.lo = get_f64(is);
    ax.hi = get_f64(is);
    ax.n = get_u64(is);
  }
  GridSpec grid(m, std::move(axes));
  std::vector<double> values(grid.total_points());
  for (auto& v : values) v = get_f64(is);
  return ScalarField(std::move(grid), std::move(values));
}

}  // namespace bohmq
