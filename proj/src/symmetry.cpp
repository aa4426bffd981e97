#include "bohmq/symmetry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace bohmq {

ParticlePermutation::ParticlePermutation(std::vector<std::size_t> mapping)
    : map_(std::move(mapping)) {
  std::vector<bool> seen(map_.size(), false);
  for (std::size_t v : map_) {
    if (v >= map_.size() || seen[v])
      throw std::invalid_argument("permutation: mapping is not a bijection");
    seen[v] = true;
  }
}

ParticlePermutation ParticlePermutation::identity(std::size_t m) {
  std::vector<std::size_t> id(m);
  std::iota(id.begin(), id.end(), std::size_t{0});
  return ParticlePermutation(std::move(id));
}

ParticlePermutation ParticlePermutation::compose(
    const ParticlePermutation& then) const {
  if (size() != then.size())
    throw std::invalid_argument("permutation: size mismatch in composition");
  std::vector<std::size_t> out(size());
  for (std::size_t p = 0; p < size(); ++p) out[p] = map_[then.map_[p]];
  return ParticlePermutation(std::move(out));
}

ParticlePermutation ParticlePermutation::inverse() const {
  std::vector<std::size_t> out(size());
  for (std::size_t p = 0; p < size(); ++p) out[map_[p]] = p;
  return ParticlePermutation(std::move(out));
}

int ParticlePermutation::sign() const {
  std::vector<bool> seen(size(), false);
  std::size_t cycles = 0;
  for (std::size_t p = 0; p < size(); ++p) {
    if (seen[p]) continue;
    ++cycles;
    for (std::size_t q = p; !seen[q]; q = map_[q]) seen[q] = true;
  }
  return ((size() - cycles) % 2 == 0) ? 1 : -1;
}

std::vector<ParticlePermutation> all_permutations(std::size_t m) {
  if (m > 6) throw std::invalid_argument("permutation: M > 6 not supported");
  std::vector<std::size_t> map(m);
  std::iota(map.begin(), map.end(), std::size_t{0});
  std::vector<ParticlePermutation> out;
  do {
    out.emplace_back(map);
  } while (std::next_permutation(map.begin(), map.end()));
  return out;
}

std::vector<ParticlePermutation> all_transpositions(std::size_t m) {
  std::vector<ParticlePermutation> out;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      auto p = ParticlePermutation::identity(m).mapping();
      std::swap(p[i], p[j]);
      out.emplace_back(std::move(p));
    }
  }
  return out;
}

ScalarField permute_field(const ScalarField& field, const ParticlePermutation& p) {
  const GridSpec& g = field.grid;
  if (p.size() != g.particles())
    throw std::invalid_argument("permute_field: permutation size mismatch");
  const std::size_t d = g.dims_per_particle();
  ScalarField out(g);
  std::vector<std::size_t> multi(g.total_axes());
  std::vector<std::size_t> src(g.total_axes());
  for (std::size_t i = 0; i < field.size(); ++i) {
    g.unravel(i, multi);
    for (std::size_t slot = 0; slot < p.size(); ++slot)
      for (std::size_t a = 0; a < d; ++a)
        src[slot * d + a] = multi[p(slot) * d + a];
    out.values[i] = field.values[g.ravel(src)];
  }
  return out;
}

ScalarField symmetrize(const ScalarField& field) {
  const auto perms = all_permutations(field.grid.particles());
  ScalarField acc(field.grid);
  for (const auto& p : perms) {
    ScalarField term = permute_field(field, p);
    for (std::size_t i = 0; i < acc.size(); ++i) acc.values[i] += term.values[i];
  }
  const double inv = 1.0 / static_cast<double>(perms.size());
  for (double& v : acc.values) v *= inv;
  return acc;
}

AntisymmetryReport check_antisymmetry(const DensityModel& model,
                                      std::span<const std::vector<double>> points) {
  AntisymmetryReport report;
  report.samples = points.size();
  const auto swaps = all_transpositions(model.particles());
  report.transpositions = swaps.size();
  const std::size_t d = model.dims();
  std::vector<double> permuted(model.particles() * d);
  for (const auto& x : points) {
    const double ref = model.amplitude(x);
    for (const auto& p : swaps) {
      for (std::size_t slot = 0; slot < model.particles(); ++slot)
        for (std::size_t a = 0; a < d; ++a)
          permuted[slot * d + a] = x[p(slot) * d + a];
      const double v = model.amplitude(permuted);
      report.max_deviation =
          std::max(report.max_deviation, std::abs(v - p.sign() * ref));
    }
  }
  return report;
}

AppendixReport appendix_reconstruction_check(const ScalarField& g,
                                             const ScalarField& h) {
  const GridSpec& grid = g.grid;
  if (grid.particles() != 2)
    throw std::invalid_argument("appendix check: g must be a two-particle field");
  if (!(h.grid == grid.particle_subgrid()))
    throw std::invalid_argument("appendix check: h must live on the one-particle grid");

  const std::size_t sub_points = h.size();
  auto h_at = [&](std::size_t full_idx, bool second) {
    return second ? h.values[full_idx % sub_points] : h.values[full_idx / sub_points];
  };

  ScalarField f(grid);
  for (std::size_t i = 0; i < f.size(); ++i)
    f.values[i] = g.values[i] + h_at(i, false);

  ScalarField sym_f = symmetrize(f);
  ScalarField g_swapped =
      permute_field(g, ParticlePermutation({1, 0}));

  AppendixReport report;
  ScalarField sym_g = symmetrize(g);
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double g_fin = 0.5 * (g.values[i] + g_swapped.values[i]);
    const double h_even = 0.5 * (h_at(i, false) + h_at(i, true));
    report.completion_deviation = std::max(
        report.completion_deviation, std::abs(sym_f.values[i] - (g_fin + h_even)));
    report.symmetric_part_deviation = std::max(
        report.symmetric_part_deviation, std::abs(sym_g.values[i] - g_fin));
  }
  return report;
}

}  // namespace bohmq
