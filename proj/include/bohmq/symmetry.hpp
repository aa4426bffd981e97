#ifndef BOHMQ_SYMMETRY_HPP
#define BOHMQ_SYMMETRY_HPP

#include <span>
#include <vector>

#include "bohmq/grid.hpp"
#include "bohmq/wavefunction.hpp"

namespace bohmq {

/// Bijection on the particle slots {0..M-1}.
class ParticlePermutation {
 public:
  explicit ParticlePermutation(std::vector<std::size_t> mapping);
  static ParticlePermutation identity(std::size_t m);

  std::size_t size() const { return map_.size(); }
  std::size_t operator()(std::size_t p) const { return map_[p]; }
  const std::vector<std::size_t>& mapping() const { return map_; }

  ParticlePermutation compose(const ParticlePermutation& then) const;
  ParticlePermutation inverse() const;
  int sign() const;

  bool operator==(const ParticlePermutation&) const = default;

 private:
  std::vector<std::size_t> map_;
};

/// All M! permutations in lexicographic order (M <= 6).
std::vector<ParticlePermutation> all_permutations(std::size_t m);

/// All pair transpositions of M slots.
std::vector<ParticlePermutation> all_transpositions(std::size_t m);

/// Relabels particle blocks: output(x_1..x_M) = input(x_{p(1)}..x_{p(M)}).
/// Exact index remapping; all particles share one per-particle grid.
ScalarField permute_field(const ScalarField& field, const ParticlePermutation& p);

/// Projection onto the permutation-invariant subspace: the average of
/// permute_field over all M! permutations, summed in a fixed order.
ScalarField symmetrize(const ScalarField& field);

struct AntisymmetryReport {
  double max_deviation = 0.0;
  std::size_t samples = 0;
  std::size_t transpositions = 0;
};

/// Evaluates the model amplitude at the given configuration points under
/// every pair transposition and reports max |amp(Px) - sign(P) amp(x)|.
AntisymmetryReport check_antisymmetry(const DensityModel& model,
                                      std::span<const std::vector<double>> points);

struct AppendixReport {
  // sym(g + h(r))  vs  sym(g) + (h(r) + h(r'))/2
  double completion_deviation = 0.0;
  // sym(g)  vs  (g(r,r') + g(r',r))/2
  double symmetric_part_deviation = 0.0;
};

/// Executable form of the two-particle phase-reconstruction argument: the
/// symmetrization of g(r,r') + h(r) must equal the symmetric part of g plus
/// the even completion (h(r) + h(r'))/2.
AppendixReport appendix_reconstruction_check(const ScalarField& g,
                                             const ScalarField& h);

}  // namespace bohmq

#endif
