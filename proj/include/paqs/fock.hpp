#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "paqs/lattice.hpp"
#include "paqs/permanent.hpp"
#include "paqs/propagator.hpp"
#include "paqs/types.hpp"

namespace paqs {

/// Photon occupation numbers over M modes.
class FockConfiguration {
 public:
  FockConfiguration() = default;
  explicit FockConfiguration(std::vector<int> occupations);

  static FockConfiguration vacuum(int modes) { return FockConfiguration(std::vector<int>(static_cast<std::size_t>(modes), 0)); }

  int modes() const noexcept { return static_cast<int>(occ_.size()); }
  int photons() const noexcept { return photons_; }
  int operator[](int mode0) const { return occ_[static_cast<std::size_t>(mode0)]; }
  const std::vector<int>& occupations() const noexcept { return occ_; }
  int max_occupation() const noexcept;
  bool collision_free() const noexcept { return max_occupation() <= 1; }

  /// Copy with one extra photon in `mode0` (0-based).
  FockConfiguration plus(int mode0) const;

  bool operator==(const FockConfiguration& o) const { return occ_ == o.occ_; }
  auto operator<=>(const FockConfiguration& o) const { return occ_ <=> o.occ_; }

 private:
  std::vector<int> occ_;
  int photons_ = 0;
};

enum class ParticleStatistics { Bosonic, Fermionic, Distinguishable };

const char* to_string(ParticleStatistics stats) noexcept;
ParticleStatistics particle_statistics_from_string(const std::string& name);

/// How distinguishable-particle probabilities are evaluated.
enum class DistinguishableFormula {
  /// (|Per|^2 + |Det|^2) / 2, normalised by the factorial product.  Needs a
  /// collision-free input.
  PerDetAverage,
  /// Per(|U^(S,T)|^2) / prod T_j!  (independent photons), any input.
  IndependentPhotons,
};

/// Dense "|S1 S2 ... SM>" or sparse "|i,Si;j,Sj;...>" (1-based modes).
enum class StateFormat { Auto, Dense, Sparse };

/// Accepts either grammar.  Sparse form leaves unmentioned modes empty.
FockConfiguration parse_state(const std::string& text, int modes);
/// Auto picks dense for up to 16 modes when every occupation is a single
/// digit, sparse otherwise.
std::string format_state(const FockConfiguration& c, StateFormat format = StateFormat::Auto);

/// C(N + M - 1, N), saturating at UINT64_MAX.
std::uint64_t multiset_count(int modes, int photons);
inline constexpr std::uint64_t kMaxEnumeratedConfigurations = 2'000'000;

/// All configurations of `photons` over `modes`, descending lexicographic
/// (|N0...0> first, |0...0N> last).
std::vector<FockConfiguration> enumerate_configurations(int modes, int photons);

/// N x N matrix with S_i copies of column i and T_j copies of row j of u,
/// both taken in ascending mode order.
ComplexMatrix scattering_submatrix(const ComplexMatrix& u, const FockConfiguration& s, const FockConfiguration& t);

struct MultiParticleOptions {
  DistinguishableFormula distinguishable = DistinguishableFormula::PerDetAverage;
  PermanentAlgorithm permanent = PermanentAlgorithm::Dispatch;
  unsigned threads = 1;
};

/// P(T|S) for a unitary u where u(j, i) is the amplitude from input mode i
/// to output mode j.
double transition_probability(const ComplexMatrix& u, const FockConfiguration& s, const FockConfiguration& t,
                              ParticleStatistics stats, const MultiParticleOptions& opts = {});

struct OutputDistribution {
  std::vector<std::pair<FockConfiguration, double>> entries;  // descending lexicographic

  double total() const;
  std::optional<double> probability(const FockConfiguration& c) const;
};

OutputDistribution full_distribution(const ComplexMatrix& u, const FockConfiguration& s, ParticleStatistics stats,
                                     const MultiParticleOptions& opts = {});

/// Gamma[q][r] = P(fixed + e_q + e_r | s): coincidences of the two remaining
/// photons once the other N - 2 are pinned to `fixed`.
RealMatrix two_particle_correlation(const ComplexMatrix& u, const FockConfiguration& s, ParticleStatistics stats,
                                    const FockConfiguration& fixed, const MultiParticleOptions& opts = {});

/// Mean single-photon density sum_T T_j P(T) / N.  Ignores multi-photon
/// interference between what different photons see.
std::vector<double> single_photon_marginal(const OutputDistribution& dist);
std::vector<double> single_photon_marginal(const ComplexMatrix& u, const FockConfiguration& s,
                                           ParticleStatistics stats, const MultiParticleOptions& opts = {});

/// P(T|S) of each watched state at kSeriesPoints distances, u = exp(-iHz).
ProbabilitySeries state_probability_series(const Hamiltonian& h, const FockConfiguration& s, ParticleStatistics stats,
                                           const std::vector<FockConfiguration>& watch, double z0_cm, double z1_cm,
                                           const MultiParticleOptions& opts = {});

}  // namespace paqs
