#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "paqs/lattice.hpp"
#include "paqs/propagator.hpp"

namespace paqs {

/// Random propagation-constant fluctuation settings.  Offsets are drawn
/// uniformly from [-amplitude, +amplitude] and held constant over each
/// z interval, starting at z = 0.
struct DBetaConfig {
  double amplitude_per_mm = 0.0;  // practical range 0 .. ~1.2 /mm
  double z_interval_mm = 0.1;
  int realizations = 1;
  std::uint64_t seed = 0;
  std::vector<bool> stochastic_flags;  // empty: every node fluctuates

  void validate(std::size_t n_nodes) const;
  bool is_noiseless() const;
};

struct DBetaProfile {
  double segment_length_cm = 0.0;
  std::vector<RealVector> segments;  // offsets in 1/cm, one vector per segment

  double covered_cm() const { return segment_length_cm * static_cast<double>(segments.size()); }
  bool is_zero() const;
};

/// Number of segments needed to cover z_max: ceil(z_max / interval).
std::size_t segment_count(double z_max_cm, double z_interval_cm);

/// One realization.  `realization` selects an independent Philox stream of
/// cfg.seed, so realization r of an ensemble is reproducible on its own.
DBetaProfile sample_dbeta_profile(const DBetaConfig& cfg, std::size_t n_nodes, double z_max_cm,
                                  std::uint64_t realization = 0);

/// Called after each segment with the segment index and the state.
using SegmentObserver = std::function<void(std::size_t, const ComplexVector&)>;

ComplexVector evolve_piecewise_state(const Hamiltonian& h, const DBetaProfile& profile, int inject_label, double z_cm,
                                     const SegmentObserver& observer = {});
ProbabilityDistribution evolve_piecewise(const Hamiltonian& h, const DBetaProfile& profile, int inject_label,
                                         double z_cm);

struct EnsembleOptions {
  unsigned threads = 1;
  std::chrono::steady_clock::time_point deadline = std::chrono::steady_clock::time_point::max();
};

/// Ensemble mean over cfg.realizations profiles, reduced in realization
/// order so the result is independent of the thread count.
ProbabilityDistribution qsw_run(const Hamiltonian& h, const DBetaConfig& cfg, int inject_label, double z_cm,
                                const EnsembleOptions& opts = {});

/// Ensemble-mean probabilities of watched nodes at kSeriesPoints distances.
/// Each realization's profile is fixed across all samples.
ProbabilitySeries qsw_series(const Hamiltonian& h, const DBetaConfig& cfg, int inject_label, double z0_cm,
                             double z1_cm, const std::vector<int>& watch, const EnsembleOptions& opts = {});

}  // namespace paqs
