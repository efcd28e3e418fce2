#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "paqs/permanent.hpp"

namespace paqs {

struct BenchEntry {
  PermanentAlgorithm algorithm;
  int order;
  double median_ns;
  double relative_error;  // against the dispatcher on the same matrix
};

struct BenchReport {
  std::vector<BenchEntry> entries;

  std::optional<BenchEntry> find(PermanentAlgorithm algo, int order) const;
};

/// Times every eligible kernel on one seeded random complex matrix per
/// order.  Each trial repeats the kernel until at least `min_trial_ns`
/// has elapsed and records the per-call time; the report keeps the median
/// over trials.  Naive is timed only up to kNaiveMaxOrder.
BenchReport bench_permanents(int n_min, int n_max, int trials, std::uint64_t seed = 1,
                             double min_trial_ns = 2.0e5);

/// Matrix with entries uniform in the unit square [-1,1) + i[-1,1).
ComplexMatrix random_complex_matrix(int order, std::uint64_t seed, std::uint64_t stream = 0);

}  // namespace paqs
