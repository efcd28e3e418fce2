#include "paqs/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "paqs/error.hpp"
#include "paqs/rng.hpp"

namespace paqs {

std::optional<BenchEntry> BenchReport::find(PermanentAlgorithm algo, int order) const {
  for (const auto& e : entries)
    if (e.algorithm == algo && e.order == order) return e;
  return std::nullopt;
}

ComplexMatrix random_complex_matrix(int order, std::uint64_t seed, std::uint64_t stream) {
  CounterRng rng(seed, stream);
  ComplexMatrix m(order, order);
  for (int i = 0; i < order; ++i)
    for (int j = 0; j < order; ++j) {
      const double re = rng.uniform(-1.0, 1.0);
      const double im = rng.uniform(-1.0, 1.0);
      m(i, j) = {re, im};
    }
  return m;
}

namespace {

double time_once(const ComplexMatrix& m, PermanentAlgorithm algo, double min_ns, Complex& value) {
  using clock = std::chrono::steady_clock;
  long calls = 0;
  const auto start = clock::now();
  double elapsed = 0.0;
  do {
    value = permanent(m, algo);
    ++calls;
    elapsed = std::chrono::duration<double, std::nano>(clock::now() - start).count();
  } while (elapsed < min_ns);
  return elapsed / static_cast<double>(calls);
}

}  // namespace

BenchReport bench_permanents(int n_min, int n_max, int trials, std::uint64_t seed, double min_trial_ns) {
  require(n_min >= 1 && n_max >= n_min && n_max <= kInclusionExclusionMaxOrder, ErrorKind::InvalidArgument,
          "bench order range must lie within 1.." + std::to_string(kInclusionExclusionMaxOrder));
  require(trials >= 1, ErrorKind::InvalidArgument, "trials must be at least 1");
  BenchReport report;
  const PermanentAlgorithm algos[] = {PermanentAlgorithm::Naive, PermanentAlgorithm::Ryser,
                                      PermanentAlgorithm::RyserGray, PermanentAlgorithm::Glynn,
                                      PermanentAlgorithm::GlynnGray, PermanentAlgorithm::Dispatch};
  for (int n = n_min; n <= n_max; ++n) {
    const ComplexMatrix m = random_complex_matrix(n, seed, static_cast<std::uint64_t>(n));
    const Complex reference = permanent(m);
    for (auto algo : algos) {
      if (algo == PermanentAlgorithm::Naive && n > kNaiveMaxOrder) continue;
      std::vector<double> samples;
      Complex value;
      for (int t = 0; t < trials; ++t) samples.push_back(time_once(m, algo, min_trial_ns, value));
      std::nth_element(samples.begin(), samples.begin() + static_cast<long>(samples.size() / 2), samples.end());
      double median = samples[samples.size() / 2];
      if (samples.size() % 2 == 0) {
        const double below = *std::max_element(samples.begin(), samples.begin() + static_cast<long>(samples.size() / 2));
        median = 0.5 * (median + below);
      }
      const double scale = std::abs(reference);
      const double err = scale == 0.0 ? std::abs(value) : std::abs(value - reference) / scale;
      report.entries.push_back({algo, n, median, err});
    }
  }
  return report;
}

}  // namespace paqs
