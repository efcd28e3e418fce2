#include "paqs/stochastic.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "paqs/detail/parallel.hpp"
#include "paqs/error.hpp"
#include "paqs/rng.hpp"

namespace paqs {

namespace {

double interval_cm(const DBetaConfig& cfg) { return cfg.z_interval_mm / kMillimetersPerCentimeter; }

void check_deadline(const EnsembleOptions& opts) {
  if (std::chrono::steady_clock::now() > opts.deadline) fail(ErrorKind::Budget, "time budget exceeded");
}

template <typename Body>
void for_each_realization(int count, const EnsembleOptions& opts, Body body) {
  detail::parallel_for(static_cast<std::size_t>(count), opts.threads, [&](std::size_t r) {
    check_deadline(opts);
    body(static_cast<int>(r));
  });
}

// Compensated sum of rows[r][i] over r, in r order.
std::vector<double> kahan_mean(const std::vector<std::vector<double>>& rows) {
  const std::size_t width = rows.front().size();
  std::vector<double> sum(width, 0.0), carry(width, 0.0);
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < width; ++i) {
      const double y = row[i] - carry[i];
      const double t = sum[i] + y;
      carry[i] = (t - sum[i]) - y;
      sum[i] = t;
    }
  }
  for (auto& s : sum) s /= static_cast<double>(rows.size());
  return sum;
}

SpectralPropagator segment_propagator(const Hamiltonian& h, const RealVector& offsets) {
  ComplexMatrix m = h.matrix();
  for (Eigen::Index i = 0; i < offsets.size(); ++i) m(i, i) += offsets(i);
  return SpectralPropagator(Hamiltonian(std::move(m), h.beta_baseline()));
}

ComplexVector basis_state(std::size_t n, int label) {
  require(label >= 1 && static_cast<std::size_t>(label) <= n, ErrorKind::InvalidArgument,
          "inject label " + std::to_string(label) + " out of range 1.." + std::to_string(n));
  ComplexVector psi = ComplexVector::Zero(static_cast<Eigen::Index>(n));
  psi(label - 1) = 1.0;
  return psi;
}

}  // namespace

void DBetaConfig::validate(std::size_t n_nodes) const {
  require(std::isfinite(amplitude_per_mm) && amplitude_per_mm >= 0, ErrorKind::Domain, "delta-beta amplitude must be >= 0");
  require(std::isfinite(z_interval_mm) && z_interval_mm > 0, ErrorKind::Domain, "z interval must be positive");
  require(realizations >= 1, ErrorKind::InvalidArgument, "realizations must be at least 1");
  require(stochastic_flags.empty() || stochastic_flags.size() == n_nodes, ErrorKind::InvalidArgument,
          "stochastic flag count does not match node count");
}

bool DBetaConfig::is_noiseless() const {
  return amplitude_per_mm == 0.0 || (!stochastic_flags.empty() &&
                                     std::none_of(stochastic_flags.begin(), stochastic_flags.end(), [](bool b) { return b; }));
}

bool DBetaProfile::is_zero() const {
  return std::all_of(segments.begin(), segments.end(), [](const RealVector& v) { return v.isZero(0.0); });
}

std::size_t segment_count(double z_max_cm, double z_interval_cm) {
  require(std::isfinite(z_max_cm) && z_max_cm > 0, ErrorKind::Domain, "z_max must be positive");
  const double ratio = z_max_cm / z_interval_cm;
  // Absorb representation error so 0.5 cm / 0.01 cm gives 50, not 51.
  return static_cast<std::size_t>(std::ceil(ratio * (1.0 - 1e-12)));
}

DBetaProfile sample_dbeta_profile(const DBetaConfig& cfg, std::size_t n_nodes, double z_max_cm,
                                  std::uint64_t realization) {
  require(n_nodes > 0, ErrorKind::InvalidArgument, "profile needs at least one node");
  cfg.validate(n_nodes);
  DBetaProfile profile;
  profile.segment_length_cm = interval_cm(cfg);
  const std::size_t count = segment_count(z_max_cm, profile.segment_length_cm);
  const double amp = cfg.amplitude_per_mm * kMillimetersPerCentimeter;
  CounterRng rng(cfg.seed, realization);
  profile.segments.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    RealVector offsets = RealVector::Zero(static_cast<Eigen::Index>(n_nodes));
    for (std::size_t j = 0; j < n_nodes; ++j) {
      if (!cfg.stochastic_flags.empty() && !cfg.stochastic_flags[j]) continue;
      offsets(static_cast<Eigen::Index>(j)) = amp == 0.0 ? 0.0 : rng.uniform(-amp, amp);
    }
    profile.segments.push_back(std::move(offsets));
  }
  return profile;
}

ComplexVector evolve_piecewise_state(const Hamiltonian& h, const DBetaProfile& profile, int inject_label, double z_cm,
                                     const SegmentObserver& observer) {
  require(std::isfinite(z_cm) && z_cm >= 0, ErrorKind::Domain, "propagation distance must be finite and >= 0");
  require(profile.covered_cm() >= z_cm * (1.0 - 1e-12), ErrorKind::InvalidArgument,
          "delta-beta profile is shorter than the propagation distance");
  for (const auto& seg : profile.segments)
    require(static_cast<std::size_t>(seg.size()) == h.size(), ErrorKind::InvalidArgument,
            "profile width does not match the Hamiltonian");

  if (profile.is_zero()) return SpectralPropagator(h).column(inject_label, z_cm);

  ComplexVector psi = basis_state(h.size(), inject_label);
  const double len = profile.segment_length_cm;
  for (std::size_t k = 0; k < profile.segments.size(); ++k) {
    const double start = len * static_cast<double>(k);
    if (start >= z_cm) break;
    const double step = std::min(len, z_cm - start);
    psi = segment_propagator(h, profile.segments[k]).apply(psi, step);
    if (observer) observer(k, psi);
  }
  return psi;
}

ProbabilityDistribution evolve_piecewise(const Hamiltonian& h, const DBetaProfile& profile, int inject_label,
                                         double z_cm) {
  if (profile.is_zero()) {
    require(profile.covered_cm() >= z_cm * (1.0 - 1e-12), ErrorKind::InvalidArgument,
            "delta-beta profile is shorter than the propagation distance");
    return evolve(h, inject_label, z_cm);
  }
  const ComplexVector psi = evolve_piecewise_state(h, profile, inject_label, z_cm);
  ProbabilityDistribution out;
  out.probs.resize(static_cast<std::size_t>(psi.size()));
  for (Eigen::Index j = 0; j < psi.size(); ++j) out.probs[static_cast<std::size_t>(j)] = std::norm(psi(j));
  return out;
}

ProbabilityDistribution qsw_run(const Hamiltonian& h, const DBetaConfig& cfg, int inject_label, double z_cm,
                                const EnsembleOptions& opts) {
  cfg.validate(h.size());
  basis_state(h.size(), inject_label);
  // Without fluctuations every realization is the pure walk.
  if (cfg.is_noiseless() || z_cm == 0.0) return evolve(h, inject_label, z_cm);

  std::vector<std::vector<double>> results(static_cast<std::size_t>(cfg.realizations));
  for_each_realization(cfg.realizations, opts, [&](int r) {
    const auto profile = sample_dbeta_profile(cfg, h.size(), z_cm, static_cast<std::uint64_t>(r));
    results[static_cast<std::size_t>(r)] = evolve_piecewise(h, profile, inject_label, z_cm).probs;
  });
  return {kahan_mean(results)};
}

ProbabilitySeries qsw_series(const Hamiltonian& h, const DBetaConfig& cfg, int inject_label, double z0_cm,
                             double z1_cm, const std::vector<int>& watch, const EnsembleOptions& opts) {
  cfg.validate(h.size());
  if (cfg.is_noiseless()) return probability_series(h, inject_label, z0_cm, z1_cm, watch);

  require(!watch.empty(), ErrorKind::InvalidArgument, "watch set must not be empty");
  for (int w : watch)
    require(w >= 1 && static_cast<std::size_t>(w) <= h.size(), ErrorKind::InvalidArgument,
            "watched node " + std::to_string(w) + " out of range");
  const ComplexVector start = basis_state(h.size(), inject_label);

  ProbabilitySeries series;
  series.z_cm = series_distances(z0_cm, z1_cm);
  for (int w : watch) series.names.push_back(std::to_string(w));
  const std::size_t samples = series.z_cm.size();

  // results[r] is laid out watch-major: [w * samples + k].
  std::vector<std::vector<double>> results(static_cast<std::size_t>(cfg.realizations));
  for_each_realization(cfg.realizations, opts, [&](int r) {
    const auto profile = sample_dbeta_profile(cfg, h.size(), z1_cm, static_cast<std::uint64_t>(r));
    const double len = profile.segment_length_cm;
    std::vector<double> row(watch.size() * samples);
    ComplexVector psi = start;
    std::size_t k = 0;
    for (std::size_t seg = 0; seg < profile.segments.size() && k < samples; ++seg) {
      const double seg_start = len * static_cast<double>(seg);
      const double seg_end = seg + 1 == profile.segments.size() ? std::max(seg_start + len, z1_cm) : seg_start + len;
      const auto prop = segment_propagator(h, profile.segments[seg]);
      for (; k < samples && series.z_cm[k] < seg_end; ++k) {
        const ComplexVector at = prop.apply(psi, series.z_cm[k] - seg_start);
        for (std::size_t w = 0; w < watch.size(); ++w) row[w * samples + k] = std::norm(at(watch[w] - 1));
      }
      psi = prop.apply(psi, len);
    }
    for (; k < samples; ++k)  // only reachable when z1 lands exactly on the last boundary
      for (std::size_t w = 0; w < watch.size(); ++w) row[w * samples + k] = std::norm(psi(watch[w] - 1));
    results[static_cast<std::size_t>(r)] = std::move(row);
  });

  const auto mean = kahan_mean(results);
  series.values.assign(watch.size(), std::vector<double>(samples));
  for (std::size_t w = 0; w < watch.size(); ++w)
    for (std::size_t k = 0; k < samples; ++k) series.values[w][k] = mean[w * samples + k];
  return series;
}

}  // namespace paqs
