#include "paqs/fock.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "paqs/detail/parallel.hpp"
#include "paqs/error.hpp"

namespace paqs {

FockConfiguration::FockConfiguration(std::vector<int> occupations) : occ_(std::move(occupations)) {
  for (int o : occ_) require(o >= 0, ErrorKind::InvalidArgument, "occupation numbers must be non-negative");
  photons_ = std::accumulate(occ_.begin(), occ_.end(), 0);
}

int FockConfiguration::max_occupation() const noexcept {
  return occ_.empty() ? 0 : *std::max_element(occ_.begin(), occ_.end());
}

FockConfiguration FockConfiguration::plus(int mode0) const {
  require(mode0 >= 0 && mode0 < modes(), ErrorKind::InvalidArgument, "mode index out of range");
  auto occ = occ_;
  ++occ[static_cast<std::size_t>(mode0)];
  return FockConfiguration(std::move(occ));
}

const char* to_string(ParticleStatistics stats) noexcept {
  switch (stats) {
    case ParticleStatistics::Bosonic: return "bosonic";
    case ParticleStatistics::Fermionic: return "fermionic";
    case ParticleStatistics::Distinguishable: return "distinguishable";
  }
  return "unknown";
}

ParticleStatistics particle_statistics_from_string(const std::string& name) {
  for (auto s : {ParticleStatistics::Bosonic, ParticleStatistics::Fermionic, ParticleStatistics::Distinguishable})
    if (name == to_string(s)) return s;
  fail(ErrorKind::InvalidArgument, "unknown particle statistics '" + name + "' (bosonic|fermionic|distinguishable)");
}

namespace {

[[noreturn]] void bad_state(const std::string& text, const std::string& why) {
  throw FormatError("", 0, 0, "state '" + text + "': " + why);
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

int parse_int(const std::string& whole, const std::string& field) {
  const std::string f = trim(field);
  int value = 0;
  const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), value);
  if (f.empty() || ec != std::errc() || ptr != f.data() + f.size()) bad_state(whole, "'" + f + "' is not an integer");
  return value;
}

double factorial_product(const FockConfiguration& c) {
  double p = 1.0;
  for (int o : c.occupations())
    for (int k = 2; k <= o; ++k) p *= k;
  return p;
}

void check_modes(const ComplexMatrix& u, const FockConfiguration& c, const char* what) {
  require(u.rows() == u.cols(), ErrorKind::InvalidArgument, "unitary must be square");
  require(c.modes() == u.rows(), ErrorKind::InvalidArgument,
          std::string(what) + " has " + std::to_string(c.modes()) + " modes but the unitary has " +
              std::to_string(u.rows()));
}

void check_input(const ComplexMatrix& u, const FockConfiguration& s, ParticleStatistics stats,
                 const MultiParticleOptions& opts) {
  check_modes(u, s, "input state");
  require(s.photons() >= 1, ErrorKind::InvalidArgument, "input state must contain at least one photon");
  if (stats == ParticleStatistics::Fermionic)
    require(s.collision_free(), ErrorKind::Domain,
            "fermionic input " + format_state(s) + " places more than one particle in a mode (Pauli exclusion)");
  if (stats == ParticleStatistics::Distinguishable && opts.distinguishable == DistinguishableFormula::PerDetAverage)
    require(s.collision_free(), ErrorKind::Domain,
            "the per/det-average distinguishable formula needs a collision-free input; " + format_state(s) +
                " is multiply occupied (use the independent-photon formula)");
}

double probability_unchecked(const ComplexMatrix& u, const FockConfiguration& s, const FockConfiguration& t,
                             ParticleStatistics stats, const MultiParticleOptions& opts) {
  if (stats == ParticleStatistics::Fermionic && !t.collision_free()) return 0.0;
  const ComplexMatrix sub = scattering_submatrix(u, s, t);
  const double norm = factorial_product(s) * factorial_product(t);
  switch (stats) {
    case ParticleStatistics::Bosonic: return std::norm(permanent(sub, opts.permanent)) / norm;
    case ParticleStatistics::Fermionic: return std::norm(determinant(sub)) / norm;
    case ParticleStatistics::Distinguishable:
      if (opts.distinguishable == DistinguishableFormula::PerDetAverage)
        return 0.5 * (std::norm(permanent(sub, opts.permanent)) + std::norm(determinant(sub))) / norm;
      return permanent(sub.cwiseAbs2().cast<Complex>(), opts.permanent).real() / factorial_product(t);
  }
  return 0.0;
}

}  // namespace

FockConfiguration parse_state(const std::string& raw, int modes) {
  require(modes >= 1, ErrorKind::InvalidArgument, "mode count must be at least 1");
  const std::string text = trim(raw);
  if (text.size() < 2 || text.front() != '|' || text.back() != '>') bad_state(raw, "expected |...>");
  const std::string inner = text.substr(1, text.size() - 2);
  std::vector<int> occ(static_cast<std::size_t>(modes), 0);

  if (inner.find_first_of(",;") != std::string::npos || trim(inner).empty()) {
    std::set<int> seen;
    std::size_t pos = 0;
    while (pos <= inner.size() && !trim(inner).empty()) {
      const auto end = std::min(inner.find(';', pos), inner.size());
      const std::string entry = inner.substr(pos, end - pos);
      const auto comma = entry.find(',');
      if (comma == std::string::npos || entry.find(',', comma + 1) != std::string::npos)
        bad_state(raw, "sparse entry '" + trim(entry) + "' must be 'mode,count'");
      const int mode = parse_int(raw, entry.substr(0, comma));
      const int count = parse_int(raw, entry.substr(comma + 1));
      if (mode < 1 || mode > modes)
        bad_state(raw, "mode " + std::to_string(mode) + " outside 1.." + std::to_string(modes));
      if (count < 0) bad_state(raw, "negative occupation");
      if (!seen.insert(mode).second) bad_state(raw, "mode " + std::to_string(mode) + " listed twice");
      occ[static_cast<std::size_t>(mode - 1)] = count;
      pos = end + 1;
    }
    return FockConfiguration(std::move(occ));
  }

  std::size_t m = 0;
  for (char ch : inner) {
    if (std::isspace(static_cast<unsigned char>(ch))) continue;
    if (!std::isdigit(static_cast<unsigned char>(ch))) bad_state(raw, std::string("unexpected character '") + ch + "'");
    if (m >= occ.size()) bad_state(raw, "more than " + std::to_string(modes) + " occupations");
    occ[m++] = ch - '0';
  }
  if (m != occ.size())
    bad_state(raw, "dense form lists " + std::to_string(m) + " occupations, expected " + std::to_string(modes));
  return FockConfiguration(std::move(occ));
}

std::string format_state(const FockConfiguration& c, StateFormat format) {
  if (format == StateFormat::Auto)
    format = c.modes() <= 16 && c.max_occupation() <= 9 ? StateFormat::Dense : StateFormat::Sparse;
  std::string out = "|";
  if (format == StateFormat::Dense) {
    require(c.max_occupation() <= 9, ErrorKind::InvalidArgument, "dense state form needs single-digit occupations");
    for (int o : c.occupations()) out += static_cast<char>('0' + o);
  } else {
    bool first = true;
    for (int i = 0; i < c.modes(); ++i) {
      if (c[i] == 0) continue;
      if (!first) out += ';';
      out += std::to_string(i + 1) + "," + std::to_string(c[i]);
      first = false;
    }
  }
  return out + ">";
}

std::uint64_t multiset_count(int modes, int photons) {
  require(modes >= 1 && photons >= 0, ErrorKind::InvalidArgument, "need modes >= 1 and photons >= 0");
  // C(N + M - 1, N) built incrementally; each partial product is an exact binomial.
  const int k = std::min(photons, modes - 1);
  const std::uint64_t total = static_cast<std::uint64_t>(photons) + static_cast<std::uint64_t>(modes) - 1;
  unsigned __int128 c = 1;
  for (int i = 1; i <= k; ++i) {
    c = c * (total - static_cast<std::uint64_t>(k) + static_cast<std::uint64_t>(i)) / static_cast<std::uint64_t>(i);
    if (c > std::numeric_limits<std::uint64_t>::max()) return std::numeric_limits<std::uint64_t>::max();
  }
  return static_cast<std::uint64_t>(c);
}

std::vector<FockConfiguration> enumerate_configurations(int modes, int photons) {
  const std::uint64_t count = multiset_count(modes, photons);
  require(count <= kMaxEnumeratedConfigurations, ErrorKind::Limit,
          std::to_string(count) + " configurations exceed the enumeration limit of " +
              std::to_string(kMaxEnumeratedConfigurations) + "; supply an explicit watch list instead");
  std::vector<FockConfiguration> out;
  out.reserve(static_cast<std::size_t>(count));
  std::vector<int> c(static_cast<std::size_t>(modes), 0);
  c[0] = photons;
  while (true) {
    out.emplace_back(c);
    // Rightmost non-final position holding a photon moves one photon right
    // and collects everything behind it.
    int i = modes - 2;
    while (i >= 0 && c[static_cast<std::size_t>(i)] == 0) --i;
    if (i < 0) break;
    const int tail = c[static_cast<std::size_t>(modes - 1)];
    --c[static_cast<std::size_t>(i)];
    c[static_cast<std::size_t>(modes - 1)] = 0;
    c[static_cast<std::size_t>(i + 1)] = tail + 1;
  }
  return out;
}

ComplexMatrix scattering_submatrix(const ComplexMatrix& u, const FockConfiguration& s, const FockConfiguration& t) {
  check_modes(u, s, "input state");
  check_modes(u, t, "output state");
  require(s.photons() == t.photons(), ErrorKind::InvalidArgument,
          "photon number mismatch: input has " + std::to_string(s.photons()) + ", output has " +
              std::to_string(t.photons()));
  std::vector<Eigen::Index> cols, rows;
  for (int i = 0; i < s.modes(); ++i)
    for (int k = 0; k < s[i]; ++k) cols.push_back(i);
  for (int j = 0; j < t.modes(); ++j)
    for (int k = 0; k < t[j]; ++k) rows.push_back(j);
  const auto n = static_cast<Eigen::Index>(cols.size());
  ComplexMatrix sub(n, n);
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = 0; b < n; ++b) sub(a, b) = u(rows[static_cast<std::size_t>(a)], cols[static_cast<std::size_t>(b)]);
  return sub;
}

double transition_probability(const ComplexMatrix& u, const FockConfiguration& s, const FockConfiguration& t,
                              ParticleStatistics stats, const MultiParticleOptions& opts) {
  check_input(u, s, stats, opts);
  check_modes(u, t, "output state");
  require(s.photons() == t.photons(), ErrorKind::InvalidArgument, "photon number mismatch between input and output");
  return probability_unchecked(u, s, t, stats, opts);
}

double OutputDistribution::total() const {
  double sum = 0.0;
  for (const auto& [c, p] : entries) sum += p;
  return sum;
}

std::optional<double> OutputDistribution::probability(const FockConfiguration& c) const {
  // Entries are sorted descending, so search with the reversed comparison.
  auto it = std::lower_bound(entries.begin(), entries.end(), c,
                             [](const auto& entry, const FockConfiguration& key) { return entry.first > key; });
  if (it == entries.end() || it->first != c) return std::nullopt;
  return it->second;
}

OutputDistribution full_distribution(const ComplexMatrix& u, const FockConfiguration& s, ParticleStatistics stats,
                                     const MultiParticleOptions& opts) {
  check_input(u, s, stats, opts);
  auto configs = enumerate_configurations(s.modes(), s.photons());
  std::vector<double> probs(configs.size());
  detail::parallel_for(configs.size(), opts.threads,
                       [&](std::size_t i) { probs[i] = probability_unchecked(u, s, configs[i], stats, opts); });
  OutputDistribution dist;
  dist.entries.reserve(configs.size());
  for (std::size_t i = 0; i < configs.size(); ++i) dist.entries.emplace_back(std::move(configs[i]), probs[i]);
  return dist;
}

RealMatrix two_particle_correlation(const ComplexMatrix& u, const FockConfiguration& s, ParticleStatistics stats,
                                    const FockConfiguration& fixed, const MultiParticleOptions& opts) {
  check_input(u, s, stats, opts);
  check_modes(u, fixed, "perspective state");
  require(fixed.photons() == s.photons() - 2, ErrorKind::InvalidArgument,
          "perspective must pin exactly N - 2 = " + std::to_string(s.photons() - 2) + " photons");
  const int m = s.modes();
  RealMatrix gamma = RealMatrix::Zero(m, m);
  for (int q = 0; q < m; ++q)
    for (int r = q; r < m; ++r) {
      const double p = probability_unchecked(u, s, fixed.plus(q).plus(r), stats, opts);
      gamma(q, r) = p;
      gamma(r, q) = p;
    }
  return gamma;
}

std::vector<double> single_photon_marginal(const OutputDistribution& dist) {
  require(!dist.entries.empty(), ErrorKind::InvalidArgument, "empty distribution");
  const int m = dist.entries.front().first.modes();
  const int n = dist.entries.front().first.photons();
  require(n >= 1, ErrorKind::InvalidArgument, "distribution has no photons");
  std::vector<double> marginal(static_cast<std::size_t>(m), 0.0);
  for (const auto& [t, p] : dist.entries)
    for (int j = 0; j < m; ++j) marginal[static_cast<std::size_t>(j)] += t[j] * p;
  for (auto& v : marginal) v /= n;
  return marginal;
}

std::vector<double> single_photon_marginal(const ComplexMatrix& u, const FockConfiguration& s,
                                           ParticleStatistics stats, const MultiParticleOptions& opts) {
  return single_photon_marginal(full_distribution(u, s, stats, opts));
}

ProbabilitySeries state_probability_series(const Hamiltonian& h, const FockConfiguration& s, ParticleStatistics stats,
                                           const std::vector<FockConfiguration>& watch, double z0_cm, double z1_cm,
                                           const MultiParticleOptions& opts) {
  require(!watch.empty(), ErrorKind::InvalidArgument, "watch list must not be empty");
  const ComplexMatrix identity = ComplexMatrix::Identity(static_cast<Eigen::Index>(h.size()), static_cast<Eigen::Index>(h.size()));
  check_input(identity, s, stats, opts);
  for (const auto& t : watch) {
    check_modes(identity, t, "watched state");
    require(t.photons() == s.photons(), ErrorKind::InvalidArgument,
            "watched state " + format_state(t) + " has " + std::to_string(t.photons()) + " photons, expected " +
                std::to_string(s.photons()));
  }
  const SpectralPropagator prop(h);
  ProbabilitySeries series;
  series.z_cm = series_distances(z0_cm, z1_cm);
  for (const auto& t : watch) series.names.push_back(format_state(t));
  series.values.assign(watch.size(), std::vector<double>(series.z_cm.size()));
  detail::parallel_for(series.z_cm.size(), opts.threads, [&](std::size_t k) {
    const ComplexMatrix u = prop.unitary(series.z_cm[k]);
    for (std::size_t w = 0; w < watch.size(); ++w) series.values[w][k] = probability_unchecked(u, s, watch[w], stats, opts);
  });
  return series;
}

}  // namespace paqs
