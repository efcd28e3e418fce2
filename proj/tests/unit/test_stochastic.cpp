#include <doctest.h>

#include <chrono>
#include <cmath>

#include "../support/oracles.hpp"
#include "paqs/stochastic.hpp"
#include "test_support.hpp"

using namespace paqs;

namespace {

WaveguideLayout line(int n, double d) {
  std::vector<Node> nodes;
  for (int i = 0; i < n; ++i) nodes.push_back({i + 1, i * d, 0.0});
  return WaveguideLayout(nodes);
}

DBetaConfig config(double amp_per_mm, int realizations = 1, std::uint64_t seed = 5) {
  DBetaConfig c;
  c.amplitude_per_mm = amp_per_mm;
  c.z_interval_mm = 0.1;
  c.realizations = realizations;
  c.seed = seed;
  return c;
}

double total_variation(const std::vector<double>& a, const std::vector<double>& b) {
  double tv = 0;
  for (std::size_t i = 0; i < a.size(); ++i) tv += std::abs(a[i] - b[i]);
  return 0.5 * tv;
}

}  // namespace

TEST_SUITE("stochastic") {
  TEST_CASE("segment count is a ceiling division") {
    CHECK(segment_count(0.5, 0.01) == 50);
    CHECK(segment_count(0.3, 0.1) == 3);
    CHECK(segment_count(0.35, 0.1) == 4);
    CHECK(segment_count(1.0, 3.0) == 1);
    const DBetaProfile p = sample_dbeta_profile(config(1.0), 4, 0.5);
    CHECK(p.segments.size() == 50);
    CHECK(p.segment_length_cm == doctest::Approx(0.01));
  }

  TEST_CASE("zero amplitude gives an all-zero profile") {
    CHECK(sample_dbeta_profile(config(0.0), 6, 1.0).is_zero());
  }

  TEST_CASE("offsets stay within the amplitude, converted to 1/cm") {
    const DBetaProfile p = sample_dbeta_profile(config(0.4), 7, 2.0, 3);
    double largest = 0;
    for (const auto& seg : p.segments) largest = std::max(largest, seg.cwiseAbs().maxCoeff());
    CHECK(largest <= 4.0);
    CHECK(largest > 3.0);  // 1400 uniform draws: the extreme is close to the bound
  }

  TEST_CASE("fixed nodes never fluctuate") {
    DBetaConfig c = config(1.0);
    c.stochastic_flags = {true, false, true, false};
    const DBetaProfile p = sample_dbeta_profile(c, 4, 1.0);
    for (const auto& seg : p.segments) {
      CHECK(seg(1) == 0.0);
      CHECK(seg(3) == 0.0);
    }
  }

  TEST_CASE("profiles are reproducible by seed and realization") {
    const auto a = sample_dbeta_profile(config(1.0, 1, 11), 5, 0.7, 2);
    const auto b = sample_dbeta_profile(config(1.0, 1, 11), 5, 0.7, 2);
    const auto c = sample_dbeta_profile(config(1.0, 1, 11), 5, 0.7, 3);
    const auto d = sample_dbeta_profile(config(1.0, 1, 12), 5, 0.7, 2);
    REQUIRE(a.segments.size() == b.segments.size());
    for (std::size_t k = 0; k < a.segments.size(); ++k) CHECK(a.segments[k] == b.segments[k]);
    CHECK(a.segments[0] != c.segments[0]);
    CHECK(a.segments[0] != d.segments[0]);
  }

  TEST_CASE("zero profile reproduces the pure walk") {
    const Hamiltonian h = build_hamiltonian(rectangular_lattice(3, 3, 12, 12));
    const DBetaProfile zero = sample_dbeta_profile(config(0.0), 9, 1.0);
    const auto a = evolve_piecewise(h, zero, 5, 1.0);
    const auto b = evolve(h, 5, 1.0);
    for (std::size_t j = 0; j < 9; ++j) CHECK(std::abs(a.probs[j] - b.probs[j]) <= 1e-12);
  }

  TEST_CASE("every segment preserves the norm") {
    const Hamiltonian h = build_hamiltonian(line(6, 12));
    const DBetaProfile p = sample_dbeta_profile(config(1.2), 6, 0.8);
    std::size_t seen = 0;
    const ComplexVector psi = evolve_piecewise_state(h, p, 3, 0.8, [&](std::size_t, const ComplexVector& s) {
      ++seen;
      CHECK(std::abs(s.squaredNorm() - 1.0) <= 1e-12);
    });
    CHECK(seen == p.segments.size());
    CHECK(std::abs(psi.squaredNorm() - 1.0) <= 1e-12);
  }

  TEST_CASE("a too-short profile is rejected") {
    const Hamiltonian h = build_hamiltonian(line(3, 12));
    const DBetaProfile p = sample_dbeta_profile(config(1.0), 3, 0.5);
    CHECK_PAQS_ERROR(evolve_piecewise(h, p, 1, 0.6), ErrorKind::InvalidArgument);
  }

  TEST_CASE("piecewise propagation matches a fine-step RK4 integration") {
    const std::vector<Node> nodes{{1, 0, 0}, {2, 14, 2}, {3, 27, -1}, {4, 8, 13}, {5, 22, 12}, {6, 3, -14}, {7, 18, -13}};
    const WaveguideLayout layout(nodes);
    const Hamiltonian h = build_hamiltonian(layout);
    const double z = 1.0;
    const DBetaProfile p = sample_dbeta_profile(config(0.4), 7, z, 0);
    const auto piecewise = evolve_piecewise(h, p, 1, z);

    oracle::CVec psi = oracle::CVec::Zero(7);
    psi(0) = 1.0;
    for (const RealVector& seg : p.segments) {
      oracle::CMat k = h.matrix();
      for (int i = 0; i < 7; ++i) k(i, i) += seg(i);
      psi = oracle::rk4_segment(k, psi, p.segment_length_cm, 100);
    }
    std::vector<double> expected(7);
    for (int i = 0; i < 7; ++i) expected[static_cast<std::size_t>(i)] = std::norm(psi(i));
    CHECK(total_variation(piecewise.probs, expected) <= 1e-4);
  }

  TEST_CASE("ensemble mean is normalized and equals the single realization for n = 1") {
    const Hamiltonian h = build_hamiltonian(rectangular_lattice(3, 3, 12, 12));
    const auto one = qsw_run(h, config(1.0, 1, 21), 5, 0.6);
    const auto direct = evolve_piecewise(h, sample_dbeta_profile(config(1.0, 1, 21), 9, 0.6, 0), 5, 0.6);
    CHECK(one.probs == direct.probs);
    const auto many = qsw_run(h, config(1.0, 30, 21), 5, 0.6);
    CHECK(std::abs(many.total() - 1.0) <= 1e-10);
  }

  TEST_CASE("zero amplitude is byte-identical to the pure walk for any ensemble size") {
    const Hamiltonian h = build_hamiltonian(line(8, 13));
    CHECK(qsw_run(h, config(0.0, 17), 3, 2.0).probs == evolve(h, 3, 2.0).probs);
    DBetaConfig frozen = config(1.0, 5);
    frozen.stochastic_flags.assign(8, false);
    CHECK(qsw_run(h, frozen, 3, 2.0).probs == evolve(h, 3, 2.0).probs);
  }

  TEST_CASE("results do not depend on the thread count") {
    const Hamiltonian h = build_hamiltonian(rectangular_lattice(4, 4, 12, 12));
    EnsembleOptions serial, parallel;
    parallel.threads = 8;
    const auto a = qsw_run(h, config(1.0, 24, 99), 6, 0.5, serial);
    const auto b = qsw_run(h, config(1.0, 24, 99), 6, 0.5, parallel);
    CHECK(a.probs == b.probs);
    const auto sa = qsw_series(h, config(1.0, 12, 99), 6, 0.1, 0.5, {1, 6}, serial);
    const auto sb = qsw_series(h, config(1.0, 12, 99), 6, 0.1, 0.5, {1, 6}, parallel);
    CHECK(sa.values == sb.values);
  }

  TEST_CASE("series: shape, range and degeneration") {
    const Hamiltonian h = build_hamiltonian(rectangular_lattice(5, 5, 12, 12));
    const auto s = qsw_series(h, config(1.0, 4, 1), 13, 0.0, 0.5, {1, 13});
    REQUIRE(s.z_cm.size() == 100);
    CHECK(s.values[1][0] == doctest::Approx(1.0).epsilon(1e-15));
    for (const auto& item : s.values)
      for (double v : item) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0 + 1e-12);
      }
    const auto q = qsw_series(h, config(0.0, 4, 1), 13, 0.2, 0.5, {1, 13});
    const auto w = probability_series(h, 13, 0.2, 0.5, {1, 13});
    for (std::size_t i = 0; i < 2; ++i)
      for (std::size_t k = 0; k < 100; ++k) CHECK(std::abs(q.values[i][k] - w.values[i][k]) <= 1e-12);
    CHECK_PAQS_ERROR(qsw_series(h, config(1.0), 13, 0.0, 0.5, {26}), ErrorKind::InvalidArgument);
  }

  TEST_CASE("series sample at the end matches the endpoint run") {
    const Hamiltonian h = build_hamiltonian(line(5, 12));
    const auto s = qsw_series(h, config(1.0, 6, 4), 3, 0.0, 0.55, {1, 2, 3, 4, 5});
    const auto run = qsw_run(h, config(1.0, 6, 4), 3, 0.55);
    for (std::size_t j = 0; j < 5; ++j) CHECK(std::abs(s.values[j].back() - run.probs[j]) <= 1e-12);
  }

  TEST_CASE("an expired deadline raises a budget error") {
    const Hamiltonian h = build_hamiltonian(line(5, 12));
    EnsembleOptions opts;
    opts.deadline = std::chrono::steady_clock::now() - std::chrono::seconds(1);
    CHECK_PAQS_ERROR(qsw_run(h, config(1.0, 3), 1, 0.5, opts), ErrorKind::Budget);
  }

  TEST_CASE("configuration validation") {
    const Hamiltonian h = build_hamiltonian(line(3, 12));
    CHECK_PAQS_ERROR(qsw_run(h, config(-1.0), 1, 0.5), ErrorKind::Domain);
    DBetaConfig c = config(1.0, 0);
    CHECK_PAQS_ERROR(qsw_run(h, c, 1, 0.5), ErrorKind::InvalidArgument);
    CHECK_PAQS_ERROR(sample_dbeta_profile(config(1.0), 0, 1.0), ErrorKind::InvalidArgument);
  }
}
