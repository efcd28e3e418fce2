#include <doctest.h>

#include <cmath>

#include "../support/oracles.hpp"
#include "paqs/fock.hpp"
#include "test_support.hpp"

using namespace paqs;

namespace {

ComplexMatrix balanced_splitter() {
  const double a = 1.0 / std::sqrt(2.0);
  ComplexMatrix u(2, 2);
  u << a, -a, a, a;
  return u;
}

FockConfiguration fc(std::vector<int> occ) { return FockConfiguration(std::move(occ)); }

double probability_of(const OutputDistribution& d, const std::string& state, int modes) {
  const auto p = d.probability(parse_state(state, modes));
  REQUIRE(p.has_value());
  return *p;
}

}  // namespace

TEST_SUITE("fock") {
  TEST_CASE("dense and sparse grammars") {
    CHECK(parse_state("|101>", 3) == fc({1, 0, 1}));
    CHECK(parse_state("  |1 0 1>  ", 3) == fc({1, 0, 1}));
    CHECK(parse_state("|1,1;3,1>", 3) == fc({1, 0, 1}));
    CHECK(parse_state("|2,3>", 4) == fc({0, 3, 0, 0}));
    CHECK(parse_state("|>", 2) == fc({0, 0}));
    CHECK(parse_state("|12,1;1,2>", 12).occupations()[11] == 1);
  }

  TEST_CASE("malformed states are format errors") {
    for (const char* bad : {"101", "|10>", "|1011>", "|1a1>", "|4,1>", "|1,1;1,1>", "|1,-1>", "|1;1>", "|1,x>"}) {
      CAPTURE(bad);
      CHECK_PAQS_ERROR(parse_state(bad, 3), ErrorKind::Format);
    }
    CHECK_PAQS_ERROR(parse_state("|1>", 0), ErrorKind::InvalidArgument);
  }

  TEST_CASE("format and parse round-trip") {
    for (int m = 1; m <= 5; ++m)
      for (int n = 0; n <= 3; ++n)
        for (const auto& c : enumerate_configurations(m, n))
          for (StateFormat f : {StateFormat::Auto, StateFormat::Dense, StateFormat::Sparse})
            CHECK(parse_state(format_state(c, f), m) == c);
    CHECK(format_state(fc({1, 0, 1})) == "|101>");
    CHECK(format_state(fc({1, 0, 1}), StateFormat::Sparse) == "|1,1;3,1>");
    std::vector<int> wide(17, 0);
    wide[16] = 1;
    CHECK(format_state(fc(wide)) == "|17,1>");
    CHECK(format_state(fc({12, 0})) == "|1,12>");
    CHECK_PAQS_ERROR(format_state(fc({12, 0}), StateFormat::Dense), ErrorKind::InvalidArgument);
  }

  TEST_CASE("enumeration is complete, unique and descending") {
    for (int m = 1; m <= 6; ++m)
      for (int n = 0; n <= 4; ++n) {
        const auto all = enumerate_configurations(m, n);
        CHECK(all.size() == oracle::binomial(n + m - 1, n));
        CHECK(multiset_count(m, n) == all.size());
        for (std::size_t k = 1; k < all.size(); ++k) CHECK(all[k - 1] > all[k]);
        for (const auto& c : all) CHECK(c.photons() == n);
      }
    const auto three = enumerate_configurations(3, 2);
    CHECK(format_state(three.front()) == "|200>");
    CHECK(format_state(three.back()) == "|002>");
    CHECK(multiset_count(12, 3) == 364);
    CHECK_PAQS_ERROR(enumerate_configurations(60, 12), ErrorKind::Limit);
  }

  TEST_CASE("scattering submatrix repeats columns by input and rows by output") {
    ComplexMatrix u(3, 3);
    u << 1, 2, 3, 4, 5, 6, 7, 8, 9;
    const ComplexMatrix sub = scattering_submatrix(u, fc({2, 0, 1}), fc({0, 1, 2}));
    ComplexMatrix expected(3, 3);
    expected << 4, 4, 6, 7, 7, 9, 7, 7, 9;
    CHECK(sub == expected);
    CHECK_PAQS_ERROR(scattering_submatrix(u, fc({1, 0, 0}), fc({1, 1, 0})), ErrorKind::InvalidArgument);
  }

  TEST_CASE("two-photon interference on a balanced splitter") {
    const ComplexMatrix u = balanced_splitter();
    const FockConfiguration s = fc({1, 1});
    const auto b = full_distribution(u, s, ParticleStatistics::Bosonic);
    CHECK(probability_of(b, "|20>", 2) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(probability_of(b, "|02>", 2) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(probability_of(b, "|11>", 2) <= 1e-12);
    const auto f = full_distribution(u, s, ParticleStatistics::Fermionic);
    CHECK(probability_of(f, "|11>", 2) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(probability_of(f, "|20>", 2) == 0.0);
    CHECK(probability_of(f, "|02>", 2) == 0.0);
    const auto d = full_distribution(u, s, ParticleStatistics::Distinguishable);
    CHECK(probability_of(d, "|20>", 2) == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(probability_of(d, "|11>", 2) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(probability_of(d, "|02>", 2) == doctest::Approx(0.25).epsilon(1e-12));
  }

  TEST_CASE("both distinguishable formulas agree for two photons") {
    // |ad + bc|^2 + |ad - bc|^2 = 2 (|ad|^2 + |bc|^2), which is 2 Per(|U|^2).
    MultiParticleOptions indep;
    indep.distinguishable = DistinguishableFormula::IndependentPhotons;
    for (int trial = 0; trial < 10; ++trial) {
      const ComplexMatrix u = oracle::random_unitary(4);
      const FockConfiguration s = fc({1, 0, 0, 1});
      for (const auto& t : enumerate_configurations(4, 2))
        CHECK(std::abs(transition_probability(u, s, t, ParticleStatistics::Distinguishable) -
                       transition_probability(u, s, t, ParticleStatistics::Distinguishable, indep)) <= 1e-12);
    }
  }

  TEST_CASE("the per/det average departs from independent photons beyond two") {
    MultiParticleOptions indep;
    indep.distinguishable = DistinguishableFormula::IndependentPhotons;
    const ComplexMatrix u = oracle::random_unitary(4);
    const FockConfiguration s = fc({1, 0, 1, 1});
    double largest_gap = 0;
    for (const auto& t : enumerate_configurations(4, 3))
      largest_gap = std::max(largest_gap, std::abs(transition_probability(u, s, t, ParticleStatistics::Distinguishable) -
                                                   transition_probability(u, s, t, ParticleStatistics::Distinguishable, indep)));
    CHECK(largest_gap > 1e-3);
    CHECK(full_distribution(u, s, ParticleStatistics::Distinguishable).total() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(full_distribution(u, s, ParticleStatistics::Distinguishable, indep).total() ==
          doctest::Approx(1.0).epsilon(1e-12));
  }

  TEST_CASE("independent photons handle bunched inputs") {
    MultiParticleOptions indep;
    indep.distinguishable = DistinguishableFormula::IndependentPhotons;
    const ComplexMatrix u = oracle::random_unitary(3);
    const FockConfiguration s = fc({2, 0, 0});
    const double p0 = std::norm(u(0, 0));
    CHECK(transition_probability(u, s, fc({2, 0, 0}), ParticleStatistics::Distinguishable, indep) ==
          doctest::Approx(p0 * p0).epsilon(1e-12));
    const auto d = full_distribution(u, fc({2, 1, 0}), ParticleStatistics::Distinguishable, indep);
    CHECK(std::abs(d.total() - 1.0) <= 1e-12);
    CHECK_PAQS_ERROR(full_distribution(u, s, ParticleStatistics::Distinguishable), ErrorKind::Domain);
  }

  TEST_CASE("bosonic probabilities match first quantisation and normalise") {
    for (int m = 2; m <= 5; ++m)
      for (int n = 1; n <= 3; ++n) {
        const ComplexMatrix u = oracle::random_unitary(m);
        for (const auto& s : enumerate_configurations(m, n)) {
          const auto dist = full_distribution(u, s, ParticleStatistics::Bosonic);
          CHECK(std::abs(dist.total() - 1.0) <= 1e-10);
          for (const auto& [t, p] : dist.entries)
            CHECK(std::abs(p - oracle::boson_probability_first_quantised(u, s.occupations(), t.occupations())) <= 1e-12);
        }
      }
  }

  TEST_CASE("fermionic and distinguishable distributions normalise") {
    for (int m = 3; m <= 6; ++m) {
      const ComplexMatrix u = oracle::random_unitary(m);
      std::vector<int> occ(static_cast<std::size_t>(m), 0);
      occ[0] = occ[2] = 1;
      const FockConfiguration s(occ);
      for (ParticleStatistics st : {ParticleStatistics::Fermionic, ParticleStatistics::Distinguishable}) {
        const auto d = full_distribution(u, s, st);
        CHECK(std::abs(d.total() - 1.0) <= 1e-10);
        for (const auto& [t, p] : d.entries) CHECK(p >= -1e-15);
      }
    }
  }

  TEST_CASE("Pauli exclusion and input validation") {
    const ComplexMatrix u = oracle::random_unitary(3);
    CHECK_PAQS_ERROR(full_distribution(u, fc({2, 0, 0}), ParticleStatistics::Fermionic), ErrorKind::Domain);
    CHECK_PAQS_ERROR(full_distribution(u, fc({0, 0, 0}), ParticleStatistics::Bosonic), ErrorKind::InvalidArgument);
    CHECK_PAQS_ERROR(full_distribution(u, fc({1, 0}), ParticleStatistics::Bosonic), ErrorKind::InvalidArgument);
    CHECK_PAQS_ERROR(transition_probability(u, fc({1, 0, 0}), fc({1, 1, 0}), ParticleStatistics::Bosonic),
                     ErrorKind::InvalidArgument);
    CHECK(transition_probability(u, fc({1, 1, 0}), fc({2, 0, 0}), ParticleStatistics::Fermionic) == 0.0);
  }

  TEST_CASE("statistics names") {
    for (ParticleStatistics s : {ParticleStatistics::Bosonic, ParticleStatistics::Fermionic,
                                 ParticleStatistics::Distinguishable})
      CHECK(particle_statistics_from_string(to_string(s)) == s);
    CHECK_PAQS_ERROR(particle_statistics_from_string("anyonic"), ErrorKind::InvalidArgument);
  }

  TEST_CASE("single photon reproduces the one-particle walk") {
    const Hamiltonian h = build_hamiltonian(rectangular_lattice(3, 3, 13, 13));
    const ComplexMatrix u = unitary_propagator(h, 0.7);
    std::vector<int> occ(9, 0);
    occ[4] = 1;
    const FockConfiguration s(occ);
    const auto walk = evolve(h, 5, 0.7);
    for (ParticleStatistics st : {ParticleStatistics::Bosonic, ParticleStatistics::Fermionic,
                                  ParticleStatistics::Distinguishable}) {
      const auto marginal = single_photon_marginal(u, s, st);
      for (std::size_t j = 0; j < 9; ++j) CHECK(std::abs(marginal[j] - walk.probs[j]) <= 1e-12);
    }
  }

  TEST_CASE("marginal sums to one and is invariant for distinguishable photons") {
    const ComplexMatrix u = oracle::random_unitary(5);
    const FockConfiguration s = fc({1, 1, 0, 1, 0});
    for (ParticleStatistics st : {ParticleStatistics::Bosonic, ParticleStatistics::Fermionic,
                                  ParticleStatistics::Distinguishable}) {
      const auto m = single_photon_marginal(u, s, st);
      double sum = 0;
      for (double v : m) sum += v;
      CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    }
    // Linear optics: the mean photon number in each output is the same for
    // every statistics.
    const auto b = single_photon_marginal(u, s, ParticleStatistics::Bosonic);
    const auto f = single_photon_marginal(u, s, ParticleStatistics::Fermionic);
    for (std::size_t j = 0; j < 5; ++j) {
      double expected = 0;
      for (int i : {0, 1, 3}) expected += std::norm(u(static_cast<Eigen::Index>(j), i));
      CHECK(std::abs(b[j] - expected / 3) <= 1e-12);
      CHECK(std::abs(f[j] - expected / 3) <= 1e-12);
    }
  }

  TEST_CASE("two-particle correlation") {
    const ComplexMatrix u = oracle::random_unitary(4);
    const FockConfiguration s = fc({0, 1, 1, 0});
    const RealMatrix g = two_particle_correlation(u, s, ParticleStatistics::Bosonic, FockConfiguration::vacuum(4));
    CHECK(g.isApprox(g.transpose(), 1e-14));
    double sum = 0;
    for (int q = 0; q < 4; ++q)
      for (int r = q; r < 4; ++r) sum += g(q, r);
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    const RealMatrix gf = two_particle_correlation(u, s, ParticleStatistics::Fermionic, FockConfiguration::vacuum(4));
    for (int q = 0; q < 4; ++q) CHECK(gf(q, q) == 0.0);

    const FockConfiguration three = fc({1, 1, 1, 0});
    const FockConfiguration pinned = fc({1, 0, 0, 0});
    const RealMatrix g3 = two_particle_correlation(u, three, ParticleStatistics::Bosonic, pinned);
    const auto dist = full_distribution(u, three, ParticleStatistics::Bosonic);
    CHECK(g3(1, 2) == doctest::Approx(*dist.probability(fc({1, 1, 1, 0}))).epsilon(1e-12));
    CHECK(g3(0, 0) == doctest::Approx(*dist.probability(fc({3, 0, 0, 0}))).epsilon(1e-12));
    CHECK_PAQS_ERROR(two_particle_correlation(u, three, ParticleStatistics::Bosonic, FockConfiguration::vacuum(4)),
                     ErrorKind::InvalidArgument);
  }

  TEST_CASE("state probability series") {
    const Hamiltonian h = build_hamiltonian(rectangular_lattice(2, 1, 15, 15));
    const FockConfiguration s = fc({1, 1});
    const auto series = state_probability_series(h, s, ParticleStatistics::Bosonic,
                                                 {fc({2, 0}), fc({1, 1}), fc({0, 2})}, 0.0, 2.0);
    REQUIRE(series.z_cm.size() == 100);
    CHECK(series.names == std::vector<std::string>{"|20>", "|11>", "|02>"});
    CHECK(series.values[1][0] == doctest::Approx(1.0).epsilon(1e-14));
    for (std::size_t k = 0; k < 100; ++k) {
      const double total = series.values[0][k] + series.values[1][k] + series.values[2][k];
      CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
      const ComplexMatrix u = unitary_propagator(h, series.z_cm[k]);
      CHECK(std::abs(series.values[1][k] - oracle::boson_probability_first_quantised(u, {1, 1}, {1, 1})) <= 1e-12);
    }
    CHECK_PAQS_ERROR(state_probability_series(h, s, ParticleStatistics::Bosonic, {fc({1, 0})}, 0, 1),
                     ErrorKind::InvalidArgument);
  }

  TEST_CASE("parallel evaluation matches serial") {
    const ComplexMatrix u = oracle::random_unitary(7);
    const FockConfiguration s = fc({1, 1, 1, 0, 0, 0, 0});
    MultiParticleOptions par;
    par.threads = 4;
    const auto a = full_distribution(u, s, ParticleStatistics::Bosonic);
    const auto b = full_distribution(u, s, ParticleStatistics::Bosonic, par);
    REQUIRE(a.entries.size() == b.entries.size());
    for (std::size_t k = 0; k < a.entries.size(); ++k) CHECK(a.entries[k].second == b.entries[k].second);
  }
}
