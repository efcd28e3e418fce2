#include <doctest.h>

#include <cmath>
#include <numbers>

#include "../support/oracles.hpp"
#include "paqs/propagator.hpp"
#include "test_support.hpp"

using namespace paqs;

namespace {

WaveguideLayout line(int n, double d) {
  std::vector<Node> nodes;
  for (int i = 0; i < n; ++i) nodes.push_back({i + 1, i * d, 0.0});
  return WaveguideLayout(nodes);
}

double max_abs(const ComplexMatrix& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_SUITE("propagator") {
  TEST_CASE("z = 0 gives the identity") {
    const Hamiltonian h = build_hamiltonian(rectangular_lattice(4, 3, 12, 12));
    CHECK(max_abs(unitary_propagator(h, 0.0) - ComplexMatrix::Identity(12, 12)) <= 1e-14);
  }

  TEST_CASE("propagator is unitary for random Hermitian matrices") {
    for (int trial = 0; trial < 20; ++trial) {
      const int n = 2 + trial * 3;
      const ComplexMatrix h = oracle::random_hermitian(n);
      const ComplexMatrix u = unitary_propagator(h, 0.37 * (trial + 1));
      CHECK(max_abs(u.adjoint() * u - ComplexMatrix::Identity(n, n)) <= 1e-12 * n);
    }
  }

  TEST_CASE("two-mode coupler follows sin^2(Cz)") {
    const double d = 11.0;
    const double c = coupling_coefficient(d);
    const Hamiltonian h = build_hamiltonian(line(2, d));
    for (int k = 0; k < 100; ++k) {
      const double z = 0.05 * k;
      const ComplexMatrix u = unitary_propagator(h, z);
      CHECK(std::abs(std::norm(u(1, 0)) - std::pow(std::sin(c * z), 2)) <= 1e-8);
    }
  }

  TEST_CASE("nine-node line matches a Taylor-series exponential") {
    const Hamiltonian h = build_hamiltonian(line(9, 13.0));
    for (double z : {0.1, 0.8, 2.5, 7.0}) {
      const ComplexMatrix expected = oracle::expm_taylor(Complex(0, -z) * h.matrix());
      CHECK(max_abs(unitary_propagator(h, z) - expected) <= 1e-9);
      const ProbabilityDistribution p = evolve(h, 5, z);
      for (int j = 0; j < 9; ++j) CHECK(std::abs(p.probs[static_cast<std::size_t>(j)] - std::norm(expected(j, 4))) <= 1e-8);
    }
  }

  TEST_CASE("Taylor oracle agrees on complex Hermitian input") {
    const ComplexMatrix h = oracle::random_hermitian(7);
    const ComplexMatrix expected = oracle::expm_taylor(Complex(0, -1.3) * h);
    CHECK(max_abs(unitary_propagator(h, 1.3) - expected) <= 1e-9);
  }

  TEST_CASE("evolve at z = 0 is a point mass and always normalized") {
    const Hamiltonian h = build_hamiltonian(rectangular_lattice(3, 3, 10, 10));
    const ProbabilityDistribution p0 = evolve(h, 4, 0.0);
    for (int j = 0; j < 9; ++j) CHECK(p0.probs[static_cast<std::size_t>(j)] == (j == 3 ? 1.0 : 0.0));
    for (double z : {0.3, 1.7, 12.0}) CHECK(std::abs(evolve(h, 4, z).total() - 1.0) <= 1e-10);
    CHECK_PAQS_ERROR(evolve(h, 10, 1.0), ErrorKind::InvalidArgument);
    CHECK_PAQS_ERROR(evolve(h, 0, 1.0), ErrorKind::InvalidArgument);
    CHECK_PAQS_ERROR(unitary_propagator(h, -1.0), ErrorKind::Domain);
  }

  TEST_CASE("mirror-symmetric layout gives a mirror-symmetric distribution") {
    const Hamiltonian h = build_hamiltonian(line(7, 14.0));
    const ProbabilityDistribution p = evolve(h, 4, 3.3);
    for (int j = 0; j < 7; ++j)
      CHECK(std::abs(p.probs[static_cast<std::size_t>(j)] - p.probs[static_cast<std::size_t>(6 - j)]) <= 1e-10);
  }

  TEST_CASE("uniform beta is a global phase") {
    const auto layout = rectangular_lattice(3, 4, 12, 15);
    const ProbabilityDistribution a = evolve(build_hamiltonian(layout, {}, 0.0), 5, 2.0);
    const ProbabilityDistribution b = evolve(build_hamiltonian(layout, {}, 17.5), 5, 2.0);
    for (std::size_t j = 0; j < a.probs.size(); ++j) CHECK(std::abs(a.probs[j] - b.probs[j]) <= 1e-10);
  }

  TEST_CASE("composition and reversibility") {
    const ComplexMatrix h = oracle::random_hermitian(10);
    const SpectralPropagator prop(h);
    const ComplexMatrix u12 = prop.unitary(0.4) * prop.unitary(0.9);
    CHECK(max_abs(prop.unitary(1.3) - u12) <= 1e-10 * 10);
    CHECK(max_abs(prop.unitary(0.8) * prop.unitary(-0.8) - ComplexMatrix::Identity(10, 10)) <= 1e-10 * 10);
  }

  TEST_CASE("probability series has 100 inclusive samples") {
    const double d = 12.0;
    const double c = coupling_coefficient(d);
    const Hamiltonian h = build_hamiltonian(line(2, d));
    const ProbabilitySeries s = probability_series(h, 1, 0.0, 2.0, {1, 2});
    REQUIRE(s.z_cm.size() == 100);
    CHECK(s.z_cm.front() == 0.0);
    CHECK(s.z_cm.back() == 2.0);
    CHECK(s.values[0][0] == doctest::Approx(1.0).epsilon(1e-15));
    for (int k = 0; k < 100; ++k) {
      CHECK(std::abs(s.values[1][static_cast<std::size_t>(k)] - std::pow(std::sin(c * s.z_cm[static_cast<std::size_t>(k)]), 2)) <= 1e-8);
      CHECK(s.values[0][static_cast<std::size_t>(k)] >= 0.0);
      CHECK(s.values[0][static_cast<std::size_t>(k)] <= 1.0 + 1e-12);
    }
    CHECK_PAQS_ERROR(probability_series(h, 1, 0.0, 2.0, {}), ErrorKind::InvalidArgument);
    CHECK_PAQS_ERROR(probability_series(h, 1, 2.0, 2.0, {1}), ErrorKind::InvalidArgument);
    CHECK_PAQS_ERROR(probability_series(h, 1, 0.0, 1.0, {3}), ErrorKind::InvalidArgument);
  }

  TEST_CASE("facula raster: single node peak and radial decay") {
    const WaveguideLayout one({{1, 0.0, 0.0}});
    const FaculaRaster r = facula_raster(one, {{1.0}}, 101, 101, 4.0);
    CHECK(r.x_min == doctest::Approx(-12.0));
    CHECK(r.y_max == doctest::Approx(12.0));
    CHECK(r.at(50, 50) == doctest::Approx(1.0));
    CHECK(r.peak() == doctest::Approx(1.0));
    for (int i = 51; i < 101; ++i) CHECK(r.at(i, 50) < r.at(i - 1, 50));
    for (double v : r.grid) CHECK(v >= 0.0);
  }

  TEST_CASE("facula raster: equal peaks for equal probabilities") {
    const WaveguideLayout two({{1, 0.0, 0.0}, {2, 20.0, 0.0}});
    // Extent is [-9, 29] x [-9, 9] um, so a 0.1 um pitch puts the nodes on
    // columns 90 and 290 of row 90.
    const FaculaRaster r = facula_raster(two, {{0.5, 0.5}}, 381, 181, 3.0);
    CHECK(r.x_at(90) == doctest::Approx(0.0));
    CHECK(r.x_at(290) == doctest::Approx(20.0));
    CHECK(std::abs(r.at(90, 90) - r.at(290, 90)) <= 1e-12);
    CHECK(r.at(90, 90) == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(r.at(190, 90) == doctest::Approx(std::exp(-100.0 / 18.0)).epsilon(1e-9));
  }

  TEST_CASE("facula raster integrates to 2 pi sigma^2") {
    const auto layout = rectangular_lattice(3, 3, 15, 15);
    const Hamiltonian h = build_hamiltonian(layout);
    const ProbabilityDistribution p = evolve(h, 5, 1.1);
    const double sigma = default_facula_sigma(layout);
    CHECK(sigma == doctest::Approx(0.35 * 15));
    const FaculaRaster r = facula_raster(layout, p, 300, 300, sigma);
    double integral = 0;
    for (double v : r.grid) integral += v;
    integral *= r.cell_area();
    const double expected = 2 * std::numbers::pi * sigma * sigma * p.total();
    CHECK(std::abs(integral - expected) / expected <= 0.01);
  }

  TEST_CASE("facula raster validates its arguments") {
    const WaveguideLayout two({{1, 0.0, 0.0}, {2, 20.0, 0.0}});
    CHECK_PAQS_ERROR(facula_raster(two, {{1.0}}, 10, 10, 3.0), ErrorKind::InvalidArgument);
    CHECK_PAQS_ERROR(facula_raster(two, {{0.5, 0.5}}, 1, 10, 3.0), ErrorKind::InvalidArgument);
    CHECK_PAQS_ERROR(facula_raster(two, {{0.5, 0.5}}, 10, 10, 0.0), ErrorKind::InvalidArgument);
  }

  TEST_CASE("default sigma for a single node") {
    CHECK(default_facula_sigma(WaveguideLayout({{1, 0, 0}})) == 5.0);
  }
}
