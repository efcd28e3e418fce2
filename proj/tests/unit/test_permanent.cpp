#include <doctest.h>

#include <cmath>

#include "../support/oracles.hpp"
#include "paqs/bench.hpp"
#include "paqs/permanent.hpp"
#include "test_support.hpp"

using namespace paqs;

namespace {

const std::vector<PermanentAlgorithm> kKernels{PermanentAlgorithm::Naive, PermanentAlgorithm::Ryser,
                                                PermanentAlgorithm::RyserGray, PermanentAlgorithm::Glynn,
                                                PermanentAlgorithm::GlynnGray, PermanentAlgorithm::Dispatch};

ComplexMatrix m22() {
  ComplexMatrix m(2, 2);
  m << 1, 2, 3, 4;
  return m;
}

}  // namespace

TEST_SUITE("permanent") {
  TEST_CASE("hand-expanded values, every kernel") {
    for (PermanentAlgorithm a : kKernels) {
      CAPTURE(to_string(a));
      CHECK(permanent(ComplexMatrix::Identity(4, 4), a) == Complex(1, 0));
      CHECK(permanent(m22(), a) == Complex(10, 0));
      CHECK(permanent(ComplexMatrix::Ones(3, 3), a) == Complex(6, 0));
      ComplexMatrix one(1, 1);
      one << Complex(2.5, -1.5);
      CHECK(permanent(one, a) == Complex(2.5, -1.5));
    }
  }

  TEST_CASE("all-ones matrices give n!") {
    for (int n = 1; n <= 10; ++n)
      for (PermanentAlgorithm a : kKernels)
        CHECK(std::abs(permanent(ComplexMatrix::Ones(n, n), a) - Complex(oracle::factorial(n), 0)) <= 1e-9 * oracle::factorial(n));
  }

  TEST_CASE("kernels agree with a permutation-enumeration oracle") {
    for (int n = 1; n <= 8; ++n)
      for (int trial = 0; trial < 10; ++trial) {
        const ComplexMatrix m = oracle::random_complex(n);
        const Complex expected = oracle::permanent_by_permutations(m);
        for (PermanentAlgorithm a : kKernels) {
          CAPTURE(n);
          CAPTURE(to_string(a));
          CHECK(oracle::relative_error(permanent(m, a), expected) <= 1e-10);
        }
      }
  }

  TEST_CASE("Gray variants are consistent with their plain forms") {
    for (int trial = 0; trial < 100; ++trial) {
      const int n = 1 + trial % 10;
      const ComplexMatrix m = oracle::random_complex(n);
      CHECK(oracle::relative_error(permanent_ryser_gray(m), permanent_ryser(m)) <= 1e-12);
      CHECK(oracle::relative_error(permanent_glynn_gray(m), permanent_glynn(m)) <= 1e-12);
    }
  }

  TEST_CASE("structural invariants") {
    for (int n = 2; n <= 9; ++n) {
      const ComplexMatrix m = oracle::random_complex(n);
      const Complex p = permanent(m);
      CHECK(oracle::relative_error(permanent(ComplexMatrix(m.transpose())), p) <= 1e-10);
      ComplexMatrix swapped = m;
      swapped.row(0).swap(swapped.row(n - 1));
      swapped.col(0).swap(swapped.col(1));
      CHECK(oracle::relative_error(permanent(swapped), p) <= 1e-10);
      ComplexMatrix scaled = m;
      const Complex c(0.3, -1.7);
      scaled.row(1) *= c;
      CHECK(oracle::relative_error(permanent(scaled), c * p) <= 1e-10);
    }
  }

  TEST_CASE("term counters") {
    for (int n = 1; n <= 12; ++n) {
      const ComplexMatrix m = oracle::random_complex(n);
      PermanentStats rs, gs;
      permanent_ryser_gray(m, &rs);
      permanent_glynn_gray(m, &gs);
      CHECK(rs.terms == (std::uint64_t{1} << n) - 1);
      CHECK(gs.terms == std::uint64_t{1} << (n - 1));
    }
  }

  TEST_CASE("dispatcher routes by size") {
    PermanentStats s5, s7;
    permanent(oracle::random_complex(5), &s5);
    permanent(oracle::random_complex(7), &s7);
    CHECK(s5.route == PermanentAlgorithm::RyserGray);
    CHECK(s7.route == PermanentAlgorithm::GlynnGray);
    CHECK(dispatch_route(1) == PermanentAlgorithm::RyserGray);
    CHECK(dispatch_route(6) == PermanentAlgorithm::GlynnGray);
    CHECK(dispatch_route(6, 8) == PermanentAlgorithm::RyserGray);
    const ComplexMatrix m = oracle::random_complex(7);
    CHECK(permanent(m) == permanent_glynn_gray(m));
  }

  TEST_CASE("size guards") {
    CHECK_PAQS_ERROR(permanent_naive(ComplexMatrix::Identity(11, 11)), ErrorKind::Limit);
    CHECK_PAQS_ERROR(permanent_ryser_gray(ComplexMatrix::Identity(31, 31)), ErrorKind::Limit);
    CHECK_PAQS_ERROR(permanent(ComplexMatrix(2, 3)), ErrorKind::InvalidArgument);
    CHECK_PAQS_ERROR(permanent(ComplexMatrix(0, 0)), ErrorKind::InvalidArgument);
  }

  TEST_CASE("compensated accumulation keeps large orders accurate") {
    // Per of the all-ones 18x18 matrix is 18! = 6402373705728000, exactly representable.
    const Complex p = permanent(ComplexMatrix::Ones(18, 18));
    CHECK(std::abs(p.real() - 6402373705728000.0) / 6402373705728000.0 <= 1e-12);
  }

  TEST_CASE("determinant") {
    CHECK(determinant(ComplexMatrix::Identity(5, 5)) == Complex(1, 0));
    CHECK(std::abs(determinant(m22()) - Complex(-2, 0)) <= 1e-14);
    ComplexMatrix twin = oracle::random_complex(4);
    twin.row(2) = twin.row(0);
    CHECK(std::abs(determinant(twin)) <= 1e-12);
    for (int n = 1; n <= 7; ++n) {
      const ComplexMatrix m = oracle::random_complex(n);
      CHECK(oracle::relative_error(determinant(m), oracle::determinant_leibniz(m)) <= 1e-10);
    }
    CHECK(determinant(ComplexMatrix::Zero(3, 3)) == Complex(0, 0));
  }

  TEST_CASE("algorithm names round-trip") {
    for (PermanentAlgorithm a : kKernels) CHECK(permanent_algorithm_from_string(to_string(a)) == a);
    CHECK_PAQS_ERROR(permanent_algorithm_from_string("bogus"), ErrorKind::InvalidArgument);
  }

  TEST_CASE("bench report covers every kernel and agrees with the dispatcher") {
    const BenchReport r = bench_permanents(2, 8, 3, 1, 1e4);
    for (int n = 2; n <= 8; ++n)
      for (PermanentAlgorithm a : {PermanentAlgorithm::Naive, PermanentAlgorithm::Ryser, PermanentAlgorithm::RyserGray,
                                   PermanentAlgorithm::Glynn, PermanentAlgorithm::GlynnGray}) {
        const auto e = r.find(a, n);
        REQUIRE(e.has_value());
        CHECK(e->median_ns > 0);
        CHECK(e->relative_error <= 1e-9);
      }
    const BenchReport big = bench_permanents(9, 12, 1, 1, 1e4);
    CHECK_FALSE(big.find(PermanentAlgorithm::Naive, 11).has_value());
    CHECK(big.find(PermanentAlgorithm::GlynnGray, 12).has_value());
  }

  TEST_CASE("bench timings grow with n") {
    const BenchReport r = bench_permanents(6, 12, 3, 2, 2e5);
    for (PermanentAlgorithm a : {PermanentAlgorithm::RyserGray, PermanentAlgorithm::GlynnGray})
      CHECK(r.find(a, 12)->median_ns > r.find(a, 6)->median_ns);
  }
}
