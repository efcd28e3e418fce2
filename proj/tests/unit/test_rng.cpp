#include <doctest.h>

#include <set>

#include "paqs/rng.hpp"

using paqs::CounterRng;
using paqs::Philox4x32;

TEST_SUITE("rng") {
  TEST_CASE("philox4x32-10 known-answer vectors") {
    CHECK(Philox4x32::generate({0, 0, 0, 0}, {0, 0}) ==
          Philox4x32::Counter{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
    CHECK(Philox4x32::generate({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu}) ==
          Philox4x32::Counter{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
    CHECK(Philox4x32::generate({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u}) ==
          Philox4x32::Counter{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
  }

  TEST_CASE("same seed and stream give the same sequence") {
    CounterRng a(42, 3), b(42, 3);
    for (int i = 0; i < 100; ++i) CHECK(a() == b());
  }

  TEST_CASE("streams and seeds are distinct") {
    CounterRng a(42, 0), b(42, 1), c(43, 0);
    std::set<std::uint32_t> first{a(), b(), c()};
    CHECK(first.size() == 3);
  }

  TEST_CASE("uniform01 stays in [0,1) and has the right mean") {
    CounterRng r(7, 0);
    double sum = 0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
      const double u = r.uniform01();
      REQUIRE(u >= 0.0);
      REQUIRE(u < 1.0);
      sum += u;
    }
    CHECK(sum / n == doctest::Approx(0.5).epsilon(0.005));
  }

  TEST_CASE("uniform(lo, hi) respects bounds") {
    CounterRng r(1, 9);
    for (int i = 0; i < 10000; ++i) {
      const double v = r.uniform(-0.4, 0.4);
      REQUIRE(v >= -0.4);
      REQUIRE(v <= 0.4);
    }
  }
}
