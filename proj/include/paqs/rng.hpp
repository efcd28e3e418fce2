#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace paqs {

/// Philox4x32-10 counter-based bijection (Salmon et al., Random123).  The
/// output depends only on (key, counter), so every stream is reproducible
/// on any platform and under any parallel schedule.
struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter generate(Counter counter, Key key);
};

/// Sequential generator over one Philox stream.  The key is the 64-bit
/// seed; the upper counter words hold the stream id, the lower words a
/// block index.  Satisfies UniformRandomBitGenerator.
class CounterRng {
 public:
  using result_type = std::uint32_t;

  CounterRng(std::uint64_t seed, std::uint64_t stream);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()();

  /// 53-bit uniform on [0, 1).
  double uniform01();
  /// Uniform on [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

 private:
  Philox4x32::Key key_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  Philox4x32::Counter buffer_{};
  int used_ = 4;
};

}  // namespace paqs
