#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "paqs/types.hpp"

namespace paqs {

enum class PermanentAlgorithm { Naive, Ryser, RyserGray, Glynn, GlynnGray, Dispatch };

const char* to_string(PermanentAlgorithm algo) noexcept;
PermanentAlgorithm permanent_algorithm_from_string(const std::string& name);

inline constexpr int kNaiveMaxOrder = 10;
inline constexpr int kInclusionExclusionMaxOrder = 30;
/// Orders below this use Ryser+Gray, the rest Glynn+Gray.
inline constexpr int kDefaultDispatchThreshold = 6;
/// Orders from here on use compensated accumulation.
inline constexpr int kCompensatedFromOrder = 16;

/// Optional instrumentation filled in by the kernels.
struct PermanentStats {
  PermanentAlgorithm route = PermanentAlgorithm::Dispatch;  // kernel that actually ran
  std::uint64_t terms = 0;                                  // summands visited
};

Complex permanent_naive(const ComplexMatrix& m, PermanentStats* stats = nullptr);
Complex permanent_ryser(const ComplexMatrix& m, PermanentStats* stats = nullptr);
Complex permanent_ryser_gray(const ComplexMatrix& m, PermanentStats* stats = nullptr);
Complex permanent_glynn(const ComplexMatrix& m, PermanentStats* stats = nullptr);
Complex permanent_glynn_gray(const ComplexMatrix& m, PermanentStats* stats = nullptr);

/// Ryser+Gray below `threshold`, Glynn+Gray from there on.
PermanentAlgorithm dispatch_route(int order, int threshold = kDefaultDispatchThreshold);
Complex permanent(const ComplexMatrix& m, PermanentStats* stats = nullptr,
                  int threshold = kDefaultDispatchThreshold);
Complex permanent(const ComplexMatrix& m, PermanentAlgorithm algo, PermanentStats* stats = nullptr);

/// Partial-pivoting elimination; singular matrices give exactly 0.
Complex determinant(const ComplexMatrix& m);

}  // namespace paqs
