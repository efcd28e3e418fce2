#pragma once

#include <doctest.h>

#include "paqs/error.hpp"

// CHECK that `expr` throws paqs::Error of the given kind.
#define CHECK_PAQS_ERROR(expr, expected_kind)                                 \
  do {                                                                        \
    bool thrown_ = false;                                                     \
    try {                                                                     \
      (void)(expr);                                                           \
    } catch (const paqs::Error& e_) {                                         \
      thrown_ = true;                                                         \
      CHECK_MESSAGE(e_.kind() == (expected_kind), "kind: ", paqs::to_string(e_.kind()), " - ", e_.what()); \
    }                                                                         \
    CHECK_MESSAGE(thrown_, "expected paqs::Error from " #expr);              \
  } while (0)
