#pragma once

#include <functional>

#include <doctest.h>

#include "drs/error.hpp"

namespace oracle {

// Code of the drs::Error thrown by f.
inline drs::ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const drs::Error& e) {
    return e.code();
  }
  FAIL("expected drs::Error");
  return drs::ErrorCode::ParseError;
}

}  // namespace oracle
