#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace npc {

enum class ErrorCode {
  ZeroVector,
  InvalidInput,
  NotUnimodular,
  AdjacentFibersEqual,
  SectionEqualsFiber,
  DegenerateGeodesic,
  NotPositiveDefinite,
  Precondition,
  IndexOutOfRange,
  Infeasible,
  IncompatibleClasses,
  WrongArity,
  OutOfRange,
  Parse,
};

std::string_view to_string(ErrorCode code);

// Every failure in the library surfaces as npc::Error; the code lets callers
// (and tests) tell diagnostics apart without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace npc
