#pragma once

// Text formats for instances and witnesses.
//
//   npc-instance v1
//   n 1
//   b0 1 0
//   f0 0 1
//   f1 1 1
//   f2 0 1
//   b2 1 0
//   c 1/2        # optional
//
// Witness files hold one `sigma<i> <a11> <a12> <a22>` line per form, rationals
// written as num/den. `#` starts a comment in both formats.

#include <optional>
#include <string>
#include <string_view>

#include "npc/decider.hpp"

namespace npc {

struct InstanceFile {
  GluingData data;
  std::optional<Rational> c;
};

/// Throws ErrorCode::Parse for format errors; invariant violations keep the
/// code from validate_instance. Messages carry line numbers.
InstanceFile parse_instance(std::string_view text);
std::string serialize_instance(const GluingData& data, const std::optional<Rational>& c = {});

WitnessConfiguration parse_witness(std::string_view text);
std::string serialize_witness(const WitnessConfiguration& w);

/// Accepts "num/den" or a plain integer.
Rational parse_rational(std::string_view token);

std::string read_file(const std::string& path);

}  // namespace npc
