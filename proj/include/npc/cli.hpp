#pragma once

#include <ostream>

namespace npc {

/// Entry point of the `npc` tool. Exit codes: 0 success / feasible / pass,
/// 1 infeasible / fail, 2 invalid input or usage.
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace npc
