#pragma once

#include <ostream>

namespace dmkp {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

/// Entry point of the dmkp_lab tool. Errors are reported as one JSON line on
/// err: {"error": "config" | "numerical" | "non_convergence" | "instability", "message": ...}.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace dmkp
