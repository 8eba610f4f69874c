#pragma once

// Command-line front end: noise-scan, gain-sweep, fit, correlation, fringes
// and oracle-check. Kept in a library so tests can drive it in-process.

#include <iosfwd>
#include <string>
#include <vector>

#include "raman/oracle_check.hpp"

namespace raman::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;      // bad flags, config or input files
inline constexpr int kExitNumerical = 3;  // truncation, unstable fit, oracle mismatch

struct Hooks {
  /// Gaussian engine used by oracle-check; tests swap in a corrupted one.
  oracle::Engine engine = oracle::gaussian_variance;
};

/// `args` excludes the program name. Results go to `out` unless --out names a
/// file; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, const Hooks& hooks = {});

}  // namespace raman::cli
