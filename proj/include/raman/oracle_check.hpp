#pragma once

// Cross-check of the Gaussian engine against the Fock-space oracle over a
// fixed battery of two-squeezer circuits.

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "raman/fock.hpp"

namespace raman::oracle {

struct BatteryCase {
  fock::CascadeCircuit circuit;
  std::string label() const;
};

/// Squeezers r in {0.25, 0.5, 1.0} with r1 + r2 <= 1.5, losses {0, 0.1, 0.5}
/// on each mode, phase {0, pi/2, pi}, plus a few cases with nonzero pump and
/// local-oscillator phases.
std::vector<BatteryCase> standard_battery();

/// Circuits with no squeezing at all.
std::vector<BatteryCase> vacuum_battery();

using Engine = std::function<double(const fock::CascadeCircuit&)>;

/// Output homodyne variance of the circuit from the Gaussian engine.
double gaussian_variance(const fock::CascadeCircuit& circuit);

struct CaseOutcome {
  BatteryCase test_case;
  double gaussian = 0.0;
  double fock = 0.0;
  double deviation = 0.0;
  int n_max = 0;
};

struct OracleReport {
  std::vector<CaseOutcome> outcomes;
  double max_deviation = 0.0;
  std::size_t worst_index = 0;

  bool passed(double tolerance) const { return max_deviation < tolerance; }
};

/// Throws TruncationError if any case exceeds the truncation cap.
OracleReport run_battery(const std::vector<BatteryCase>& battery, const Engine& engine = gaussian_variance,
                         const fock::OracleOptions& options = {});

}  // namespace raman::oracle
