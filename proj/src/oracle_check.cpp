#include "raman/oracle_check.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "raman/gaussian.hpp"

namespace raman::oracle {

std::string BatteryCase::label() const {
  std::ostringstream os;
  os << "r1=" << circuit.r1 << " th1=" << circuit.theta1 << " L_a=" << circuit.loss_a << " L_b=" << circuit.loss_b
     << " phi=" << circuit.phi << " r2=" << circuit.r2 << " th2=" << circuit.theta2 << " lo=" << circuit.lo_phase;
  return os.str();
}

std::vector<BatteryCase> standard_battery() {
  constexpr double kSqueeze[] = {0.25, 0.5, 1.0};
  constexpr double kLoss[] = {0.0, 0.1, 0.5};
  constexpr double kPhase[] = {0.0, 0.5 * std::numbers::pi, std::numbers::pi};
  std::vector<BatteryCase> battery;
  for (double r1 : kSqueeze) {
    for (double r2 : kSqueeze) {
      if (r1 + r2 > 1.5) continue;
      for (double la : kLoss) {
        for (double lb : kLoss) {
          for (double phi : kPhase) {
            battery.push_back({{r1, 0.0, la, lb, phi, r2, 0.0, 0.0}});
          }
        }
      }
    }
  }
  battery.push_back({{0.5, 0.7, 0.1, 0.5, 0.3, 0.5, -0.4, 0.3}});
  battery.push_back({{1.0, 1.9, 0.5, 0.0, 2.0, 0.25, 0.6, 1.1}});
  battery.push_back({{0.25, -1.2, 0.0, 0.1, 4.0, 1.0, 2.5, -0.8}});
  battery.push_back({{0.5, 3.0, 0.5, 0.5, 1.0, 0.5, 3.0, 2.2}});
  return battery;
}

std::vector<BatteryCase> vacuum_battery() {
  constexpr double kLoss[] = {0.0, 0.1, 0.5};
  std::vector<BatteryCase> battery;
  for (double la : kLoss) {
    for (double lb : kLoss) {
      battery.push_back({{0.0, 0.0, la, lb, 0.5 * std::numbers::pi, 0.0, 0.0, 0.0}});
    }
  }
  return battery;
}

double gaussian_variance(const fock::CascadeCircuit& c) {
  using namespace raman::gaussian;
  constexpr std::size_t n = 2;
  GaussianState s = GaussianState::vacuum(n);
  s = apply_symplectic(s, two_mode_squeezer(n, 0, 1, std::cosh(c.r1), c.theta1));
  s = apply_loss(s, LossChannel::with_loss(0, c.loss_a));
  s = apply_loss(s, LossChannel::with_loss(1, c.loss_b));
  s = apply_symplectic(s, phase_shift(n, 0, c.phi));
  s = apply_symplectic(s, two_mode_squeezer(n, 0, 1, std::cosh(c.r2), c.theta2));
  return homodyne_variance(s, 0, c.lo_phase);
}

OracleReport run_battery(const std::vector<BatteryCase>& battery, const Engine& engine,
                         const fock::OracleOptions& options) {
  OracleReport report;
  fock::UnitaryCache cache;
  for (const BatteryCase& tc : battery) {
    const fock::OracleResult fr = fock::run_cascade(tc.circuit, options, &cache);
    const double gv = engine(tc.circuit);
    const double dev = std::abs(gv - fr.variance);
    if (report.outcomes.empty() || dev > report.max_deviation) {
      report.max_deviation = dev;
      report.worst_index = report.outcomes.size();
    }
    report.outcomes.push_back({tc, gv, fr.variance, dev, fr.n_max});
  }
  return report;
}

}  // namespace raman::oracle
