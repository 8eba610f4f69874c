#include "raman/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace raman::model {

namespace {

using gaussian::GaussianState;
using gaussian::LossChannel;

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr std::size_t kPhaseGrid = 64;
constexpr double kPhaseTol = 1e-7;

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

void check_loss(double loss, const char* name) {
  require(loss >= 0.0 && loss <= 1.0, std::string(name) + " must lie in [0, 1]");
}

double wrap_phase(double phi) {
  double w = std::fmod(phi, kTwoPi);
  return w < 0.0 ? w + kTwoPi : w;
}

CascadeScenario with_phase(CascadeScenario s, double phi) {
  s.channel.scan_phase = phi;
  return s;
}

}  // namespace

AmplifierParams AmplifierParams::from_gain(double gain_G, double pump_phase) {
  require(gain_G >= 1.0, "amplitude gain G must be >= 1, got " + std::to_string(gain_G));
  return {gain_G, std::sqrt((gain_G - 1.0) * (gain_G + 1.0)), pump_phase};
}

AmplifierParams AmplifierParams::from_quantum_gain(double gq, double pump_phase) {
  require(gq >= 1.0, "quantum noise gain must be >= 1, got " + std::to_string(gq));
  return {std::sqrt(0.5 * (gq + 1.0)), std::sqrt(0.5 * (gq - 1.0)), pump_phase};
}

double quantum_noise_gain(const AmplifierParams& amp) { return 2.0 * amp.gain_G * amp.gain_G - 1.0; }

double lambda_from_gq(double gq) {
  require(gq >= 1.0, "lambda_from_gq: gq must be >= 1, got " + std::to_string(gq));
  return std::sqrt((gq - 1.0) / (gq + 1.0));
}

double PhysicalRamanParams::eta() const {
  require(detuning != 0.0, "PhysicalRamanParams: detuning must be nonzero");
  return coupling_eg * coupling_em / detuning;
}

AmplifierParams amplifier_from_physical(const PhysicalRamanParams& p, double pump_phase) {
  require(p.interaction_time >= 0.0, "PhysicalRamanParams: interaction_time must be >= 0");
  return AmplifierParams::from_gain(std::cosh(std::abs(p.eta() * p.pump_amplitude) * p.interaction_time),
                                    pump_phase);
}

double mu_from_pump_power(double power, double scale) {
  require(power >= 0.0, "pump power must be >= 0");
  return std::cosh(scale * std::sqrt(power));
}

void CascadeScenario::validate() const {
  for (const AmplifierParams* amp : {&ra1, &ra2}) {
    require(amp->gain_G >= 1.0 && amp->gain_g >= 0.0, "amplifier gains out of range");
    const double gap = amp->gain_G * amp->gain_G - amp->gain_g * amp->gain_g - 1.0;
    require(std::abs(gap) <= 1e-12 * std::max(1.0, amp->gain_G * amp->gain_G),
            "amplifier gains violate G^2 - g^2 = 1");
  }
  check_loss(channel.loss_stokes, "loss_stokes");
  check_loss(channel.loss_spinwave, "loss_spinwave");
  check_loss(channel.output_loss, "output_loss");
}

double closed_form_R_lambda(double mu, double loss_stokes, double loss_spinwave, double lambda,
                            LossPairing pairing) {
  require(mu >= 1.0, "closed_form_R: mu must be >= 1");
  check_loss(loss_stokes, "L1");
  check_loss(loss_spinwave, "L2");
  require(lambda >= 0.0 && lambda <= 1.0, "closed_form_R: lambda must lie in [0, 1]");

  const double nu2 = (mu - 1.0) * (mu + 1.0);
  const double nu = std::sqrt(nu2);
  const double l2 = lambda * lambda;
  const double weighted_loss = pairing == LossPairing::kCascade
                                   ? loss_stokes + loss_spinwave * l2
                                   : loss_spinwave + loss_stokes * l2;
  const double transmission = std::sqrt((1.0 - loss_stokes) * (1.0 - loss_spinwave));
  return mu * mu + nu2 - 2.0 * nu2 * weighted_loss / (1.0 + l2) -
         4.0 * lambda * mu * nu * transmission / (1.0 + l2);
}

double closed_form_R(double mu, double loss_stokes, double loss_spinwave, double gq,
                     LossPairing pairing) {
  return closed_form_R_lambda(mu, loss_stokes, loss_spinwave, lambda_from_gq(gq), pairing);
}

double correlation_from_params(double mu, double loss_stokes, double loss_spinwave) {
  // Both pairings agree at lambda = 1.
  return 2.0 * closed_form_R_lambda(mu, loss_stokes, loss_spinwave, 1.0);
}

GaussianState build_cascade(const CascadeScenario& scenario) {
  scenario.validate();
  constexpr std::size_t n = 2;
  const ChannelParams& ch = scenario.channel;

  GaussianState state = GaussianState::vacuum(n);
  if (scenario.seed_amplitude != std::complex<double>(0.0, 0.0)) {
    state = apply_symplectic(state, gaussian::displacement(n, kStokes, scenario.seed_amplitude));
  }
  state = apply_symplectic(state, gaussian::two_mode_squeezer(n, kStokes, kSpinWave, scenario.ra1.gain_G,
                                                              scenario.ra1.pump_phase));
  state = apply_loss(state, LossChannel::with_loss(kStokes, ch.loss_stokes));
  state = apply_loss(state, LossChannel::with_loss(kSpinWave, ch.loss_spinwave));
  state = apply_symplectic(state, gaussian::phase_shift(n, kStokes, ch.scan_phase));
  state = apply_symplectic(state, gaussian::two_mode_squeezer(n, kStokes, kSpinWave, scenario.ra2.gain_G,
                                                              scenario.ra2.pump_phase));
  if (ch.output_loss > 0.0) {
    state = apply_loss(state, LossChannel::with_loss(kStokes, ch.output_loss));
  }
  return state;
}

double simulate_cascade_noise(const CascadeScenario& scenario, double lo_phase) {
  return gaussian::homodyne_variance(build_cascade(scenario), kStokes, lo_phase);
}

double uncorrelated_reference(const CascadeScenario& scenario, double lo_phase) {
  CascadeScenario off = scenario;
  off.ra1 = AmplifierParams::from_gain(1.0);
  return simulate_cascade_noise(off, lo_phase);
}

PhaseMinimum min_noise_over_phase(const CascadeScenario& scenario, double lo_phase) {
  const auto noise_at = [&](double phi) { return simulate_cascade_noise(with_phase(scenario, phi), lo_phase); };

  const double step = kTwoPi / static_cast<double>(kPhaseGrid);
  std::size_t best_k = 0;
  double best = noise_at(0.0);
  for (std::size_t k = 1; k < kPhaseGrid; ++k) {
    const double v = noise_at(step * static_cast<double>(k));
    if (v < best) {
      best = v;
      best_k = k;
    }
  }
  PhaseMinimum result{step * static_cast<double>(best_k), best};

  // Golden-section search on the two grid cells around the best sample.
  constexpr double kInvPhi = 0.6180339887498949;
  double a = result.phi_min - step;
  double b = result.phi_min + step;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = noise_at(c);
  double fd = noise_at(d);
  while (b - a > kPhaseTol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = noise_at(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = noise_at(d);
    }
  }
  const double phi = 0.5 * (a + b);
  const double v = noise_at(phi);
  if (v < result.variance) {
    result = {wrap_phase(phi), v};
  }
  return result;
}

double noise_reduction_ratio(const CascadeScenario& scenario) {
  return min_noise_over_phase(scenario).variance / uncorrelated_reference(scenario);
}

NoiseTrace noise_vs_phase(const CascadeScenario& scenario, std::size_t n_points) {
  require(n_points >= 2, "noise_vs_phase: n_points must be >= 2");
  NoiseTrace trace{ScanVariable::phase, {}};
  trace.points.reserve(n_points);
  for (std::size_t k = 0; k < n_points; ++k) {
    const double phi = kTwoPi * static_cast<double>(k) / static_cast<double>(n_points);
    const double v = simulate_cascade_noise(with_phase(scenario, phi));
    trace.points.push_back({phi, v, gaussian::to_db(v)});
  }
  return trace;
}

NoiseTrace gain_sweep(std::span<const double> mu_values, const AmplifierParams& ra2,
                      const ChannelParams& channel) {
  NoiseTrace trace{ScanVariable::pump_power, {}};
  for (double mu : mu_values) {
    require(mu >= 1.0, "gain_sweep: every mu must be >= 1");
    CascadeScenario s{AmplifierParams::from_gain(mu), ra2, channel, {}};
    const double r = noise_reduction_ratio(s);
    trace.points.push_back({mu, r, gaussian::to_db(r)});
  }
  return trace;
}

NoiseTrace quantum_gain_sweep(double mu, std::span<const double> gq_values,
                              const ChannelParams& channel) {
  NoiseTrace trace{ScanVariable::quantum_gain, {}};
  const AmplifierParams ra1 = AmplifierParams::from_gain(mu);
  for (double gq : gq_values) {
    CascadeScenario s{ra1, AmplifierParams::from_quantum_gain(gq), channel, {}};
    const double r = noise_reduction_ratio(s);
    trace.points.push_back({gq, r, gaussian::to_db(r)});
  }
  return trace;
}

namespace {

struct Harmonic {
  double c0 = 0.0;
  double c1 = 0.0;
  double s1 = 0.0;
};

Harmonic first_harmonic(const std::vector<FringePoint>& points) {
  require(points.size() >= 3, "fringe trace needs >= 3 points");
  Harmonic h;
  const double n = static_cast<double>(points.size());
  for (const FringePoint& p : points) {
    const double y = p.seed_term();
    h.c0 += y / n;
    h.c1 += 2.0 * y * std::cos(p.phi) / n;
    h.s1 += 2.0 * y * std::sin(p.phi) / n;
  }
  return h;
}

}  // namespace

double FringeTrace::visibility() const {
  const Harmonic h = first_harmonic(points);
  return std::hypot(h.c1, h.s1) / h.c0;
}

double FringeTrace::sinusoid_residual() const {
  const Harmonic h = first_harmonic(points);
  double worst = 0.0;
  for (const FringePoint& p : points) {
    const double model = h.c0 + h.c1 * std::cos(p.phi) + h.s1 * std::sin(p.phi);
    worst = std::max(worst, std::abs(p.seed_term() - model));
  }
  return worst;
}

FringeTrace fringe_scan(const CascadeScenario& scenario, std::size_t n_points) {
  require(std::abs(scenario.seed_amplitude) > 0.0,
          "fringe_scan: seed amplitude must be nonzero (use noise_vs_phase for unseeded scans)");
  require(n_points >= 3, "fringe_scan: n_points must be >= 3");
  FringeTrace trace;
  trace.points.reserve(n_points);
  for (std::size_t k = 0; k < n_points; ++k) {
    const double phi = kTwoPi * static_cast<double>(k) / static_cast<double>(n_points);
    const auto photons = gaussian::mean_photon_number(build_cascade(with_phase(scenario, phi)), kStokes);
    trace.points.push_back({phi, photons.total(), photons.fluctuation});
  }
  return trace;
}

double fringe_visibility_formula(const CascadeScenario& scenario) {
  const double alpha = std::abs(scenario.seed_amplitude);
  const ChannelParams& ch = scenario.channel;
  const double a = scenario.ra2.gain_G * scenario.ra1.gain_G * std::sqrt(1.0 - ch.loss_stokes) * alpha;
  const double b = scenario.ra2.gain_g * scenario.ra1.gain_g * std::sqrt(1.0 - ch.loss_spinwave) * alpha;
  return 2.0 * a * b / (a * a + b * b);
}

}  // namespace raman::model
