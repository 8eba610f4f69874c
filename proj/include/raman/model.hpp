#pragma once

// Two-stage Raman amplifier built from Gaussian primitives.
//
// Mode 0 is the Stokes field, mode 1 the collective atomic spin wave. The
// first amplifier (gains mu, nu) correlates the two; both then pass through
// lumped losses, the Stokes picks up the scanned phase phi, and the second
// amplifier (gains G, g) reads the pair out through its Stokes port.

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "raman/gaussian.hpp"

namespace raman::model {

inline constexpr std::size_t kStokes = 0;
inline constexpr std::size_t kSpinWave = 1;

struct AmplifierParams {
  double gain_G = 1.0;
  double gain_g = 0.0;
  double pump_phase = 0.0;

  /// Throws unless gain_G >= 1; gain_g = sqrt(G^2 - 1).
  static AmplifierParams from_gain(double gain_G, double pump_phase = 0.0);
  /// Inverts G_q = 2 G^2 - 1.
  static AmplifierParams from_quantum_gain(double gq, double pump_phase = 0.0);

  double quantum_noise_gain() const { return gain_G * gain_G + gain_g * gain_g; }
  double lambda() const { return gain_g / gain_G; }
};

/// G_q = 2 G^2 - 1.
double quantum_noise_gain(const AmplifierParams& amp);

/// lambda = g / G = sqrt((G_q - 1) / (G_q + 1)).
double lambda_from_gq(double gq);

/// Microscopic Raman parameters. Only |eta A_P| t reaches the dynamics.
struct PhysicalRamanParams {
  double coupling_eg = 0.0;   // g_eg
  double coupling_em = 0.0;   // g_em
  double detuning = 1.0;      // Delta, same for pump and Stokes
  double pump_amplitude = 0.0;
  double interaction_time = 0.0;
  double atom_number = 0.0;   // metadata; fixes the 1/sqrt(N_a) spin-wave normalization

  double eta() const;
};

/// G = cosh(|eta A_P| t).
AmplifierParams amplifier_from_physical(const PhysicalRamanParams& p, double pump_phase = 0.0);

/// Presentation-only pump power mapping mu = cosh(scale * sqrt(power)).
double mu_from_pump_power(double power, double scale);

struct ChannelParams {
  double loss_stokes = 0.0;    // L1
  double loss_spinwave = 0.0;  // L2
  double scan_phase = 0.0;     // phi, applied to the Stokes between the stages
  double output_loss = 0.0;    // Stokes loss after the second stage
};

struct CascadeScenario {
  AmplifierParams ra1;
  AmplifierParams ra2;
  ChannelParams channel;
  std::complex<double> seed_amplitude{0.0, 0.0};  // coherent seed into the Stokes input

  /// Checks every member's invariants; throws std::invalid_argument.
  void validate() const;
};

enum class ScanVariable { phase, pump_power, quantum_gain };

struct TracePoint {
  double x = 0.0;
  double variance_linear = 0.0;
  double variance_db = 0.0;
};

struct NoiseTrace {
  ScanVariable scan_variable = ScanVariable::phase;
  std::vector<TracePoint> points;
};

/// Which loss sits next to lambda^2 in the closed-form noise ratio.
///  kPrinted:  2 nu^2 (L2 + L1 lambda^2) / (1 + lambda^2)
///  kCascade:  2 nu^2 (L1 + L2 lambda^2) / (1 + lambda^2)
/// kCascade is what build_cascade produces and is used everywhere downstream.
enum class LossPairing { kPrinted, kCascade };

/// Closed-form minimum-noise ratio of the lossy cascade.
double closed_form_R(double mu, double loss_stokes, double loss_spinwave, double gq,
                     LossPairing pairing = LossPairing::kCascade);

/// Same closed form with lambda given directly (lambda in [0, 1]).
double closed_form_R_lambda(double mu, double loss_stokes, double loss_spinwave, double lambda,
                            LossPairing pairing = LossPairing::kCascade);

/// Joint variance <Delta^2 (X_a + X_S)> = 2 R(lambda = 1). 2 for vacuum.
double correlation_from_params(double mu, double loss_stokes, double loss_spinwave);

/// Final Gaussian state of mode 0 (Stokes) and mode 1 (spin wave).
gaussian::GaussianState build_cascade(const CascadeScenario& scenario);

/// Homodyne variance of the output Stokes.
double simulate_cascade_noise(const CascadeScenario& scenario, double lo_phase = 0.0);

/// Output Stokes variance with the first stage switched off.
double uncorrelated_reference(const CascadeScenario& scenario, double lo_phase = 0.0);

struct PhaseMinimum {
  double phi_min = 0.0;
  double variance = 0.0;
};

/// Grid of >= 64 points over [0, 2 pi) followed by golden-section refinement.
PhaseMinimum min_noise_over_phase(const CascadeScenario& scenario, double lo_phase = 0.0);

/// Minimum cascade noise over phi divided by the uncorrelated reference.
double noise_reduction_ratio(const CascadeScenario& scenario);

/// Output noise on phi_k = 2 pi k / n_points, k = 0 .. n_points - 1.
NoiseTrace noise_vs_phase(const CascadeScenario& scenario, std::size_t n_points);

/// Noise reduction ratio per first-stage gain mu.
NoiseTrace gain_sweep(std::span<const double> mu_values, const AmplifierParams& ra2,
                      const ChannelParams& channel);

/// Noise reduction ratio per second-stage quantum gain.
NoiseTrace quantum_gain_sweep(double mu, std::span<const double> gq_values,
                              const ChannelParams& channel);

struct FringePoint {
  double phi = 0.0;
  double intensity = 0.0;   // seed term + background
  double background = 0.0;  // seed-independent noise photons
  double seed_term() const { return intensity - background; }
};

struct FringeTrace {
  std::vector<FringePoint> points;

  /// Visibility of the seed term from its first Fourier harmonic.
  double visibility() const;
  /// Largest deviation of the seed term from its fitted first harmonic.
  double sinusoid_residual() const;
};

/// Output Stokes photon number versus phi with a coherent seed.
FringeTrace fringe_scan(const CascadeScenario& scenario, std::size_t n_points);

/// 2AB / (A^2 + B^2) with A = G mu sqrt(1 - L1) |alpha|, B = g nu sqrt(1 - L2) |alpha|
/// (times sqrt(1 - output loss) each).
double fringe_visibility_formula(const CascadeScenario& scenario);

}  // namespace raman::model
