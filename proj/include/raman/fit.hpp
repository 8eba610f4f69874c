#pragma once

// Least-squares extraction of (mu, L1, L2) from noise-reduction-versus-gain
// data, and the joint atom-light quadrature variance that follows from it.
//
// The model is model::closed_form_R with the cascade loss pairing. Internally
// the fitter works in smooth coordinates mu = cosh(s), L = sin^2(t), which
// remove the square-root kinks at mu = 1 and L = 1.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace raman::fit {

struct DataPoint {
  double gq = 1.0;  // quantum noise gain of the measuring amplifier, linear
  double R = 1.0;   // noise reduction ratio, linear
  std::optional<double> sigma;
};

class NoiseDataset {
 public:
  /// Sorts by gq. Requires gq >= 1, 0 < R <= 1.05, sigma > 0 when present.
  NoiseDataset(std::string label, std::vector<DataPoint> points);

  const std::string& label() const { return label_; }
  const std::vector<DataPoint>& points() const { return points_; }
  std::size_t size() const { return points_.size(); }
  std::size_t distinct_gains() const;

 private:
  std::string label_;
  std::vector<DataPoint> points_;
};

/// Model values R(gq_i; mu, L1, L2).
std::vector<double> model_curve(const NoiseDataset& data, double mu, double loss_stokes, double loss_spinwave);

/// Noiseless dataset from the model, for round trips and Monte-Carlo studies.
NoiseDataset synthesize(std::span<const double> gq_values, double mu, double loss_stokes, double loss_spinwave,
                        std::string label = "synthetic");

struct FitConfig {
  double mu_max = 10.0;
  int n_starts = 16;
  std::uint64_t seed = 1;
};

struct FitResult {
  std::string label;
  double mu_hat = 1.0;
  double nu_hat = 0.0;
  double L1_hat = 0.0;
  double L2_hat = 0.0;
  double objective = 0.0;  // weighted sum of squared residuals
  double residual_rms = 0.0;
  double correlation_x_plus = 2.0;
  double correlation_db = 0.0;  // relative to the vacuum value 2
  Eigen::Matrix3d covariance_estimate = Eigen::Matrix3d::Zero();  // over (mu, L1, L2)
  int n_restarts_used = 0;
  double projected_gradient_norm = 0.0;  // in the internal (s, t1, t2) coordinates
  double swap_objective = 0.0;           // objective with L1 and L2 exchanged
  bool swap_degenerate = false;          // |swap_objective - objective| < 1e-10
  std::vector<double> objective_history;  // winning start, accepted iterations
};

/// Multi-start local least squares over mu in [1, mu_max], L1, L2 in [0, 1].
/// Throws InsufficientData for < 4 points, DegenerateDesign if all gq coincide.
FitResult fit_dataset(const NoiseDataset& data, const FitConfig& config = {});

struct Correlation {
  double x_plus = 2.0;
  double db = 0.0;
};

/// 2 R(lambda = 1) for the fitted parameters, and its dB value relative to 2.
Correlation correlation_from_fit(const FitResult& fit);

/// Single-point estimate 2 R at finite gain, without extrapolating lambda to 1.
/// Sits above the extrapolated value whenever the correlation is real.
double finite_lambda_correlation(double R_measured, double gq);

struct BootstrapResult {
  Eigen::Matrix3d covariance = Eigen::Matrix3d::Zero();  // over (mu, L1, L2)
  double db_lower = 0.0;  // 2.5 % percentile of correlation_db
  double db_upper = 0.0;  // 97.5 % percentile
  int n_resamples = 0;
  int n_failed = 0;
};

/// Residual-resampling bootstrap around `fit`. Needs n_resamples >= 100;
/// throws UnstableFit when more than 20 % of refits fail.
BootstrapResult bootstrap_uncertainty(const NoiseDataset& data, const FitResult& fit, int n_resamples,
                                      const FitConfig& config = {});

struct SharedLossFit {
  std::vector<FitResult> per_dataset;  // mu per dataset, common L1 and L2
  double L1_hat = 0.0;
  double L2_hat = 0.0;
  double objective = 0.0;
};

/// Joint fit with one mu per dataset and losses shared across all of them.
SharedLossFit fit_shared_losses(std::span<const NoiseDataset> datasets, const FitConfig& config = {});

}  // namespace raman::fit
