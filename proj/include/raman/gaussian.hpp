#pragma once

// Gaussian-state engine for a handful of bosonic modes.
//
// Quadratures are X = a + a^dagger and Y = -i (a - a^dagger), so the vacuum
// has unit variance in every quadrature and the vacuum covariance matrix is
// the identity. Phase-space vectors are ordered (X1, Y1, X2, Y2, ...).

#include <complex>
#include <cstddef>

#include <Eigen/Dense>

namespace raman::gaussian {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Block-diagonal symplectic form with 2x2 blocks [[0, 1], [-1, 0]].
Matrix symplectic_form(std::size_t n_modes);

/// Symplectic eigenvalues of a covariance matrix, ascending. Physical states
/// have all of them >= 1.
Vector symplectic_eigenvalues(const Matrix& cov);

/// max |S Omega S^T - Omega|.
double symplecticity_error(const Matrix& s);

class SymplecticOp;
struct LossChannel;

class GaussianState {
 public:
  /// Validates dimensions, symmetry (1e-12 relative) and the uncertainty
  /// relation (symplectic eigenvalues >= 1 - 1e-9).
  GaussianState(Vector mean, Matrix cov);

  static GaussianState vacuum(std::size_t n_modes);

  std::size_t n_modes() const { return static_cast<std::size_t>(mean_.size() / 2); }
  const Vector& mean() const { return mean_; }
  const Matrix& cov() const { return cov_; }

  /// 2x2 covariance block between modes i and j.
  Eigen::Matrix2d block(std::size_t i, std::size_t j) const;

  double min_symplectic_eigenvalue() const;

 private:
  struct Unchecked {};
  GaussianState(Vector mean, Matrix cov, Unchecked);

  friend GaussianState apply_symplectic(const GaussianState&, const SymplecticOp&);
  friend GaussianState apply_loss(const GaussianState&, const LossChannel&);

  Vector mean_;
  Matrix cov_;
};

/// Affine symplectic map: cov -> S cov S^T, mean -> S mean + d.
class SymplecticOp {
 public:
  SymplecticOp(Matrix matrix, Vector displacement);
  explicit SymplecticOp(Matrix matrix);

  static SymplecticOp identity(std::size_t n_modes);

  std::size_t n_modes() const { return static_cast<std::size_t>(matrix_.rows() / 2); }
  const Matrix& matrix() const { return matrix_; }
  const Vector& displacement() const { return displacement_; }

  /// The op that applies *this first and then `next`.
  SymplecticOp then(const SymplecticOp& next) const;
  SymplecticOp inverse() const;

 private:
  Matrix matrix_;
  Vector displacement_;
};

struct LossChannel {
  std::size_t mode_index = 0;
  double transmissivity = 1.0;

  /// Channel with transmissivity 1 - loss; throws unless loss is in [0, 1].
  static LossChannel with_loss(std::size_t mode, double loss);
};

/// Two-mode squeezer a -> G a + e^{i theta} g b^dagger, b -> G b + e^{i theta} g a^dagger,
/// g = sqrt(G^2 - 1).
SymplecticOp two_mode_squeezer(std::size_t n_modes, std::size_t mode_a, std::size_t mode_b,
                               double gain_G, double pump_phase);

/// a -> e^{i phi} a on one mode.
SymplecticOp phase_shift(std::size_t n_modes, std::size_t mode, double phi);

/// Coherent displacement <a> += alpha on one mode.
SymplecticOp displacement(std::size_t n_modes, std::size_t mode, std::complex<double> alpha);

GaussianState apply_symplectic(const GaussianState& state, const SymplecticOp& op);

/// Beam-splitter mixing of one mode with vacuum.
GaussianState apply_loss(const GaussianState& state, const LossChannel& channel);

/// Variance of cos(phi) X + sin(phi) Y on `mode`.
double homodyne_variance(const GaussianState& state, std::size_t mode, double lo_phase);

/// <a> on `mode`.
std::complex<double> mean_amplitude(const GaussianState& state, std::size_t mode);

/// <a^dagger a> on `mode`, split into the coherent part |<a>|^2 and the
/// fluctuation part (Vxx + Vyy - 2) / 4.
struct PhotonNumber {
  double coherent = 0.0;
  double fluctuation = 0.0;
  double total() const { return coherent + fluctuation; }
};
PhotonNumber mean_photon_number(const GaussianState& state, std::size_t mode);

/// 10 log10(v), relative to the unit vacuum variance.
double to_db(double linear);
double from_db(double db);

}  // namespace raman::gaussian
