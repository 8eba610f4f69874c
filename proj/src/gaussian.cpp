#include "raman/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace raman::gaussian {

namespace {

constexpr double kPhysicalityTol = 1e-9;
constexpr double kSymmetryTol = 1e-12;

void check_mode(std::size_t mode, std::size_t n_modes, const char* what) {
  if (mode >= n_modes) {
    throw std::invalid_argument(std::string(what) + ": mode index " + std::to_string(mode) +
                                " out of range for " + std::to_string(n_modes) + " modes");
  }
}

Matrix symmetrized(const Matrix& m) { return 0.5 * (m + m.transpose()); }

}  // namespace

Matrix symplectic_form(std::size_t n_modes) {
  Matrix omega = Matrix::Zero(2 * n_modes, 2 * n_modes);
  for (std::size_t k = 0; k < n_modes; ++k) {
    omega(2 * k, 2 * k + 1) = 1.0;
    omega(2 * k + 1, 2 * k) = -1.0;
  }
  return omega;
}

Vector symplectic_eigenvalues(const Matrix& cov) {
  if (cov.rows() != cov.cols() || cov.rows() % 2 != 0) {
    throw std::invalid_argument("symplectic_eigenvalues: covariance must be square with even size");
  }
  const auto n = static_cast<std::size_t>(cov.rows() / 2);
  // A = V^{1/2} Omega V^{1/2} is real antisymmetric, so iA is Hermitian with
  // eigenvalues +-nu_k.
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrized(cov));
  Vector root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  Matrix sqrt_v = es.eigenvectors() * root.asDiagonal() * es.eigenvectors().transpose();
  Matrix a = sqrt_v * symplectic_form(n) * sqrt_v;
  a = 0.5 * (a - a.transpose());
  const Eigen::MatrixXcd h = std::complex<double>(0.0, 1.0) * a.cast<std::complex<double>>();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es2(h, Eigen::EigenvaluesOnly);
  const Vector& ev = es2.eigenvalues();
  Vector nu(n);
  for (std::size_t k = 0; k < n; ++k) {
    const auto hi = static_cast<Eigen::Index>(n + k);
    const auto lo = static_cast<Eigen::Index>(n - 1 - k);
    nu(static_cast<Eigen::Index>(k)) = 0.5 * (ev(hi) - ev(lo));
  }
  return nu;
}

double symplecticity_error(const Matrix& s) {
  const auto n = static_cast<std::size_t>(s.rows() / 2);
  const Matrix omega = symplectic_form(n);
  return (s * omega * s.transpose() - omega).cwiseAbs().maxCoeff();
}

GaussianState::GaussianState(Vector mean, Matrix cov, Unchecked)
    : mean_(std::move(mean)), cov_(std::move(cov)) {}

GaussianState::GaussianState(Vector mean, Matrix cov) : mean_(std::move(mean)), cov_(std::move(cov)) {
  if (mean_.size() == 0 || mean_.size() % 2 != 0) {
    throw std::invalid_argument("GaussianState: mean must have length 2 * n_modes");
  }
  if (cov_.rows() != mean_.size() || cov_.cols() != mean_.size()) {
    throw std::invalid_argument("GaussianState: covariance size does not match mean");
  }
  const double scale = std::max(1.0, cov_.cwiseAbs().maxCoeff());
  if ((cov_ - cov_.transpose()).cwiseAbs().maxCoeff() > kSymmetryTol * scale) {
    throw std::invalid_argument("GaussianState: covariance is not symmetric");
  }
  cov_ = symmetrized(cov_);
  if (symplectic_eigenvalues(cov_).minCoeff() < 1.0 - kPhysicalityTol) {
    throw std::invalid_argument("GaussianState: covariance violates the uncertainty relation");
  }
}

GaussianState GaussianState::vacuum(std::size_t n_modes) {
  if (n_modes == 0) {
    throw std::invalid_argument("vacuum: n_modes must be >= 1");
  }
  return GaussianState(Vector::Zero(2 * n_modes), Matrix::Identity(2 * n_modes, 2 * n_modes),
                       Unchecked{});
}

Eigen::Matrix2d GaussianState::block(std::size_t i, std::size_t j) const {
  check_mode(i, n_modes(), "block");
  check_mode(j, n_modes(), "block");
  return cov_.block<2, 2>(2 * i, 2 * j);
}

double GaussianState::min_symplectic_eigenvalue() const {
  return symplectic_eigenvalues(cov_).minCoeff();
}

SymplecticOp::SymplecticOp(Matrix matrix, Vector displacement)
    : matrix_(std::move(matrix)), displacement_(std::move(displacement)) {
  if (matrix_.rows() != matrix_.cols() || matrix_.rows() == 0 || matrix_.rows() % 2 != 0) {
    throw std::invalid_argument("SymplecticOp: matrix must be square with even size");
  }
  if (displacement_.size() != matrix_.rows()) {
    throw std::invalid_argument("SymplecticOp: displacement size does not match matrix");
  }
}

SymplecticOp::SymplecticOp(Matrix matrix)
    : SymplecticOp(matrix, Vector::Zero(matrix.rows())) {}

SymplecticOp SymplecticOp::identity(std::size_t n_modes) {
  if (n_modes == 0) {
    throw std::invalid_argument("SymplecticOp::identity: n_modes must be >= 1");
  }
  return SymplecticOp(Matrix::Identity(2 * n_modes, 2 * n_modes));
}

SymplecticOp SymplecticOp::then(const SymplecticOp& next) const {
  if (next.n_modes() != n_modes()) {
    throw std::invalid_argument("SymplecticOp::then: mode count mismatch");
  }
  return SymplecticOp(next.matrix_ * matrix_, next.matrix_ * displacement_ + next.displacement_);
}

SymplecticOp SymplecticOp::inverse() const {
  // S^{-1} = -Omega S^T Omega for symplectic S.
  const Matrix omega = symplectic_form(n_modes());
  Matrix inv = -omega * matrix_.transpose() * omega;
  return SymplecticOp(inv, -inv * displacement_);
}

LossChannel LossChannel::with_loss(std::size_t mode, double loss) {
  if (!(loss >= 0.0 && loss <= 1.0)) {
    throw std::invalid_argument("loss must lie in [0, 1], got " + std::to_string(loss));
  }
  return LossChannel{mode, 1.0 - loss};
}

SymplecticOp two_mode_squeezer(std::size_t n_modes, std::size_t mode_a, std::size_t mode_b,
                               double gain_G, double pump_phase) {
  if (!(gain_G >= 1.0)) {
    throw std::invalid_argument("two_mode_squeezer: gain_G must be >= 1");
  }
  if (mode_a == mode_b) {
    throw std::invalid_argument("two_mode_squeezer: modes must differ");
  }
  check_mode(mode_a, n_modes, "two_mode_squeezer");
  check_mode(mode_b, n_modes, "two_mode_squeezer");

  const double g = std::sqrt((gain_G - 1.0) * (gain_G + 1.0));
  const double c = std::cos(pump_phase);
  const double s = std::sin(pump_phase);
  // e^{i theta} b^dagger contributes (c X_b + s Y_b) to X_a and (s X_b - c Y_b) to Y_a.
  Eigen::Matrix2d cross;
  cross << c, s, s, -c;

  Matrix m = Matrix::Identity(2 * n_modes, 2 * n_modes);
  m.block<2, 2>(2 * mode_a, 2 * mode_a) = gain_G * Eigen::Matrix2d::Identity();
  m.block<2, 2>(2 * mode_b, 2 * mode_b) = gain_G * Eigen::Matrix2d::Identity();
  m.block<2, 2>(2 * mode_a, 2 * mode_b) = g * cross;
  m.block<2, 2>(2 * mode_b, 2 * mode_a) = g * cross;
  return SymplecticOp(m);
}

SymplecticOp phase_shift(std::size_t n_modes, std::size_t mode, double phi) {
  check_mode(mode, n_modes, "phase_shift");
  Matrix m = Matrix::Identity(2 * n_modes, 2 * n_modes);
  const double c = std::cos(phi);
  const double s = std::sin(phi);
  m.block<2, 2>(2 * mode, 2 * mode) << c, -s, s, c;
  return SymplecticOp(m);
}

SymplecticOp displacement(std::size_t n_modes, std::size_t mode, std::complex<double> alpha) {
  check_mode(mode, n_modes, "displacement");
  Vector d = Vector::Zero(2 * n_modes);
  d(2 * mode) = 2.0 * alpha.real();
  d(2 * mode + 1) = 2.0 * alpha.imag();
  return SymplecticOp(Matrix::Identity(2 * n_modes, 2 * n_modes), d);
}

GaussianState apply_symplectic(const GaussianState& state, const SymplecticOp& op) {
  if (op.n_modes() != state.n_modes()) {
    throw std::invalid_argument("apply_symplectic: op acts on " + std::to_string(op.n_modes()) +
                                " modes, state has " + std::to_string(state.n_modes()));
  }
  const Matrix& s = op.matrix();
  return GaussianState(s * state.mean_ + op.displacement(),
                       symmetrized(s * state.cov_ * s.transpose()), GaussianState::Unchecked{});
}

GaussianState apply_loss(const GaussianState& state, const LossChannel& channel) {
  if (!(channel.transmissivity >= 0.0 && channel.transmissivity <= 1.0)) {
    throw std::invalid_argument("apply_loss: transmissivity must lie in [0, 1]");
  }
  check_mode(channel.mode_index, state.n_modes(), "apply_loss");
  const double t = channel.transmissivity;
  const double amp = std::sqrt(t);
  const auto r = static_cast<Eigen::Index>(2 * channel.mode_index);

  Vector mean = state.mean_;
  Matrix cov = state.cov_;
  mean.segment<2>(r) *= amp;
  cov.middleRows<2>(r) *= amp;
  cov.middleCols<2>(r) *= amp;
  cov.block<2, 2>(r, r) += (1.0 - t) * Eigen::Matrix2d::Identity();
  return GaussianState(std::move(mean), std::move(cov), GaussianState::Unchecked{});
}

double homodyne_variance(const GaussianState& state, std::size_t mode, double lo_phase) {
  check_mode(mode, state.n_modes(), "homodyne_variance");
  const Eigen::Vector2d v(std::cos(lo_phase), std::sin(lo_phase));
  return v.dot(state.block(mode, mode) * v);
}

std::complex<double> mean_amplitude(const GaussianState& state, std::size_t mode) {
  check_mode(mode, state.n_modes(), "mean_amplitude");
  return {0.5 * state.mean()(2 * mode), 0.5 * state.mean()(2 * mode + 1)};
}

PhotonNumber mean_photon_number(const GaussianState& state, std::size_t mode) {
  const Eigen::Matrix2d b = state.block(mode, mode);
  return {std::norm(mean_amplitude(state, mode)), 0.25 * (b.trace() - 2.0)};
}

double to_db(double linear) {
  if (!(linear > 0.0)) {
    throw std::invalid_argument("to_db: value must be positive");
  }
  return 10.0 * std::log10(linear);
}

double from_db(double db) { return std::pow(10.0, db / 10.0); }

}  // namespace raman::gaussian
