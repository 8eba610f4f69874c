#pragma once

// Brute-force truncated Fock-space simulator for two bosonic modes a (0) and
// b (1), each truncated at n_max photons. Used as an independent check of the
// Gaussian engine at small squeezing.
//
// Two-mode squeezers conserve the photon-number difference d = n_a - n_b, so
// the truncated generator is block diagonal over sectors of fixed d. Unitaries
// are exponentiated block by block and density operators are stored as blocks
// rho_{d,d'} between sectors.

#include <complex>
#include <cstddef>
#include <map>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace raman::fock {

using Complex = std::complex<double>;

/// Accepted population on the truncation edge (n_a = n_max or n_b = n_max).
inline constexpr double kEdgeTolerance = 1e-8;

/// Sector of fixed photon-number difference d. Element i holds
/// n_b = nb_min + i and n_a = n_b + d.
struct Sector {
  int d = 0;
  int nb_min = 0;
  int size = 0;

  static Sector of(int d, int n_max);
  int n_a(int i) const { return nb_min + i + d; }
  int n_b(int i) const { return nb_min + i; }
  /// Index of (n_a, n_b) inside this sector, assuming n_a - n_b == d.
  int index_of_nb(int nb) const { return nb - nb_min; }
};

class FockState {
 public:
  /// Amplitudes indexed by n_a * (n_max + 1) + n_b.
  FockState(int n_max, Eigen::VectorXcd amplitudes);

  static FockState vacuum(int n_max);

  static constexpr int n_modes() { return 2; }
  int n_max() const { return n_max_; }
  Eigen::Index dim() const { return amplitudes_.size(); }
  Eigen::Index index(int n_a, int n_b) const { return static_cast<Eigen::Index>(n_a) * (n_max_ + 1) + n_b; }
  Complex amplitude(int n_a, int n_b) const { return amplitudes_(index(n_a, n_b)); }
  const Eigen::VectorXcd& amplitudes() const { return amplitudes_; }

  double norm() const { return amplitudes_.norm(); }
  double edge_population() const;

 private:
  int n_max_;
  Eigen::VectorXcd amplitudes_;
};

/// Hermitian trace-one operator stored as sector blocks.
class DensityOperator {
 public:
  using Key = std::pair<int, int>;

  static DensityOperator from_pure(const FockState& psi);

  int n_max() const { return n_max_; }
  double trace() const;
  double edge_population() const;
  const std::map<Key, Eigen::MatrixXcd>& blocks() const { return blocks_; }

  /// Dense matrix in the FockState basis. Only for small n_max.
  Eigen::MatrixXcd matrix() const;
  /// max |rho_{d,d'} - rho_{d',d}^dagger|.
  double hermiticity_error() const;

 private:
  explicit DensityOperator(int n_max) : n_max_(n_max) {}
  void add_block(const Key& key, Eigen::MatrixXcd m);

  friend class TmsUnitary;
  friend DensityOperator apply_phase(const DensityOperator&, int, double);
  friend DensityOperator apply_loss_kraus(const DensityOperator&, int, double);

  int n_max_;
  std::map<Key, Eigen::MatrixXcd> blocks_;
};

/// Matrix exponential by scaling and squaring with a [7/7] Pade approximant.
Eigen::MatrixXd expm(const Eigen::MatrixXd& a);

/// exp(r (e^{i theta} a^dagger b^dagger - e^{-i theta} a b)) on the truncated
/// space. Heisenberg picture: a -> cosh(r) a + e^{i theta} sinh(r) b^dagger.
/// The theta = 0 blocks are real; other phases follow from conjugation with
/// e^{i theta n_a}.
class TmsUnitary {
 public:
  TmsUnitary(double r, int n_max);

  double r() const { return r_; }
  int n_max() const { return n_max_; }
  const Eigen::MatrixXd& block(int d) const { return blocks_.at(static_cast<std::size_t>(d + n_max_)); }

  /// Throws TruncationError if the result has edge population >= kEdgeTolerance.
  FockState apply(const FockState& psi, double theta) const;
  DensityOperator apply(const DensityOperator& rho, double theta) const;

 private:
  double r_;
  int n_max_;
  std::vector<Eigen::MatrixXd> blocks_;  // indexed by d + n_max
};

/// Two-mode squeezed vacuum sum_n (e^{i theta} tanh r)^n / cosh r |n, n>,
/// renormalized after truncation. Throws TruncationError unless
/// tanh(r)^n_max / cosh(r) < 1e-6.
FockState tmsv(double r, double theta, int n_max);

FockState apply_tms_unitary(const FockState& psi, double r, double theta, int mode_a = 0, int mode_b = 1);
DensityOperator apply_tms_unitary(const DensityOperator& rho, double r, double theta, int mode_a = 0,
                                  int mode_b = 1);

/// exp(i phi n_mode): a -> e^{i phi} a.
FockState apply_phase(const FockState& psi, int mode, double phi);
DensityOperator apply_phase(const DensityOperator& rho, int mode, double phi);

/// Pure-loss channel with transmissivity 1 - loss, as a Kraus sum.
DensityOperator apply_loss_kraus(const DensityOperator& rho, int mode, double loss);

/// Variance of X_phi = e^{-i phi} a + e^{i phi} a^dagger, evaluated from the
/// normal-ordered moments <a>, <a^2>, <a^dagger a>.
double quadrature_variance(const FockState& psi, int mode, double lo_phase);
double quadrature_variance(const DensityOperator& rho, int mode, double lo_phase);

double mean_photon_number(const FockState& psi, int mode);
double mean_photon_number(const DensityOperator& rho, int mode);

/// |<a|b>|^2.
double fidelity(const FockState& a, const FockState& b);

/// Squeezer, losses on both modes, phase on a, squeezer, homodyne on a.
struct CascadeCircuit {
  double r1 = 0.0;
  double theta1 = 0.0;
  double loss_a = 0.0;
  double loss_b = 0.0;
  double phi = 0.0;
  double r2 = 0.0;
  double theta2 = 0.0;
  double lo_phase = 0.0;
};

struct OracleOptions {
  int n_max_start = 40;
  int n_max_cap = 160;
};

struct OracleResult {
  double variance = 0.0;
  double mean_photons = 0.0;
  int n_max = 0;
  double edge_population = 0.0;
};

/// Caller-owned store of squeezer unitaries keyed by (r, n_max), so repeated
/// circuits share exponentials.
class UnitaryCache {
 public:
  const TmsUnitary& get(double r, int n_max);

 private:
  std::map<std::pair<double, int>, TmsUnitary> store_;
};

/// Runs the circuit at n_max_start, doubling the truncation until every stage
/// passes the edge check. Throws TruncationError past n_max_cap.
OracleResult run_cascade(const CascadeCircuit& circuit, const OracleOptions& options = {},
                         UnitaryCache* cache = nullptr);

}  // namespace raman::fock
