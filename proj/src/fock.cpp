#include "raman/fock.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "raman/errors.hpp"

namespace raman::fock {

namespace {

void check_n_max(int n_max) {
  if (n_max < 1) throw std::invalid_argument("fock: n_max must be >= 1");
}

void check_mode(int mode) {
  if (mode != 0 && mode != 1) throw std::invalid_argument("fock: mode must be 0 or 1");
}

void check_pair(int mode_a, int mode_b) {
  check_mode(mode_a);
  check_mode(mode_b);
  if (mode_a == mode_b) throw std::invalid_argument("fock: squeezer modes must differ");
}

void check_edge(double edge, int n_max, const char* where) {
  if (!(edge < kEdgeTolerance)) {
    throw TruncationError(std::string(where) + ": edge population " + std::to_string(edge) +
                          " at n_max = " + std::to_string(n_max));
  }
}

int photons(const Sector& s, int i, int mode) { return mode == 0 ? s.n_a(i) : s.n_b(i); }

Eigen::VectorXcd phases(const Sector& s, double theta) {
  Eigen::VectorXcd p(s.size);
  for (int i = 0; i < s.size; ++i) p(i) = std::polar(1.0, theta * s.n_a(i));
  return p;
}

// sqrt(C(n, k) t^(n-k) l^k), with 0^0 = 1.
Eigen::MatrixXd kraus_coefficients(int n_max, double loss) {
  const double t = 1.0 - loss;
  const double log_t = t > 0.0 ? std::log(t) : 0.0;
  const double log_l = loss > 0.0 ? std::log(loss) : 0.0;
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(n_max + 1, n_max + 1);
  for (int n = 0; n <= n_max; ++n) {
    for (int k = 0; k <= n; ++k) {
      if ((t == 0.0 && n > k) || (loss == 0.0 && k > 0)) continue;
      const double log_binom = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
      const double log_c = log_binom + (n - k) * log_t + k * log_l;
      c(n, k) = std::exp(0.5 * log_c);
    }
  }
  return c;
}

}  // namespace

Sector Sector::of(int d, int n_max) {
  if (std::abs(d) > n_max) throw std::invalid_argument("Sector: |d| exceeds n_max");
  return {d, std::max(0, -d), n_max + 1 - std::abs(d)};
}

FockState::FockState(int n_max, Eigen::VectorXcd amplitudes) : n_max_(n_max), amplitudes_(std::move(amplitudes)) {
  check_n_max(n_max);
  if (amplitudes_.size() != static_cast<Eigen::Index>(n_max + 1) * (n_max + 1)) {
    throw std::invalid_argument("FockState: amplitude vector must have (n_max + 1)^2 entries");
  }
}

FockState FockState::vacuum(int n_max) {
  check_n_max(n_max);
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(n_max + 1) * (n_max + 1));
  v(0) = 1.0;
  return FockState(n_max, std::move(v));
}

double FockState::edge_population() const {
  double edge = 0.0;
  for (int k = 0; k <= n_max_; ++k) {
    edge += std::norm(amplitude(n_max_, k));
    if (k < n_max_) edge += std::norm(amplitude(k, n_max_));
  }
  return edge;
}

void DensityOperator::add_block(const Key& key, Eigen::MatrixXcd m) {
  auto it = blocks_.find(key);
  if (it == blocks_.end()) {
    blocks_.emplace(key, std::move(m));
  } else {
    it->second += m;
  }
}

DensityOperator DensityOperator::from_pure(const FockState& psi) {
  const int n = psi.n_max();
  std::map<int, Eigen::VectorXcd> slices;
  for (int d = -n; d <= n; ++d) {
    const Sector s = Sector::of(d, n);
    Eigen::VectorXcd v(s.size);
    for (int i = 0; i < s.size; ++i) v(i) = psi.amplitude(s.n_a(i), s.n_b(i));
    if (v.squaredNorm() > 0.0) slices.emplace(d, std::move(v));
  }
  DensityOperator rho(n);
  for (const auto& [d, v] : slices) {
    for (const auto& [dp, w] : slices) {
      rho.blocks_.emplace(Key{d, dp}, v * w.adjoint());
    }
  }
  return rho;
}

double DensityOperator::trace() const {
  double tr = 0.0;
  for (const auto& [key, m] : blocks_) {
    if (key.first == key.second) tr += m.trace().real();
  }
  return tr;
}

double DensityOperator::edge_population() const {
  // The last element of every sector is the one touching n_max.
  double edge = 0.0;
  for (const auto& [key, m] : blocks_) {
    if (key.first == key.second) edge += m(m.rows() - 1, m.cols() - 1).real();
  }
  return edge;
}

Eigen::MatrixXcd DensityOperator::matrix() const {
  const Eigen::Index dim = static_cast<Eigen::Index>(n_max_ + 1) * (n_max_ + 1);
  Eigen::MatrixXcd dense = Eigen::MatrixXcd::Zero(dim, dim);
  for (const auto& [key, m] : blocks_) {
    const Sector row = Sector::of(key.first, n_max_);
    const Sector col = Sector::of(key.second, n_max_);
    for (int i = 0; i < row.size; ++i) {
      for (int j = 0; j < col.size; ++j) {
        dense(static_cast<Eigen::Index>(row.n_a(i)) * (n_max_ + 1) + row.n_b(i),
              static_cast<Eigen::Index>(col.n_a(j)) * (n_max_ + 1) + col.n_b(j)) = m(i, j);
      }
    }
  }
  return dense;
}

double DensityOperator::hermiticity_error() const {
  double worst = 0.0;
  for (const auto& [key, m] : blocks_) {
    auto it = blocks_.find(Key{key.second, key.first});
    const double err = it == blocks_.end() ? m.cwiseAbs().maxCoeff()
                                           : (m - it->second.adjoint()).cwiseAbs().maxCoeff();
    worst = std::max(worst, err);
  }
  return worst;
}

Eigen::MatrixXd expm(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("expm: matrix must be square");
  const Eigen::Index n = a.rows();
  if (n == 0) return a;
  constexpr int kOrder = 7;
  constexpr double kTheta = 0.5;

  const double norm = a.cwiseAbs().colwise().sum().maxCoeff();
  int squarings = 0;
  if (norm > kTheta) squarings = static_cast<int>(std::ceil(std::log2(norm / kTheta)));
  const Eigen::MatrixXd x = a / std::ldexp(1.0, squarings);

  double c[kOrder + 1];
  c[0] = 1.0;
  for (int j = 1; j <= kOrder; ++j) {
    c[j] = c[j - 1] * (kOrder - j + 1) / (j * (2.0 * kOrder - j + 1));
  }
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd x2 = x * x;
  const Eigen::MatrixXd x4 = x2 * x2;
  const Eigen::MatrixXd x6 = x4 * x2;
  const Eigen::MatrixXd odd = x * (c[7] * x6 + c[5] * x4 + c[3] * x2 + c[1] * id);
  const Eigen::MatrixXd even = c[6] * x6 + c[4] * x4 + c[2] * x2 + c[0] * id;
  Eigen::MatrixXd r = (even - odd).partialPivLu().solve(even + odd);
  for (int k = 0; k < squarings; ++k) r = r * r;
  return r;
}

TmsUnitary::TmsUnitary(double r, int n_max) : r_(r), n_max_(n_max) {
  check_n_max(n_max);
  if (!(r >= 0.0)) throw std::invalid_argument("TmsUnitary: r must be >= 0");
  blocks_.reserve(static_cast<std::size_t>(2 * n_max + 1));
  for (int d = -n_max; d <= n_max; ++d) {
    const Sector s = Sector::of(d, n_max);
    Eigen::MatrixXd gen = Eigen::MatrixXd::Zero(s.size, s.size);
    for (int i = 0; i + 1 < s.size; ++i) {
      // <n_a + 1, n_b + 1| a^dagger b^dagger |n_a, n_b>
      const double amp = r * std::sqrt((s.n_a(i) + 1.0) * (s.n_b(i) + 1.0));
      gen(i + 1, i) = amp;
      gen(i, i + 1) = -amp;
    }
    blocks_.push_back(expm(gen));
  }
}

FockState TmsUnitary::apply(const FockState& psi, double theta) const {
  if (psi.n_max() != n_max_) throw std::invalid_argument("TmsUnitary: truncation mismatch");
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(psi.dim());
  for (int d = -n_max_; d <= n_max_; ++d) {
    const Sector s = Sector::of(d, n_max_);
    Eigen::VectorXcd v(s.size);
    for (int i = 0; i < s.size; ++i) v(i) = psi.amplitude(s.n_a(i), s.n_b(i));
    if (v.squaredNorm() == 0.0) continue;
    const Eigen::VectorXcd p = phases(s, theta);
    const Eigen::VectorXcd w = p.conjugate().cwiseProduct(v);
    const Eigen::MatrixXd& u = block(d);
    const Eigen::VectorXcd uw = (u * w.real()).cast<Complex>() + Complex(0.0, 1.0) * (u * w.imag()).cast<Complex>();
    const Eigen::VectorXcd res = p.cwiseProduct(uw);
    for (int i = 0; i < s.size; ++i) out(psi.index(s.n_a(i), s.n_b(i))) = res(i);
  }
  FockState result(n_max_, std::move(out));
  check_edge(result.edge_population(), n_max_, "two-mode squeezer");
  return result;
}

DensityOperator TmsUnitary::apply(const DensityOperator& rho, double theta) const {
  if (rho.n_max() != n_max_) throw std::invalid_argument("TmsUnitary: truncation mismatch");
  DensityOperator out(n_max_);
  for (const auto& [key, m] : rho.blocks_) {
    const Sector row = Sector::of(key.first, n_max_);
    const Sector col = Sector::of(key.second, n_max_);
    const Eigen::VectorXcd pr = phases(row, theta);
    const Eigen::VectorXcd pc = phases(col, theta);
    // P U0 P^dagger rho P U0^T P^dagger, with P = exp(i theta n_a) diagonal.
    const Eigen::MatrixXcd inner = pr.conjugate().asDiagonal() * m * pc.asDiagonal();
    const Eigen::MatrixXd& ur = block(key.first);
    const Eigen::MatrixXd& uc = block(key.second);
    Eigen::MatrixXcd mid(row.size, col.size);
    mid.real() = ur * inner.real() * uc.transpose();
    mid.imag() = ur * inner.imag() * uc.transpose();
    out.blocks_.emplace(key, pr.asDiagonal() * mid * pc.conjugate().asDiagonal());
  }
  check_edge(out.edge_population(), n_max_, "two-mode squeezer");
  return out;
}

FockState tmsv(double r, double theta, int n_max) {
  check_n_max(n_max);
  if (!(r >= 0.0)) throw std::invalid_argument("tmsv: r must be >= 0");
  const double t = std::tanh(r);
  if (!(std::pow(t, n_max) / std::cosh(r) < 1e-6)) {
    throw TruncationError("tmsv: n_max = " + std::to_string(n_max) + " too small for r = " + std::to_string(r));
  }
  FockState psi = FockState::vacuum(n_max);
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(psi.dim());
  const Complex ratio = std::polar(t, theta);
  Complex term = 1.0 / std::cosh(r);
  for (int n = 0; n <= n_max; ++n) {
    v(psi.index(n, n)) = term;
    term *= ratio;
  }
  v.normalize();
  return FockState(n_max, std::move(v));
}

FockState apply_tms_unitary(const FockState& psi, double r, double theta, int mode_a, int mode_b) {
  check_pair(mode_a, mode_b);
  return TmsUnitary(r, psi.n_max()).apply(psi, theta);
}

DensityOperator apply_tms_unitary(const DensityOperator& rho, double r, double theta, int mode_a, int mode_b) {
  check_pair(mode_a, mode_b);
  return TmsUnitary(r, rho.n_max()).apply(rho, theta);
}

FockState apply_phase(const FockState& psi, int mode, double phi) {
  check_mode(mode);
  Eigen::VectorXcd v = psi.amplitudes();
  const int n = psi.n_max();
  for (int na = 0; na <= n; ++na) {
    for (int nb = 0; nb <= n; ++nb) {
      v(psi.index(na, nb)) *= std::polar(1.0, phi * (mode == 0 ? na : nb));
    }
  }
  return FockState(n, std::move(v));
}

DensityOperator apply_phase(const DensityOperator& rho, int mode, double phi) {
  check_mode(mode);
  DensityOperator out(rho.n_max());
  for (const auto& [key, m] : rho.blocks_) {
    const Sector row = Sector::of(key.first, rho.n_max());
    const Sector col = Sector::of(key.second, rho.n_max());
    Eigen::MatrixXcd w = m;
    for (int i = 0; i < row.size; ++i) {
      for (int j = 0; j < col.size; ++j) {
        w(i, j) *= std::polar(1.0, phi * (photons(row, i, mode) - photons(col, j, mode)));
      }
    }
    out.blocks_.emplace(key, std::move(w));
  }
  return out;
}

DensityOperator apply_loss_kraus(const DensityOperator& rho, int mode, double loss) {
  check_mode(mode);
  if (!(loss >= 0.0 && loss <= 1.0)) throw std::invalid_argument("apply_loss_kraus: loss must lie in [0, 1]");
  if (loss == 0.0) return rho;

  const int n = rho.n_max();
  const Eigen::MatrixXd c = kraus_coefficients(n, loss);
  // Removing k photons from mode a moves sector d to d - k; from mode b,
  // d to d + k. n of the other mode is unchanged.
  const int shift = mode == 0 ? -1 : 1;
  DensityOperator out(n);
  for (const auto& [key, m] : rho.blocks_) {
    const Sector row = Sector::of(key.first, n);
    const Sector col = Sector::of(key.second, n);
    for (int k = 0; k <= n; ++k) {
      const int d_row = key.first + shift * k;
      const int d_col = key.second + shift * k;
      if (std::abs(d_row) > n || std::abs(d_col) > n) break;
      const Sector row_out = Sector::of(d_row, n);
      const Sector col_out = Sector::of(d_col, n);
      Eigen::MatrixXcd w = Eigen::MatrixXcd::Zero(row_out.size, col_out.size);
      bool any = false;
      for (int i = 0; i < row.size; ++i) {
        const int ni = photons(row, i, mode);
        if (ni < k || c(ni, k) == 0.0) continue;
        const int nb_i = mode == 0 ? row.n_b(i) : row.n_b(i) - k;
        const int io = row_out.index_of_nb(nb_i);
        for (int j = 0; j < col.size; ++j) {
          const int nj = photons(col, j, mode);
          if (nj < k || c(nj, k) == 0.0) continue;
          const int nb_j = mode == 0 ? col.n_b(j) : col.n_b(j) - k;
          w(io, col_out.index_of_nb(nb_j)) += c(ni, k) * c(nj, k) * m(i, j);
          any = true;
        }
      }
      if (any) out.add_block({d_row, d_col}, std::move(w));
    }
  }
  return out;
}

namespace {

// <a^p> with p = 1, 2 on `mode`, as sum_x f(x) rho(x, x - p e_mode).
Complex lowering_moment(const DensityOperator& rho, int mode, int p) {
  const int n = rho.n_max();
  const int shift = mode == 0 ? -p : p;
  Complex acc = 0.0;
  for (const auto& [key, m] : rho.blocks()) {
    if (key.second != key.first + shift) continue;
    const Sector row = Sector::of(key.first, n);
    const Sector col = Sector::of(key.second, n);
    for (int i = 0; i < row.size; ++i) {
      const int photons_i = photons(row, i, mode);
      if (photons_i < p) continue;
      const int nb = mode == 0 ? row.n_b(i) : row.n_b(i) - p;
      const int j = col.index_of_nb(nb);
      if (j < 0 || j >= col.size) continue;
      double f = 1.0;
      for (int q = 0; q < p; ++q) f *= photons_i - q;
      acc += std::sqrt(f) * m(i, j);
    }
  }
  return acc;
}

Complex lowering_moment(const FockState& psi, int mode, int p) {
  const int n = psi.n_max();
  Complex acc = 0.0;
  for (int na = 0; na <= n; ++na) {
    for (int nb = 0; nb <= n; ++nb) {
      const int k = mode == 0 ? na : nb;
      if (k < p) continue;
      double f = 1.0;
      for (int q = 0; q < p; ++q) f *= k - q;
      const Complex lowered = mode == 0 ? psi.amplitude(na - p, nb) : psi.amplitude(na, nb - p);
      acc += std::conj(lowered) * std::sqrt(f) * psi.amplitude(na, nb);
    }
  }
  return acc;
}

double variance_from_moments(Complex a1, Complex a2, double n, double lo_phase) {
  const Complex rot = std::polar(1.0, -lo_phase);
  const double mean = 2.0 * (rot * a1).real();
  return 2.0 * n + 1.0 + 2.0 * (rot * rot * a2).real() - mean * mean;
}

}  // namespace

double mean_photon_number(const FockState& psi, int mode) {
  check_mode(mode);
  double acc = 0.0;
  for (int na = 0; na <= psi.n_max(); ++na) {
    for (int nb = 0; nb <= psi.n_max(); ++nb) {
      acc += (mode == 0 ? na : nb) * std::norm(psi.amplitude(na, nb));
    }
  }
  return acc / psi.amplitudes().squaredNorm();
}

double mean_photon_number(const DensityOperator& rho, int mode) {
  check_mode(mode);
  double acc = 0.0;
  for (const auto& [key, m] : rho.blocks()) {
    if (key.first != key.second) continue;
    const Sector s = Sector::of(key.first, rho.n_max());
    for (int i = 0; i < s.size; ++i) acc += photons(s, i, mode) * m(i, i).real();
  }
  return acc / rho.trace();
}

double quadrature_variance(const FockState& psi, int mode, double lo_phase) {
  check_mode(mode);
  const double norm2 = psi.amplitudes().squaredNorm();
  return variance_from_moments(lowering_moment(psi, mode, 1) / norm2, lowering_moment(psi, mode, 2) / norm2,
                               mean_photon_number(psi, mode), lo_phase);
}

double quadrature_variance(const DensityOperator& rho, int mode, double lo_phase) {
  check_mode(mode);
  const double tr = rho.trace();
  return variance_from_moments(lowering_moment(rho, mode, 1) / tr, lowering_moment(rho, mode, 2) / tr,
                               mean_photon_number(rho, mode), lo_phase);
}

double fidelity(const FockState& a, const FockState& b) {
  if (a.n_max() != b.n_max()) throw std::invalid_argument("fidelity: truncation mismatch");
  return std::norm(a.amplitudes().dot(b.amplitudes()));
}

const TmsUnitary& UnitaryCache::get(double r, int n_max) {
  const auto key = std::make_pair(r, n_max);
  auto it = store_.find(key);
  if (it == store_.end()) it = store_.emplace(key, TmsUnitary(r, n_max)).first;
  return it->second;
}

OracleResult run_cascade(const CascadeCircuit& circuit, const OracleOptions& options, UnitaryCache* cache) {
  if (options.n_max_start < 1 || options.n_max_cap < options.n_max_start) {
    throw std::invalid_argument("run_cascade: need 1 <= n_max_start <= n_max_cap");
  }
  UnitaryCache local;
  UnitaryCache& store = cache != nullptr ? *cache : local;
  for (int n = options.n_max_start;; n *= 2) {
    try {
      const FockState psi = store.get(circuit.r1, n).apply(FockState::vacuum(n), circuit.theta1);
      DensityOperator rho = DensityOperator::from_pure(psi);
      rho = apply_loss_kraus(rho, 0, circuit.loss_a);
      rho = apply_loss_kraus(rho, 1, circuit.loss_b);
      rho = apply_phase(rho, 0, circuit.phi);
      rho = store.get(circuit.r2, n).apply(rho, circuit.theta2);
      return {quadrature_variance(rho, 0, circuit.lo_phase), mean_photon_number(rho, 0), n, rho.edge_population()};
    } catch (const TruncationError&) {
      if (2 * n > options.n_max_cap) throw;
    }
  }
}

}  // namespace raman::fock
