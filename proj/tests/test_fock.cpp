#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "raman/errors.hpp"
#include "raman/fock.hpp"
#include "raman/oracle_check.hpp"

using namespace raman::fock;
using doctest::Approx;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kN = 40;

double min_eigenvalue(const DensityOperator& rho) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho.matrix(), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

}  // namespace

TEST_CASE("sector bookkeeping") {
  const Sector s = Sector::of(-3, 10);
  CHECK(s.nb_min == 3);
  CHECK(s.size == 8);
  CHECK(s.n_a(0) == 0);
  CHECK(s.n_b(0) == 3);
  CHECK(s.index_of_nb(5) == 2);
  CHECK(Sector::of(4, 10).size == 7);
}

TEST_CASE("expm") {
  Eigen::MatrixXd a(2, 2);
  a << 0.0, 2.0, -2.0, 0.0;
  const Eigen::MatrixXd e = expm(a);
  CHECK(e(0, 0) == Approx(std::cos(2.0)).epsilon(1e-14));
  CHECK(e(0, 1) == Approx(std::sin(2.0)).epsilon(1e-14));
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(3, 3);
  d.diagonal() << 1.0, -4.0, 9.0;
  CHECK(expm(d)(2, 2) == Approx(std::exp(9.0)).epsilon(1e-12));
}

TEST_CASE("tmsv") {
  const FockState zero = tmsv(0.0, 0.0, kN);
  CHECK(std::abs(zero.amplitude(0, 0)) == Approx(1.0));
  CHECK(zero.norm() == Approx(1.0));

  const FockState s = tmsv(0.5, 0.3, kN);
  CHECK(s.norm() == Approx(1.0).epsilon(1e-12));
  CHECK(mean_photon_number(s, 0) == Approx(0.2715403174076219).epsilon(1e-10));
  CHECK(mean_photon_number(s, 1) == Approx(0.2715403174076219).epsilon(1e-10));
  CHECK(quadrature_variance(s, 0, 0.0) == Approx(1.5430806348152437).epsilon(1e-10));
  CHECK(quadrature_variance(tmsv(0.8, 0.0, kN), 1, 0.4) == Approx(std::cosh(1.6)).epsilon(1e-10));
  CHECK(s.edge_population() < kEdgeTolerance);

  CHECK_THROWS_AS(tmsv(1.0, 0.0, 10), raman::TruncationError);
  CHECK_THROWS_AS(tmsv(-0.1, 0.0, kN), std::invalid_argument);
}

TEST_CASE("apply_tms_unitary") {
  const FockState vac = FockState::vacuum(kN);
  const FockState same = apply_tms_unitary(vac, 0.0, 0.0);
  CHECK(fidelity(same, vac) == Approx(1.0).epsilon(1e-15));

  const FockState via_unitary = apply_tms_unitary(vac, 0.5, 0.7);
  CHECK(via_unitary.norm() == Approx(1.0).epsilon(1e-8));
  CHECK(fidelity(via_unitary, tmsv(0.5, 0.7, kN)) > 1.0 - 1e-8);

  const FockState twice = apply_tms_unitary(apply_tms_unitary(vac, 0.3, 0.0), 0.3, 0.0);
  CHECK(fidelity(twice, apply_tms_unitary(vac, 0.6, 0.0)) > 1.0 - 1e-8);

  const FockState amplified = apply_tms_unitary(vac, 0.6, 0.2);
  const FockState undone = apply_tms_unitary(amplified, 0.4, 0.2 + kPi);
  CHECK(mean_photon_number(undone, 0) < mean_photon_number(amplified, 0));
  CHECK(mean_photon_number(undone, 0) == Approx(std::pow(std::sinh(0.2), 2)).epsilon(1e-8));

  const FockState swapped = apply_tms_unitary(vac, 0.5, 0.0, 1, 0);
  CHECK(fidelity(swapped, tmsv(0.5, 0.0, kN)) > 1.0 - 1e-8);
  CHECK_THROWS_AS(apply_tms_unitary(vac, 0.5, 0.0, 0, 0), std::invalid_argument);
  CHECK_THROWS_AS(apply_tms_unitary(vac, 0.5, 0.0, 0, 2), std::invalid_argument);

  CHECK_THROWS_AS(apply_tms_unitary(FockState::vacuum(8), 1.0, 0.0), raman::TruncationError);
}

TEST_CASE("photon-number difference is conserved by the squeezer") {
  Eigen::VectorXcd amp = Eigen::VectorXcd::Zero((kN + 1) * (kN + 1));
  amp(FockState::vacuum(kN).index(2, 0)) = 1.0;
  const FockState in(kN, amp);
  const FockState out = apply_tms_unitary(in, 0.4, 0.9);
  CHECK(mean_photon_number(out, 0) - mean_photon_number(out, 1) == Approx(2.0).epsilon(1e-9));
  CHECK(mean_photon_number(out, 0) > 2.0);
}

TEST_CASE("apply_loss_kraus") {
  const DensityOperator rho = DensityOperator::from_pure(tmsv(0.5, 0.0, kN));
  const DensityOperator same = apply_loss_kraus(rho, 0, 0.0);
  CHECK((same.matrix() - rho.matrix()).cwiseAbs().maxCoeff() < 1e-15);

  const DensityOperator reset = apply_loss_kraus(rho, 1, 1.0);
  CHECK(mean_photon_number(reset, 1) == Approx(0.0).epsilon(1e-15));
  CHECK(quadrature_variance(reset, 1, 0.3) == Approx(1.0).epsilon(1e-12));

  const DensityOperator half = apply_loss_kraus(rho, 0, 0.5);
  CHECK(half.trace() == Approx(1.0).epsilon(1e-9));
  CHECK(quadrature_variance(half, 0, 0.0) == Approx(0.5 * std::cosh(1.0) + 0.5).epsilon(1e-10));
  CHECK(mean_photon_number(half, 0) == Approx(0.5 * mean_photon_number(rho, 0)).epsilon(1e-10));
  CHECK(half.hermiticity_error() < 1e-9);
  CHECK(min_eigenvalue(apply_loss_kraus(DensityOperator::from_pure(tmsv(0.5, 0.0, 24)), 0, 0.5)) > -1e-9);

  CHECK_THROWS_AS(apply_loss_kraus(rho, 0, 1.2), std::invalid_argument);
}

TEST_CASE("density-operator operations agree with pure-state ones") {
  const FockState psi = apply_phase(tmsv(0.4, 0.2, kN), 0, 1.1);
  const DensityOperator rho = apply_phase(DensityOperator::from_pure(tmsv(0.4, 0.2, kN)), 0, 1.1);
  CHECK(quadrature_variance(rho, 0, 0.5) == Approx(quadrature_variance(psi, 0, 0.5)).epsilon(1e-12));

  const DensityOperator lossy = apply_loss_kraus(apply_loss_kraus(rho, 0, 0.3), 1, 0.2);
  const DensityOperator out = apply_tms_unitary(lossy, 0.5, 0.0);
  CHECK(out.trace() == Approx(1.0).epsilon(1e-8));
  CHECK(out.hermiticity_error() < 1e-9);
  const DensityOperator small = apply_tms_unitary(
      apply_loss_kraus(DensityOperator::from_pure(tmsv(0.4, 0.2, 24)), 1, 0.2), 0.3, 0.0);
  CHECK(min_eigenvalue(small) > -1e-9);
  CHECK(out.edge_population() < kEdgeTolerance);
}

TEST_CASE("quadrature_variance") {
  CHECK(quadrature_variance(FockState::vacuum(kN), 0, 0.7) == Approx(1.0).epsilon(1e-14));
  CHECK(quadrature_variance(DensityOperator::from_pure(FockState::vacuum(kN)), 1, 0.0) == Approx(1.0));
  CHECK(quadrature_variance(tmsv(0.5, 0.0, kN), 0, 0.0) == Approx(1.5430806348152437).epsilon(1e-10));

  CascadeCircuit c;
  c.r1 = 0.4;
  c.loss_a = 0.1;
  c.loss_b = 0.2;
  c.phi = kPi;
  c.r2 = 0.5;
  const OracleResult r = run_cascade(c);
  CHECK(std::abs(r.variance - 1.1169267725096563) < 1e-9);
  CHECK(std::abs(r.variance - raman::oracle::gaussian_variance(c)) < 1e-6);
  CHECK(r.edge_population < kEdgeTolerance);
  CHECK(r.n_max == 40);
}

TEST_CASE("adaptive truncation") {
  CascadeCircuit c;
  c.r1 = 1.0;
  c.r2 = 0.5;
  const OracleResult r = run_cascade(c, {20, 160});
  CHECK(r.n_max > 20);
  CHECK(std::abs(r.variance - raman::oracle::gaussian_variance(c)) < 1e-6);

  CHECK_THROWS_AS(run_cascade(c, {10, 20}), raman::TruncationError);
}

TEST_CASE("vacuum battery is exact") {
  const auto report = raman::oracle::run_battery(raman::oracle::vacuum_battery());
  CHECK(report.outcomes.size() == 9);
  CHECK(report.max_deviation < 1e-12);
}
