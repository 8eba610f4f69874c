#include "raman/fit.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <optional>
#include <random>
#include <stdexcept>
#include <thread>

#include "raman/errors.hpp"
#include "raman/gaussian.hpp"
#include "raman/model.hpp"
#include "raman/optimize.hpp"

namespace raman::fit {

namespace {

using optimize::Box;
using optimize::Vec;

constexpr double kMaxRatio = 1.05;
constexpr double kHalfPi = 0.5 * std::numbers::pi;

struct Physical {
  double mu;
  double L1;
  double L2;
};

Physical to_physical(double s, double t1, double t2) {
  const double sin1 = std::sin(t1);
  const double sin2 = std::sin(t2);
  return {std::cosh(s), std::min(1.0, sin1 * sin1), std::min(1.0, sin2 * sin2)};
}

void check_design(const NoiseDataset& data) {
  if (data.size() < 4) {
    throw InsufficientData("fit needs >= 4 points, dataset '" + data.label() + "' has " + std::to_string(data.size()));
  }
  if (data.distinct_gains() < 2) {
    throw DegenerateDesign("all points of dataset '" + data.label() + "' share the same gq");
  }
}

std::vector<double> weights_of(const NoiseDataset& data) {
  std::vector<double> w;
  w.reserve(data.size());
  for (const DataPoint& p : data.points()) w.push_back(p.sigma ? 1.0 / *p.sigma : 1.0);
  return w;
}

bool has_sigma(const NoiseDataset& data) {
  return std::all_of(data.points().begin(), data.points().end(), [](const DataPoint& p) { return p.sigma.has_value(); });
}

// Weighted residuals of one dataset for internal parameters (s, t1, t2).
void residuals_into(const NoiseDataset& data, const std::vector<double>& w, double s, double t1, double t2,
                    Vec& out, Eigen::Index offset) {
  const Physical p = to_physical(s, t1, t2);
  const auto& pts = data.points();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double r = model::closed_form_R(p.mu, p.L1, p.L2, pts[i].gq);
    out(offset + static_cast<Eigen::Index>(i)) = w[i] * (r - pts[i].R);
  }
}

struct Candidate {
  optimize::Trajectory nm;
  optimize::Trajectory lm;
};

// Quasi-random multi-start: Halton points under a seeded Cranley-Patterson shift,
// each refined by Nelder-Mead and then Levenberg-Marquardt. Among minima whose
// objectives tie, the smallest first coordinate wins.
std::vector<Candidate> multistart(const optimize::Residuals& residuals, const Box& box, const FitConfig& config,
                                  Eigen::Index tie_coordinates) {
  if (config.n_starts < 1) throw std::invalid_argument("FitConfig: n_starts must be >= 1");
  const optimize::Objective objective = [&](const Vec& x) { return residuals(x).squaredNorm(); };
  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Vec shift(box.dim());
  for (Eigen::Index i = 0; i < shift.size(); ++i) shift(i) = unit(rng);

  std::vector<Candidate> out;
  for (int k = 0; k < config.n_starts; ++k) {
    Vec u = optimize::halton(static_cast<std::uint64_t>(k) + 1, box.dim()) + shift;
    u = u.array() - u.array().floor();
    const Vec x0 = box.lower.array() + u.array() * (box.upper - box.lower).array();
    Candidate c;
    c.nm = optimize::nelder_mead(objective, x0, box, {600, 1e-14, 1e-8, 0.1});
    c.lm = optimize::levenberg_marquardt(residuals, c.nm.x, box);
    out.push_back(std::move(c));
  }
  const double best = std::min_element(out.begin(), out.end(), [](const Candidate& a, const Candidate& b) {
                        return a.lm.f < b.lm.f;
                      })->lm.f;
  const double tie = best + 1e-20 + 1e-9 * best;
  std::stable_sort(out.begin(), out.end(), [&](const Candidate& a, const Candidate& b) {
    const bool ta = a.lm.f <= tie;
    const bool tb = b.lm.f <= tie;
    if (ta != tb) return ta;
    if (ta) {
      for (Eigen::Index i = 0; i < tie_coordinates; ++i) {
        if (a.lm.x(i) != b.lm.x(i)) return a.lm.x(i) < b.lm.x(i);
      }
      return a.lm.f < b.lm.f;
    }
    return a.lm.f < b.lm.f;
  });
  return out;
}

void fill_correlation(FitResult& r) {
  const Correlation c = correlation_from_fit(r);
  r.correlation_x_plus = c.x_plus;
  r.correlation_db = c.db;
}

}  // namespace

NoiseDataset::NoiseDataset(std::string label, std::vector<DataPoint> points)
    : label_(std::move(label)), points_(std::move(points)) {
  for (const DataPoint& p : points_) {
    if (!(p.gq >= 1.0)) throw std::invalid_argument("NoiseDataset: gq must be >= 1");
    if (!(p.R > 0.0 && p.R <= kMaxRatio)) {
      throw std::invalid_argument("NoiseDataset: R must lie in (0, 1.05], got " + std::to_string(p.R));
    }
    if (p.sigma && !(*p.sigma > 0.0)) throw std::invalid_argument("NoiseDataset: sigma must be > 0");
  }
  std::stable_sort(points_.begin(), points_.end(), [](const DataPoint& a, const DataPoint& b) { return a.gq < b.gq; });
}

std::size_t NoiseDataset::distinct_gains() const {
  std::size_t n = 0;
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (i == 0 || points_[i].gq != points_[i - 1].gq) ++n;
  }
  return n;
}

std::vector<double> model_curve(const NoiseDataset& data, double mu, double loss_stokes, double loss_spinwave) {
  std::vector<double> out;
  out.reserve(data.size());
  for (const DataPoint& p : data.points()) out.push_back(model::closed_form_R(mu, loss_stokes, loss_spinwave, p.gq));
  return out;
}

NoiseDataset synthesize(std::span<const double> gq_values, double mu, double loss_stokes, double loss_spinwave,
                        std::string label) {
  std::vector<DataPoint> pts;
  for (double gq : gq_values) pts.push_back({gq, model::closed_form_R(mu, loss_stokes, loss_spinwave, gq), {}});
  return NoiseDataset(std::move(label), std::move(pts));
}

FitResult fit_dataset(const NoiseDataset& data, const FitConfig& config) {
  check_design(data);
  if (!(config.mu_max > 1.0)) throw std::invalid_argument("FitConfig: mu_max must be > 1");

  const std::vector<double> w = weights_of(data);
  const auto n = static_cast<Eigen::Index>(data.size());
  const optimize::Residuals residuals = [&](const Vec& x) {
    Vec r(n);
    residuals_into(data, w, x(0), x(1), x(2), r, 0);
    return r;
  };
  const optimize::Objective objective = [&](const Vec& x) { return residuals(x).squaredNorm(); };

  Box box{Vec::Zero(3), Vec(3)};
  box.upper << std::acosh(config.mu_max), kHalfPi, kHalfPi;

  const std::vector<Candidate> candidates = multistart(residuals, box, config, 1);
  const Candidate& best = candidates.front();
  const Vec& x = best.lm.x;
  const Physical p = to_physical(x(0), x(1), x(2));

  FitResult result;
  result.label = data.label();
  result.mu_hat = p.mu;
  result.nu_hat = std::sinh(x(0));
  result.L1_hat = p.L1;
  result.L2_hat = p.L2;
  result.objective = best.lm.f;
  result.residual_rms = std::sqrt(best.lm.f / static_cast<double>(n));
  result.n_restarts_used = static_cast<int>(candidates.size());
  result.projected_gradient_norm = optimize::projected_gradient_norm(optimize::gradient(objective, x, box), x, box);

  Vec swapped = x;
  std::swap(swapped(1), swapped(2));
  result.swap_objective = objective(swapped);
  result.swap_degenerate = std::abs(result.swap_objective - result.objective) < 1e-10;

  result.objective_history = best.nm.history;
  result.objective_history.insert(result.objective_history.end(), best.lm.history.begin(), best.lm.history.end());

  // Linearized covariance, mapped from (s, t1, t2) to (mu, L1, L2).
  const Eigen::MatrixXd jac = optimize::jacobian(residuals, x, box);
  const double scale = has_sigma(data) ? 1.0 : (n > 3 ? best.lm.f / static_cast<double>(n - 3) : 0.0);
  const Eigen::Matrix3d info = jac.transpose() * jac;
  const Eigen::Matrix3d cov_internal = scale * info.completeOrthogonalDecomposition().pseudoInverse();
  const Eigen::Vector3d chain(std::sinh(x(0)), std::sin(2.0 * x(1)), std::sin(2.0 * x(2)));
  result.covariance_estimate = chain.asDiagonal() * cov_internal * chain.asDiagonal();

  fill_correlation(result);
  return result;
}

Correlation correlation_from_fit(const FitResult& fit) {
  const double x_plus = model::correlation_from_params(fit.mu_hat, fit.L1_hat, fit.L2_hat);
  return {x_plus, gaussian::to_db(x_plus / 2.0)};
}

double finite_lambda_correlation(double R_measured, double gq) {
  if (!(gq >= 1.0)) throw std::invalid_argument("finite_lambda_correlation: gq must be >= 1");
  if (!(R_measured > 0.0)) throw std::invalid_argument("finite_lambda_correlation: R must be > 0");
  return 2.0 * R_measured;
}

BootstrapResult bootstrap_uncertainty(const NoiseDataset& data, const FitResult& fit, int n_resamples,
                                      const FitConfig& config) {
  if (n_resamples < 100) throw std::invalid_argument("bootstrap_uncertainty: n_resamples must be >= 100");
  const std::vector<double> fitted = model_curve(data, fit.mu_hat, fit.L1_hat, fit.L2_hat);
  std::vector<double> resid;
  for (std::size_t i = 0; i < data.size(); ++i) resid.push_back(data.points()[i].R - fitted[i]);

  std::mt19937_64 rng(config.seed ^ 0x5bd1e995ULL);
  std::uniform_int_distribution<std::size_t> pick(0, data.size() - 1);
  std::vector<std::vector<DataPoint>> resamples(static_cast<std::size_t>(n_resamples), data.points());
  for (auto& pts : resamples) {
    for (std::size_t i = 0; i < pts.size(); ++i) pts[i].R = fitted[i] + resid[pick(rng)];
  }

  std::vector<std::optional<FitResult>> refits(resamples.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t b = next++; b < resamples.size(); b = next++) {
      FitConfig cfg = config;
      cfg.seed = config.seed + static_cast<std::uint64_t>(b) + 1;
      try {
        refits[b] = fit_dataset(NoiseDataset(data.label(), std::move(resamples[b])), cfg);
      } catch (const std::invalid_argument&) {
      }
    }
  };
  const unsigned n_threads = std::clamp(std::thread::hardware_concurrency(), 1u, 16u);
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < n_threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  std::vector<Eigen::Vector3d> params;
  std::vector<double> dbs;
  BootstrapResult out;
  out.n_resamples = n_resamples;
  for (const auto& refit : refits) {
    if (!refit) {
      ++out.n_failed;
      continue;
    }
    params.emplace_back(refit->mu_hat, refit->L1_hat, refit->L2_hat);
    dbs.push_back(refit->correlation_db);
  }
  if (out.n_failed * 5 > n_resamples) {
    throw UnstableFit("bootstrap: " + std::to_string(out.n_failed) + " of " + std::to_string(n_resamples) +
                      " refits failed");
  }

  Eigen::Vector3d mean = Eigen::Vector3d::Zero();
  for (const auto& v : params) mean += v;
  mean /= static_cast<double>(params.size());
  for (const auto& v : params) out.covariance += (v - mean) * (v - mean).transpose();
  if (params.size() > 1) out.covariance /= static_cast<double>(params.size() - 1);

  std::sort(dbs.begin(), dbs.end());
  const auto quantile = [&](double q) {
    const double pos = q * static_cast<double>(dbs.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, dbs.size() - 1);
    return dbs[lo] + (pos - static_cast<double>(lo)) * (dbs[hi] - dbs[lo]);
  };
  out.db_lower = quantile(0.025);
  out.db_upper = quantile(0.975);
  return out;
}

SharedLossFit fit_shared_losses(std::span<const NoiseDataset> datasets, const FitConfig& config) {
  if (datasets.empty()) throw InsufficientData("shared-loss fit needs at least one dataset");
  std::size_t total = 0;
  for (const NoiseDataset& d : datasets) {
    if (d.distinct_gains() < 2) throw DegenerateDesign("all points of dataset '" + d.label() + "' share the same gq");
    total += d.size();
  }
  const auto k = static_cast<Eigen::Index>(datasets.size());
  if (total < static_cast<std::size_t>(k + 3)) {
    throw InsufficientData("shared-loss fit needs more points than free parameters");
  }

  std::vector<std::vector<double>> weights;
  for (const NoiseDataset& d : datasets) weights.push_back(weights_of(d));
  const optimize::Residuals residuals = [&](const Vec& x) {
    Vec r(static_cast<Eigen::Index>(total));
    Eigen::Index offset = 0;
    for (Eigen::Index j = 0; j < k; ++j) {
      const auto& d = datasets[static_cast<std::size_t>(j)];
      residuals_into(d, weights[static_cast<std::size_t>(j)], x(j), x(k), x(k + 1), r, offset);
      offset += static_cast<Eigen::Index>(d.size());
    }
    return r;
  };

  Box box{Vec::Zero(k + 2), Vec(k + 2)};
  box.upper.head(k).setConstant(std::acosh(config.mu_max));
  box.upper.tail(2).setConstant(kHalfPi);
  const std::vector<Candidate> candidates = multistart(residuals, box, config, k);
  const Vec& x = candidates.front().lm.x;

  SharedLossFit out;
  const Physical losses = to_physical(0.0, x(k), x(k + 1));
  out.L1_hat = losses.L1;
  out.L2_hat = losses.L2;
  out.objective = candidates.front().lm.f;
  Eigen::Index offset = 0;
  const Vec r = residuals(x);
  for (Eigen::Index j = 0; j < k; ++j) {
    const auto& d = datasets[static_cast<std::size_t>(j)];
    const auto n = static_cast<Eigen::Index>(d.size());
    FitResult f;
    f.label = d.label();
    f.mu_hat = std::cosh(x(j));
    f.nu_hat = std::sinh(x(j));
    f.L1_hat = out.L1_hat;
    f.L2_hat = out.L2_hat;
    f.objective = r.segment(offset, n).squaredNorm();
    f.residual_rms = std::sqrt(f.objective / static_cast<double>(n));
    f.n_restarts_used = static_cast<int>(candidates.size());
    fill_correlation(f);
    out.per_dataset.push_back(std::move(f));
    offset += n;
  }
  return out;
}

}  // namespace raman::fit
