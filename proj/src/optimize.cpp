#include "raman/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace raman::optimize {

namespace {

constexpr int kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};

bool at_lower(const Vec& x, const Box& box, Eigen::Index i) {
  return x(i) <= box.lower(i) + 1e-14 * std::max(1.0, std::abs(box.lower(i)));
}

bool at_upper(const Vec& x, const Box& box, Eigen::Index i) {
  return x(i) >= box.upper(i) - 1e-14 * std::max(1.0, std::abs(box.upper(i)));
}

}  // namespace

bool Box::contains(const Vec& x) const {
  return x.size() == dim() && (x.array() >= lower.array()).all() && (x.array() <= upper.array()).all();
}

Trajectory nelder_mead(const Objective& f, const Vec& x0, const Box& box, const NelderMeadOptions& options) {
  const Eigen::Index n = box.dim();
  if (x0.size() != n) throw std::invalid_argument("nelder_mead: start point has wrong dimension");

  std::vector<Vec> simplex;
  std::vector<double> values;
  Trajectory out;
  auto eval = [&](const Vec& x) {
    ++out.evaluations;
    return f(x);
  };

  const Vec start = box.clamp(x0);
  simplex.push_back(start);
  for (Eigen::Index i = 0; i < n; ++i) {
    Vec v = start;
    const double step = options.initial_step * (box.upper(i) - box.lower(i));
    v(i) = v(i) + step <= box.upper(i) ? v(i) + step : v(i) - step;
    simplex.push_back(box.clamp(v));
  }
  for (const Vec& v : simplex) values.push_back(eval(v));

  std::vector<std::size_t> order(simplex.size());
  auto sort_simplex = [&] {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<Vec> s2;
    std::vector<double> v2;
    for (std::size_t k : order) {
      s2.push_back(simplex[k]);
      v2.push_back(values[k]);
    }
    simplex = std::move(s2);
    values = std::move(v2);
  };

  sort_simplex();
  out.history.push_back(values.front());
  while (out.evaluations < options.max_evaluations) {
    double spread = 0.0;
    for (std::size_t k = 1; k < simplex.size(); ++k) {
      spread = std::max(spread, (simplex[k] - simplex[0]).cwiseAbs().maxCoeff());
    }
    if (std::abs(values.back() - values.front()) <= options.f_tolerance * (1.0 + std::abs(values.front())) &&
        spread <= options.x_tolerance) {
      break;
    }
    if (spread <= 1e-15) break;

    Vec centroid = Vec::Zero(n);
    for (std::size_t k = 0; k + 1 < simplex.size(); ++k) centroid += simplex[k];
    centroid /= static_cast<double>(n);

    const Vec& worst = simplex.back();
    const Vec xr = box.clamp(centroid + (centroid - worst));
    const double fr = eval(xr);
    if (fr < values.front()) {
      const Vec xe = box.clamp(centroid + 2.0 * (centroid - worst));
      const double fe = eval(xe);
      if (fe < fr) {
        simplex.back() = xe;
        values.back() = fe;
      } else {
        simplex.back() = xr;
        values.back() = fr;
      }
    } else if (fr < values[values.size() - 2]) {
      simplex.back() = xr;
      values.back() = fr;
    } else {
      const bool outside = fr < values.back();
      const Vec xc = outside ? box.clamp(centroid + 0.5 * (xr - centroid)) : box.clamp(centroid + 0.5 * (worst - centroid));
      const double fc = eval(xc);
      if (fc < std::min(fr, values.back())) {
        simplex.back() = xc;
        values.back() = fc;
      } else {
        for (std::size_t k = 1; k < simplex.size(); ++k) {
          simplex[k] = simplex[0] + 0.5 * (simplex[k] - simplex[0]);
          values[k] = eval(simplex[k]);
        }
      }
    }
    sort_simplex();
    out.history.push_back(values.front());
  }
  out.x = simplex.front();
  out.f = values.front();
  return out;
}

Eigen::MatrixXd jacobian(const Residuals& r, const Vec& x, const Box& box, double h) {
  const Vec r0 = r(x);
  Eigen::MatrixXd jac(r0.size(), x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double step = h * std::max(1.0, std::abs(x(i)));
    Vec hi = x;
    Vec lo = x;
    hi(i) = std::min(x(i) + step, box.upper(i));
    lo(i) = std::max(x(i) - step, box.lower(i));
    if (hi(i) == lo(i)) {
      jac.col(i).setZero();
      continue;
    }
    jac.col(i) = (r(hi) - r(lo)) / (hi(i) - lo(i));
  }
  return jac;
}

Vec gradient(const Objective& f, const Vec& x, const Box& box, double h) {
  Vec g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double step = h * std::max(1.0, std::abs(x(i)));
    Vec hi = x;
    Vec lo = x;
    hi(i) = std::min(x(i) + step, box.upper(i));
    lo(i) = std::max(x(i) - step, box.lower(i));
    g(i) = hi(i) == lo(i) ? 0.0 : (f(hi) - f(lo)) / (hi(i) - lo(i));
  }
  return g;
}

double projected_gradient_norm(const Vec& grad, const Vec& x, const Box& box) {
  Vec g = grad;
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    if ((at_lower(x, box, i) && g(i) > 0.0) || (at_upper(x, box, i) && g(i) < 0.0)) g(i) = 0.0;
  }
  return g.norm();
}

Trajectory levenberg_marquardt(const Residuals& r, const Vec& x0, const Box& box,
                               const LevenbergMarquardtOptions& options) {
  Trajectory out;
  out.x = box.clamp(x0);
  Vec res = r(out.x);
  ++out.evaluations;
  out.f = res.squaredNorm();
  out.history.push_back(out.f);
  double damping = 1e-3;

  for (int iter = 0; iter < options.max_iterations && out.f > 0.0; ++iter) {
    const Eigen::MatrixXd jac = jacobian(r, out.x, box);
    out.evaluations += 2 * static_cast<int>(out.x.size());
    const Vec grad = jac.transpose() * res;

    // Freeze coordinates held at a bound by the gradient.
    std::vector<Eigen::Index> free;
    for (Eigen::Index i = 0; i < out.x.size(); ++i) {
      const bool pinned = (at_lower(out.x, box, i) && grad(i) > 0.0) || (at_upper(out.x, box, i) && grad(i) < 0.0);
      if (!pinned) free.push_back(i);
    }
    if (free.empty()) break;

    const auto m = static_cast<Eigen::Index>(free.size());
    Eigen::MatrixXd jf(jac.rows(), m);
    for (Eigen::Index k = 0; k < m; ++k) jf.col(k) = jac.col(free[static_cast<std::size_t>(k)]);
    const Eigen::MatrixXd jtj = jf.transpose() * jf;
    const Vec jtr = jf.transpose() * res;

    bool accepted = false;
    bool converged = false;
    for (int attempt = 0; attempt < 30; ++attempt) {
      Eigen::MatrixXd a = jtj;
      for (Eigen::Index k = 0; k < m; ++k) a(k, k) += damping * std::max(jtj(k, k), 1e-12);
      const Vec delta = a.ldlt().solve(-jtr);
      Vec trial = out.x;
      for (Eigen::Index k = 0; k < m; ++k) trial(free[static_cast<std::size_t>(k)]) += delta(k);
      trial = box.clamp(trial);
      const double moved = (trial - out.x).cwiseAbs().maxCoeff();
      if (moved <= options.step_tolerance) break;
      const Vec trial_res = r(trial);
      ++out.evaluations;
      const double ft = trial_res.squaredNorm();
      if (ft < out.f) {
        converged = out.f - ft <= options.relative_decrease * out.f;
        out.x = trial;
        res = trial_res;
        out.f = ft;
        out.history.push_back(ft);
        damping = std::max(damping / 3.0, 1e-12);
        accepted = true;
        break;
      }
      damping *= 4.0;
    }
    if (!accepted || converged) break;
  }
  return out;
}

Vec halton(std::uint64_t index, Eigen::Index dim) {
  if (dim > static_cast<Eigen::Index>(std::size(kPrimes))) throw std::invalid_argument("halton: dimension too large");
  Vec p(dim);
  for (Eigen::Index d = 0; d < dim; ++d) {
    const int base = kPrimes[d];
    double f = 1.0;
    double value = 0.0;
    for (std::uint64_t i = index; i > 0; i /= static_cast<std::uint64_t>(base)) {
      f /= base;
      value += f * static_cast<double>(i % static_cast<std::uint64_t>(base));
    }
    p(d) = value;
  }
  return p;
}

}  // namespace raman::optimize
