#pragma once

// Small box-constrained minimizers used by the fitter.

#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace raman::optimize {

using Vec = Eigen::VectorXd;
using Objective = std::function<double(const Vec&)>;
using Residuals = std::function<Vec(const Vec&)>;

struct Box {
  Vec lower;
  Vec upper;

  Eigen::Index dim() const { return lower.size(); }
  Vec clamp(const Vec& x) const { return x.cwiseMax(lower).cwiseMin(upper); }
  bool contains(const Vec& x) const;
};

struct Trajectory {
  Vec x;
  double f = 0.0;
  int evaluations = 0;
  /// Best objective after every accepted iteration; non-increasing.
  std::vector<double> history;
};

struct NelderMeadOptions {
  int max_evaluations = 3000;
  double f_tolerance = 1e-16;
  double x_tolerance = 1e-11;
  double initial_step = 0.1;  // fraction of each box width
};

/// Nelder-Mead with vertices projected onto the box.
Trajectory nelder_mead(const Objective& f, const Vec& x0, const Box& box, const NelderMeadOptions& options = {});

struct LevenbergMarquardtOptions {
  int max_iterations = 200;
  double step_tolerance = 1e-14;
  double relative_decrease = 1e-10;  // stop once an accepted step gains less than this fraction
};

/// Projected Levenberg-Marquardt on sum(r^2) with a central-difference
/// Jacobian. Coordinates pinned at a bound by an outward gradient are frozen.
Trajectory levenberg_marquardt(const Residuals& r, const Vec& x0, const Box& box,
                               const LevenbergMarquardtOptions& options = {});

/// Central differences inside the box, one-sided at the faces.
Eigen::MatrixXd jacobian(const Residuals& r, const Vec& x, const Box& box, double h = 1e-6);
Vec gradient(const Objective& f, const Vec& x, const Box& box, double h = 1e-6);

/// Gradient with components that push against an active bound removed.
double projected_gradient_norm(const Vec& grad, const Vec& x, const Box& box);

/// Point `index` (from 1) of the Halton sequence in `dim` dimensions.
Vec halton(std::uint64_t index, Eigen::Index dim);

}  // namespace raman::optimize
