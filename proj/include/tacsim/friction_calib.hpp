#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

namespace tacsim {

using Cov2 = std::array<std::array<double, 2>, 2>;

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

/// y = slope * x + intercept. For max-pull-force data the slope carries the
/// effective friction coefficient and the intercept the friction offset.
struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  Cov2 covariance{};  // order (slope, intercept)
  double rss = 0.0;   // residual sum of squares

  double operator()(double x) const { return slope * x + intercept; }
};

/// mu_corr / mu_sim = a + b / F_G.
struct RatioFit {
  double a = 1.0;
  double b = 0.0;
  Cov2 covariance{};  // order (a, b)

  double operator()(double grip_force) const { return a + b / grip_force; }
};

/// Ordinary least squares. The covariance is s^2 (X^T X)^-1 with the
/// unbiased residual variance; it is zero for exactly two points.
LinearFit fit_linear(const std::vector<Point2>& points);

/// Least squares on the basis {1, 1/F_G}; points are (F_G, ratio).
RatioFit fit_ratio(const std::vector<Point2>& points);

/// mu_sim * (a + b / F_G). Throws FitError if the result is not positive.
double corrected_mu(double mu_sim, const RatioFit& fit, double grip_force);

/// sigma_r / r at F_G from the fit covariance; equals the relative
/// uncertainty of the corrected friction coefficient.
double relative_uncertainty(const RatioFit& fit, double grip_force);

/// Largest relative_uncertainty over `samples` evenly spaced grip forces
/// in [f_lo, f_hi].
double max_relative_uncertainty(const RatioFit& fit, double f_lo, double f_hi, int samples = 601);

struct CalibrationResult {
  LinearFit experiment_fit;
  RatioFit ratio;
  double sim_slope = 0.0;               // through-origin Coulomb fit of the simulation
  std::vector<Point2> ratio_points;     // (F_G, r) fed to fit_ratio
  std::function<double(double)> predict;  // F_G -> corrected F_pull_max
};

/// Fits a line to the experiment, forms the ratio of that line to each
/// simulated point and fits a + b / F_G to it. Points are (F_G, F_pull_max).
CalibrationResult calibration_pipeline(const std::vector<Point2>& exp_points, const std::vector<Point2>& sim_points,
                                       double mu_sim);

/// JSON summary: {mu_sim, a, b, cov, rel_uncertainty_max_over_range}.
std::string fit_to_json(const RatioFit& fit, double mu_sim, double f_lo, double f_hi);

}  // namespace tacsim
