#include "tacsim/friction_calib.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <set>
#include <sstream>
#include <stdexcept>

#include "tacsim/error.hpp"

namespace tacsim {

namespace {

std::size_t distinct_x(const std::vector<Point2>& pts) {
  std::set<double> xs;
  for (const auto& p : pts) xs.insert(p.x);
  return xs.size();
}

// Mean with the first element as offset, exact for repeated values.
double offset_mean(const std::vector<Point2>& pts, double Point2::*field) {
  const double x0 = pts.front().*field;
  double acc = 0.0;
  for (const auto& p : pts) acc += p.*field - x0;
  return x0 + acc / static_cast<double>(pts.size());
}

}  // namespace

LinearFit fit_linear(const std::vector<Point2>& points) {
  for (const auto& p : points)
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw InvalidInput("fit points must be finite");
  if (distinct_x(points) < 2) throw FitError("linear fit needs at least two distinct x values");

  const std::size_t n = points.size();
  const double xm = offset_mean(points, &Point2::x);
  const double ym = offset_mean(points, &Point2::y);
  double sxx = 0.0;
  double sxy = 0.0;
  for (const auto& p : points) {
    sxx += (p.x - xm) * (p.x - xm);
    sxy += (p.x - xm) * (p.y - ym);
  }
  if (!(sxx > 0.0)) throw FitError("linear fit design matrix is singular");

  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = ym - fit.slope * xm;
  for (const auto& p : points) {
    const double r = p.y - fit(p.x);
    fit.rss += r * r;
  }
  if (n > 2) {
    const double s2 = fit.rss / static_cast<double>(n - 2);
    fit.covariance[0][0] = s2 / sxx;
    fit.covariance[1][1] = s2 * (1.0 / static_cast<double>(n) + xm * xm / sxx);
    fit.covariance[0][1] = fit.covariance[1][0] = -s2 * xm / sxx;
  }
  return fit;
}

RatioFit fit_ratio(const std::vector<Point2>& points) {
  std::vector<Point2> inv;
  inv.reserve(points.size());
  for (const auto& p : points) {
    if (!(p.x > 0.0)) throw InvalidInput("ratio fit needs grip forces > 0");
    inv.push_back({1.0 / p.x, p.y});
  }
  if (distinct_x(inv) < 2) throw FitError("ratio fit needs at least two distinct grip forces");
  const LinearFit lf = fit_linear(inv);
  RatioFit rf;
  rf.a = lf.intercept;
  rf.b = lf.slope;
  rf.covariance[0][0] = lf.covariance[1][1];
  rf.covariance[1][1] = lf.covariance[0][0];
  rf.covariance[0][1] = rf.covariance[1][0] = lf.covariance[0][1];
  return rf;
}

double corrected_mu(double mu_sim, const RatioFit& fit, double grip_force) {
  if (!(grip_force > 0.0)) throw InvalidInput("grip force must be > 0");
  const double mu = mu_sim * fit(grip_force);
  if (!(mu > 0.0)) {
    std::ostringstream msg;
    msg << "corrected friction coefficient " << mu << " is not positive at F_G = " << grip_force << " N";
    throw FitError(msg.str());
  }
  return mu;
}

double relative_uncertainty(const RatioFit& fit, double grip_force) {
  if (!(grip_force > 0.0)) throw InvalidInput("grip force must be > 0");
  const double r = fit(grip_force);
  if (!(r > 0.0)) throw FitError("ratio a + b/F_G must be > 0 at F_G = " + std::to_string(grip_force));
  const auto& c = fit.covariance;
  const double var = c[0][0] + c[1][1] / (grip_force * grip_force) + 2.0 * c[0][1] / grip_force;
  const double scale = c[0][0] + c[1][1] / (grip_force * grip_force) + 2.0 * std::abs(c[0][1]) / grip_force;
  if (var < -1e-12 * scale) throw std::logic_error("propagated variance is negative; covariance is not PSD");
  return std::sqrt(std::max(0.0, var)) / r;
}

double max_relative_uncertainty(const RatioFit& fit, double f_lo, double f_hi, int samples) {
  if (!(f_lo > 0.0) || f_hi < f_lo || samples < 2) throw InvalidInput("invalid grip force range");
  double worst = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double f = f_lo + (f_hi - f_lo) * i / (samples - 1);
    worst = std::max(worst, relative_uncertainty(fit, f));
  }
  return worst;
}

CalibrationResult calibration_pipeline(const std::vector<Point2>& exp_points, const std::vector<Point2>& sim_points,
                                       double mu_sim) {
  if (!(mu_sim > 0.0)) throw InvalidInput("mu_sim must be > 0");
  if (distinct_x(exp_points) < 2 || distinct_x(sim_points) < 2)
    throw FitError("calibration needs at least two grip forces in both data sets");

  CalibrationResult res;
  res.experiment_fit = fit_linear(exp_points);
  double sxy = 0.0;
  double sxx = 0.0;
  for (const auto& p : sim_points) {
    if (!(p.x > 0.0) || !(p.y > 0.0)) throw FitError("simulated points need positive grip and pull forces");
    res.ratio_points.push_back({p.x, res.experiment_fit(p.x) / p.y});
    sxy += p.x * p.y;
    sxx += p.x * p.x;
  }
  res.ratio = fit_ratio(res.ratio_points);
  res.sim_slope = sxy / sxx;
  res.predict = [ratio = res.ratio, k = res.sim_slope](double f) { return ratio(f) * k * f; };
  return res;
}

std::string fit_to_json(const RatioFit& fit, double mu_sim, double f_lo, double f_hi) {
  nlohmann::json j;
  j["mu_sim"] = mu_sim;
  j["a"] = fit.a;
  j["b"] = fit.b;
  j["cov"] = {{fit.covariance[0][0], fit.covariance[0][1]}, {fit.covariance[1][0], fit.covariance[1][1]}};
  j["rel_uncertainty_max_over_range"] = max_relative_uncertainty(fit, f_lo, f_hi);
  j["range"] = {f_lo, f_hi};
  return j.dump(2);
}

}  // namespace tacsim
