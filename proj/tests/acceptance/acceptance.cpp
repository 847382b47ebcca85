// Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any
// failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <numbers>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "tacsim/dataset.hpp"
#include "tacsim/friction_calib.hpp"
#include "tacsim/geometry.hpp"
#include "tacsim/image_metrics.hpp"
#include "tacsim/optical_calib.hpp"
#include "tacsim/pull_sim.hpp"
#include "tacsim/tactile_render.hpp"

using namespace tacsim;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

void fail(Outcome& o, const std::string& why) {
  if (o.pass) o.detail.clear();
  o.pass = false;
  if (!o.detail.empty()) o.detail += "; ";
  o.detail += why;
}

Outcome psnr_pairs() {
  const double mses[] = {262.95, 399.47, 238.76, 387.21, 256.81, 278.60};
  const double printed[] = {23.93, 22.12, 24.35, 22.25, 24.03, 23.68};
  Outcome o;
  double worst = 0.0;
  for (int i = 0; i < 6; ++i) {
    const double err = std::abs(psnr_from_mse(mses[i]) - printed[i]);
    worst = std::max(worst, err);
    if (err > 0.01) fail(o, fmt("MSE %.2f -> %.4f dB, expected %.2f", mses[i], psnr_from_mse(mses[i]), printed[i]));
  }
  if (o.pass) o.detail = fmt("worst deviation %.4f dB", worst);
  return o;
}

Outcome correction_arithmetic() {
  struct Row {
    double mu, a, b;
  };
  // ball bearing, long shaft, gear, roller bearing
  const Row rows[] = {{0.14, 1.20, -4.34}, {0.168, 1.05, -3.20}, {0.15, 1.36, -12.15}, {0.14, 1.10, 10.15}};
  Outcome o;
  for (const Row& r : rows)
    for (double f : {20.0, 30.0, 40.0, 50.0, 60.0, 70.0, 80.0}) {
      const double hand = r.mu * (r.a + r.b / f);
      const double got = corrected_mu(r.mu, RatioFit{r.a, r.b, {}}, f);
      if (std::abs(got - hand) > 1e-9 * hand) fail(o, fmt("mu %.3f at %.0f N: %.12g", r.mu, f, got));
    }
  const double shaft = corrected_mu(0.168, RatioFit{1.05, -3.20, {}}, 40.0);
  if (std::abs(shaft - 0.16296) > 1e-9 * 0.16296) fail(o, fmt("long shaft at 40 N gave %.12g", shaft));
  if (o.pass) o.detail = fmt("long shaft at 40 N -> %.5f", shaft);
  return o;
}

Outcome end_to_end_friction() {
  // Fine force steps keep the label quantisation well under 5 %.
  ForceProfile p;
  p.f0 = 0.5;
  p.df = 0.05;
  p.max_steps = 1000;
  ActuatorModel quiet;
  quiet.noise_sigma = 0.0;
  const LabelParams lp;
  struct Triple {
    double mu_exp, f_off, mu_sim;
  };
  // generator: F_pull_max = 2 mu' F_G + F_off; first four mirror the published rows
  const Triple triples[] = {{0.168 * 1.05, 2 * 0.168 * -3.20, 0.168},
                            {0.15 * 1.36, 2 * 0.15 * -12.15, 0.15},
                            {0.14 * 1.10, 2 * 0.14 * 10.15, 0.14},
                            {0.14 * 1.20, 2 * 0.14 * -4.34, 0.14},
                            {0.30, 1.5, 0.20}};
  const std::vector<double> forces = {20, 30, 40, 50, 60, 70, 80};
  Outcome o;
  double worst = 0.0;
  for (const Triple& t : triples) {
    std::vector<Point2> exp, sim;
    for (double f : forces) {
      exp.push_back({f, 2.0 * t.mu_exp * f + t.f_off});
      GripConfig g;
      g.grip_force = f;
      g.mu = t.mu_sim;
      sim.push_back({f, extract_label(simulate_pull(g, p, quiet, lp, 0), p, lp).f_pull_max});
    }
    const CalibrationResult res = calibration_pipeline(exp, sim, t.mu_sim);
    for (std::size_t i = 0; i < forces.size(); ++i) {
      const double rel = std::abs(res.predict(forces[i]) / exp[i].y - 1.0);
      worst = std::max(worst, rel);
      if (rel >= 0.05) fail(o, fmt("mu' %.3f F_G %.0f: off by %.2f %%", t.mu_exp, forces[i], 100 * rel));
    }
  }
  if (o.pass) o.detail = fmt("5 triples x 7 forces, worst %.3f %%", 100 * worst);
  return o;
}

Outcome three_point_sufficiency() {
  const double a = 1.05, b = -3.20, sigma_r = 0.02, f_lo = 20.0, f_hi = 80.0;
  const std::vector<double> three = {20, 50, 80};
  std::vector<double> eight;
  for (int i = 0; i < 8; ++i) eight.push_back(f_lo + (f_hi - f_lo) * i / 7.0);
  const std::vector<double> probes = {20, 35, 50, 65, 80};
  const int trials = 500;

  struct Design {
    double mean_max_unc = 0.0;
    bool finite = true;
    std::vector<std::vector<double>> r;  // per probe, fitted ratio per trial
    std::vector<double> var_prop;        // per probe, mean propagated variance of r
  };
  auto run = [&](const std::vector<double>& fg, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, sigma_r);
    Design d;
    d.r.assign(probes.size(), {});
    d.var_prop.assign(probes.size(), 0.0);
    for (int k = 0; k < trials; ++k) {
      std::vector<Point2> pts;
      for (double f : fg) pts.push_back({f, a + b / f + noise(rng)});
      const RatioFit fit = fit_ratio(pts);
      const double u = max_relative_uncertainty(fit, f_lo, f_hi);
      if (!std::isfinite(u)) d.finite = false;
      d.mean_max_unc += u / trials;
      for (std::size_t j = 0; j < probes.size(); ++j) {
        const double x = 1.0 / probes[j];
        const auto& c = fit.covariance;
        d.r[j].push_back(fit(probes[j]));
        d.var_prop[j] += (c[0][0] + 2 * x * c[0][1] + x * x * c[1][1]) / trials;
      }
    }
    return d;
  };
  const Design d3 = run(three, 101), d8 = run(eight, 202);

  Outcome o;
  if (!d3.finite || !d8.finite) fail(o, "non-finite uncertainty");
  const double ratio = d3.mean_max_unc / d8.mean_max_unc;
  if (!(ratio <= 2.0)) fail(o, fmt("3-point uncertainty is %.2fx the 8-point one", ratio));
  // a single residual degree of freedom biases the mean low; compare root-mean-square spreads instead
  const double spread = std::sqrt(d3.var_prop[0] / d8.var_prop[0]);
  if (!(spread > 1.0)) fail(o, fmt("3-point fit is not less certain at 20 N (%.2fx)", spread));
  double worst = 0.0;
  for (const Design* d : {&d3, &d8})
    for (std::size_t j = 0; j < probes.size(); ++j) {
      double m = 0.0, v = 0.0;
      for (double r : d->r[j]) m += r / trials;
      for (double r : d->r[j]) v += (r - m) * (r - m) / (trials - 1);
      const double dev = std::abs(std::sqrt(d->var_prop[j]) / std::sqrt(v) - 1.0);
      worst = std::max(worst, dev);
      if (dev > 0.15) fail(o, fmt("F_G %.0f: propagated vs empirical sd differ by %.1f %%", probes[j], 100 * dev));
    }
  if (o.pass)
    o.detail = fmt("max rel. uncertainty 3-pt %.4f, 8-pt %.4f, sd agreement within %.1f %%", d3.mean_max_unc,
                   d8.mean_max_unc, 100 * worst) +
               fmt(", rms sd ratio at 20 N %.2f", spread);
  return o;
}

Outcome slip_label_bracket() {
  const ForceProfile p;
  ActuatorModel quiet;
  quiet.noise_sigma = 0.0;
  const LabelParams lp;
  std::mt19937_64 rng(55);
  std::uniform_real_distribution<double> mu_d(0.05, 0.4), fg_d(5.0, 80.0);
  auto label = [&](double mu, double fg) {
    GripConfig g;
    g.mu = mu;
    g.grip_force = fg;
    return std::pair{extract_label(simulate_pull(g, p, quiet, lp, 0), p, lp).f_pull_max, g.break_force()};
  };
  Outcome o;
  for (int i = 0; i < 50; ++i) {
    const double mu = mu_d(rng), fg = fg_d(rng);
    const auto [f, fb] = label(mu, fg);
    if (f > fb + 1e-9 || f < fb - p.df - 1e-9) fail(o, fmt("mu %.3f F_G %.1f: label %.3f", mu, fg, f));

    // labels over a force sweep at this mu fit a line through the origin
    const std::vector<double> fgs = {20, 40, 60, 80};
    std::vector<double> ys;
    double sxy = 0.0, sxx = 0.0;
    for (double x : fgs) {
      ys.push_back(label(mu, x).first);
      sxy += x * ys.back();
      sxx += x * x;
    }
    const double k = sxy / sxx;
    for (std::size_t j = 0; j < fgs.size(); ++j) {
      const double fbj = 2.0 * mu * fgs[j];
      if (std::abs(ys[j] - k * fgs[j]) / fbj > p.df / fbj + 1e-12)
        fail(o, fmt("mu %.3f F_G %.0f: residual %.3f N", mu, fgs[j], ys[j] - k * fgs[j]));
    }
  }
  if (o.pass) o.detail = "50 configs inside [F_break - dF, F_break], linear in F_G";
  return o;
}

Outcome gain_recovery() {
  const ForceProfile p;
  GripConfig g;
  g.grip_force = 80.0;
  g.mu = 1.0;
  ActuatorModel quiet;
  quiet.noise_sigma = 0.0;
  const PullTrace sim = simulate_pull(g, p, quiet, LabelParams{}, 0);
  PullTrace exact = sim, noisy = sim;
  std::mt19937_64 rng(709);
  std::normal_distribution<double> n(0.0, 0.1);
  for (auto& s : exact.samples) s.f_meas *= 0.709;
  for (auto& s : noisy.samples) s.f_meas = 0.709 * s.f_meas + n(rng);
  const double ge = calibrate_sensor_gain(sim, exact), gn = calibrate_sensor_gain(sim, noisy);
  Outcome o;
  if (std::abs(ge - 0.709) > 1e-6) fail(o, fmt("exact pair gave %.9f", ge));
  if (std::abs(gn - 0.709) > 0.01) fail(o, fmt("noisy pair gave %.5f", gn));
  if (o.pass) o.detail = fmt("exact %.9f, noisy %.5f", ge, gn);
  return o;
}

Outcome optical_round_trip() {
  const OpticalCalibConfig cfg;
  Outcome o;
  if (cfg.presses.size() != 9) fail(o, "calibration does not use 9 presses");
  const GradientLut lut = calibrate_from_config(cfg);
  const SpherePressSpec held{2.1, -1.3, 0.45};
  const GradientImage g = sphere_press_gradient(cfg.grid, cfg.radius, held);
  const RgbImage truth = synth_ground_truth(g, cfg.shader);
  const RgbImage out = shade(g, lut, make_background(lut, cfg.grid.width_px, cfg.grid.height_px, 0, 0)).image;
  const HeightField hf = rasterize(Sphere{cfg.radius}, Pose2D{held.offset_x, held.offset_y, 0.0}, cfg.grid);
  const PixelBox box = contact_box(depth_at(hf, held.depth));
  const double s = ssim(out.crop(box.x0, box.y0, box.width(), box.height()),
                        truth.crop(box.x0, box.y0, box.width(), box.height()));
  if (s < 0.95) fail(o, fmt("held-out SSIM %.4f", s));

  RenderSettings rs;
  const RgbImage bg = make_background(lut, rs.grid.width_px, rs.grid.height_px, 2, 31);
  for (const Shape& shape : {Shape{Sphere{1.97}}, Shape{GearFace{8.0, 9.5, 16}}, Shape{Cylinder{5.0, 1.0, 0.0}}}) {
    const RgbImage img = render_tactile(shape, Pose2D{}, 0.0, PenetrationModel{0.15}, rs, lut, bg).image;
    if (!(img == bg)) fail(o, "zero-contact render differs from background for " + shape_kind(shape));
  }
  if (o.pass) o.detail = fmt("held-out SSIM %.4f, zero-contact renders bit-exact", s);
  return o;
}

Outcome geometry_oracles() {
  const double r = 1.97;
  const HeightField hf = rasterize(Sphere{r}, Pose2D{}, GridSpec{});
  Outcome o;
  double worst_v = 0.0, worst_d = 0.0;
  for (double d : {0.1, 0.25, 0.5, 0.75, 1.0, 1.5}) {
    const double cap = std::numbers::pi * d * d * (3.0 * r - d) / 3.0;
    const double v = intersection_volume(hf, d);
    const double rel = std::abs(v / cap - 1.0);
    const double dd = std::abs(solve_penetration_depth(hf, cap) - d);
    worst_v = std::max(worst_v, rel);
    worst_d = std::max(worst_d, dd);
    if (rel > 0.01) fail(o, fmt("d %.2f: volume off by %.3f %%", d, 100 * rel));
    if (dd > 1e-4) fail(o, fmt("d %.2f: depth off by %.2e mm", d, dd));
  }
  const double d0 = solve_penetration_depth(hf, 1.4163);
  if (std::abs(d0 - 0.5) > 1e-4) fail(o, fmt("V 1.4163 -> d %.6f", d0));
  if (o.pass) o.detail = fmt("volume within %.3f %%, depth within %.1e mm", 100 * worst_v, worst_d);
  return o;
}

std::set<std::string> files_below(const fs::path& root) {
  std::set<std::string> s;
  for (const auto& e : fs::recursive_directory_iterator(root))
    if (e.is_regular_file()) s.insert(fs::relative(e.path(), root).string());
  return s;
}

Outcome sweep_determinism() {
  const fs::path base = fs::temp_directory_path() / "tacsim_acceptance_sweep";
  fs::remove_all(base);
  auto config = [&](const std::string& sub) {
    SweepConfig c;
    c.objects = {catalog_object("long_shaft"), catalog_object("gear")};
    c.grip_forces = {20.0, 50.0, 80.0};
    c.repetitions = 3;
    c.seed = 2023;
    c.output_dir = base / sub;
    return c;
  };
  const Manifest m1 = run_sweep(config("a"), SweepOptions{1});
  run_sweep(config("b"), SweepOptions{4});
  Outcome o;
  if (m1.entries.size() != 18 || m1.succeeded() != 18) fail(o, fmt("%.0f of 18 records succeeded", m1.succeeded()));
  const auto fa = files_below(base / "a");
  if (fa != files_below(base / "b")) fail(o, "re-run produced a different file set");
  for (const auto& f : fa)
    if (read_text_file(base / "a" / f) != read_text_file(base / "b" / f)) fail(o, f + " differs between runs");
  for (const auto& dir : {"a", "b"})
    for (const auto& problem : verify_manifest(base / dir / kManifestName)) fail(o, problem);
  if (o.pass) o.detail = fmt("%.0f files byte-identical, all checksums valid", static_cast<double>(fa.size()));
  fs::remove_all(base);
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"1 PSNR/MSE published pairs", psnr_pairs},
      {"2 friction correction arithmetic", correction_arithmetic},
      {"3 end-to-end friction calibration", end_to_end_friction},
      {"4 three-point sufficiency", three_point_sufficiency},
      {"5 slip-label bracket", slip_label_bracket},
      {"6 sensor-gain recovery", gain_recovery},
      {"7 optical round-trip", optical_round_trip},
      {"8 geometry oracles", geometry_oracles},
      {"9 sweep determinism and integrity", sweep_determinism},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s criterion %s (%.2f s): %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), secs, o.detail.c_str());
    if (!o.pass) ++failures;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
