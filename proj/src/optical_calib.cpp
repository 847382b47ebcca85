#include "tacsim/optical_calib.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "tacsim/error.hpp"

namespace tacsim {

namespace {

double deg2rad(double d) { return d * std::numbers::pi / 180.0; }

}  // namespace

Rgb GroundTruthShader::intensity(double gx, double gy) const {
  const double norm = std::sqrt(gx * gx + gy * gy + 1.0);
  const double nx = gx / norm;
  const double ny = gy / norm;
  const double nz = 1.0 / norm;
  const double el = deg2rad(elevation_deg);
  Rgb out{};
  for (int c = 0; c < 3; ++c) {
    const double az = deg2rad(azimuth_deg[static_cast<std::size_t>(c)]);
    const double lambert = nx * std::cos(el) * std::cos(az) + ny * std::cos(el) * std::sin(az) + nz * std::sin(el);
    out[static_cast<std::size_t>(c)] = std::clamp(ambient + gain * std::max(0.0, lambert), 0.0, 255.0);
  }
  return out;
}

RgbImage synth_ground_truth(const GradientImage& g, const GroundTruthShader& shader) {
  RgbImage img(g.width, g.height);
  for (int y = 0; y < g.height; ++y)
    for (int x = 0; x < g.width; ++x) {
      const std::size_t i = g.index(x, y);
      const Rgb v = shader.intensity(g.gx[i], g.gy[i]);
      for (int c = 0; c < 3; ++c) img.at(x, y, c) = static_cast<std::uint8_t>(std::lround(v[static_cast<std::size_t>(c)]));
    }
  return img;
}

GradientLut calibrate_lut(const std::vector<CalibrationPress>& presses, int n_bins, double g_max) {
  if (presses.empty()) throw CalibrationError("calibration needs at least one press");
  if (n_bins < 2) throw InvalidInput("LUT needs at least 2 bins per axis");
  if (!(g_max > 0.0)) throw InvalidInput("LUT gradient range must be > 0");

  const std::size_t nb = static_cast<std::size_t>(n_bins) * static_cast<std::size_t>(n_bins);
  // Integer accumulators keep the bin means independent of press order.
  std::vector<std::uint64_t> count(nb, 0);
  std::vector<std::array<std::uint64_t, 3>> sum(nb, {0, 0, 0});
  const double h = 2.0 * g_max / n_bins;

  for (const auto& p : presses) {
    if (p.gradient.width != p.image.width || p.gradient.height != p.image.height)
      throw InvalidInput("press gradient and image dimensions differ");
    for (int y = 0; y < p.image.height; ++y)
      for (int x = 0; x < p.image.width; ++x) {
        const std::size_t i = p.gradient.index(x, y);
        const double gx = p.gradient.gx[i];
        const double gy = p.gradient.gy[i];
        if (!(std::abs(gx) <= g_max && std::abs(gy) <= g_max)) continue;
        const int ix = std::clamp(static_cast<int>(std::floor((gx + g_max) / h)), 0, n_bins - 1);
        const int iy = std::clamp(static_cast<int>(std::floor((gy + g_max) / h)), 0, n_bins - 1);
        const std::size_t b = static_cast<std::size_t>(iy) * n_bins + ix;
        ++count[b];
        for (int c = 0; c < 3; ++c) sum[b][static_cast<std::size_t>(c)] += p.image.at(x, y, c);
      }
  }

  std::vector<std::size_t> populated;
  for (std::size_t b = 0; b < nb; ++b)
    if (count[b] > 0) populated.push_back(b);
  if (populated.empty()) throw CalibrationError("no LUT bin received a calibration sample");

  std::vector<GradientLut::Bin> bins(nb);
  for (std::size_t b : populated) {
    bins[b].count = count[b];
    for (std::size_t c = 0; c < 3; ++c) bins[b].value[c] = static_cast<double>(sum[b][c]) / static_cast<double>(count[b]);
  }

  // Nearest populated bin in index space; ties go to the first in row-major order.
  for (std::size_t b = 0; b < nb; ++b) {
    if (count[b] > 0) continue;
    const long bx = static_cast<long>(b % n_bins);
    const long by = static_cast<long>(b / n_bins);
    long best = std::numeric_limits<long>::max();
    std::size_t src = populated.front();
    for (std::size_t p : populated) {
      const long dx = static_cast<long>(p % n_bins) - bx;
      const long dy = static_cast<long>(p / n_bins) - by;
      const long d2 = dx * dx + dy * dy;
      if (d2 < best) {
        best = d2;
        src = p;
      }
    }
    bins[b].value = bins[src].value;
  }
  return GradientLut(n_bins, g_max, std::move(bins));
}

GradientImage sphere_press_gradient(const GridSpec& grid, double radius, const SpherePressSpec& spec) {
  const HeightField hf = rasterize(Sphere{radius}, Pose2D{spec.offset_x, spec.offset_y, 0.0}, grid);
  return gradients(depth_at(hf, spec.depth), grid.pixel_pitch);
}

std::vector<SpherePressSpec> default_press_layout() {
  std::vector<SpherePressSpec> specs;
  int i = 0;
  for (double oy : {-3.0, 0.0, 3.0})
    for (double ox : {-4.0, 0.0, 4.0}) specs.push_back({ox, oy, 0.3 + 0.05 * i++});
  return specs;
}

std::vector<CalibrationPress> make_sphere_presses(const GridSpec& grid, double radius,
                                                  const std::vector<SpherePressSpec>& specs,
                                                  const GroundTruthShader& shader) {
  std::vector<CalibrationPress> presses;
  presses.reserve(specs.size());
  for (const auto& s : specs) {
    GradientImage g = sphere_press_gradient(grid, radius, s);
    RgbImage img = synth_ground_truth(g, shader);
    presses.push_back({std::move(g), std::move(img)});
  }
  return presses;
}

PixelBox contact_box(const DepthImage& depth, double threshold) {
  PixelBox box{depth.width, depth.height, 0, 0};
  for (int y = 0; y < depth.height; ++y)
    for (int x = 0; x < depth.width; ++x)
      if (depth.at(x, y) > threshold) {
        box.x0 = std::min(box.x0, x);
        box.y0 = std::min(box.y0, y);
        box.x1 = std::max(box.x1, x + 1);
        box.y1 = std::max(box.y1, y + 1);
      }
  if (box.empty()) return PixelBox{};
  return box;
}

double imprint_area(const HeightField& hf, double grip_force, const PenetrationModel& pm, const ImprintOptions& opts) {
  DepthImage depth = depth_from_contact(hf, grip_force, pm);
  if (!opts.cascade.kernel_sizes.empty()) depth = blur(depth, opts.cascade);
  const auto n = std::count_if(depth.values.begin(), depth.values.end(), [&](double d) { return d > opts.threshold; });
  return static_cast<double>(n) * hf.pixel_pitch() * hf.pixel_pitch();
}

PenetrationFit fit_penetration_constant(const Shape& shape, const Pose2D& pose, const GridSpec& grid, double f_ref,
                                        double area_ref, const PenetrationBracket& bracket,
                                        const ImprintOptions& opts) {
  constexpr double kAreaTolerance = 0.02;
  if (!(f_ref > 0.0)) throw InvalidInput("reference force must be > 0");
  if (!(area_ref > 0.0)) throw CalibrationError("reference imprint area must be > 0");
  if (!(bracket.c_lo > 0.0) || !(bracket.c_hi > bracket.c_lo)) throw InvalidInput("invalid penetration bracket");

  const HeightField hf = rasterize(shape, pose, grid);
  if (hf.covered_count() == 0) throw CalibrationError("object does not touch the sensor grid");

  auto area = [&](double c) {
    try {
      return imprint_area(hf, f_ref, PenetrationModel{c}, opts);
    } catch (const UnreachableVolume&) {
      // deeper than the gel allows: larger than any reachable imprint
      return std::numeric_limits<double>::infinity();
    }
  };
  auto close = [&](double a) { return std::abs(a - area_ref) <= kAreaTolerance * area_ref; };

  double lo = bracket.c_lo;
  double hi = bracket.c_hi;
  // largest c whose volume still fits within the gel
  const double c_reach = intersection_volume(hf, DepthSolveOptions{}.max_depth) / f_ref;
  if (hi > c_reach) hi = c_reach * (1.0 - 1e-9);
  if (!(hi > lo)) throw CalibrationError("penetration bracket lies beyond the gel thickness");
  const double a_lo = area(lo);
  const double a_hi = area(hi);

  // Footprint that stops growing with c (flat faces): any c above the
  // imprint threshold matches, report the bracket midpoint.
  const double mid = 0.5 * (lo + hi);
  const double a_mid = area(mid);
  if (a_mid == a_hi && close(a_mid)) return {PenetrationModel{mid}, a_mid, true};
  if (a_lo == a_hi) throw CalibrationError("imprint area is independent of c and does not match the reference");
  if (a_lo >= area_ref) {
    if (close(a_lo)) return {PenetrationModel{lo}, a_lo, false};
    throw CalibrationError("reference imprint is smaller than the bracket allows");
  }
  if (a_hi < area_ref) {
    if (close(a_hi)) return {PenetrationModel{hi}, a_hi, false};
    throw CalibrationError("reference imprint is larger than the bracket allows");
  }

  // Invariant: area(lo) < area_ref <= area(hi). Bisect geometrically.
  double area_lo = a_lo;
  double area_hi = a_hi;
  for (int it = 0; it < 60 && hi / lo - 1.0 > 1e-7; ++it) {
    const double mid = std::sqrt(lo * hi);
    const double a = area(mid);
    if (a < area_ref) {
      lo = mid;
      area_lo = a;
    } else {
      hi = mid;
      area_hi = a;
    }
  }
  const bool pick_hi = std::abs(area_hi - area_ref) <= std::abs(area_lo - area_ref);
  const double c = pick_hi ? hi : lo;
  const double a = pick_hi ? area_hi : area_lo;
  if (!close(a)) throw CalibrationError("imprint area cannot be matched within 2% (area is too coarse)");
  return {PenetrationModel{c}, a, false};
}

}  // namespace tacsim
