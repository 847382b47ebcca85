#include "tacsim/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "tacsim/error.hpp"

namespace tacsim {

namespace {

constexpr double kMaxExtent = 1e6;  // mm

bool sane_length(double v) { return std::isfinite(v) && v > 0.0 && v < kMaxExtent; }

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

double cap_gap(double radius, double rho2) {
  double r2 = radius * radius;
  if (rho2 >= r2) return HeightField::kNoContact;
  return radius - std::sqrt(r2 - rho2);
}

}  // namespace

void validate(const Shape& shape) {
  std::visit(Overloaded{
                 [](const Sphere& s) {
                   if (!sane_length(s.radius)) throw InvalidInput("sphere radius must be finite and > 0");
                 },
                 [](const Cylinder& c) {
                   if (!sane_length(c.radius)) throw InvalidInput("cylinder radius must be finite and > 0");
                   double n = std::hypot(c.axis_x, c.axis_y);
                   if (!std::isfinite(n) || n < 1e-12) throw InvalidInput("cylinder axis must be a non-zero in-plane vector");
                 },
                 [](const Annulus& a) {
                   if (!sane_length(a.r_inner) || !sane_length(a.r_outer))
                     throw InvalidInput("annulus radii must be finite and > 0");
                   if (a.r_inner >= a.r_outer) throw InvalidInput("annulus requires r_inner < r_outer");
                 },
                 [](const GearFace& g) {
                   if (!sane_length(g.r_root) || !sane_length(g.r_tip))
                     throw InvalidInput("gear radii must be finite and > 0");
                   if (g.r_tip <= g.r_root) throw InvalidInput("gear requires r_tip > r_root");
                   if (g.tooth_count < 3) throw InvalidInput("gear requires at least 3 teeth");
                 },
                 [](const FlatPlate& p) {
                   if (!sane_length(p.width) || !sane_length(p.height))
                     throw InvalidInput("plate dimensions must be finite and > 0");
                 },
             },
             shape);
}

std::string shape_kind(const Shape& shape) {
  return std::visit(Overloaded{
                        [](const Sphere&) { return std::string("sphere"); },
                        [](const Cylinder&) { return std::string("cylinder"); },
                        [](const Annulus&) { return std::string("annulus"); },
                        [](const GearFace&) { return std::string("gear"); },
                        [](const FlatPlate&) { return std::string("plate"); },
                    },
                    shape);
}

HeightField::HeightField(int width_px, int height_px, double pixel_pitch)
    : width_(width_px), height_(height_px), pitch_(pixel_pitch) {
  if (width_px <= 0 || height_px <= 0) throw InvalidInput("height field dimensions must be positive");
  if (!(pixel_pitch > 0.0) || !std::isfinite(pixel_pitch)) throw InvalidInput("pixel pitch must be positive");
  gap_.assign(static_cast<std::size_t>(width_px) * static_cast<std::size_t>(height_px), kNoContact);
}

std::size_t HeightField::covered_count() const {
  return static_cast<std::size_t>(std::count_if(gap_.begin(), gap_.end(), [](double g) { return g != kNoContact; }));
}

HeightField HeightField::mirrored() const {
  HeightField out = *this;
  for (int y = 0; y < height_; ++y)
    for (int x = 0; x < width_; ++x) out.set_gap(x, y, gap(width_ - 1 - x, y));
  return out;
}

double pixel_x(const GridSpec& grid, int x) { return (x - grid.width_px / 2) * grid.pixel_pitch; }
double pixel_y(const GridSpec& grid, int y) { return (y - grid.height_px / 2) * grid.pixel_pitch; }

double surface_gap(const Shape& shape, double u, double v) {
  return std::visit(
      Overloaded{
          [&](const Sphere& s) { return cap_gap(s.radius, u * u + v * v); },
          [&](const Cylinder& c) {
            double n = std::hypot(c.axis_x, c.axis_y);
            // distance from the axis line through the origin
            double s = (-c.axis_y * u + c.axis_x * v) / n;
            return cap_gap(c.radius, s * s);
          },
          [&](const Annulus& a) {
            double rho = std::hypot(u, v);
            return (rho >= a.r_inner && rho <= a.r_outer) ? 0.0 : HeightField::kNoContact;
          },
          [&](const GearFace& g) {
            double rho = std::hypot(u, v);
            if (rho <= g.r_root) return 0.0;
            if (rho > g.r_tip) return HeightField::kNoContact;
            double theta = std::atan2(v, u);
            if (theta < 0.0) theta += 2.0 * std::numbers::pi;
            double phase = theta * g.tooth_count / (2.0 * std::numbers::pi);
            bool tooth = (phase - std::floor(phase)) < 0.5;
            return tooth ? 0.0 : HeightField::kNoContact;
          },
          [&](const FlatPlate& p) {
            return (std::abs(u) <= 0.5 * p.width && std::abs(v) <= 0.5 * p.height) ? 0.0 : HeightField::kNoContact;
          },
      },
      shape);
}

HeightField rasterize(const Shape& shape, const Pose2D& pose, const GridSpec& grid) {
  validate(shape);
  if (!std::isfinite(pose.offset_x) || !std::isfinite(pose.offset_y) || !std::isfinite(pose.rotation))
    throw InvalidInput("pose values must be finite");
  if (std::abs(pose.offset_x) > kMaxExtent || std::abs(pose.offset_y) > kMaxExtent)
    throw InvalidInput("pose offset out of range");

  HeightField hf(grid.width_px, grid.height_px, grid.pixel_pitch);
  const double cr = std::cos(pose.rotation);
  const double sr = std::sin(pose.rotation);
  for (int y = 0; y < grid.height_px; ++y) {
    const double py = pixel_y(grid, y) - pose.offset_y;
    for (int x = 0; x < grid.width_px; ++x) {
      const double px = pixel_x(grid, x) - pose.offset_x;
      // world -> object frame
      const double u = cr * px + sr * py;
      const double v = -sr * px + cr * py;
      hf.set_gap(x, y, surface_gap(shape, u, v));
    }
  }
  return hf;
}

double intersection_volume(const HeightField& hf, double depth) {
  if (!(depth > 0.0)) return 0.0;
  double sum = 0.0;
  for (double g : hf.gaps())
    if (g < depth) sum += depth - g;
  return sum * hf.pixel_pitch() * hf.pixel_pitch();
}

double solve_penetration_depth(const HeightField& hf, double target_volume, const DepthSolveOptions& opts) {
  if (!(target_volume >= 0.0) || !std::isfinite(target_volume))
    throw InvalidInput("target volume must be finite and >= 0");
  if (hf.covered_count() == 0) throw InvalidInput("height field has no contact pixels");
  if (target_volume == 0.0) return 0.0;

  const double tol = opts.rel_tolerance * target_volume;
  if (intersection_volume(hf, opts.max_depth) < target_volume - tol)
    throw UnreachableVolume("penetration volume " + std::to_string(target_volume) +
                            " mm^3 is not reachable within " + std::to_string(opts.max_depth) + " mm");

  double lo = 0.0;
  double hi = opts.max_depth;
  double mid = 0.5 * (lo + hi);
  for (int it = 0; it < opts.max_iterations; ++it) {
    mid = 0.5 * (lo + hi);
    const double v = intersection_volume(hf, mid);
    if (std::abs(v - target_volume) <= tol) return mid;
    if (v < target_volume)
      lo = mid;
    else
      hi = mid;
  }
  return mid;
}

}  // namespace tacsim
