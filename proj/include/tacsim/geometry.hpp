#pragma once

#include <cstddef>
#include <limits>
#include <string>
#include <variant>
#include <vector>

namespace tacsim {

// All lengths are millimetres.

struct Sphere {
  double radius = 1.0;
};

/// Shaft gripped on its lateral surface; the axis is an in-plane unit
/// vector (it is normalised on validation).
struct Cylinder {
  double radius = 1.0;
  double axis_x = 1.0;
  double axis_y = 0.0;
};

/// Flat ring, e.g. the side face of a bearing.
struct Annulus {
  double r_inner = 0.5;
  double r_outer = 1.0;
};

/// Flat face whose outline alternates between root and tip radius,
/// one tooth and one gap per angular period.
struct GearFace {
  double r_root = 1.0;
  double r_tip = 1.2;
  int tooth_count = 12;
};

struct FlatPlate {
  double width = 1.0;
  double height = 1.0;
};

using Shape = std::variant<Sphere, Cylinder, Annulus, GearFace, FlatPlate>;

/// Throws InvalidInput when a shape violates its invariants or its
/// parameters are outside the representable range.
void validate(const Shape& shape);

std::string shape_kind(const Shape& shape);

/// Object placement in the gel plane. The object frame is translated by
/// (offset_x, offset_y) and rotated by `rotation` radians.
struct Pose2D {
  double offset_x = 0.0;
  double offset_y = 0.0;
  double rotation = 0.0;
};

struct GridSpec {
  int width_px = 320;
  int height_px = 240;
  double pixel_pitch = 0.05;  // mm per pixel
};

/// Gap between the undeformed gel plane and the object surface above each
/// pixel. Pixels not covered by the object hold `kNoContact`.
class HeightField {
 public:
  static constexpr double kNoContact = std::numeric_limits<double>::infinity();

  HeightField() = default;
  HeightField(int width_px, int height_px, double pixel_pitch);

  int width() const { return width_; }
  int height() const { return height_; }
  double pixel_pitch() const { return pitch_; }

  double gap(int x, int y) const { return gap_[index(x, y)]; }
  void set_gap(int x, int y, double g) { gap_[index(x, y)] = g; }
  bool covered(int x, int y) const { return gap(x, y) != kNoContact; }

  const std::vector<double>& gaps() const { return gap_; }

  std::size_t covered_count() const;

  /// Copy flipped left-to-right.
  HeightField mirrored() const;

  bool operator==(const HeightField&) const = default;

 private:
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  double pitch_ = 0.0;
  std::vector<double> gap_;
};

/// Volume-per-force constant of the penetration model, V = c * F_G.
struct PenetrationModel {
  double c = 0.1;  // mm^3 / N

  double volume(double grip_force) const { return c * grip_force; }
};

/// In-plane position (mm) of pixel (x, y); pixel (width/2, height/2) sits on
/// the origin.
double pixel_x(const GridSpec& grid, int x);
double pixel_y(const GridSpec& grid, int y);

/// Gap of `shape` at object-frame point (u, v), or kNoContact.
double surface_gap(const Shape& shape, double u, double v);

HeightField rasterize(const Shape& shape, const Pose2D& pose, const GridSpec& grid);

/// Volume pressed into the gel when the object sinks `depth` below the
/// contact plane: sum of max(0, depth - gap) * pitch^2.
double intersection_volume(const HeightField& hf, double depth);

struct DepthSolveOptions {
  double max_depth = 10.0;  // mm, gel thickness bound
  int max_iterations = 60;
  double rel_tolerance = 1e-6;
};

/// Penetration depth whose intersection volume equals `target_volume`.
/// Throws UnreachableVolume when the bracket cannot hold the volume.
double solve_penetration_depth(const HeightField& hf, double target_volume, const DepthSolveOptions& opts = {});

}  // namespace tacsim
