#pragma once

#include <array>
#include <vector>

#include "tacsim/geometry.hpp"
#include "tacsim/gradient_lut.hpp"
#include "tacsim/image.hpp"
#include "tacsim/tactile_render.hpp"

namespace tacsim {

/// Three-light Lambertian stand-in for the physical sensor. Light i sits at
/// azimuth azimuth_deg[i] and elevation elevation_deg and only feeds
/// channel i (pure R, G and B).
struct GroundTruthShader {
  std::array<double, 3> azimuth_deg{0.0, 120.0, 240.0};
  double elevation_deg = 45.0;
  double ambient = 30.0;
  double gain = 140.0;

  /// Unrounded channel intensities for one surface slope, clamped to [0, 255].
  Rgb intensity(double gx, double gy) const;
};

RgbImage synth_ground_truth(const GradientImage& g, const GroundTruthShader& shader);

struct CalibrationPress {
  GradientImage gradient;
  RgbImage image;
};

/// Accumulates every pixel of every press into its gradient bin. Samples
/// outside [-g_max, g_max]^2 are ignored. Throws CalibrationError when no
/// bin is populated.
GradientLut calibrate_lut(const std::vector<CalibrationPress>& presses, int n_bins = 64, double g_max = 3.0);

/// One press of the calibration ball: where it is and how deep it sits.
struct SpherePressSpec {
  double offset_x = 0.0;  // mm
  double offset_y = 0.0;  // mm
  double depth = 0.5;     // mm
};

inline constexpr double kCalibrationBallRadius = 1.97;  // mm, 3.94 mm ball

/// Gradient field of a rigid ball pressed to `spec.depth` (no blur).
GradientImage sphere_press_gradient(const GridSpec& grid, double radius, const SpherePressSpec& spec);

/// 3 x 3 grid of presses with depths 0.3 .. 0.7 mm.
std::vector<SpherePressSpec> default_press_layout();

/// Gradient fields shaded by `shader`, ready for calibrate_lut.
std::vector<CalibrationPress> make_sphere_presses(const GridSpec& grid, double radius,
                                                  const std::vector<SpherePressSpec>& specs,
                                                  const GroundTruthShader& shader);

/// Pixel bounding box (inclusive start, exclusive end) of depth > threshold.
struct PixelBox {
  int x0 = 0;
  int y0 = 0;
  int x1 = 0;
  int y1 = 0;
  int width() const { return x1 - x0; }
  int height() const { return y1 - y0; }
  bool empty() const { return x1 <= x0 || y1 <= y0; }
};

PixelBox contact_box(const DepthImage& depth, double threshold = 0.0);

/// Imprint measurement used to match c against an observed imprint.
struct ImprintOptions {
  BlurCascade cascade{{}};  // empty: measure the rigid imprint
  double threshold = 1e-3;  // mm
};

/// Area (mm^2) of pixels whose (optionally blurred) depth exceeds the threshold.
double imprint_area(const HeightField& hf, double grip_force, const PenetrationModel& pm,
                    const ImprintOptions& opts = {});

struct PenetrationFit {
  PenetrationModel model;
  double area = 0.0;        // imprint area at the returned c, mm^2
  bool degenerate = false;  // area does not depend on c over the bracket
};

struct PenetrationBracket {
  double c_lo = 1e-4;
  double c_hi = 10.0;
};

/// Bisects c so that the imprint of `shape` at `f_ref` matches `area_ref`
/// within 2 %. Throws CalibrationError when the bracket cannot reach it.
PenetrationFit fit_penetration_constant(const Shape& shape, const Pose2D& pose, const GridSpec& grid, double f_ref,
                                        double area_ref, const PenetrationBracket& bracket = {},
                                        const ImprintOptions& opts = {});

}  // namespace tacsim
