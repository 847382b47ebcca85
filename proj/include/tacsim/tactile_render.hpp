#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "tacsim/geometry.hpp"
#include "tacsim/gradient_lut.hpp"
#include "tacsim/image.hpp"

namespace tacsim {

/// Successive Gaussian smoothings that turn a rigid imprint into a gel
/// deformation. Each kernel of size k uses sigma = k / 6.
struct BlurCascade {
  std::vector<int> kernel_sizes{71, 51, 21, 11, 5};

  void validate() const;
};

/// Normalised 1-D Gaussian taps for an odd kernel size, sigma = size / 6.
std::vector<double> gaussian_kernel(int size);

/// Indentation image for grip force `grip_force`: the object sinks until the
/// intersection volume equals c * F_G.
DepthImage depth_from_contact(const HeightField& hf, double grip_force, const PenetrationModel& pm);

/// Depth image for a known penetration depth (no force model involved).
DepthImage depth_at(const HeightField& hf, double depth);

/// Applies every kernel of the cascade in order, separably, with replicate
/// borders.
DepthImage blur(const DepthImage& depth, const BlurCascade& cascade);

/// Central differences inside, one-sided on the border, divided by pitch.
GradientImage gradients(const DepthImage& depth, double pixel_pitch);

struct ShadeResult {
  RgbImage image;
  std::size_t saturated = 0;  // pixels whose gradient fell outside the LUT range
};

/// out = clamp(background + lut(g) - lut(0, 0), 0, 255) per channel.
ShadeResult shade(const GradientImage& g, const GradientLut& lut, const RgbImage& background);

/// Gel background: the LUT's flat response plus optional seeded integer
/// noise in [-noise_amplitude, noise_amplitude].
RgbImage make_background(const GradientLut& lut, int width, int height, int noise_amplitude, std::uint64_t seed);

struct RenderSettings {
  GridSpec grid;
  BlurCascade cascade;
};

/// depth_from_contact -> blur -> gradients -> shade.
ShadeResult render_tactile(const Shape& shape, const Pose2D& pose, double grip_force, const PenetrationModel& pm,
                           const RenderSettings& settings, const GradientLut& lut, const RgbImage& background);

/// Same pipeline starting from an already rasterised height field.
ShadeResult render_height_field(const HeightField& hf, double grip_force, const PenetrationModel& pm,
                                const BlurCascade& cascade, const GradientLut& lut, const RgbImage& background);

}  // namespace tacsim
