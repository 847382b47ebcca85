#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace tacsim {

/// Local gel indentation in mm (0 = undeformed), row-major.
struct DepthImage {
  int width = 0;
  int height = 0;
  std::vector<double> values;

  DepthImage() = default;
  DepthImage(int w, int h, double fill = 0.0)
      : width(w), height(h), values(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), fill) {}

  double& at(int x, int y) { return values[static_cast<std::size_t>(y) * width + x]; }
  double at(int x, int y) const { return values[static_cast<std::size_t>(y) * width + x]; }

  bool operator==(const DepthImage&) const = default;
};

/// Depth slopes (mm per mm) along x and y.
struct GradientImage {
  int width = 0;
  int height = 0;
  std::vector<double> gx;
  std::vector<double> gy;

  GradientImage() = default;
  GradientImage(int w, int h)
      : width(w),
        height(h),
        gx(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), 0.0),
        gy(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), 0.0) {}

  std::size_t index(int x, int y) const { return static_cast<std::size_t>(y) * width + x; }
};

/// 8-bit RGB, interleaved, row-major.
struct RgbImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> data;

  RgbImage() = default;
  RgbImage(int w, int h, std::uint8_t fill = 0)
      : width(w), height(h), data(static_cast<std::size_t>(w) * static_cast<std::size_t>(h) * 3, fill) {}

  std::uint8_t& at(int x, int y, int c) { return data[(static_cast<std::size_t>(y) * width + x) * 3 + c]; }
  std::uint8_t at(int x, int y, int c) const { return data[(static_cast<std::size_t>(y) * width + x) * 3 + c]; }

  /// Sub-image [x0, x0+w) x [y0, y0+h).
  RgbImage crop(int x0, int y0, int w, int h) const;

  bool operator==(const RgbImage&) const = default;
};

}  // namespace tacsim
