#include "tacsim/tactile_render.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "tacsim/error.hpp"

namespace tacsim {

void BlurCascade::validate() const {
  for (int k : kernel_sizes)
    if (k < 3 || k % 2 == 0) throw InvalidInput("blur kernel sizes must be odd and >= 3");
}

std::vector<double> gaussian_kernel(int size) {
  if (size < 1 || size % 2 == 0) throw InvalidInput("kernel size must be odd");
  const int r = size / 2;
  const double sigma = size / 6.0;
  std::vector<double> taps(static_cast<std::size_t>(size));
  double sum = 0.0;
  for (int i = -r; i <= r; ++i) {
    double w = std::exp(-0.5 * (i * i) / (sigma * sigma));
    taps[static_cast<std::size_t>(i + r)] = w;
    sum += w;
  }
  for (double& w : taps) w /= sum;
  return taps;
}

DepthImage depth_at(const HeightField& hf, double depth) {
  DepthImage out(hf.width(), hf.height());
  for (int y = 0; y < hf.height(); ++y)
    for (int x = 0; x < hf.width(); ++x) out.at(x, y) = std::max(0.0, depth - hf.gap(x, y));
  return out;
}

DepthImage depth_from_contact(const HeightField& hf, double grip_force, const PenetrationModel& pm) {
  if (!(grip_force >= 0.0) || !std::isfinite(grip_force)) throw InvalidInput("grip force must be >= 0");
  if (!(pm.c > 0.0)) throw InvalidInput("penetration constant must be > 0");
  if (grip_force == 0.0) return DepthImage(hf.width(), hf.height());
  return depth_at(hf, solve_penetration_depth(hf, pm.volume(grip_force)));
}

namespace {

// One horizontal pass over every row; replicate border.
void convolve_rows(const std::vector<double>& src, std::vector<double>& dst, int width, int height,
                   const std::vector<double>& taps) {
  const int r = static_cast<int>(taps.size()) / 2;
  std::vector<double> row(static_cast<std::size_t>(width + 2 * r));
  for (int y = 0; y < height; ++y) {
    const double* in = &src[static_cast<std::size_t>(y) * width];
    for (int i = 0; i < width + 2 * r; ++i) row[static_cast<std::size_t>(i)] = in[std::clamp(i - r, 0, width - 1)];
    double* out = &dst[static_cast<std::size_t>(y) * width];
    for (int x = 0; x < width; ++x) {
      double acc = 0.0;
      const double* p = &row[static_cast<std::size_t>(x)];
      for (std::size_t k = 0; k < taps.size(); ++k) acc += taps[k] * p[k];
      out[x] = acc;
    }
  }
}

void convolve_cols(const std::vector<double>& src, std::vector<double>& dst, int width, int height,
                   const std::vector<double>& taps) {
  const int r = static_cast<int>(taps.size()) / 2;
  std::vector<double> col(static_cast<std::size_t>(height + 2 * r));
  for (int x = 0; x < width; ++x) {
    for (int i = 0; i < height + 2 * r; ++i)
      col[static_cast<std::size_t>(i)] = src[static_cast<std::size_t>(std::clamp(i - r, 0, height - 1)) * width + x];
    for (int y = 0; y < height; ++y) {
      double acc = 0.0;
      const double* p = &col[static_cast<std::size_t>(y)];
      for (std::size_t k = 0; k < taps.size(); ++k) acc += taps[k] * p[k];
      dst[static_cast<std::size_t>(y) * width + x] = acc;
    }
  }
}

}  // namespace

DepthImage blur(const DepthImage& depth, const BlurCascade& cascade) {
  cascade.validate();
  DepthImage cur = depth;
  std::vector<double> tmp(cur.values.size());
  for (int k : cascade.kernel_sizes) {
    const auto taps = gaussian_kernel(k);
    convolve_rows(cur.values, tmp, cur.width, cur.height, taps);
    convolve_cols(tmp, cur.values, cur.width, cur.height, taps);
  }
  return cur;
}

GradientImage gradients(const DepthImage& depth, double pixel_pitch) {
  if (!(pixel_pitch > 0.0)) throw InvalidInput("pixel pitch must be > 0");
  const int w = depth.width;
  const int h = depth.height;
  GradientImage g(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double dx = 0.0;
      double dy = 0.0;
      if (w > 1) {
        if (x == 0)
          dx = depth.at(1, y) - depth.at(0, y);
        else if (x == w - 1)
          dx = depth.at(w - 1, y) - depth.at(w - 2, y);
        else
          dx = 0.5 * (depth.at(x + 1, y) - depth.at(x - 1, y));
      }
      if (h > 1) {
        if (y == 0)
          dy = depth.at(x, 1) - depth.at(x, 0);
        else if (y == h - 1)
          dy = depth.at(x, h - 1) - depth.at(x, h - 2);
        else
          dy = 0.5 * (depth.at(x, y + 1) - depth.at(x, y - 1));
      }
      g.gx[g.index(x, y)] = dx / pixel_pitch;
      g.gy[g.index(x, y)] = dy / pixel_pitch;
    }
  }
  return g;
}

ShadeResult shade(const GradientImage& g, const GradientLut& lut, const RgbImage& background) {
  if (background.width != g.width || background.height != g.height)
    throw InvalidInput("background dimensions do not match gradient image");
  if (lut.n_bins() <= 0) throw InvalidInput("gradient LUT is not calibrated");

  ShadeResult res{RgbImage(g.width, g.height), 0};
  const Rgb flat = lut.lookup(0.0, 0.0);
  for (int y = 0; y < g.height; ++y) {
    for (int x = 0; x < g.width; ++x) {
      const std::size_t i = g.index(x, y);
      const double gx = g.gx[i];
      const double gy = g.gy[i];
      if (!lut.in_range(gx, gy)) ++res.saturated;
      const Rgb v = lut.lookup(gx, gy);
      for (int c = 0; c < 3; ++c) {
        const double out = background.at(x, y, c) + (v[c] - flat[c]);
        res.image.at(x, y, c) = static_cast<std::uint8_t>(std::clamp(std::lround(out), 0L, 255L));
      }
    }
  }
  return res;
}

RgbImage make_background(const GradientLut& lut, int width, int height, int noise_amplitude, std::uint64_t seed) {
  if (noise_amplitude < 0) throw InvalidInput("noise amplitude must be >= 0");
  RgbImage bg(width, height);
  const Rgb& flat = lut.flat_response();
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> noise(-noise_amplitude, noise_amplitude);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x)
      for (int c = 0; c < 3; ++c) {
        long v = std::lround(flat[c]);
        if (noise_amplitude > 0) v += noise(rng);
        bg.at(x, y, c) = static_cast<std::uint8_t>(std::clamp(v, 0L, 255L));
      }
  return bg;
}

ShadeResult render_height_field(const HeightField& hf, double grip_force, const PenetrationModel& pm,
                                const BlurCascade& cascade, const GradientLut& lut, const RgbImage& background) {
  const DepthImage depth = depth_from_contact(hf, grip_force, pm);
  const DepthImage smooth = blur(depth, cascade);
  return shade(gradients(smooth, hf.pixel_pitch()), lut, background);
}

ShadeResult render_tactile(const Shape& shape, const Pose2D& pose, double grip_force, const PenetrationModel& pm,
                           const RenderSettings& settings, const GradientLut& lut, const RgbImage& background) {
  return render_height_field(rasterize(shape, pose, settings.grid), grip_force, pm, settings.cascade, lut, background);
}

}  // namespace tacsim
