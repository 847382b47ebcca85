#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "tacsim/error.hpp"
#include "tacsim/tactile_render.hpp"

using namespace tacsim;

namespace {

// LUT whose bin values are affine in the bin centre, so bilinear lookup is
// exact inside the table. The bin holding (0, 0) is centred on
// (0.125, 0.125).
GradientLut affine_lut(int n = 16, double g_max = 2.0) {
  std::vector<GradientLut::Bin> bins(static_cast<std::size_t>(n * n));
  const double h = 2.0 * g_max / n;
  for (int iy = 0; iy < n; ++iy)
    for (int ix = 0; ix < n; ++ix) {
      const double cx = -g_max + (ix + 0.5) * h;
      const double cy = -g_max + (iy + 0.5) * h;
      bins[static_cast<std::size_t>(iy * n + ix)] = {1, {120.0 + 20.0 * cx, 110.0 + 30.0 * cy, 100.0 + 5.0 * cx}};
    }
  return GradientLut(n, g_max, bins);
}

DepthImage random_depth(int w, int h, std::uint64_t seed) {
  DepthImage d(w, h);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (double& v : d.values) v = u(rng);
  return d;
}

// Direct 2-D convolution with the outer-product kernel, replicate border.
DepthImage dense_blur(const DepthImage& in, int k) {
  const auto taps = gaussian_kernel(k);
  const int r = k / 2;
  DepthImage out(in.width, in.height);
  for (int y = 0; y < in.height; ++y)
    for (int x = 0; x < in.width; ++x) {
      double acc = 0.0;
      for (int j = -r; j <= r; ++j)
        for (int i = -r; i <= r; ++i) {
          const int sx = std::clamp(x + i, 0, in.width - 1);
          const int sy = std::clamp(y + j, 0, in.height - 1);
          acc += taps[static_cast<std::size_t>(i + r)] * taps[static_cast<std::size_t>(j + r)] * in.at(sx, sy);
        }
      out.at(x, y) = acc;
    }
  return out;
}

double sum(const DepthImage& d) { return std::accumulate(d.values.begin(), d.values.end(), 0.0); }

}  // namespace

TEST(Kernel, NormalisedSymmetricGaussian) {
  for (int k : {5, 11, 21, 51, 71}) {
    const auto t = gaussian_kernel(k);
    ASSERT_EQ(t.size(), static_cast<std::size_t>(k));
    EXPECT_NEAR(std::accumulate(t.begin(), t.end(), 0.0), 1.0, 1e-14);
    for (int i = 0; i < k; ++i) EXPECT_DOUBLE_EQ(t[i], t[k - 1 - i]);
    const double sigma = k / 6.0;
    EXPECT_NEAR(t[k / 2 + 1] / t[k / 2], std::exp(-0.5 / (sigma * sigma)), 1e-14);
  }
  EXPECT_THROW(gaussian_kernel(4), InvalidInput);
  EXPECT_THROW((BlurCascade{{3, 6}}.validate()), InvalidInput);
}

TEST(Blur, ConstantImageUnchanged) {
  DepthImage d(50, 40, 0.37);
  const DepthImage b = blur(d, BlurCascade{});
  for (double v : b.values) EXPECT_NEAR(v, 0.37, 1e-14);
}

TEST(Blur, EmptyCascadeIsIdentity) {
  const DepthImage d = random_depth(20, 10, 3);
  EXPECT_EQ(blur(d, BlurCascade{{}}), d);
}

TEST(Blur, InteriorImpulseKeepsMass) {
  DepthImage d(200, 200);
  d.at(100, 100) = 1.0;
  const DepthImage b = blur(d, BlurCascade{});
  EXPECT_NEAR(sum(b), 1.0, 1e-12);
  EXPECT_NEAR(b.at(90, 100), b.at(110, 100), 1e-15);
  EXPECT_NEAR(b.at(100, 90), b.at(90, 100), 1e-15);
}

TEST(Blur, MatchesDenseConvolution) {
  const DepthImage d = random_depth(64, 64, 7);
  for (int k : {5, 11, 21}) {
    const DepthImage sep = blur(d, BlurCascade{{k}});
    const DepthImage ref = dense_blur(d, k);
    for (std::size_t i = 0; i < ref.values.size(); ++i) ASSERT_NEAR(sep.values[i], ref.values[i], 1e-12) << k;
  }
  const DepthImage two = blur(d, BlurCascade{{11, 5}});
  const DepthImage ref = dense_blur(dense_blur(d, 11), 5);
  for (std::size_t i = 0; i < ref.values.size(); ++i) ASSERT_NEAR(two.values[i], ref.values[i], 1e-12);
}

TEST(Blur, MaximumPrinciple) {
  const DepthImage d = random_depth(80, 60, 9);
  const auto [lo, hi] = std::minmax_element(d.values.begin(), d.values.end());
  const DepthImage b = blur(d, BlurCascade{});
  for (double v : b.values) {
    EXPECT_GE(v, *lo - 1e-12);
    EXPECT_LE(v, *hi + 1e-12);
  }
}

TEST(Gradients, LinearRampIsExactEverywhere) {
  DepthImage d(30, 20);
  for (int y = 0; y < 20; ++y)
    for (int x = 0; x < 30; ++x) d.at(x, y) = 0.01 * x + 0.02 * y;
  const GradientImage g = gradients(d, 0.05);
  for (std::size_t i = 0; i < g.gx.size(); ++i) {
    EXPECT_NEAR(g.gx[i], 0.2, 1e-12);
    EXPECT_NEAR(g.gy[i], 0.4, 1e-12);
  }
}

TEST(Gradients, SphereSlopeMatchesAnalytic) {
  const GridSpec grid;
  const double r = 1.97;
  const HeightField hf = rasterize(Sphere{r}, Pose2D{}, grid);
  const GradientImage g = gradients(depth_at(hf, 0.5), grid.pixel_pitch);
  // depth = d - (R - sqrt(R^2 - rho^2)); d/dx = -x / sqrt(R^2 - rho^2)
  for (auto [px, py] : {std::pair{10, 0}, std::pair{-14, 6}, std::pair{5, -17}}) {
    const double x = px * 0.05, y = py * 0.05;
    const double s = std::sqrt(r * r - x * x - y * y);
    const std::size_t i = g.index(160 + px, 120 + py);
    EXPECT_NEAR(g.gx[i], -x / s, 2e-3);
    EXPECT_NEAR(g.gy[i], -y / s, 2e-3);
  }
}

TEST(Shade, ZeroGradientReproducesBackground) {
  const GradientLut lut = affine_lut();
  const RgbImage bg = make_background(lut, 40, 30, 3, 17);
  const ShadeResult r = shade(GradientImage(40, 30), lut, bg);
  EXPECT_EQ(r.image, bg);
  EXPECT_EQ(r.saturated, 0u);
}

TEST(Shade, LookupInterpolatesFlatResponseIsRawBin) {
  const GradientLut lut = affine_lut();
  const Rgb z = lut.lookup(0.0, 0.0);
  EXPECT_NEAR(z[0], 120.0, 1e-12);
  EXPECT_NEAR(z[1], 110.0, 1e-12);
  EXPECT_NEAR(lut.lookup(0.3, -0.7)[0], 126.0, 1e-12);
  EXPECT_EQ(lut.flat_response(), lut.bin(8, 8).value);
  // clamped beyond the outermost centre (1.875)
  EXPECT_NEAR(lut.lookup(1.95, 0.0)[0], 120.0 + 20.0 * 1.875, 1e-12);
}

TEST(Shade, AddsLutDeltaToBackground) {
  const GradientLut lut = affine_lut();
  const RgbImage bg(2, 1, 50);
  GradientImage g(2, 1);
  g.gx = {0.5, -0.25};
  g.gy = {-0.5, 1.0};
  const ShadeResult r = shade(g, lut, bg);
  EXPECT_EQ(r.image.at(0, 0, 0), 60);  // 50 + 20 * 0.5
  EXPECT_EQ(r.image.at(0, 0, 1), 35);  // 50 - 30 * 0.5
  EXPECT_EQ(r.image.at(0, 0, 2), 53);  // 50 + 2.5, rounded away from zero
  EXPECT_EQ(r.image.at(1, 0, 0), 45);
  EXPECT_EQ(r.image.at(1, 0, 1), 80);
  EXPECT_EQ(r.image.at(1, 0, 2), 49);  // 48.75
}

TEST(Shade, CountsAndClampsSaturation) {
  const GradientLut lut = affine_lut();
  const RgbImage bg(3, 1, 250);
  GradientImage g(3, 1);
  g.gx = {10.0, -10.0, 0.0};
  const ShadeResult r = shade(g, lut, bg);
  EXPECT_EQ(r.saturated, 2u);
  EXPECT_EQ(r.image.at(0, 0, 0), 255);
  EXPECT_EQ(r.image.at(2, 0, 0), 250);
  EXPECT_THROW(shade(GradientImage(2, 2), lut, bg), InvalidInput);
}

TEST(Background, NoiseBoundsAndDeterminism) {
  const GradientLut lut = affine_lut();
  const Rgb flat = lut.flat_response();
  EXPECT_NEAR(flat[0], 122.5, 1e-12);
  const RgbImage quiet = make_background(lut, 10, 10, 0, 1);
  for (std::size_t i = 0; i < quiet.data.size(); i += 3) EXPECT_EQ(quiet.data[i], 123);
  const RgbImage a = make_background(lut, 64, 64, 2, 42);
  EXPECT_EQ(a, make_background(lut, 64, 64, 2, 42));
  EXPECT_NE(a, make_background(lut, 64, 64, 2, 43));
  for (int y = 0; y < 64; ++y)
    for (int x = 0; x < 64; ++x)
      for (int c = 0; c < 3; ++c) EXPECT_LE(std::abs(a.at(x, y, c) - std::lround(flat[c])), 2);
  EXPECT_THROW(make_background(lut, 4, 4, -1, 0), InvalidInput);
}

TEST(Render, ZeroForceEqualsBackground) {
  const GradientLut lut = affine_lut();
  RenderSettings rs;
  const RgbImage bg = make_background(lut, rs.grid.width_px, rs.grid.height_px, 2, 5);
  const ShadeResult r = render_tactile(Cylinder{5.0, 1.0, 0.0}, Pose2D{}, 0.0, PenetrationModel{0.15}, rs, lut, bg);
  EXPECT_EQ(r.image, bg);
}

TEST(Render, FootprintGrowsWithForce) {
  const HeightField hf = rasterize(Sphere{1.97}, Pose2D{}, GridSpec{});
  auto footprint = [&](double f) {
    const DepthImage d = depth_from_contact(hf, f, PenetrationModel{0.1416});
    return std::count_if(d.values.begin(), d.values.end(), [](double v) { return v > 0.0; });
  };
  EXPECT_GT(footprint(55.0), footprint(25.0));
}

TEST(Render, ContactChangesImageAndIsDeterministic) {
  const GradientLut lut = affine_lut();
  RenderSettings rs;
  const RgbImage bg = make_background(lut, rs.grid.width_px, rs.grid.height_px, 0, 0);
  const ShadeResult a = render_tactile(Sphere{1.97}, Pose2D{}, 20.0, PenetrationModel{0.1416}, rs, lut, bg);
  const ShadeResult b = render_tactile(Sphere{1.97}, Pose2D{}, 20.0, PenetrationModel{0.1416}, rs, lut, bg);
  EXPECT_EQ(a.image, b.image);
  EXPECT_NE(a.image, bg);
  // centre is a slope-free extremum
  EXPECT_EQ(a.image.at(160, 120, 0), bg.at(160, 120, 0));
}

TEST(Render, RejectsBadInputs) {
  const HeightField hf = rasterize(Sphere{1.0}, Pose2D{}, GridSpec{});
  EXPECT_THROW(depth_from_contact(hf, -1.0, PenetrationModel{0.1}), InvalidInput);
  EXPECT_THROW(depth_from_contact(hf, 10.0, PenetrationModel{0.0}), InvalidInput);
  EXPECT_THROW(depth_from_contact(hf, 1e5, PenetrationModel{0.1}), UnreachableVolume);
}
