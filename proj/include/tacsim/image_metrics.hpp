#pragma once

#include <string>

#include "tacsim/image.hpp"

namespace tacsim {

struct MetricReport {
  double mse = 0.0;
  double psnr = 0.0;  // +inf for identical images
  double ssim = 1.0;

  /// {"mse": .., "psnr": .. or "inf", "ssim": ..}
  std::string to_json() const;
};

/// Mean over pixels and channels of the squared difference, summed in
/// integers and divided once. Range [0, 65025].
double mse(const RgbImage& a, const RgbImage& b);

/// 10 log10(255^2 / mse); +inf when mse is 0.
double psnr_from_mse(double mse_value);
double psnr(const RgbImage& a, const RgbImage& b);

/// Raw SSIM: 11x11 Gaussian window (sigma 1.5) over every valid position,
/// K1 = 0.01, K2 = 0.03, averaged over the three channels. May be negative.
double ssim_raw(const RgbImage& a, const RgbImage& b);

/// ssim_raw clamped to [0, 1].
double ssim(const RgbImage& a, const RgbImage& b);

MetricReport compare(const RgbImage& a, const RgbImage& b);

}  // namespace tacsim
