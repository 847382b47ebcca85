#include "tacsim/image_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <json.hpp>
#include <limits>
#include <vector>

#include "tacsim/error.hpp"

namespace tacsim {

namespace {

constexpr int kWindow = 11;
constexpr double kSigma = 1.5;
constexpr double kPeak = 255.0;
constexpr double kC1 = (0.01 * kPeak) * (0.01 * kPeak);
constexpr double kC2 = (0.03 * kPeak) * (0.03 * kPeak);

void require_same_size(const RgbImage& a, const RgbImage& b) {
  if (a.width != b.width || a.height != b.height) throw InvalidInput("images differ in size");
}

std::vector<double> window_taps() {
  std::vector<double> w(kWindow);
  double sum = 0.0;
  for (int i = 0; i < kWindow; ++i) {
    const double d = i - kWindow / 2;
    w[static_cast<std::size_t>(i)] = std::exp(-0.5 * d * d / (kSigma * kSigma));
    sum += w[static_cast<std::size_t>(i)];
  }
  for (double& v : w) v /= sum;
  return w;
}

// Separable Gaussian over valid window positions only.
std::vector<double> filter_valid(const std::vector<double>& src, int w, int h, const std::vector<double>& taps) {
  const int ow = w - kWindow + 1;
  const int oh = h - kWindow + 1;
  std::vector<double> rows(static_cast<std::size_t>(ow) * h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (int k = 0; k < kWindow; ++k) acc += taps[static_cast<std::size_t>(k)] * src[static_cast<std::size_t>(y) * w + x + k];
      rows[static_cast<std::size_t>(y) * ow + x] = acc;
    }
  std::vector<double> out(static_cast<std::size_t>(ow) * oh);
  for (int y = 0; y < oh; ++y)
    for (int x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (int k = 0; k < kWindow; ++k)
        acc += taps[static_cast<std::size_t>(k)] * rows[static_cast<std::size_t>(y + k) * ow + x];
      out[static_cast<std::size_t>(y) * ow + x] = acc;
    }
  return out;
}

double channel_ssim(const RgbImage& a, const RgbImage& b, int c, const std::vector<double>& taps) {
  const int w = a.width;
  const int h = a.height;
  const std::size_t n = static_cast<std::size_t>(w) * h;
  std::vector<double> pa(n), pb(n), paa(n), pbb(n), pab(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double va = a.data[i * 3 + static_cast<std::size_t>(c)];
    const double vb = b.data[i * 3 + static_cast<std::size_t>(c)];
    pa[i] = va;
    pb[i] = vb;
    paa[i] = va * va;
    pbb[i] = vb * vb;
    pab[i] = va * vb;
  }
  const auto mu_a = filter_valid(pa, w, h, taps);
  const auto mu_b = filter_valid(pb, w, h, taps);
  const auto e_aa = filter_valid(paa, w, h, taps);
  const auto e_bb = filter_valid(pbb, w, h, taps);
  const auto e_ab = filter_valid(pab, w, h, taps);

  double total = 0.0;
  for (std::size_t i = 0; i < mu_a.size(); ++i) {
    const double ma = mu_a[i];
    const double mb = mu_b[i];
    const double var_a = e_aa[i] - ma * ma;
    const double var_b = e_bb[i] - mb * mb;
    const double cov = e_ab[i] - ma * mb;
    const double num = (2.0 * ma * mb + kC1) * (2.0 * cov + kC2);
    const double den = (ma * ma + mb * mb + kC1) * (var_a + var_b + kC2);
    total += num / den;
  }
  return total / static_cast<double>(mu_a.size());
}

}  // namespace

double mse(const RgbImage& a, const RgbImage& b) {
  require_same_size(a, b);
  if (a.data.empty()) throw InvalidInput("empty image");
  std::uint64_t sum = 0;
  for (std::size_t i = 0; i < a.data.size(); ++i) {
    const int d = static_cast<int>(a.data[i]) - static_cast<int>(b.data[i]);
    sum += static_cast<std::uint64_t>(d * d);
  }
  return static_cast<double>(sum) / static_cast<double>(a.data.size());
}

double psnr_from_mse(double mse_value) {
  if (!(mse_value >= 0.0)) throw InvalidInput("MSE must be >= 0");
  if (mse_value == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(kPeak * kPeak / mse_value);
}

double psnr(const RgbImage& a, const RgbImage& b) { return psnr_from_mse(mse(a, b)); }

double ssim_raw(const RgbImage& a, const RgbImage& b) {
  require_same_size(a, b);
  if (a.width < kWindow || a.height < kWindow) throw InvalidInput("SSIM needs images of at least 11x11 pixels");
  const auto taps = window_taps();
  double total = 0.0;
  for (int c = 0; c < 3; ++c) total += channel_ssim(a, b, c, taps);
  return total / 3.0;
}

double ssim(const RgbImage& a, const RgbImage& b) { return std::clamp(ssim_raw(a, b), 0.0, 1.0); }

MetricReport compare(const RgbImage& a, const RgbImage& b) {
  MetricReport r;
  r.mse = mse(a, b);
  r.psnr = psnr_from_mse(r.mse);
  r.ssim = ssim(a, b);
  return r;
}

std::string MetricReport::to_json() const {
  nlohmann::json j;
  j["mse"] = mse;
  if (std::isinf(psnr))
    j["psnr"] = "inf";
  else
    j["psnr"] = psnr;
  j["ssim"] = ssim;
  return j.dump();
}

}  // namespace tacsim
