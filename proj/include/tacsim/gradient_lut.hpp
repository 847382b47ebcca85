#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace tacsim {

using Rgb = std::array<double, 3>;

/// Calibrated map from depth gradient (gx, gy) to mean RGB response.
///
/// Bins tile [-g_max, g_max]^2 uniformly; bin (ix, iy) is stored row-major
/// at iy * n_bins + ix. Bins that received no calibration sample keep
/// count 0 and carry the value of their nearest populated neighbour.
class GradientLut {
 public:
  struct Bin {
    std::uint64_t count = 0;
    Rgb value{0.0, 0.0, 0.0};
  };

  GradientLut() = default;
  GradientLut(int n_bins, double g_max, std::vector<Bin> bins);

  int n_bins() const { return n_bins_; }
  double g_max() const { return g_max_; }
  double bin_width() const { return 2.0 * g_max_ / n_bins_; }
  const std::vector<Bin>& bins() const { return bins_; }
  const Bin& bin(int ix, int iy) const { return bins_[static_cast<std::size_t>(iy) * n_bins_ + ix]; }

  /// Bin holding gradient component `g`; clamped to the table.
  int bin_index(double g) const;

  /// Bilinear interpolation between bin centres; gradients beyond the
  /// outermost centres are clamped.
  Rgb lookup(double gx, double gy) const;

  /// Response of an undeformed gel: the raw value of the bin holding (0, 0).
  const Rgb& flat_response() const { return flat_; }

  bool in_range(double gx, double gy) const;

  std::string to_json() const;
  static GradientLut from_json(const std::string& text);

 private:
  int n_bins_ = 0;
  double g_max_ = 0.0;
  std::vector<Bin> bins_;
  Rgb flat_{0.0, 0.0, 0.0};
};

}  // namespace tacsim
