#include "tacsim/gradient_lut.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>

#include "tacsim/error.hpp"

namespace tacsim {

GradientLut::GradientLut(int n_bins, double g_max, std::vector<Bin> bins)
    : n_bins_(n_bins), g_max_(g_max), bins_(std::move(bins)) {
  if (n_bins < 2) throw InvalidInput("LUT needs at least 2 bins per axis");
  if (!(g_max > 0.0) || !std::isfinite(g_max)) throw InvalidInput("LUT gradient range must be > 0");
  if (bins_.size() != static_cast<std::size_t>(n_bins) * static_cast<std::size_t>(n_bins))
    throw InvalidInput("LUT bin count does not match n_bins^2");
  flat_ = bin(bin_index(0.0), bin_index(0.0)).value;
}

int GradientLut::bin_index(double g) const {
  const int i = static_cast<int>(std::floor((g + g_max_) / bin_width()));
  return std::clamp(i, 0, n_bins_ - 1);
}

bool GradientLut::in_range(double gx, double gy) const {
  return std::abs(gx) <= g_max_ && std::abs(gy) <= g_max_;
}

Rgb GradientLut::lookup(double gx, double gy) const {
  const double h = bin_width();
  const double hi = static_cast<double>(n_bins_ - 1);
  // continuous index in bin-centre coordinates
  const double fx = std::clamp((gx + g_max_) / h - 0.5, 0.0, hi);
  const double fy = std::clamp((gy + g_max_) / h - 0.5, 0.0, hi);
  const int x0 = std::min(static_cast<int>(fx), n_bins_ - 2);
  const int y0 = std::min(static_cast<int>(fy), n_bins_ - 2);
  const double tx = fx - x0;
  const double ty = fy - y0;
  const Rgb& v00 = bin(x0, y0).value;
  const Rgb& v10 = bin(x0 + 1, y0).value;
  const Rgb& v01 = bin(x0, y0 + 1).value;
  const Rgb& v11 = bin(x0 + 1, y0 + 1).value;
  Rgb out{};
  for (int c = 0; c < 3; ++c) {
    const double top = v00[c] + tx * (v10[c] - v00[c]);
    const double bottom = v01[c] + tx * (v11[c] - v01[c]);
    out[c] = top + ty * (bottom - top);
  }
  return out;
}

std::string GradientLut::to_json() const {
  nlohmann::json j;
  j["n_bins"] = n_bins_;
  j["g_max"] = g_max_;
  j["flat_response"] = {flat_[0], flat_[1], flat_[2]};
  auto& arr = j["bins"] = nlohmann::json::array();
  for (const Bin& b : bins_) arr.push_back({b.count, b.value[0], b.value[1], b.value[2]});
  return j.dump();
}

GradientLut GradientLut::from_json(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    const int n = j.at("n_bins").get<int>();
    const double g_max = j.at("g_max").get<double>();
    const auto& arr = j.at("bins");
    std::vector<Bin> bins;
    bins.reserve(arr.size());
    for (const auto& e : arr) {
      if (!e.is_array() || e.size() != 4) throw InvalidInput("LUT bin entries must be [count, r, g, b]");
      bins.push_back(Bin{e[0].get<std::uint64_t>(), {e[1].get<double>(), e[2].get<double>(), e[3].get<double>()}});
    }
    return GradientLut(n, g_max, std::move(bins));
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("malformed LUT json: ") + e.what());
  }
}

}  // namespace tacsim
