#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>

#include "tacsim/image.hpp"

namespace tacsim {

// Binary PPM (P6, maxval 255).
void write_ppm(std::ostream& out, const RgbImage& img);
void write_ppm(const std::filesystem::path& path, const RgbImage& img);
RgbImage read_ppm(std::istream& in);
RgbImage read_ppm(const std::filesystem::path& path);

// Depth dump: int32 LE width, int32 LE height, then float32 LE values row-major.
void write_depth(std::ostream& out, const DepthImage& img);
void write_depth(const std::filesystem::path& path, const DepthImage& img);
DepthImage read_depth(std::istream& in);
DepthImage read_depth(const std::filesystem::path& path);

/// FNV-1a 64-bit over the raw RGB bytes, rendered as 16 hex digits.
std::string pixel_checksum(const RgbImage& img);

std::string fnv1a_hex(const std::string& bytes);

}  // namespace tacsim
