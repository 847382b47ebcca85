#include "tacsim/image_io.hpp"

#include <bit>
#include <cctype>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "tacsim/error.hpp"

namespace tacsim {

RgbImage RgbImage::crop(int x0, int y0, int w, int h) const {
  if (x0 < 0 || y0 < 0 || w <= 0 || h <= 0 || x0 + w > width || y0 + h > height)
    throw InvalidInput("crop window outside image");
  RgbImage out(w, h);
  for (int y = 0; y < h; ++y)
    std::memcpy(&out.data[static_cast<std::size_t>(y) * w * 3], &data[(static_cast<std::size_t>(y0 + y) * width + x0) * 3],
                static_cast<std::size_t>(w) * 3);
  return out;
}

namespace {

// Reads the next unsigned integer of a PNM header, skipping whitespace
// and '#' comments.
int read_header_int(std::istream& in) {
  int ch = in.get();
  while (ch != EOF) {
    if (ch == '#') {
      while (ch != EOF && ch != '\n') ch = in.get();
    } else if (std::isspace(ch)) {
      ch = in.get();
    } else {
      break;
    }
  }
  if (ch == EOF || !std::isdigit(ch)) throw IoError("malformed PPM header");
  long value = 0;
  while (ch != EOF && std::isdigit(ch)) {
    value = value * 10 + (ch - '0');
    if (value > 1'000'000) throw IoError("PPM header value too large");
    ch = in.get();
  }
  // exactly one whitespace byte separates the header from the raster
  if (ch != EOF && !std::isspace(ch)) throw IoError("malformed PPM header");
  return static_cast<int>(value);
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open for writing: " + path.string());
  return f;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open for reading: " + path.string());
  return f;
}

void put_u32_le(std::ostream& out, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                        static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32_le(std::istream& in) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4)) throw IoError("truncated depth file");
  return std::uint32_t{b[0]} | (std::uint32_t{b[1]} << 8) | (std::uint32_t{b[2]} << 16) | (std::uint32_t{b[3]} << 24);
}

}  // namespace

void write_ppm(std::ostream& out, const RgbImage& img) {
  out << "P6\n" << img.width << ' ' << img.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(img.data.data()), static_cast<std::streamsize>(img.data.size()));
  if (!out) throw IoError("failed writing PPM");
}

void write_ppm(const std::filesystem::path& path, const RgbImage& img) {
  auto f = open_out(path);
  write_ppm(f, img);
}

RgbImage read_ppm(std::istream& in) {
  char magic[2];
  if (!in.read(magic, 2) || magic[0] != 'P' || magic[1] != '6') throw IoError("not a binary PPM (P6)");
  int w = read_header_int(in);
  int h = read_header_int(in);
  int maxval = read_header_int(in);
  if (w <= 0 || h <= 0) throw IoError("PPM has empty raster");
  if (maxval != 255) throw IoError("only 8-bit PPM (maxval 255) is supported");
  RgbImage img(w, h);
  if (!in.read(reinterpret_cast<char*>(img.data.data()), static_cast<std::streamsize>(img.data.size())))
    throw IoError("truncated PPM raster");
  return img;
}

RgbImage read_ppm(const std::filesystem::path& path) {
  auto f = open_in(path);
  return read_ppm(f);
}

void write_depth(std::ostream& out, const DepthImage& img) {
  put_u32_le(out, static_cast<std::uint32_t>(img.width));
  put_u32_le(out, static_cast<std::uint32_t>(img.height));
  for (double v : img.values) put_u32_le(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
  if (!out) throw IoError("failed writing depth image");
}

void write_depth(const std::filesystem::path& path, const DepthImage& img) {
  auto f = open_out(path);
  write_depth(f, img);
}

DepthImage read_depth(std::istream& in) {
  auto w = static_cast<std::int32_t>(get_u32_le(in));
  auto h = static_cast<std::int32_t>(get_u32_le(in));
  if (w <= 0 || h <= 0 || static_cast<long long>(w) * h > (1LL << 28)) throw IoError("bad depth image dimensions");
  DepthImage img(w, h);
  for (double& v : img.values) v = std::bit_cast<float>(get_u32_le(in));
  return img;
}

DepthImage read_depth(const std::filesystem::path& path) {
  auto f = open_in(path);
  return read_depth(f);
}

namespace {

std::uint64_t fnv1a(const unsigned char* p, std::size_t n) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string to_hex(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i, v >>= 4) s[i] = digits[v & 0xf];
  return s;
}

}  // namespace

std::string pixel_checksum(const RgbImage& img) { return to_hex(fnv1a(img.data.data(), img.data.size())); }

std::string fnv1a_hex(const std::string& bytes) {
  return to_hex(fnv1a(reinterpret_cast<const unsigned char*>(bytes.data()), bytes.size()));
}

}  // namespace tacsim
