#ifndef DYNRAYS_RENDER_HPP
#define DYNRAYS_RENDER_HPP

// Escape-time pictures with ray overlays, written as 8-bit RGB PNG.

#include <zlib.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "dynrays/curve.hpp"
#include "dynrays/io.hpp"
#include "dynrays/maps.hpp"

namespace dynrays {

using Rgb = std::array<std::uint8_t, 3>;

class Image {
 public:
  Image(int width, int height, Rgb fill = {0, 0, 0}) : w_(width), h_(height) {
    if (width <= 0 || height <= 0) throw ConfigError("image dimensions must be positive");
    px_.assign(static_cast<std::size_t>(width) * height, fill);
  }
  int width() const { return w_; }
  int height() const { return h_; }
  const Rgb& at(int x, int y) const { return px_[static_cast<std::size_t>(y) * w_ + x]; }
  void set(int x, int y, Rgb c) {
    if (x >= 0 && y >= 0 && x < w_ && y < h_) px_[static_cast<std::size_t>(y) * w_ + x] = c;
  }

 private:
  int w_, h_;
  std::vector<Rgb> px_;
};

namespace detail {

inline void put_u32(std::string& s, std::uint32_t v) {
  for (int k = 3; k >= 0; --k) s.push_back(static_cast<char>((v >> (8 * k)) & 0xff));
}

inline void png_chunk(std::string& out, const char* type, const std::string& data) {
  put_u32(out, static_cast<std::uint32_t>(data.size()));
  std::string body(type, 4);
  body += data;
  out += body;
  put_u32(out, static_cast<std::uint32_t>(crc32(0L, reinterpret_cast<const Bytef*>(body.data()),
                                                 static_cast<uInt>(body.size()))));
}

}  // namespace detail

/// PNG bytes: colour type 2, bit depth 8, filter 0 on every row.
inline std::string encode_png(const Image& img) {
  std::string raw;
  raw.reserve(static_cast<std::size_t>(img.height()) * (3 * img.width() + 1));
  for (int y = 0; y < img.height(); ++y) {
    raw.push_back('\0');
    for (int x = 0; x < img.width(); ++x)
      for (auto ch : img.at(x, y)) raw.push_back(static_cast<char>(ch));
  }
  uLongf len = compressBound(static_cast<uLong>(raw.size()));
  std::string z(len, '\0');
  if (compress2(reinterpret_cast<Bytef*>(z.data()), &len, reinterpret_cast<const Bytef*>(raw.data()),
                static_cast<uLong>(raw.size()), 9) != Z_OK)
    throw NumericalError("zlib compression failed");
  z.resize(len);

  std::string out("\x89PNG\r\n\x1a\n", 8);
  std::string ihdr;
  detail::put_u32(ihdr, static_cast<std::uint32_t>(img.width()));
  detail::put_u32(ihdr, static_cast<std::uint32_t>(img.height()));
  ihdr += std::string("\x08\x02\x00\x00\x00", 5);
  detail::png_chunk(out, "IHDR", ihdr);
  detail::png_chunk(out, "IDAT", z);
  detail::png_chunk(out, "IEND", "");
  return out;
}

struct View {
  complex center{0.0, 0.0};
  double span = 4.0;  // width of the picture in the plane
  int width = 600, height = 600;

  double scale() const { return span / width; }
  complex to_plane(double x, double y) const {
    return center + complex((x + 0.5 - 0.5 * width) * scale(), (0.5 * height - y - 0.5) * scale());
  }
  std::pair<double, double> to_pixel(complex z) const {
    const complex d = (z - center) / scale();
    return {d.real() + 0.5 * width - 0.5, 0.5 * height - d.imag() - 0.5};
  }
};

struct RenderConfig {
  View view;
  int max_iter = 200;
  double escape_radius = 0.0;  // 0 selects max(2, 2|c|) for polynomials
  double escape_real = 50.0;   // exponential: escaped once Re z exceeds this
};

/// Number of iterations before z escapes; -1 if it never does.
inline int escape_time(const MapSpec& m, complex z, const RenderConfig& cfg) {
  const double R = cfg.escape_radius > 0 ? cfg.escape_radius : std::max(2.0, 2.0 * std::abs(m.c));
  for (int n = 0; n < cfg.max_iter; ++n) {
    if (m.is_poly() ? std::abs(z) > R : z.real() > cfg.escape_real) return n;
    z = dynrays::apply(m, z);
  }
  return -1;
}

inline Rgb escape_color(int n, int max_iter) {
  if (n < 0) return {0, 0, 0};
  const double s = std::sqrt(static_cast<double>(n) / max_iter);
  auto ch = [](double v) { return static_cast<std::uint8_t>(std::clamp(v, 0.0, 1.0) * 255.0 + 0.5); };
  return {ch(0.15 + 0.6 * s), ch(0.2 + 0.7 * s), ch(0.45 + 0.55 * s)};
}

inline Image render_escape(const MapSpec& m, const RenderConfig& cfg) {
  Image img(cfg.view.width, cfg.view.height);
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x)
      img.set(x, y, escape_color(escape_time(m, cfg.view.to_plane(x, y), cfg), cfg.max_iter));
  return img;
}

/// Polyline overlay; segments leaving the view are clipped pixel by pixel.
inline void draw_curve(Image& img, const View& v, const Curve& c, Rgb color) {
  for (std::size_t i = 1; i < c.points.size(); ++i) {
    const auto [x0, y0] = v.to_pixel(c.points[i - 1]);
    const auto [x1, y1] = v.to_pixel(c.points[i]);
    if (!std::isfinite(x0 + y0 + x1 + y1)) continue;
    const double lo = -4.0 * std::max(v.width, v.height), hi = -lo;
    if (std::max(x0, x1) < 0 || std::min(x0, x1) > v.width || std::max(y0, y1) < 0 || std::min(y0, y1) > v.height)
      continue;
    if (std::min({x0, x1, y0, y1}) < lo || std::max({x0, x1, y0, y1}) > hi) continue;
    const int steps = static_cast<int>(std::ceil(std::max(std::abs(x1 - x0), std::abs(y1 - y0)))) + 1;
    for (int k = 0; k <= steps; ++k) {
      const double s = static_cast<double>(k) / steps;
      img.set(static_cast<int>(std::lround(x0 + s * (x1 - x0))), static_cast<int>(std::lround(y0 + s * (y1 - y0))),
              color);
    }
  }
}

inline void draw_marker(Image& img, const View& v, complex z, Rgb color, int radius = 3) {
  const auto [px, py] = v.to_pixel(z);
  if (!std::isfinite(px + py)) return;
  const int cx = static_cast<int>(std::lround(px)), cy = static_cast<int>(std::lround(py));
  for (int dy = -radius; dy <= radius; ++dy)
    for (int dx = -radius; dx <= radius; ++dx)
      if (dx * dx + dy * dy <= radius * radius) img.set(cx + dx, cy + dy, color);
}

/// Distinct overlay colours, cycled.
inline Rgb overlay_color(std::size_t i) {
  static const std::array<Rgb, 6> palette = {
      Rgb{255, 80, 60}, Rgb{255, 210, 40}, Rgb{90, 230, 90}, Rgb{240, 90, 240}, Rgb{60, 220, 255}, Rgb{255, 150, 40}};
  return palette[i % palette.size()];
}

inline void write_png(const std::string& path, const Image& img) { write_file(path, encode_png(img)); }

}  // namespace dynrays

#endif  // DYNRAYS_RENDER_HPP
