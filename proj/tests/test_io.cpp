#include <gtest/gtest.h>
#include <zlib.h>

#include <cstdlib>
#include <random>

#include "dynrays/io.hpp"
#include "dynrays/render.hpp"

using namespace dynrays;

namespace {

std::uint32_t read_u32(const std::string& s, std::size_t at) {
  std::uint32_t v = 0;
  for (int k = 0; k < 4; ++k) v = (v << 8) | static_cast<unsigned char>(s[at + k]);
  return v;
}

struct DecodedPng {
  std::uint32_t width = 0, height = 0;
  int depth = 0, color = 0;
  std::string pixels;  // filter bytes included
  bool crc_ok = true;
  std::vector<std::string> chunks;
};

// Minimal reader for what encode_png writes: chunk walk, CRC check, inflate.
DecodedPng decode(const std::string& png) {
  DecodedPng d;
  EXPECT_EQ(png.substr(0, 8), std::string("\x89PNG\r\n\x1a\n", 8));
  std::string idat;
  for (std::size_t at = 8; at < png.size();) {
    const std::uint32_t len = read_u32(png, at);
    const std::string type = png.substr(at + 4, 4);
    const std::string data = png.substr(at + 8, len);
    const std::uint32_t crc = read_u32(png, at + 8 + len);
    const std::string body = png.substr(at + 4, 4 + len);
    d.crc_ok = d.crc_ok && crc == crc32(0L, reinterpret_cast<const Bytef*>(body.data()), static_cast<uInt>(body.size()));
    d.chunks.push_back(type);
    if (type == "IHDR") {
      d.width = read_u32(data, 0);
      d.height = read_u32(data, 4);
      d.depth = static_cast<unsigned char>(data[8]);
      d.color = static_cast<unsigned char>(data[9]);
    } else if (type == "IDAT") {
      idat += data;
    }
    at += 12 + len;
  }
  uLongf n = static_cast<uLongf>(d.height) * (3 * d.width + 1);
  d.pixels.assign(n, '\0');
  EXPECT_EQ(uncompress(reinterpret_cast<Bytef*>(d.pixels.data()), &n, reinterpret_cast<const Bytef*>(idat.data()),
                       static_cast<uLong>(idat.size())),
            Z_OK);
  d.pixels.resize(n);
  return d;
}

}  // namespace

TEST(Png, RoundTripsPixels) {
  Image img(7, 5);
  std::mt19937 rng(5);
  for (int y = 0; y < 5; ++y)
    for (int x = 0; x < 7; ++x)
      img.set(x, y, {static_cast<std::uint8_t>(rng()), static_cast<std::uint8_t>(rng()), static_cast<std::uint8_t>(rng())});
  const auto d = decode(encode_png(img));
  EXPECT_TRUE(d.crc_ok);
  EXPECT_EQ(d.chunks, (std::vector<std::string>{"IHDR", "IDAT", "IEND"}));
  EXPECT_EQ(d.width, 7u);
  EXPECT_EQ(d.height, 5u);
  EXPECT_EQ(d.depth, 8);
  EXPECT_EQ(d.color, 2);
  ASSERT_EQ(d.pixels.size(), 5u * 22);
  for (int y = 0; y < 5; ++y) {
    EXPECT_EQ(d.pixels[y * 22], '\0');
    for (int x = 0; x < 7; ++x)
      for (int ch = 0; ch < 3; ++ch)
        EXPECT_EQ(static_cast<unsigned char>(d.pixels[y * 22 + 1 + 3 * x + ch]), img.at(x, y)[ch]);
  }
}

TEST(Png, EncodingIsDeterministic) {
  RenderConfig cfg;
  cfg.view.width = cfg.view.height = 40;
  const MapSpec m = MapSpec::polynomial(2, {-1.0, 0.0});
  EXPECT_EQ(encode_png(render_escape(m, cfg)), encode_png(render_escape(m, cfg)));
}

TEST(Render, ViewMapsPixelsAndBack) {
  View v{{1.0, -2.0}, 3.0, 120, 80};
  for (double x : {0.0, 17.0, 119.0})
    for (double y : {0.0, 40.0, 79.0}) {
      const auto [px, py] = v.to_pixel(v.to_plane(x, y));
      EXPECT_NEAR(px, x, 1e-9);
      EXPECT_NEAR(py, y, 1e-9);
    }
  // Upward in the picture is upward in the plane.
  EXPECT_GT(v.to_plane(10, 0).imag(), v.to_plane(10, 79).imag());
}

TEST(Render, EscapeTimeSeparatesFilledJuliaSet) {
  const MapSpec m = MapSpec::polynomial(2, {0.0, 0.0});
  RenderConfig cfg;
  EXPECT_EQ(escape_time(m, {0.5, 0.0}, cfg), -1);
  EXPECT_EQ(escape_time(m, {3.0, 0.0}, cfg), 0);
  EXPECT_EQ(escape_time(m, {1.5, 0.0}, cfg), 1);  // 2.25 > 2
}

TEST(Render, OverlaysLandOnTheirPixels) {
  View v{{0.0, 0.0}, 2.0, 21, 21};
  Image img(21, 21);
  draw_curve(img, v, Curve{{{-0.5, 0.0}, {0.5, 0.0}}}, {255, 0, 0});
  draw_marker(img, v, {0.0, 0.5}, {0, 255, 0}, 1);
  EXPECT_EQ(img.at(10, 10), (Rgb{255, 0, 0}));
  EXPECT_EQ(img.at(5, 10), (Rgb{255, 0, 0}));
  EXPECT_EQ(img.at(10, 5), (Rgb{0, 255, 0}));
  EXPECT_EQ(img.at(10, 0), (Rgb{0, 0, 0}));
  // Off-screen pieces are ignored instead of wrapping.
  draw_curve(img, v, Curve{{{5.0, 5.0}, {6.0, 6.0}}}, {1, 1, 1});
  draw_marker(img, v, {1e300, 0.0}, {1, 1, 1});
}

TEST(Text, DoublesRoundTrip) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int i = 0; i < 200; ++i) {
    const double x = u(rng) * std::pow(10.0, static_cast<int>(rng() % 40) - 20);
    EXPECT_EQ(std::strtod(format_double(x).c_str(), nullptr), x);
  }
  EXPECT_EQ(format_double(INFINITY), "inf");
  EXPECT_EQ(json_number(NAN), Json("nan"));
}

TEST(Json, KeyOrderIsInsertionOrder) {
  const auto j = to_json(MapSpec::polynomial(3, {0.25, -1.0}));
  EXPECT_EQ(j.dump(), R"({"kind":"polynomial","degree":3,"c":[0.25,-1.0]})");
  EXPECT_EQ(to_json(MapSpec::exponential({-2.0, 0.0})).dump(), R"({"kind":"exponential","c":[-2.0,0.0]})");
}

TEST(Json, SegmentAndCsvAgree) {
  TraceConfig cfg;
  cfg.floor = 0.1;
  const auto seg = trace_poly_ray(MapSpec::polynomial(2, {0.0, 0.0}), PolyAngle::parse("1/3", 2), cfg);
  const auto j = to_json(seg);
  const std::string text = csv(seg);
  EXPECT_EQ(text.substr(0, text.find('\n')), "t,re,im,residual");
  std::size_t lines = 0;
  for (char ch : text) lines += ch == '\n';
  EXPECT_EQ(lines, seg.samples.size() + 1);
  ASSERT_EQ(j["samples"].size(), seg.samples.size());
  EXPECT_EQ(j["samples"][0]["t"].get<double>(), seg.samples[0].t);
  EXPECT_EQ(j["coordinate"], "1/3");
  // Reparsing the dump gives the same document.
  EXPECT_EQ(Json::parse(dump(j)), j);
}

TEST(Json, LandingSetSerialization) {
  const MapSpec m = MapSpec::polynomial(2, {-1.0, 0.0});
  const auto pt = make_periodic_point(m, 0.5 * (1.0 - std::sqrt(5.0)), 1);
  const auto [set, run] = pullback_landing(m, pt);
  const auto j = to_json(set);
  EXPECT_EQ(j["coordinates"], Json::array({"1/3", "2/3"}));
  EXPECT_EQ(j["verdicts"].size(), 2u);
  const std::string table = csv(set);
  EXPECT_EQ(table.substr(0, table.find('\n')), "coordinate,landed,re,im,error,nu,r2");
  const auto r = to_json(run);
  EXPECT_FALSE(r.contains("curves"));
  EXPECT_EQ(to_json(run, true)["curves"].size(), run.curves.size());
  EXPECT_EQ(r.dump(), to_json(run).dump());
}
