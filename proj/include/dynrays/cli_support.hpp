#ifndef DYNRAYS_CLI_SUPPORT_HPP
#define DYNRAYS_CLI_SUPPORT_HPP

// Text conventions of the command line: complex numbers, maps, coordinates,
// potential grids and exit codes.

#include <cctype>
#include <charconv>
#include <cmath>
#include <exception>
#include <string>
#include <string_view>
#include <vector>

#include "dynrays/error.hpp"
#include "dynrays/growth.hpp"
#include "dynrays/maps.hpp"
#include "dynrays/symbolic.hpp"

namespace dynrays {

enum ExitCode : int { kExitOk = 0, kExitNumerical = 1, kExitUsage = 2 };

/// Usage and configuration problems exit with 2, everything numerical with 1.
inline int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ParseError*>(&e) || dynamic_cast<const ConfigError*>(&e)) return kExitUsage;
  return kExitNumerical;
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

inline double parse_real(std::string_view s, std::string_view what) {
  s = trim(s);
  double v = 0.0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || end != s.data() + s.size())
    throw ParseError("cannot read " + std::string(what) + " from '" + std::string(s) + "'");
  return v;
}

}  // namespace detail

/// "re,im" or a bare real number.
inline complex parse_complex(std::string_view text) {
  const auto comma = text.find(',');
  if (comma == std::string_view::npos) return {detail::parse_real(text, "a real number"), 0.0};
  if (text.find(',', comma + 1) != std::string_view::npos)
    throw ParseError("complex numbers are written re,im: '" + std::string(text) + "'");
  return {detail::parse_real(text.substr(0, comma), "a real part"),
          detail::parse_real(text.substr(comma + 1), "an imaginary part")};
}

/// Semicolon-separated complex numbers: "re,im; re,im; ...".
inline std::vector<complex> parse_complex_list(std::string_view text) {
  std::vector<complex> out;
  while (!detail::trim(text).empty()) {
    const auto semi = text.find(';');
    out.push_back(parse_complex(text.substr(0, semi)));
    if (semi == std::string_view::npos) break;
    text.remove_prefix(semi + 1);
  }
  return out;
}

/// "poly" (z^D + c) or "exp" (e^z + c).
inline MapSpec make_map(std::string_view kind, int degree, std::string_view c) {
  if (kind == "poly" || kind == "polynomial") return MapSpec::polynomial(degree, parse_complex(c));
  if (kind == "exp" || kind == "exponential") return MapSpec::exponential(parse_complex(c));
  throw ConfigError("map must be 'poly' or 'exp', not '" + std::string(kind) + "'");
}

/// Potentials top, F^{-1}(top), ..., rows entries in all.
inline std::vector<double> pullback_grid(const MapSpec& m, double top, int rows) {
  if (!(top > 0) || rows < 1) throw ConfigError("grid needs a positive top potential and at least one row");
  const GrowthModel F(m);
  std::vector<double> grid;
  for (double t = top; static_cast<int>(grid.size()) < rows; t = F.Finv(t)) grid.push_back(t);
  return grid;
}

}  // namespace dynrays

#endif  // DYNRAYS_CLI_SUPPORT_HPP
