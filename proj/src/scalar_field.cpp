#include "edgelbp/scalar_field.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace edgelbp {

std::string_view to_string(HMode mode) {
  return mode == HMode::cielab_l ? "cielab_l" : "grayscale";
}

HMode parse_hmode(std::string_view text) {
  if (text == "cielab_l" || text == "lab") return HMode::cielab_l;
  if (text == "grayscale" || text == "gray") return HMode::grayscale;
  throw std::invalid_argument(fmt::format("unknown h mode '{}'", text));
}

double grayscale_value(const Rgb& c) { return 0.21 * c.r + 0.72 * c.g + 0.07 * c.b; }

namespace {

double srgb_to_linear(std::uint8_t channel) {
  const double c = channel / 255.0;
  return c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4);
}

}  // namespace

double cielab_lightness(const Rgb& c) {
  // Y row of the sRGB -> XYZ (D65) matrix; Y_n = 1.
  const double y = 0.2126729 * srgb_to_linear(c.r) + 0.7151522 * srgb_to_linear(c.g) +
                   0.0721750 * srgb_to_linear(c.b);
  constexpr double eps = 216.0 / 24389.0;
  constexpr double kappa = 24389.0 / 27.0;
  const double f = y > eps ? std::cbrt(y) : (kappa * y + 16.0) / 116.0;
  return std::clamp(116.0 * f - 16.0, 0.0, 100.0);
}

double hmode_range_max(HMode mode) { return mode == HMode::cielab_l ? 100.0 : 255.0; }

ScalarField compute_scalar_field(const SurfaceMesh& mesh, HMode mode, double exponent) {
  if (!(exponent > 0.0)) throw std::invalid_argument("exponent must be positive");
  ScalarField field;
  field.mode = mode;
  field.exponent = exponent;
  field.values.reserve(mesh.vertex_count());
  for (const auto& c : mesh.colors()) {
    double h = mode == HMode::cielab_l ? cielab_lightness(c) : grayscale_value(c);
    if (exponent != 1.0) h = std::pow(h, exponent);
    field.values.push_back(h);
  }
  return field;
}

}  // namespace edgelbp
