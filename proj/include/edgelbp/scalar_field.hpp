#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "edgelbp/mesh.hpp"

namespace edgelbp {

enum class HMode { cielab_l, grayscale };

std::string_view to_string(HMode mode);
/// Accepts "cielab_l"/"lab" and "grayscale"/"gray".
HMode parse_hmode(std::string_view text);

/// Per-vertex scalar derived from color.
struct ScalarField {
  std::vector<double> values;
  HMode mode = HMode::cielab_l;
  double exponent = 1.0;

  std::size_t size() const { return values.size(); }
  double operator[](Index v) const { return values[v]; }
};

/// 0.21 R + 0.72 G + 0.07 B, in [0, 255].
double grayscale_value(const Rgb& c);

/// CIE L* of an sRGB color (D65 white), in [0, 100].
double cielab_lightness(const Rgb& c);

/// Upper end of the pre-exponent range for a mode (100 for L*, 255 for gray).
double hmode_range_max(HMode mode);

ScalarField compute_scalar_field(const SurfaceMesh& mesh, HMode mode, double exponent = 1.0);

}  // namespace edgelbp
