#include "fpl/grid.hpp"

#include <cmath>

namespace fpl {

std::string_view to_string(Variant v) {
  return v == Variant::Regional ? "regional" : "full";
}

Variant variant_from_string(std::string_view name) {
  if (name == "regional") return Variant::Regional;
  if (name == "full") return Variant::Full;
  throw ConfigError("unknown variant '" + std::string(name) +
                    "' (expected regional or full)");
}

Grid build_grid(double a, double b, int m) {
  if (m < 1) throw ConfigError("m must be >= 1");
  if (!(b > a)) throw ConfigError("b must be greater than a");
  Grid g;
  g.a = a;
  g.b = b;
  g.m = m;
  g.h = (b - a) / (m + 1);
  g.nodes.resize(m + 2);
  for (int i = 0; i <= m + 1; ++i) g.nodes[i] = g.x(i);
  return g;
}

DifferenceGrid build_difference_grid(const Grid& grid, Variant variant,
                                     std::optional<double> r_trunc) {
  DifferenceGrid dg;
  dg.variant = variant;
  dg.h = grid.h;
  int K = grid.m + 1;
  if (variant == Variant::Full) {
    if (!r_trunc) throw ConfigError("truncation radius required for the full variant");
    if (!(*r_trunc > grid.length()))
      throw ConfigError("truncation radius must exceed b - a");
    // Nodes exactly at r_trunc are kept; the epsilon absorbs r/h rounding.
    K = static_cast<int>(std::floor(*r_trunc / grid.h + 1e-9));
    dg.r_trunc = r_trunc;
  }
  dg.offsets.resize(K);
  for (int k = 1; k <= K; ++k) dg.offsets[k - 1] = k * grid.h;
  return dg;
}

void FracParams::validate() const {
  if (!(p >= 2.0)) throw ConfigError("p must be >= 2");
  if (!(c_norm > 0.0)) throw ConfigError("c_norm must be > 0");
  if (variant == Variant::Regional) {
    if (!(s > 0.5 && s < 1.0)) throw ConfigError("regional variant requires 1/2<s<1");
  } else if (!(s > 0.0 && s < 1.0)) {
    throw ConfigError("full variant requires 0<s<1");
  }
}

}  // namespace fpl
