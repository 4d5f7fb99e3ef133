#ifndef FPL_GRID_HPP_
#define FPL_GRID_HPP_

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include <Eigen/Core>

namespace fpl {

/// Raised for invalid problem or run parameters.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class Variant { Regional, Full };

std::string_view to_string(Variant v);
Variant variant_from_string(std::string_view name);

/// Uniform 1D grid on [a, b] with m interior nodes x_1..x_m and boundary
/// nodes x_0 = a, x_{m+1} = b.
struct Grid {
  double a = 0.0;
  double b = 1.0;
  int m = 1;
  double h = 0.5;
  Eigen::VectorXd nodes;  // x_0 .. x_{m+1}

  /// Node coordinate for any integer index, including exterior indices.
  double x(int i) const { return a + i * h; }
  double length() const { return b - a; }
  /// Interior node coordinates x_1..x_m.
  Eigen::VectorXd interior() const { return nodes.segment(1, m); }
};

Grid build_grid(double a, double b, int m);

/// Positive offsets d_k = k*h, k = 1..K, on which the kernel coefficient lives.
/// Offsets are stored as k*h so pair distances |i-j|*h match them bit for bit.
struct DifferenceGrid {
  Variant variant = Variant::Regional;
  double h = 0.0;
  Eigen::VectorXd offsets;
  std::optional<double> r_trunc;

  int size() const { return static_cast<int>(offsets.size()); }
  double offset(int k) const { return offsets[k - 1]; }  // 1-based like d_k
};

DifferenceGrid build_difference_grid(const Grid& grid, Variant variant,
                                     std::optional<double> r_trunc = std::nullopt);

/// Fractional order, nonlinearity exponent and kernel normalization.
struct FracParams {
  double s = 0.75;
  double p = 2.0;
  double c_norm = 1.0;
  Variant variant = Variant::Regional;

  void validate() const;
};

}  // namespace fpl

#endif  // FPL_GRID_HPP_
