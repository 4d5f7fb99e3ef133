#ifndef FPL_CONFIG_HPP_
#define FPL_CONFIG_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "fpl/control_opt.hpp"
#include "fpl/convergence.hpp"

namespace fpl {

/// Raised with every violation found, not just the first.
class ConfigErrors : public ConfigError {
 public:
  explicit ConfigErrors(std::vector<std::string> messages);
  const std::vector<std::string>& messages() const { return messages_; }

 private:
  std::vector<std::string> messages_;
};

/// A function-valued input: a constant, an expression over x, an explicit
/// vector or a one-column CSV file. Node fields are sampled at the interior
/// nodes, offset fields at the offsets d_k.
struct FieldSource {
  enum class Kind { Number, Expression, Array, Csv };
  Kind kind = Kind::Number;
  double number = 0.0;
  std::string expression;
  std::vector<double> values;  // Array, or Csv once loaded
  std::filesystem::path path;

  static FieldSource constant(double v);
  static FieldSource expr(std::string text);

  Eigen::VectorXd sample(const std::vector<double>& points, const std::string& name) const;
  nlohmann::json to_json() const;
};

struct ProblemConfig {
  double a = 0.0;
  double b = 1.0;
  int m = 0;
  double s = 0.75;
  double p = 2.0;
  Variant variant = Variant::Regional;
  std::optional<double> r_trunc;
  double c_norm = 1.0;
  std::optional<double> kappa_far;
  int control_blocks = 0;  // 0: one DOF per offset
};

struct DataConfig {
  FieldSource f;
  FieldSource xi = FieldSource::constant(0.0);
  FieldSource xi1 = FieldSource::constant(0.5);
  FieldSource xi2 = FieldSource::constant(1.5);
  std::optional<double> alpha;                    // defaults to min xi1
  FieldSource kappa = FieldSource::constant(1.0);  // solve-state only
};

struct ScheduleConfig {
  int points = 6;
  double eps_base = 4.0;
  int n_base = 2;
  std::vector<double> epsilon;  // explicit lists override the geometric rule
  std::vector<int> n;
  std::optional<double> t;
};

struct RegularizationConfig {
  double epsilon = 1e-2;
  int n = 4;
  bool regularized_state = false;  // solve-state uses the regularized equation
  ScheduleConfig schedule;
};

struct SolverConfig {
  double tol_residual = 1e-10;
  int max_iter = 500;
  double inner_tol = 1e-12;
  int minty_probes = 200;
  std::uint64_t seed = 0;
  double step = 1.0;
  double fd_step = 1e-6;
  double outer_tol = 1e-8;
  int max_outer = 300;
  double objective_tolerance = 1e-3;
  double level_set_tolerance = 1e-6;
};

struct OutputConfig {
  std::filesystem::path directory = "out";
  bool csv = true;
  bool plots = true;
};

struct RunConfig {
  ProblemConfig problem;
  DataConfig data;
  RegularizationConfig regularization;
  SolverConfig solver;
  OutputConfig output;

  /// Built-in instance used when no configuration file is given.
  static RunConfig defaults();

  /// Throws ConfigErrors listing every violation.
  void validate() const;

  Discretization discretization() const;
  Eigen::VectorXd force(const Discretization& d) const;
  Eigen::VectorXd target(const Discretization& d) const;
  Eigen::VectorXd kappa(const Discretization& d) const;
  SolveOptions solve_options() const;
  ControlProblem control_problem() const;
  Schedule schedule() const;
};

/// TOML file, or a JSON file that is either a bare configuration or a run
/// manifest carrying one under "config".
RunConfig parse_config(const std::filesystem::path& path);
RunConfig parse_config_toml(const std::string& text,
                            const std::filesystem::path& base_dir = {});
RunConfig config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});

/// Canonical echo; CSV-backed fields are inlined so the echo is self-contained.
nlohmann::json config_to_json(const RunConfig& cfg);

}  // namespace fpl

#endif  // FPL_CONFIG_HPP_
