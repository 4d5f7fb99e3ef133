#ifndef FPL_CONVERGENCE_HPP_
#define FPL_CONVERGENCE_HPP_

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "fpl/control_opt.hpp"

namespace fpl {

/// (epsilon_k, n_k) path towards (0, infinity) and the exponent t of the
/// W^{t,2} distance used for the state.
struct Schedule {
  std::vector<double> epsilon;
  std::vector<int> n;
  double t = 0.75;

  /// epsilon_k = eps_base^{-k}, n_k = n_base^k, k = 1..points.
  static Schedule geometric(int points, double eps_base, int n_base, double t);
  /// t = (1/2 + s)/2 for p > 2, t = s for p = 2.
  static double default_t(double s, double p);

  int size() const { return static_cast<int>(epsilon.size()); }
  void validate(double s, double p) const;
  std::string hash() const;
};

struct SweepRecord {
  double epsilon = 0.0;
  int n = 0;
  bool ok = false;
  std::string error;
  Eigen::VectorXd kappa;
  StateVector u;
  double objective = 0.0;
  double tracking = 0.0;
  double tv = 0.0;
  double reg_energy = 0.0;    // quasi_norm^p at (kappa*, u*)
  double p_energy = 0.0;      // kappa-weighted p-energy of u*
  double kappa_l1_gap = 0.0;  // sum_k |kappa*_k - kappa_ref,k| h
  double state_gap = 0.0;     // discrete W^{t,2} seminorm of u* - u_ref
  double tv_gap = 0.0;
  double energy_gap = 0.0;    // |reg_energy - p-energy of the reference|
  double objective_gap = 0.0;
  double level_measure = 0.0;  // Lebesgue measure of the saturation level set
  double level_mu = 0.0;
  double level_energy = 0.0;   // part of reg_energy on the level set
  int outer_iterations = 0;
};

struct SweepReference {
  std::string source;  // "ocp_reference" or "first_point"
  Eigen::VectorXd kappa;
  StateVector u;
  double objective = 0.0;
  double tv = 0.0;
  double p_energy = 0.0;
};

struct Verdict {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct SweepOptions {
  double objective_tolerance = 1e-3;
  double level_set_tolerance = 1e-6;
};

struct SweepResult {
  Schedule schedule;
  double p = 2.0;
  double s = 0.75;
  int m = 0;
  SweepReference reference;
  std::vector<SweepRecord> records;
  std::vector<Verdict> verdicts;

  bool all_pass() const;
};

/// Solves the regularized control problem along the schedule with warm starts
/// and compares every point against the reference solution.
SweepResult run_sweep(const ControlProblem& problem, const Schedule& schedule,
                      const SweepOptions& options = {});

/// Level-set measure and level-set energy decay along the sweep.
Verdict check_level_set_vanishing(const SweepResult& sweep, const SweepOptions& options = {});

/// True when values[k+1] <= values[k] over the trailing `count` entries.
bool nonincreasing_tail(const std::vector<double>& values, int count);

struct ReportFiles {
  std::filesystem::path csv;
  std::filesystem::path verdicts;
  std::vector<std::filesystem::path> plots;
};

/// File stem embedding (p, s, m, schedule hash).
std::string sweep_stem(const SweepResult& sweep);

/// CSV of every record, gnuplot gap series, JSON verdict summary.
ReportFiles emit_convergence_report(const SweepResult& sweep, const std::filesystem::path& dir);

}  // namespace fpl

#endif  // FPL_CONVERGENCE_HPP_
