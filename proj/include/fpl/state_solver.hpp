#ifndef FPL_STATE_SOLVER_HPP_
#define FPL_STATE_SOLVER_HPP_

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>

#include "fpl/forms.hpp"

namespace fpl {

/// The discrete problem is uniquely solvable, so this is a solver failure.
class NonConvergence : public std::runtime_error {
 public:
  NonConvergence(int iterations, double residual);

  int iterations() const { return iterations_; }
  double residual() const { return residual_; }

 private:
  int iterations_;
  double residual_;
};

struct SolveOptions {
  double tol_residual = 1e-10;  // max-norm of the weak-form residual
  int max_iter = 500;
  double ls_shrink = 0.5;
  double ls_sufficient_decrease = 1e-4;
  double hessian_floor = 1e-14;
  /// epsilon schedule for the degenerate (p > 2) unregularized solve; a final
  /// Newton polish on the exact potential always follows.
  std::vector<double> continuation{1e-2, 1e-4, 1e-6};
  /// n used during continuation; large enough that F_n never saturates.
  int continuation_n = 1000000;

  void validate() const;
};

struct IterationRecord {
  int iteration = 0;
  double residual = 0.0;
  double energy = 0.0;
};

struct AprioriFlags {
  bool energy_identity = false;
  double energy_identity_gap = 0.0;    // |form(u,u) - sum f u h|
  bool quasi_norm_bound = false;
  double quasi_norm_slack = 0.0;       // sum f u h - (c/2) Q, Q = quasi_norm^p or p-energy
  bool scaling_law = false;
  double scaling_slope = 0.0;          // fitted d log|u| / d log lambda
  double scaling_limit = 0.0;
};

struct SolveReport {
  StateVector u;
  int iterations = 0;
  double final_residual = 0.0;
  double energy_value = 0.0;      // potential at u
  double quasi_norm_value = 0.0;  // quasi_norm (regularized) or p-energy^{1/p}
  std::optional<double> minty_margin;
  std::optional<AprioriFlags> apriori;
  double hessian_floor = 0.0;
  std::vector<IterationRecord> history;
};

/// Component k: form(u, e_k) - f_k h, with the regularized form when `rp` is set.
Eigen::VectorXd residual(const Discretization& d, const StateVector& u, const Eigen::VectorXd& f,
                         const Eigen::VectorXd& kappa,
                         const std::optional<RegParams>& rp = std::nullopt);

/// Unique minimizer of regularized_potential by damped Newton.
SolveReport solve_state_regularized(const Discretization& d, const Eigen::VectorXd& f,
                                    const Eigen::VectorXd& kappa, const RegParams& rp,
                                    const SolveOptions& opts = {},
                                    const std::optional<StateVector>& initial = std::nullopt);

/// Unique minimizer of energy_functional; epsilon-continuation for p > 2.
SolveReport solve_state(const Discretization& d, const Eigen::VectorXd& f,
                        const Eigen::VectorXd& kappa, const SolveOptions& opts = {},
                        const std::optional<StateVector>& initial = std::nullopt);

/// min over sampled test fields phi of form(phi, phi - u) - sum f (phi - u) h.
double minty_margin(const Discretization& d, const StateVector& u, const Eigen::VectorXd& f,
                    const Eigen::VectorXd& kappa, const std::optional<RegParams>& rp,
                    int probes, std::uint64_t seed = 0);

/// Energy identity, quasi-norm bound and force-scaling checks for a solution.
AprioriFlags apriori_report(const Discretization& d, const SolveReport& report,
                            const Eigen::VectorXd& f, const Eigen::VectorXd& kappa,
                            const std::optional<RegParams>& rp, const SolveOptions& opts = {});

/// Force scales used by the scaling check.
inline constexpr double kScalingLambdas[] = {1.0, 2.0, 4.0, 8.0};

}  // namespace fpl

#endif  // FPL_STATE_SOLVER_HPP_
