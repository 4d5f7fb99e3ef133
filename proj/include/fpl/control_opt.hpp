#ifndef FPL_CONTROL_OPT_HPP_
#define FPL_CONTROL_OPT_HPP_

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "fpl/forms.hpp"
#include "fpl/state_solver.hpp"

namespace fpl {

/// sum_k |kappa_{k+1} - kappa_k|
double tv_seminorm(const Eigen::VectorXd& kappa);

/// Exact argmin_z 1/2 |z - y|^2 + lambda TV(z) (taut string).
Eigen::VectorXd tv_prox(const Eigen::VectorXd& y, double lambda);

/// Componentwise clamp to [lo, hi].
Eigen::VectorXd project_admissible(const Eigen::VectorXd& kappa, const Eigen::VectorXd& lo,
                                   const Eigen::VectorXd& hi);
ControlField project_admissible(const ControlField& kappa);

/// 1/2 sum (u_i - xi_i)^2 h
double tracking_term(const StateVector& u, const Eigen::VectorXd& xi, double h);

/// 1/2 sum (u_i - xi_i)^2 h + TV(kappa)
double objective(const Eigen::VectorXd& kappa, const StateVector& u, const Eigen::VectorXd& xi,
                 double h);

/// kappa piecewise constant over contiguous blocks of offsets; the optimizer
/// works on one value per block. One block per offset is the identity map.
class ControlMap {
 public:
  ControlMap(int num_offsets, int num_blocks);

  int num_offsets() const { return num_offsets_; }
  int num_dofs() const { return static_cast<int>(block_start_.size()); }
  Eigen::VectorXd expand(const Eigen::VectorXd& dofs) const;
  /// Intersection of the offset bounds over each block.
  Eigen::VectorXd block_lo(const Eigen::VectorXd& lo) const;
  Eigen::VectorXd block_hi(const Eigen::VectorXd& hi) const;
  int block_of(int offset_index) const;  // 0-based

 private:
  int num_offsets_;
  std::vector<int> block_start_;  // first offset index of each block
};

struct OptimizerOptions {
  double step = 1.0;
  double step_floor = 1e-12;
  double fd_step = 1e-6;
  double tol = 1e-8;
  int max_outer = 300;
};

struct ControlProblem {
  Discretization disc;
  Eigen::VectorXd f;
  Eigen::VectorXd xi;  // tracking target on interior nodes
  Eigen::VectorXd lo;  // xi_1 on offsets
  Eigen::VectorXd hi;  // xi_2 on offsets
  double alpha = 0.0;
  std::optional<RegParams> rp;  // absent: reference OCP with the exact state equation
  SolveOptions solve{.tol_residual = 1e-12};
  OptimizerOptions opt;
  int control_blocks = 0;  // 0: one DOF per offset

  ControlMap control_map() const;
  void validate() const;
};

struct OuterRecord {
  int iteration = 0;
  double objective = 0.0;
  double tracking = 0.0;
  double tv = 0.0;
  double step = 0.0;
};

struct OptimizeReport {
  ControlField kappa_star;
  Eigen::VectorXd dofs;
  StateVector u_star;
  double objective_value = 0.0;
  double tv_value = 0.0;
  double tracking_value = 0.0;
  std::vector<OuterRecord> objective_history;  // accepted iterates only
  int outer_iterations = 0;
  int inner_solves = 0;
  int inner_iterations = 0;
  std::string stop_reason;
};

/// State for a given offset-sampled kappa under the problem's state equation.
SolveReport solve_control_state(const ControlProblem& problem, const Eigen::VectorXd& kappa,
                                const std::optional<StateVector>& warm = std::nullopt);

/// Forward differences of 1/2|u(kappa) - xi|^2 over the control DOFs;
/// backward at an active upper bound, zero for pinned DOFs.
Eigen::VectorXd reduced_tracking_gradient_fd(const ControlProblem& problem,
                                             const Eigen::VectorXd& dofs,
                                             const std::optional<StateVector>& u_at_dofs =
                                                 std::nullopt,
                                             int* inner_solves = nullptr);

/// Proximal projected descent for the regularized problem (rp required).
OptimizeReport solve_rocp(const ControlProblem& problem,
                          const std::optional<Eigen::VectorXd>& initial_dofs = std::nullopt);

/// Same loop with the unregularized state equation (rp ignored).
OptimizeReport solve_ocp_reference(const ControlProblem& problem,
                                   const std::optional<Eigen::VectorXd>& initial_dofs =
                                       std::nullopt);

}  // namespace fpl

#endif  // FPL_CONTROL_OPT_HPP_
