#include "fpl/control_opt.hpp"

#include <algorithm>
#include <cmath>

namespace fpl {

double tv_seminorm(const Eigen::VectorXd& kappa) {
  double tv = 0.0;
  for (Eigen::Index k = 0; k + 1 < kappa.size(); ++k) tv += std::abs(kappa[k + 1] - kappa[k]);
  return tv;
}

// Condat's direct algorithm (IEEE SPL 2013): walks the taut string, emitting
// a segment whenever the running lower/upper candidates can no longer stay
// within the lambda tube.
Eigen::VectorXd tv_prox(const Eigen::VectorXd& y, double lambda) {
  if (!(lambda >= 0.0)) throw std::invalid_argument("tv_prox requires lambda >= 0");
  const Eigen::Index width = y.size();
  Eigen::VectorXd x(width);
  if (width == 0) return x;
  if (lambda == 0.0 || width == 1) return y;

  Eigen::Index k = 0, k0 = 0, kplus = 0, kminus = 0;
  double umin = lambda, umax = -lambda;
  double vmin = y[0] - lambda, vmax = y[0] + lambda;
  const double twolambda = 2.0 * lambda;
  const double minlambda = -lambda;
  for (;;) {
    while (k == width - 1) {
      if (umin < 0.0) {
        do x[k0++] = vmin; while (k0 <= kminus);
        umax = (vmin = y[kminus = k = k0]) + (umin = lambda) - vmax;
      } else if (umax > 0.0) {
        do x[k0++] = vmax; while (k0 <= kplus);
        umin = (vmax = y[kplus = k = k0]) + (umax = minlambda) - vmin;
      } else {
        vmin += umin / static_cast<double>(k - k0 + 1);
        do x[k0++] = vmin; while (k0 <= k);
        return x;
      }
    }
    if ((umin += y[k + 1] - vmin) < minlambda) {
      do x[k0++] = vmin; while (k0 <= kminus);
      vmax = (vmin = y[kplus = kminus = k = k0]) + twolambda;
      umin = lambda;
      umax = minlambda;
    } else if ((umax += y[k + 1] - vmax) > lambda) {
      do x[k0++] = vmax; while (k0 <= kplus);
      vmin = (vmax = y[kplus = kminus = k = k0]) - twolambda;
      umin = lambda;
      umax = minlambda;
    } else {
      ++k;
      if (umin >= lambda) {
        vmin += (umin - lambda) / static_cast<double>((kminus = k) - k0 + 1);
        umin = lambda;
      }
      if (umax <= minlambda) {
        vmax += (umax + lambda) / static_cast<double>((kplus = k) - k0 + 1);
        umax = minlambda;
      }
    }
  }
}

Eigen::VectorXd project_admissible(const Eigen::VectorXd& kappa, const Eigen::VectorXd& lo,
                                   const Eigen::VectorXd& hi) {
  if (lo.size() != kappa.size() || hi.size() != kappa.size())
    throw std::invalid_argument("project_admissible: bound size mismatch");
  return kappa.cwiseMax(lo).cwiseMin(hi);
}

ControlField project_admissible(const ControlField& kappa) {
  ControlField out = kappa;
  out.values = project_admissible(kappa.values, kappa.lo, kappa.hi);
  return out;
}

double tracking_term(const StateVector& u, const Eigen::VectorXd& xi, double h) {
  return 0.5 * (u - xi).squaredNorm() * h;
}

double objective(const Eigen::VectorXd& kappa, const StateVector& u, const Eigen::VectorXd& xi,
                 double h) {
  return tracking_term(u, xi, h) + tv_seminorm(kappa);
}

ControlMap::ControlMap(int num_offsets, int num_blocks) : num_offsets_(num_offsets) {
  if (num_offsets < 1) throw std::invalid_argument("ControlMap needs at least one offset");
  if (num_blocks <= 0) num_blocks = num_offsets;
  if (num_blocks > num_offsets)
    throw ConfigError("control_blocks cannot exceed the number of offsets");
  // Contiguous blocks; the first (K mod B) blocks get one extra offset.
  const int base = num_offsets / num_blocks;
  const int extra = num_offsets % num_blocks;
  int start = 0;
  for (int b = 0; b < num_blocks; ++b) {
    block_start_.push_back(start);
    start += base + (b < extra ? 1 : 0);
  }
}

int ControlMap::block_of(int offset_index) const {
  const auto it = std::upper_bound(block_start_.begin(), block_start_.end(), offset_index);
  return static_cast<int>(it - block_start_.begin()) - 1;
}

Eigen::VectorXd ControlMap::expand(const Eigen::VectorXd& dofs) const {
  if (dofs.size() != num_dofs()) throw std::invalid_argument("control DOF size mismatch");
  Eigen::VectorXd kappa(num_offsets_);
  for (int k = 0; k < num_offsets_; ++k) kappa[k] = dofs[block_of(k)];
  return kappa;
}

Eigen::VectorXd ControlMap::block_lo(const Eigen::VectorXd& lo) const {
  Eigen::VectorXd out = Eigen::VectorXd::Constant(num_dofs(), -INFINITY);
  for (int k = 0; k < num_offsets_; ++k) out[block_of(k)] = std::max(out[block_of(k)], lo[k]);
  return out;
}

Eigen::VectorXd ControlMap::block_hi(const Eigen::VectorXd& hi) const {
  Eigen::VectorXd out = Eigen::VectorXd::Constant(num_dofs(), INFINITY);
  for (int k = 0; k < num_offsets_; ++k) out[block_of(k)] = std::min(out[block_of(k)], hi[k]);
  return out;
}

ControlMap ControlProblem::control_map() const {
  return ControlMap(disc.num_offsets(), control_blocks);
}

void ControlProblem::validate() const {
  const int K = disc.num_offsets();
  if (f.size() != disc.m() || xi.size() != disc.m())
    throw ConfigError("f and xi must have one value per interior node");
  if (lo.size() != K || hi.size() != K)
    throw ConfigError("xi1 and xi2 must have one value per offset");
  ControlField probe{lo, lo, hi, alpha};
  probe.validate();
  const ControlMap map = control_map();
  if ((map.block_lo(lo).array() > map.block_hi(hi).array()).any())
    throw ConfigError("control block has empty admissible interval");
  if (!(opt.step > 0.0) || !(opt.fd_step > 0.0) || opt.max_outer < 0)
    throw ConfigError("invalid optimizer options");
}

SolveReport solve_control_state(const ControlProblem& problem, const Eigen::VectorXd& kappa,
                                const std::optional<StateVector>& warm) {
  if (problem.rp)
    return solve_state_regularized(problem.disc, problem.f, kappa, *problem.rp, problem.solve,
                                   warm);
  return solve_state(problem.disc, problem.f, kappa, problem.solve, warm);
}

Eigen::VectorXd reduced_tracking_gradient_fd(const ControlProblem& problem,
                                             const Eigen::VectorXd& dofs,
                                             const std::optional<StateVector>& u_at_dofs,
                                             int* inner_solves) {
  const ControlMap map = problem.control_map();
  const Eigen::VectorXd lo = map.block_lo(problem.lo);
  const Eigen::VectorXd hi = map.block_hi(problem.hi);
  const double h = problem.disc.grid.h;
  const double delta = problem.opt.fd_step;
  int solves = 0;

  StateVector u0;
  if (u_at_dofs) {
    u0 = *u_at_dofs;
  } else {
    u0 = solve_control_state(problem, map.expand(dofs)).u;
    ++solves;
  }
  const double j0 = tracking_term(u0, problem.xi, h);

  Eigen::VectorXd grad = Eigen::VectorXd::Zero(dofs.size());
  for (Eigen::Index b = 0; b < dofs.size(); ++b) {
    if (lo[b] == hi[b]) continue;
    Eigen::VectorXd perturbed = dofs;
    const bool backward = dofs[b] + delta > hi[b];
    perturbed[b] = std::clamp(dofs[b] + (backward ? -delta : delta), lo[b], hi[b]);
    const double actual = perturbed[b] - dofs[b];
    if (actual == 0.0) continue;
    const StateVector u = solve_control_state(problem, map.expand(perturbed), u0).u;
    ++solves;
    grad[b] = (tracking_term(u, problem.xi, h) - j0) / actual;
  }
  if (inner_solves) *inner_solves += solves;
  return grad;
}

namespace {

OptimizeReport optimize(const ControlProblem& problem,
                        const std::optional<Eigen::VectorXd>& initial_dofs) {
  problem.validate();
  const ControlMap map = problem.control_map();
  const Eigen::VectorXd lo = map.block_lo(problem.lo);
  const Eigen::VectorXd hi = map.block_hi(problem.hi);
  const double h = problem.disc.grid.h;
  const OptimizerOptions& opt = problem.opt;

  OptimizeReport report;
  Eigen::VectorXd dofs = initial_dofs ? *initial_dofs : Eigen::VectorXd(0.5 * (lo + hi));
  if (dofs.size() != map.num_dofs()) throw std::invalid_argument("initial DOF size mismatch");
  dofs = project_admissible(dofs, lo, hi);

  auto state = [&](const Eigen::VectorXd& x, const std::optional<StateVector>& warm) {
    SolveReport r = solve_control_state(problem, map.expand(x), warm);
    ++report.inner_solves;
    report.inner_iterations += r.iterations;
    return r.u;
  };

  StateVector u = state(dofs, std::nullopt);
  Eigen::VectorXd kappa = map.expand(dofs);
  double value = objective(kappa, u, problem.xi, h);
  double step = opt.step;
  report.objective_history.push_back(
      {0, value, tracking_term(u, problem.xi, h), tv_seminorm(kappa), step});
  report.stop_reason = "max_outer";

  for (int it = 1; it <= opt.max_outer; ++it) {
    const Eigen::VectorXd grad = reduced_tracking_gradient_fd(problem, dofs, u, &report.inner_solves);
    bool accepted = false;
    bool stationary = false;
    while (!accepted) {
      const Eigen::VectorXd trial =
          project_admissible(tv_prox(dofs - step * grad, step), lo, hi);
      if ((trial - dofs).lpNorm<Eigen::Infinity>() == 0.0) {
        stationary = true;
        break;
      }
      const StateVector u_trial = state(trial, u);
      const Eigen::VectorXd kappa_trial = map.expand(trial);
      const double trial_value = objective(kappa_trial, u_trial, problem.xi, h);
      if (trial_value < value) {
        const double rel_change = (value - trial_value) / std::max(std::abs(value), 1e-300);
        dofs = trial;
        u = u_trial;
        kappa = kappa_trial;
        value = trial_value;
        accepted = true;
        report.outer_iterations = it;
        report.objective_history.push_back(
            {it, value, tracking_term(u, problem.xi, h), tv_seminorm(kappa), step});
        if (rel_change < opt.tol) {
          report.stop_reason = "converged";
          stationary = true;
        }
        step = std::min(2.0 * step, opt.step);
      } else {
        step *= 0.5;
        if (step < opt.step_floor) {
          report.stop_reason = "step_floor";
          stationary = true;
          break;
        }
      }
    }
    if (stationary) {
      if (!accepted && report.stop_reason == "max_outer") report.stop_reason = "stationary";
      break;
    }
  }

  report.dofs = dofs;
  report.kappa_star = ControlField{kappa, problem.lo, problem.hi, problem.alpha};
  report.u_star = u;
  report.objective_value = value;
  report.tv_value = tv_seminorm(kappa);
  report.tracking_value = tracking_term(u, problem.xi, h);
  return report;
}

}  // namespace

OptimizeReport solve_rocp(const ControlProblem& problem,
                          const std::optional<Eigen::VectorXd>& initial_dofs) {
  if (!problem.rp) throw std::invalid_argument("solve_rocp requires regularization parameters");
  return optimize(problem, initial_dofs);
}

OptimizeReport solve_ocp_reference(const ControlProblem& problem,
                                   const std::optional<Eigen::VectorXd>& initial_dofs) {
  ControlProblem exact = problem;
  exact.rp.reset();
  return optimize(exact, initial_dofs);
}

}  // namespace fpl
