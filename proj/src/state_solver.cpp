#include "fpl/state_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include <Eigen/Cholesky>

namespace fpl {
namespace {

struct Objective {
  const Discretization& d;
  const Eigen::VectorXd& f;
  const Eigen::VectorXd& kappa;
  std::optional<RegParams> rp;

  double value(const StateVector& u) const {
    return rp ? regularized_potential(d, u, f, kappa, *rp) : energy_functional(d, u, f, kappa);
  }
  Eigen::VectorXd gradient(const StateVector& u) const { return residual(d, u, f, kappa, rp); }
  Eigen::MatrixXd hessian(const StateVector& u) const { return form_hessian(d, u, kappa, rp); }
};

double max_norm(const Eigen::VectorXd& v) { return v.size() ? v.lpNorm<Eigen::Infinity>() : 0.0; }

// Damped Newton with Armijo backtracking. Once the predicted decrease is
// below the rounding level of the potential, steps are accepted on residual
// decrease instead.
void newton_minimize(const Objective& obj, StateVector& u, const SolveOptions& opts,
                     SolveReport& report) {
  Eigen::VectorXd g = obj.gradient(u);
  double energy = obj.value(u);
  double res = max_norm(g);
  for (int it = 0;; ++it) {
    report.history.push_back({report.iterations, res, energy});
    if (res <= opts.tol_residual) break;
    if (it >= opts.max_iter) throw NonConvergence(report.iterations, res);

    Eigen::MatrixXd H = obj.hessian(u);
    H.diagonal().array() += opts.hessian_floor;
    Eigen::LLT<Eigen::MatrixXd> llt(H);
    Eigen::VectorXd step;
    if (llt.info() == Eigen::Success) step = -llt.solve(g);
    double slope = step.size() ? g.dot(step) : 0.0;
    if (llt.info() != Eigen::Success || !(slope < 0.0) || !step.allFinite()) {
      // Gradient fallback, scaled by the Hessian diagonal.
      step = -g.cwiseQuotient(H.diagonal().cwiseMax(opts.hessian_floor));
      slope = g.dot(step);
    }

    const bool below_rounding =
        std::abs(slope) < 1e-13 * (1.0 + std::abs(energy));
    double t = 1.0;
    StateVector trial;
    Eigen::VectorXd trial_g;
    double trial_energy = 0.0;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls, t *= opts.ls_shrink) {
      trial = u + t * step;
      trial_energy = obj.value(trial);
      if (!std::isfinite(trial_energy)) continue;
      if (below_rounding) {
        trial_g = obj.gradient(trial);
        if (max_norm(trial_g) < res) {
          accepted = true;
          break;
        }
      } else if (trial_energy <= energy + opts.ls_sufficient_decrease * t * slope) {
        trial_g = obj.gradient(trial);
        accepted = true;
        break;
      }
    }
    if (!accepted) throw NonConvergence(report.iterations, res);
    u = std::move(trial);
    g = std::move(trial_g);
    energy = trial_energy;
    res = max_norm(g);
    ++report.iterations;
  }
  report.final_residual = res;
  report.energy_value = energy;
}

StateVector start_from(const Discretization& d, const std::optional<StateVector>& initial) {
  if (initial) {
    if (initial->size() != d.m()) throw std::invalid_argument("initial guess has wrong size");
    return *initial;
  }
  return StateVector::Zero(d.m());
}

}  // namespace

NonConvergence::NonConvergence(int iterations, double residual)
    : std::runtime_error("state solve did not converge after " + std::to_string(iterations) +
                         " iterations (residual " + std::to_string(residual) + ")"),
      iterations_(iterations),
      residual_(residual) {}

void SolveOptions::validate() const {
  if (!(tol_residual > 0.0)) throw std::invalid_argument("tol_residual must be > 0");
  if (max_iter < 1) throw std::invalid_argument("max_iter must be >= 1");
  if (!(ls_shrink > 0.0 && ls_shrink < 1.0)) throw std::invalid_argument("ls_shrink in (0,1)");
  if (continuation_n < 1) throw std::invalid_argument("continuation_n must be >= 1");
}

Eigen::VectorXd residual(const Discretization& d, const StateVector& u, const Eigen::VectorXd& f,
                         const Eigen::VectorXd& kappa, const std::optional<RegParams>& rp) {
  if (f.size() != d.m()) throw std::invalid_argument("f has wrong size");
  return form_operator(d, u, kappa, rp) - f * d.grid.h;
}

SolveReport solve_state_regularized(const Discretization& d, const Eigen::VectorXd& f,
                                    const Eigen::VectorXd& kappa, const RegParams& rp,
                                    const SolveOptions& opts,
                                    const std::optional<StateVector>& initial) {
  opts.validate();
  rp.validate();
  SolveReport report;
  report.hessian_floor = opts.hessian_floor;
  StateVector u = start_from(d, initial);
  newton_minimize(Objective{d, f, kappa, rp}, u, opts, report);
  report.quasi_norm_value = quasi_norm(d, u, kappa, rp);
  report.u = std::move(u);
  return report;
}

SolveReport solve_state(const Discretization& d, const Eigen::VectorXd& f,
                        const Eigen::VectorXd& kappa, const SolveOptions& opts,
                        const std::optional<StateVector>& initial) {
  opts.validate();
  SolveReport report;
  report.hessian_floor = opts.hessian_floor;
  StateVector u = start_from(d, initial);
  if (d.fp.p > 2.0) {
    for (double eps : opts.continuation) {
      SolveReport stage = solve_state_regularized(d, f, kappa, RegParams{eps, opts.continuation_n},
                                                  opts, u);
      u = std::move(stage.u);
      report.iterations += stage.iterations;
    }
  }
  newton_minimize(Objective{d, f, kappa, std::nullopt}, u, opts, report);
  report.quasi_norm_value = std::pow(kappa_p_energy(d, u, kappa), 1.0 / d.fp.p);
  report.u = std::move(u);
  return report;
}

double minty_margin(const Discretization& d, const StateVector& u, const Eigen::VectorXd& f,
                    const Eigen::VectorXd& kappa, const std::optional<RegParams>& rp,
                    int probes, std::uint64_t seed) {
  if (probes < 1) throw std::invalid_argument("probes must be >= 1");
  const int m = d.m();
  const double h = d.grid.h;
  const double base = u.norm() > 0.0 ? u.norm() : 1.0;
  const double amp = 1.0 + max_norm(u);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  auto probe_value = [&](const StateVector& phi) {
    const StateVector diff = phi - u;
    const double form = rp ? regularized_form(d, phi, diff, kappa, *rp)
                           : energy_form(d, phi, diff, kappa);
    return form - f.dot(diff) * h;
  };

  constexpr double kScales[] = {0.1, 1.0, 10.0};
  constexpr double kSteps[] = {1e-3, 1e-1};
  double margin = std::numeric_limits<double>::infinity();
  for (int n = 0; n < probes; ++n) {
    StateVector phi(m);
    switch (n % 3) {
      case 0: {  // Gaussian field scaled to a fraction or multiple of |u|
        for (int i = 0; i < m; ++i) phi[i] = normal(rng);
        const double norm = phi.norm();
        phi *= kScales[(n / 3) % 3] * base / (norm > 0.0 ? norm : 1.0);
        break;
      }
      case 1: {  // scaled canonical basis field
        const int k = (n / 3) % m;
        phi.setZero();
        phi[k] = kScales[(n / (3 * m)) % 3] * amp * ((n / 3) % 2 ? -1.0 : 1.0);
        break;
      }
      default: {  // u +- t e_k
        const int k = (n / 3) % m;
        const double sign = (n / (3 * m)) % 2 ? -1.0 : 1.0;
        phi = u;
        phi[k] += sign * kSteps[(n / (6 * m)) % 2] * amp;
        break;
      }
    }
    margin = std::min(margin, probe_value(phi));
  }
  return margin;
}

AprioriFlags apriori_report(const Discretization& d, const SolveReport& report,
                            const Eigen::VectorXd& f, const Eigen::VectorXd& kappa,
                            const std::optional<RegParams>& rp, const SolveOptions& opts) {
  const StateVector& u = report.u;
  const double h = d.grid.h;
  const double work = f.dot(u) * h;
  AprioriFlags flags;

  const double form = rp ? regularized_form(d, u, u, kappa, *rp) : energy_form(d, u, u, kappa);
  flags.energy_identity_gap = std::abs(form - work);
  flags.energy_identity = flags.energy_identity_gap <= 1e-9 * (1.0 + std::abs(work));

  const double energy =
      rp ? std::pow(quasi_norm(d, u, kappa, *rp), d.fp.p) : kappa_p_energy(d, u, kappa);
  flags.quasi_norm_slack = work - 0.5 * d.fp.c_norm * energy;
  flags.quasi_norm_bound = flags.quasi_norm_slack >= -1e-9;

  // Unregularized: |u|_{W^{s,p}}^{p-1} <= C |f|. Regularized: linear growth
  // of |u|_{W^{s,2}} in |f|.
  const double norm_p = rp ? 2.0 : d.fp.p;
  flags.scaling_limit = (rp ? 1.0 : 1.0 / (d.fp.p - 1.0)) + 0.05;
  if (f.isZero(0.0)) {
    flags.scaling_slope = 0.0;
    flags.scaling_law = true;
    return flags;
  }
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int count = 0;
  StateVector warm = u;
  for (double lambda : kScalingLambdas) {
    const Eigen::VectorXd scaled = lambda * f;
    SolveReport r = rp ? solve_state_regularized(d, scaled, kappa, *rp, opts, warm)
                       : solve_state(d, scaled, kappa, opts, warm);
    warm = r.u;
    const double x = std::log(lambda);
    const double y = std::log(gagliardo_seminorm(d, r.u, d.fp.s, norm_p));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++count;
  }
  flags.scaling_slope = (count * sxy - sx * sy) / (count * sxx - sx * sx);
  flags.scaling_law = flags.scaling_slope <= flags.scaling_limit;
  return flags;
}

}  // namespace fpl
