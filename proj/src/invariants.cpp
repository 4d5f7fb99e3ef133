#include "fpl/invariants.hpp"

#include <cmath>
#include <random>

#include "fpl/io.hpp"

namespace fpl {
namespace {

Verdict make(const std::string& name, bool pass, const std::string& detail) {
  return {name, pass, detail};
}

std::string num(double v) { return io::format_double(v); }

Eigen::VectorXd gaussian(int size, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Eigen::VectorXd v(size);
  for (int i = 0; i < size; ++i) v[i] = normal(rng);
  return v;
}

Verdict grid_check(const Discretization& d) {
  const Grid& g = d.grid;
  bool ok = g.h > 0.0;
  for (int i = 0; i + 1 < static_cast<int>(g.nodes.size()); ++i)
    ok = ok && std::abs(g.nodes[i + 1] - g.nodes[i] - g.h) <= 1e-12 * (1.0 + std::abs(g.b));
  for (int i = 1; i <= g.m; ++i) ok = ok && g.x(i) > g.a && g.x(i) < g.b;
  for (int k = 1; k <= d.num_offsets(); ++k)
    ok = ok && std::abs(d.diff.offset(k) - k * g.h) <= 1e-12 * k * g.h;
  return make("grid_uniform", ok, "m=" + std::to_string(g.m) + " K=" + std::to_string(d.num_offsets()));
}

Verdict regularizer_check(std::mt19937_64& rng) {
  double worst = 0.0;
  bool ok = true;
  for (int n : {1, 2, 4, 8}) {
    const double n2 = double(n) * n;
    std::uniform_real_distribution<double> tau_dist(0.0, 2.0 * (n2 + 1.0));
    for (int i = 0; i < 2000; ++i) {
      const double tau = tau_dist(rng);
      const double f = f_n(tau, n);
      ok = ok && f >= std::min(tau, n2) - 1e-15 && f <= n2 + 1.0 + 1e-15;
      if (tau <= n2 + 1.0) ok = ok && f <= tau + kBlendOvershoot + 1e-15;
      const double fp = f_n_prime(tau, n);
      ok = ok && fp >= 0.0 && fp <= 4.0 / 3.0 + 1e-15;
    }
    for (double junction : {n2, n2 + 1.0}) {
      const double step = 1e-7;
      const double left = (f_n(junction, n) - f_n(junction - step, n)) / step;
      const double right = (f_n(junction + step, n) - f_n(junction, n)) / step;
      worst = std::max(worst, std::abs(left - right));
    }
  }
  ok = ok && worst <= 1e-6;
  return make("regularizer_conditions", ok, "junction fd jump " + num(worst));
}

Verdict forms_check(const Discretization& d, const Eigen::VectorXd& kappa, const RegParams& rp,
                    std::mt19937_64& rng) {
  const int m = d.m();
  const double p = d.fp.p;
  double worst = 0.0, worst_fd = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::VectorXd u = gaussian(m, rng), v = gaussian(m, rng);
    const double scale = 1.0 + std::abs(energy_form(d, u, u, kappa));
    // Linearity in the second slot and the operator view.
    const double lin = energy_form(d, u, u + 2.0 * v, kappa) -
                       (energy_form(d, u, u, kappa) + 2.0 * energy_form(d, u, v, kappa));
    const double op = form_operator(d, u, kappa).dot(v) - energy_form(d, u, v, kappa);
    // The pair part is (p-1)-homogeneous in the first slot; the mass term is linear.
    const double mass = u.dot(v) * d.grid.h;
    const double hom = energy_form(d, 2.0 * u, v, kappa) - 2.0 * mass -
                       std::pow(2.0, p - 1.0) * (energy_form(d, u, v, kappa) - mass);
    // Regularized form is the gradient of its potential.
    const Eigen::VectorXd f = Eigen::VectorXd::Zero(m);
    const double t = 1e-6;
    const double fd = (regularized_potential(d, u + t * v, f, kappa, rp) -
                       regularized_potential(d, u - t * v, f, kappa, rp)) / (2.0 * t);
    const double grad = regularized_form(d, u, v, kappa, rp);
    worst = std::max({worst, std::abs(lin) / scale, std::abs(op) / scale,
                      std::abs(hom) / (scale * std::pow(2.0, p))});
    worst_fd = std::max(worst_fd, std::abs(fd - grad) / (1.0 + std::abs(grad)));
  }
  return make("forms_consistency", worst <= 1e-9 && worst_fd <= 1e-6,
              "algebraic defect " + num(worst) + ", gradient fd defect " + num(worst_fd));
}

Verdict monotonicity_check(const Discretization& d, const Eigen::VectorXd& kappa,
                           const RegParams& rp, std::mt19937_64& rng) {
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(d.m());
  double worst = INFINITY;
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::VectorXd u = gaussian(d.m(), rng), v = gaussian(d.m(), rng);
    const Eigen::VectorXd diff = u - v;
    worst = std::min(worst, (residual(d, u, zero, kappa) - residual(d, v, zero, kappa)).dot(diff) /
                                diff.squaredNorm());
    worst = std::min(worst, (residual(d, u, zero, kappa, rp) - residual(d, v, zero, kappa, rp))
                                    .dot(diff) / diff.squaredNorm());
  }
  return make("operator_monotone", worst > 0.0, "min normalized increment " + num(worst));
}

std::vector<Verdict> solve_checks(const RunConfig& cfg, const Discretization& d,
                                  const Eigen::VectorXd& f, const Eigen::VectorXd& kappa,
                                  const RegParams& rp) {
  std::vector<Verdict> out;
  const SolveOptions opts = cfg.solve_options();
  for (const bool regularized : {false, true}) {
    const std::string tag = regularized ? "regularized_" : "";
    const std::optional<RegParams> r = regularized ? std::optional<RegParams>(rp) : std::nullopt;
    const SolveReport rep = regularized ? solve_state_regularized(d, f, kappa, rp, opts)
                                        : solve_state(d, f, kappa, opts);
    out.push_back(make(tag + "solve_converged", rep.final_residual <= opts.tol_residual,
                       "residual " + num(rep.final_residual)));
    const AprioriFlags a = apriori_report(d, rep, f, kappa, r, opts);
    out.push_back(make(tag + "energy_identity", a.energy_identity, "gap " + num(a.energy_identity_gap)));
    out.push_back(make(tag + "quasi_norm_bound", a.quasi_norm_bound, "slack " + num(a.quasi_norm_slack)));
    const double margin = minty_margin(d, rep.u, f, kappa, r, cfg.solver.minty_probes, cfg.solver.seed);
    out.push_back(make(tag + "minty_margin", margin >= -1e-8 * (1.0 + f.norm()), "margin " + num(margin)));
  }
  return out;
}

Verdict tv_prox_check(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> lam(0.0, 1.0);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const int size = 1 + trial % 6;
    const Eigen::VectorXd y = gaussian(size, rng);
    const double lambda = lam(rng);
    const Eigen::VectorXd x = tv_prox(y, lambda);
    const auto value = [&](const Eigen::VectorXd& z) {
      return 0.5 * (z - y).squaredNorm() + lambda * tv_seminorm(z);
    };
    const double fx = value(x);
    // Strong convexity: any perturbation must not decrease the prox objective.
    for (int probe = 0; probe < 20; ++probe) {
      const Eigen::VectorXd z = x + 1e-3 * gaussian(size, rng);
      worst = std::max(worst, fx - value(z));
    }
  }
  return make("tv_prox_optimal", worst <= 1e-12, "largest improvement found " + num(worst));
}

Verdict projection_check(const ControlProblem& cp, std::mt19937_64& rng) {
  const Eigen::VectorXd y = 3.0 * gaussian(static_cast<int>(cp.lo.size()), rng);
  const Eigen::VectorXd x = project_admissible(y, cp.lo, cp.hi);
  const bool inside = (x.array() >= cp.lo.array()).all() && (x.array() <= cp.hi.array()).all();
  const bool idempotent = project_admissible(x, cp.lo, cp.hi) == x;
  const ControlMap map = cp.control_map();
  const Eigen::VectorXd dofs = 0.5 * (map.block_lo(cp.lo) + map.block_hi(cp.hi));
  const Eigen::VectorXd kappa = map.expand(dofs);
  const bool expand_ok = (kappa.array() >= cp.lo.array()).all() && (kappa.array() <= cp.hi.array()).all();
  return make("admissible_projection", inside && idempotent && expand_ok,
              std::to_string(map.num_dofs()) + " control DOFs");
}

}  // namespace

std::vector<Verdict> check_invariants(const RunConfig& cfg) {
  cfg.validate();
  std::mt19937_64 rng(cfg.solver.seed);
  const Discretization d = cfg.discretization();
  const Eigen::VectorXd f = cfg.force(d);
  const Eigen::VectorXd kappa = cfg.kappa(d);
  const RegParams rp{cfg.regularization.epsilon, cfg.regularization.n};
  const ControlProblem cp = cfg.control_problem();

  std::vector<Verdict> out;
  out.push_back(grid_check(d));
  out.push_back(regularizer_check(rng));
  out.push_back(forms_check(d, kappa, rp, rng));
  out.push_back(monotonicity_check(d, kappa, rp, rng));
  for (auto& v : solve_checks(cfg, d, f, kappa, rp)) out.push_back(std::move(v));
  out.push_back(tv_prox_check(rng));
  out.push_back(projection_check(cp, rng));
  return out;
}

}  // namespace fpl
