#include <doctest.h>

#include "fpl/control_opt.hpp"
#include "helpers.hpp"

using namespace fpl;
using testing_support::normal_vector;

namespace {

ControlProblem tiny_problem(double p) {
  ControlProblem pr;
  pr.disc = make_discretization(build_grid(0.0, 1.0, 3), FracParams{0.75, p, 1.0, Variant::Regional});
  pr.f = Eigen::VectorXd::Constant(3, 10.0);
  pr.lo = Eigen::VectorXd::Constant(4, 0.5);
  pr.hi = Eigen::VectorXd::Constant(4, 1.5);
  pr.alpha = 0.5;
  pr.control_blocks = 2;
  pr.rp = RegParams{1e-3, 8};
  const Eigen::VectorXd target = (Eigen::VectorXd(2) << 0.7, 1.3).finished();
  pr.xi = 1.02 * solve_control_state(pr, pr.control_map().expand(target)).u;
  return pr;
}

}  // namespace

TEST_CASE("tv seminorm is the sum of absolute jumps") {
  const Eigen::VectorXd k = (Eigen::VectorXd(4) << 1.0, 3.0, 2.5, 2.5).finished();
  CHECK(tv_seminorm(k) == 2.5);
  CHECK(tv_seminorm(Eigen::VectorXd::Constant(5, 0.7)) == 0.0);
  CHECK(tv_seminorm(Eigen::VectorXd(0)) == 0.0);
}

TEST_CASE("grid oracles agree with each other") {
  std::mt19937_64 rng(71);
  for (int trial = 0; trial < 5; ++trial) {
    const Eigen::VectorXd y = normal_vector(3, rng);
    const double lo = y.minCoeff(), hi = y.maxCoeff();
    CHECK(oracle::prox_grid_dp(y, 0.3, lo, hi, 0.01) ==
          doctest::Approx(oracle::prox_grid_brute(y, 0.3, lo, hi, 0.01)).epsilon(1e-14));
  }
}

TEST_CASE("tv prox matches exhaustive grid search on short vectors") {
  std::mt19937_64 rng(73);
  std::uniform_real_distribution<double> lam(0.01, 1.0);
  std::uniform_int_distribution<int> len(1, 3);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::VectorXd y = normal_vector(len(rng), rng);
    const double lambda = lam(rng);
    const Eigen::VectorXd x = tv_prox(y, lambda);
    const double grid = oracle::prox_grid_dp(y, lambda, y.minCoeff(), y.maxCoeff() + 1e-3, 1e-3);
    const double ours = oracle::prox_objective(x, y, lambda);
    CHECK(ours <= grid + 1e-12);
    CHECK(grid - ours <= 2e-3);
  }
}

TEST_CASE("tv prox matches the dual projected-gradient oracle") {
  std::mt19937_64 rng(79);
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::VectorXd y = normal_vector(2 + trial, rng);
    const double lambda = 0.05 + 0.1 * trial;
    CHECK((tv_prox(y, lambda) - oracle::prox_dual(y, lambda)).lpNorm<Eigen::Infinity>() <= 1e-8);
  }
}

TEST_CASE("tv prox edge cases") {
  const Eigen::VectorXd y = (Eigen::VectorXd(3) << 1.0, -2.0, 0.5).finished();
  CHECK(tv_prox(y, 0.0) == y);
  // Large lambda collapses to the mean.
  const Eigen::VectorXd flat = tv_prox(y, 100.0);
  for (int i = 0; i < 3; ++i) CHECK(flat[i] == doctest::Approx(y.mean()));
  CHECK(tv_prox(Eigen::VectorXd::Constant(1, 4.0), 1.0)[0] == 4.0);
  CHECK_THROWS_AS(tv_prox(y, -1.0), std::invalid_argument);
  // A monotone step with small lambda keeps its shape but shrinks the jump.
  const Eigen::VectorXd step = (Eigen::VectorXd(4) << 0.0, 0.0, 1.0, 1.0).finished();
  const Eigen::VectorXd out = tv_prox(step, 0.1);
  CHECK(out[0] == doctest::Approx(0.05));
  CHECK(out[3] == doctest::Approx(0.95));
}

TEST_CASE("projection onto the admissible box") {
  const Eigen::VectorXd lo = Eigen::VectorXd::Constant(3, 0.5), hi = Eigen::VectorXd::Constant(3, 1.5);
  const Eigen::VectorXd y = (Eigen::VectorXd(3) << 0.1, 1.0, 9.0).finished();
  const Eigen::VectorXd x = project_admissible(y, lo, hi);
  CHECK(x[0] == 0.5);
  CHECK(x[1] == 1.0);
  CHECK(x[2] == 1.5);
  CHECK(project_admissible(x, lo, hi) == x);
  ControlField cf = ControlField::constant(3, 2.0, 0.5, 1.5, 0.5);
  CHECK(project_admissible(cf).values.maxCoeff() == 1.5);
  CHECK_THROWS_AS(project_admissible(y, Eigen::VectorXd::Zero(2), hi), std::invalid_argument);
}

TEST_CASE("control map splits offsets into contiguous blocks") {
  const ControlMap map(7, 3);
  CHECK(map.num_dofs() == 3);
  CHECK(map.block_of(0) == 0);
  CHECK(map.block_of(2) == 0);
  CHECK(map.block_of(3) == 1);
  CHECK(map.block_of(5) == 2);
  const Eigen::VectorXd k = map.expand((Eigen::VectorXd(3) << 1.0, 2.0, 3.0).finished());
  CHECK(k == (Eigen::VectorXd(7) << 1, 1, 1, 2, 2, 3, 3).finished());
  CHECK(ControlMap(4, 0).num_dofs() == 4);
  CHECK_THROWS_AS(ControlMap(3, 4), ConfigError);
  const Eigen::VectorXd lo = (Eigen::VectorXd(7) << 0.5, 0.6, 0.5, 0.5, 0.5, 0.5, 0.7).finished();
  CHECK(map.block_lo(lo)[0] == 0.6);
  CHECK(map.block_lo(lo)[2] == 0.7);
}

TEST_CASE("objective is tracking plus total variation") {
  const Eigen::VectorXd u = (Eigen::VectorXd(2) << 1.0, 2.0).finished();
  const Eigen::VectorXd xi = (Eigen::VectorXd(2) << 0.0, 0.0).finished();
  CHECK(tracking_term(u, xi, 0.5) == doctest::Approx(1.25));
  const Eigen::VectorXd k = (Eigen::VectorXd(3) << 1.0, 1.5, 1.0).finished();
  CHECK(objective(k, u, xi, 0.5) == doctest::Approx(2.25));
}

TEST_CASE("finite-difference gradient agrees with central differences") {
  ControlProblem pr = tiny_problem(3.0);
  const ControlMap map = pr.control_map();
  const Eigen::VectorXd dofs = (Eigen::VectorXd(2) << 0.9, 1.1).finished();
  int solves = 0;
  const Eigen::VectorXd g = reduced_tracking_gradient_fd(pr, dofs, std::nullopt, &solves);
  CHECK(solves == 3);
  for (int b = 0; b < 2; ++b) {
    Eigen::VectorXd up = dofs, dn = dofs;
    up[b] += 1e-4;
    dn[b] -= 1e-4;
    const double jp = tracking_term(solve_control_state(pr, map.expand(up)).u, pr.xi, pr.disc.grid.h);
    const double jm = tracking_term(solve_control_state(pr, map.expand(dn)).u, pr.xi, pr.disc.grid.h);
    CHECK(g[b] == doctest::Approx((jp - jm) / 2e-4).epsilon(1e-4));
  }
  // Backward difference at the upper bound, zero for a pinned block.
  pr.lo.segment(2, 2).setConstant(1.5);
  const Eigen::VectorXd at_top = (Eigen::VectorXd(2) << 1.5, 1.5).finished();
  const Eigen::VectorXd g2 = reduced_tracking_gradient_fd(pr, at_top, std::nullopt, nullptr);
  CHECK(g2[1] == 0.0);
  CHECK(std::isfinite(g2[0]));
}

TEST_CASE("tiny control problem agrees with exhaustive search") {
  for (double p : {2.0, 3.0}) {
    const ControlProblem pr = tiny_problem(p);
    const ControlMap map = pr.control_map();
    const OptimizeReport rocp = solve_rocp(pr);
    const OptimizeReport ocp = solve_ocp_reference(pr);
    ControlProblem exact = pr;
    exact.rp.reset();
    auto value = [&](const ControlProblem& prob, double a, double b) {
      const Eigen::VectorXd k = map.expand((Eigen::VectorXd(2) << a, b).finished());
      return objective(k, solve_control_state(prob, k).u, prob.xi, prob.disc.grid.h);
    };
    const auto best_reg = oracle::box_search([&](double a, double b) { return value(pr, a, b); },
                                             0.5, 1.5, 0.5, 1.5, 0.02);
    const auto best = oracle::box_search([&](double a, double b) { return value(exact, a, b); },
                                         0.5, 1.5, 0.5, 1.5, 0.02);
    CHECK(std::abs(rocp.objective_value - best_reg.value) <= 1e-3);
    CHECK(std::abs(ocp.objective_value - best.value) <= 1e-3);
    CHECK(rocp.objective_value <= best_reg.value + 1e-9);
    // History is strictly decreasing.
    for (std::size_t i = 1; i < rocp.objective_history.size(); ++i)
      CHECK(rocp.objective_history[i].objective < rocp.objective_history[i - 1].objective);
    CHECK((rocp.kappa_star.values.array() >= pr.lo.array()).all());
    CHECK((rocp.kappa_star.values.array() <= pr.hi.array()).all());
  }
}

TEST_CASE("control problem validation") {
  ControlProblem pr = tiny_problem(2.0);
  CHECK_NOTHROW(pr.validate());
  ControlProblem bad = pr;
  bad.xi = Eigen::VectorXd::Zero(2);
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = pr;
  bad.alpha = 0.9;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = pr;
  bad.rp.reset();
  CHECK_THROWS_AS(solve_rocp(bad), std::invalid_argument);
}
