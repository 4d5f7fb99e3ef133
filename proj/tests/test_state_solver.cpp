#include <doctest.h>

#include "fpl/state_solver.hpp"
#include "helpers.hpp"

using namespace fpl;
using testing_support::make_case;
using testing_support::normal_vector;
using testing_support::random_case;

TEST_CASE("p = 2 solve matches the dense linear oracle") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 10; ++trial) {
    const auto c = random_case(rng, 2.0, trial % 2 ? Variant::Full : Variant::Regional, 8);
    const Eigen::VectorXd f = normal_vector(c.disc.m(), rng, 5.0);
    const SolveReport r = solve_state(c.disc, f, c.kappa);
    CHECK((r.u - oracle::linear_state(c.inst, f)).lpNorm<Eigen::Infinity>() <= 1e-10);
    const SolveReport rr = solve_state_regularized(c.disc, f, c.kappa, {1e-4, 3});
    CHECK((rr.u - r.u).lpNorm<Eigen::Infinity>() <= 1e-10);
  }
}

TEST_CASE("degenerate p > 2 solve matches coordinate descent") {
  std::mt19937_64 rng(37);
  for (double p : {3.0, 4.0})
    for (int trial = 0; trial < 3; ++trial) {
      const auto c = random_case(rng, p, trial == 1 ? Variant::Full : Variant::Regional, 4);
      const Eigen::VectorXd f = normal_vector(c.disc.m(), rng, 3.0);
      const SolveReport r = solve_state(c.disc, f, c.kappa);
      const Eigen::VectorXd ref = oracle::coordinate_descent(c.inst, f);
      CHECK((r.u - ref).lpNorm<Eigen::Infinity>() <= 1e-8);
    }
}

TEST_CASE("zero force gives the zero state") {
  std::mt19937_64 rng(1);
  for (double p : {2.0, 3.0}) {
    const auto c = make_case(5, 0.75, p, Variant::Regional, rng);
    const SolveReport r = solve_state(c.disc, Eigen::VectorXd::Zero(5), c.kappa);
    CHECK(r.u.lpNorm<Eigen::Infinity>() == 0.0);
  }
}

TEST_CASE("residual is the weak-form defect") {
  std::mt19937_64 rng(2);
  const auto c = make_case(4, 0.8, 3.0, Variant::Regional, rng);
  const Eigen::VectorXd f = normal_vector(4, rng), u = normal_vector(4, rng);
  const Eigen::VectorXd res = residual(c.disc, u, f, c.kappa);
  for (int k = 0; k < 4; ++k)
    CHECK(res[k] == doctest::Approx(energy_form(c.disc, u, Eigen::VectorXd::Unit(4, k), c.kappa) -
                                    f[k] * c.disc.grid.h));
}

TEST_CASE("operator monotonicity on random pairs") {
  std::mt19937_64 rng(41);
  for (double p : {3.0, 4.0}) {
    const auto c = make_case(4, 0.7, p, Variant::Regional, rng);
    const Eigen::VectorXd z = Eigen::VectorXd::Zero(4);
    for (int trial = 0; trial < 100; ++trial) {
      const Eigen::VectorXd u = normal_vector(4, rng), v = normal_vector(4, rng);
      CHECK((residual(c.disc, u, z, c.kappa) - residual(c.disc, v, z, c.kappa)).dot(u - v) > 0.0);
    }
  }
}

TEST_CASE("structural identities hold at the solution") {
  std::mt19937_64 rng(43);
  for (double p : {2.0, 3.0, 4.0})
    for (bool regularized : {false, true}) {
      const auto c = make_case(6, 0.75, p, Variant::Regional, rng);
      const Eigen::VectorXd f = normal_vector(6, rng, 4.0);
      const std::optional<RegParams> rp =
          regularized ? std::optional<RegParams>(RegParams{1e-2, 4}) : std::nullopt;
      const SolveReport r = rp ? solve_state_regularized(c.disc, f, c.kappa, *rp)
                               : solve_state(c.disc, f, c.kappa);
      CHECK(r.final_residual <= 1e-10);
      const AprioriFlags a = apriori_report(c.disc, r, f, c.kappa, rp);
      CHECK(a.energy_identity);
      CHECK(a.quasi_norm_bound);
      const double margin = minty_margin(c.disc, r.u, f, c.kappa, rp, 200, 7);
      CHECK(margin >= -1e-8 * (1.0 + f.norm()));
    }
}

TEST_CASE("Minty margin detects a wrong candidate") {
  std::mt19937_64 rng(47);
  const auto c = make_case(4, 0.75, 3.0, Variant::Regional, rng);
  const Eigen::VectorXd f = Eigen::VectorXd::Constant(4, 5.0);
  const SolveReport r = solve_state(c.disc, f, c.kappa);
  CHECK(minty_margin(c.disc, Eigen::VectorXd(r.u * 2.0), f, c.kappa, std::nullopt, 200, 3) < -1e-6);
}

TEST_CASE("scaling slope stays below 1/(p-1) plus slack") {
  const Grid g = build_grid(0.0, 1.0, 12);
  const Discretization d = make_discretization(g, FracParams{0.75, 3.0, 1.0, Variant::Regional});
  Eigen::VectorXd f(12);
  for (int i = 0; i < 12; ++i) f[i] = 20.0 * std::sin(M_PI * g.x(i + 1));
  const Eigen::VectorXd kappa = Eigen::VectorXd::Ones(d.num_offsets());
  const SolveReport r = solve_state(d, f, kappa);
  const AprioriFlags a = apriori_report(d, r, f, kappa, std::nullopt);
  CHECK(a.scaling_law);
  CHECK(a.scaling_slope <= 0.5 + 0.05);
  CHECK(a.scaling_slope > 0.3);
}

TEST_CASE("warm start reaches the same solution") {
  std::mt19937_64 rng(53);
  const auto c = make_case(5, 0.75, 3.0, Variant::Regional, rng);
  const Eigen::VectorXd f = normal_vector(5, rng, 3.0);
  const RegParams rp{1e-3, 8};
  const SolveReport cold = solve_state_regularized(c.disc, f, c.kappa, rp);
  const SolveReport warm = solve_state_regularized(c.disc, f, c.kappa, rp, {}, cold.u + 0.1 * f);
  CHECK((cold.u - warm.u).lpNorm<Eigen::Infinity>() <= 1e-10);
}

TEST_CASE("iteration budget exhaustion raises NonConvergence") {
  std::mt19937_64 rng(59);
  const auto c = make_case(5, 0.75, 4.0, Variant::Regional, rng);
  SolveOptions opts;
  opts.max_iter = 1;
  opts.continuation.clear();
  try {
    solve_state_regularized(c.disc, Eigen::VectorXd::Constant(5, 100.0), c.kappa, {1e-6, 10}, opts);
    FAIL("expected NonConvergence");
  } catch (const NonConvergence& e) {
    CHECK(e.iterations() >= 1);
    CHECK(e.residual() > 0.0);
  }
}

TEST_CASE("options and sizes are validated") {
  std::mt19937_64 rng(61);
  const auto c = make_case(3, 0.75, 2.0, Variant::Regional, rng);
  SolveOptions bad;
  bad.tol_residual = 0.0;
  CHECK_THROWS_AS(solve_state(c.disc, Eigen::VectorXd::Zero(3), c.kappa, bad), std::invalid_argument);
  CHECK_THROWS_AS(solve_state(c.disc, Eigen::VectorXd::Zero(2), c.kappa), std::invalid_argument);
}

TEST_CASE("history records monotone potential decrease") {
  std::mt19937_64 rng(67);
  const auto c = make_case(6, 0.75, 3.0, Variant::Regional, rng);
  const SolveReport r = solve_state_regularized(c.disc, normal_vector(6, rng, 5.0), c.kappa, {1e-2, 4});
  REQUIRE(r.history.size() >= 2);
  for (std::size_t i = 1; i < r.history.size(); ++i)
    CHECK(r.history[i].energy <= r.history[i - 1].energy + 1e-14);
}
