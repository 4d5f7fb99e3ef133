#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "fpl/convergence.hpp"
#include "helpers.hpp"

using namespace fpl;

namespace {

ControlProblem tiny_problem(double p, bool pinned) {
  ControlProblem pr;
  pr.disc = make_discretization(build_grid(0.0, 1.0, 3), FracParams{0.75, p, 1.0, Variant::Regional});
  pr.f = Eigen::VectorXd::Constant(3, 10.0);
  pr.lo = Eigen::VectorXd::Constant(4, 0.5);
  pr.hi = Eigen::VectorXd::Constant(4, 1.5);
  pr.alpha = 0.5;
  pr.control_blocks = 2;
  const Eigen::VectorXd target = (Eigen::VectorXd(2) << 0.7, 1.3).finished();
  pr.xi = 1.02 * solve_control_state(pr, pr.control_map().expand(target)).u;
  if (pinned) {
    pr.lo << 0.7, 0.7, 1.3, 1.3;
    pr.hi = pr.lo;
  }
  return pr;
}

const Verdict& find(const SweepResult& r, const std::string& name) {
  for (const auto& v : r.verdicts)
    if (v.name == name) return v;
  FAIL("missing verdict " << name);
  throw std::logic_error("unreachable");
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

}  // namespace

TEST_CASE("default geometric schedule") {
  const Schedule s = Schedule::geometric(6, 4.0, 2, 0.6);
  REQUIRE(s.size() == 6);
  CHECK(s.epsilon[0] == 0.25);
  CHECK(s.epsilon[5] == doctest::Approx(std::pow(4.0, -6)));
  CHECK(s.n == std::vector<int>{2, 4, 8, 16, 32, 64});
  CHECK_NOTHROW(s.validate(0.75, 3.0));
}

TEST_CASE("default t follows the theorem hypothesis") {
  CHECK(Schedule::default_t(0.75, 2.0) == 0.75);
  CHECK(Schedule::default_t(0.75, 3.0) == doctest::Approx(0.625));
}

TEST_CASE("schedule validation") {
  Schedule s = Schedule::geometric(3, 4.0, 2, 0.6);
  s.n[2] = 4;
  CHECK_THROWS_AS(s.validate(0.75, 3.0), ConfigError);
  s = Schedule::geometric(3, 4.0, 2, 0.6);
  CHECK_THROWS_AS(s.validate(0.75, 2.0), ConfigError);  // t must equal s for p = 2
  s.t = 0.8;
  CHECK_THROWS_AS(s.validate(0.75, 3.0), ConfigError);
  CHECK_THROWS_AS(Schedule{}.validate(0.75, 3.0), ConfigError);
}

TEST_CASE("schedule hash is stable and discriminating") {
  const Schedule a = Schedule::geometric(6, 4.0, 2, 0.625);
  const Schedule b = Schedule::geometric(5, 4.0, 2, 0.625);
  CHECK(a.hash() == Schedule::geometric(6, 4.0, 2, 0.625).hash());
  CHECK(a.hash() != b.hash());
  CHECK(a.hash().size() == 8);
}

TEST_CASE("nonincreasing tail") {
  CHECK(nonincreasing_tail({5, 1, 3, 2, 2, 1}, 3));
  CHECK_FALSE(nonincreasing_tail({5, 1, 3, 2, 2, 1}, 5));
  CHECK(nonincreasing_tail({}, 3));
  CHECK(nonincreasing_tail({1.0}, 3));
}

TEST_CASE("p = 2 sweep collapses to a single point") {
  const ControlProblem pr = tiny_problem(2.0, false);
  const SweepResult r = run_sweep(pr, Schedule::geometric(6, 4.0, 2, 0.75));
  CHECK(r.reference.source == "first_point");
  for (const auto& rec : r.records) {
    REQUIRE(rec.ok);
    CHECK(rec.objective_gap <= 1e-10);
    CHECK(rec.state_gap <= 1e-10);
    CHECK(rec.kappa_l1_gap <= 1e-10);
    CHECK(rec.tv_gap <= 1e-10);
    CHECK(rec.energy_gap <= 1e-10);
  }
  CHECK(r.all_pass());
}

TEST_CASE("pinned control reduces to state convergence") {
  const ControlProblem pr = tiny_problem(3.0, true);
  const SweepResult r = run_sweep(pr, Schedule::geometric(6, 4.0, 2, 0.625));
  CHECK(r.reference.source == "ocp_reference");
  std::vector<double> gaps;
  for (const auto& rec : r.records) {
    CHECK(rec.kappa_l1_gap == 0.0);
    gaps.push_back(rec.state_gap);
  }
  CHECK(nonincreasing_tail(gaps, 3));
  CHECK(find(r, "state_gap").pass);
}

TEST_CASE("tiny problem: objective gap and level sets") {
  const ControlProblem pr = tiny_problem(3.0, false);
  const SweepResult r = run_sweep(pr, Schedule::geometric(6, 4.0, 2, 0.625));
  CHECK(find(r, "objective_gap").pass);
  CHECK(r.records.back().objective_gap <= 1e-3);
  CHECK(find(r, "level_set_vanishing").pass);
  // The first point has a saturated pair for this force.
  CHECK(r.records.front().level_measure > 0.0);
  CHECK(r.records.back().level_measure <= 1e-6);
}

TEST_CASE("level-set check flags a growing measure") {
  SweepResult fake;
  fake.p = 3.0;
  fake.schedule = Schedule::geometric(4, 4.0, 2, 0.6);
  for (double m : {0.0, 0.0, 0.1, 0.2}) {
    SweepRecord rec;
    rec.ok = true;
    rec.level_measure = m;
    fake.records.push_back(rec);
  }
  CHECK_FALSE(check_level_set_vanishing(fake).pass);
}

TEST_CASE("report files") {
  const ControlProblem pr = tiny_problem(2.0, false);
  const SweepResult r = run_sweep(pr, Schedule::geometric(6, 4.0, 2, 0.75));
  const auto dir = std::filesystem::temp_directory_path() / "fpl_test_report";
  std::filesystem::remove_all(dir);
  const ReportFiles files = emit_convergence_report(r, dir);
  CHECK(files.csv.filename().string().rfind("sweep_p2_s0.75_m3_", 0) == 0);
  std::ifstream is(files.csv);
  int lines = 0;
  for (std::string line; std::getline(is, line);) ++lines;
  CHECK(lines == 7);
  CHECK(std::filesystem::exists(files.verdicts));
  CHECK(files.plots.size() == 6);
  const std::string first = slurp(files.csv) + slurp(files.verdicts);
  emit_convergence_report(run_sweep(pr, Schedule::geometric(6, 4.0, 2, 0.75)), dir);
  CHECK(first == slurp(files.csv) + slurp(files.verdicts));
  CHECK_THROWS_AS(emit_convergence_report(SweepResult{}, dir), std::invalid_argument);
  std::filesystem::remove_all(dir);
}
