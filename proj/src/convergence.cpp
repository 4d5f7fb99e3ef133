#include "fpl/convergence.hpp"

#include <cmath>
#include <cstdio>

#include "fpl/io.hpp"

namespace fpl {
namespace {

std::string short_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::vector<double> collect(const std::vector<SweepRecord>& records,
                            double SweepRecord::*field) {
  std::vector<double> out;
  for (const auto& r : records)
    if (r.ok) out.push_back(r.*field);
  return out;
}

Verdict trend_verdict(const std::string& name, const std::vector<double>& gaps, int tail,
                      std::optional<double> final_bound = std::nullopt) {
  Verdict v{name, false, {}};
  if (gaps.empty()) {
    v.detail = "no successful points";
    return v;
  }
  const bool trend = nonincreasing_tail(gaps, tail);
  const bool bounded = !final_bound || gaps.back() <= *final_bound;
  v.pass = trend && bounded;
  v.detail = "final=" + io::format_double(gaps.back()) +
             (trend ? " nonincreasing" : " not nonincreasing") + " over last " +
             std::to_string(tail);
  if (final_bound) v.detail += ", bound " + io::format_double(*final_bound);
  return v;
}

}  // namespace

Schedule Schedule::geometric(int points, double eps_base, int n_base, double t) {
  if (points < 1) throw ConfigError("schedule needs at least one point");
  Schedule sched;
  sched.t = t;
  int n = 1;
  for (int k = 1; k <= points; ++k) {
    sched.epsilon.push_back(std::pow(eps_base, -k));
    n *= n_base;
    sched.n.push_back(n);
  }
  return sched;
}

double Schedule::default_t(double s, double p) { return p == 2.0 ? s : 0.5 * (0.5 + s); }

void Schedule::validate(double s, double p) const {
  if (epsilon.empty()) throw ConfigError("schedule is empty");
  if (epsilon.size() != n.size()) throw ConfigError("schedule epsilon and n lengths differ");
  for (std::size_t k = 0; k < epsilon.size(); ++k) {
    if (!(epsilon[k] > 0.0)) throw ConfigError("schedule epsilon must be > 0");
    if (n[k] < 1) throw ConfigError("schedule n must be >= 1");
    if (k > 0 && !(epsilon[k] < epsilon[k - 1]))
      throw ConfigError("schedule epsilon must be strictly decreasing");
    if (k > 0 && !(n[k] > n[k - 1])) throw ConfigError("schedule n must be strictly increasing");
  }
  if (!(t > 0.5 && t <= s)) throw ConfigError("schedule t must satisfy 1/2 < t <= s");
  if (p == 2.0 && t != s) throw ConfigError("schedule t must equal s when p = 2");
}

std::string Schedule::hash() const {
  std::string text;
  for (std::size_t k = 0; k < epsilon.size(); ++k)
    text += io::format_double(epsilon[k]) + ":" + std::to_string(n[k]) + ";";
  text += io::format_double(t);
  return io::fnv1a_hex(text).substr(0, 8);
}

bool SweepResult::all_pass() const {
  for (const auto& v : verdicts)
    if (!v.pass) return false;
  return !verdicts.empty();
}

bool nonincreasing_tail(const std::vector<double>& values, int count) {
  const int n = static_cast<int>(values.size());
  const int start = std::max(0, n - count);
  for (int k = start; k + 1 < n; ++k)
    if (values[k + 1] > values[k]) return false;
  return true;
}

SweepResult run_sweep(const ControlProblem& problem, const Schedule& schedule,
                      const SweepOptions& options) {
  const Discretization& d = problem.disc;
  schedule.validate(d.fp.s, d.fp.p);
  SweepResult result;
  result.schedule = schedule;
  result.p = d.fp.p;
  result.s = d.fp.s;
  result.m = d.m();
  const double h = d.grid.h;
  std::optional<Eigen::VectorXd> warm;
  for (int k = 0; k < schedule.size(); ++k) {
    SweepRecord rec;
    rec.epsilon = schedule.epsilon[k];
    rec.n = schedule.n[k];
    ControlProblem pk = problem;
    pk.rp = RegParams{rec.epsilon, rec.n};
    try {
      const OptimizeReport opt = solve_rocp(pk, warm);
      // For p = 2 every point is the same problem, so each starts afresh.
      if (d.fp.p > 2.0) warm = opt.dofs;
      rec.ok = true;
      rec.kappa = opt.kappa_star.values;
      rec.u = opt.u_star;
      rec.objective = opt.objective_value;
      rec.tracking = opt.tracking_value;
      rec.tv = opt.tv_value;
      rec.outer_iterations = opt.outer_iterations;
      rec.reg_energy = std::pow(quasi_norm(d, rec.u, rec.kappa, *pk.rp), d.fp.p);
      rec.p_energy = kappa_p_energy(d, rec.u, rec.kappa);
      const LevelSet set = level_set(d, rec.u, rec.n, d.fp.s, LevelThreshold::Saturation);
      rec.level_measure = set.lebesgue;
      rec.level_mu = set.mu;
      rec.level_energy = level_set_energy(d, rec.u, rec.kappa, *pk.rp, set);
    } catch (const NonConvergence& e) {
      rec.error = e.what();
    }
    result.records.push_back(std::move(rec));
  }

  SweepReference& ref = result.reference;
  if (d.fp.p > 2.0) {
    const OptimizeReport opt = solve_ocp_reference(problem);
    ref.source = "ocp_reference";
    ref.kappa = opt.kappa_star.values;
    ref.u = opt.u_star;
    ref.objective = opt.objective_value;
  } else {
    ref.source = "first_point";
    for (const auto& r : result.records)
      if (r.ok) {
        ref.kappa = r.kappa;
        ref.u = r.u;
        ref.objective = r.objective;
        break;
      }
  }
  int ok_count = 0;
  if (ref.kappa.size() > 0) {
    ref.tv = tv_seminorm(ref.kappa);
    ref.p_energy = kappa_p_energy(d, ref.u, ref.kappa);
    for (auto& r : result.records) {
      if (!r.ok) continue;
      ++ok_count;
      r.kappa_l1_gap = (r.kappa - ref.kappa).lpNorm<1>() * h;
      r.state_gap = gagliardo_seminorm(d, r.u - ref.u, schedule.t, 2.0);
      r.tv_gap = std::abs(r.tv - ref.tv);
      r.energy_gap = std::abs(r.reg_energy - ref.p_energy);
      r.objective_gap = std::abs(r.objective - ref.objective);
    }
  }

  const int tail = schedule.size() - schedule.size() / 2;
  Verdict enough{"successful_points", 2 * ok_count >= schedule.size(),
                 std::to_string(ok_count) + "/" + std::to_string(schedule.size())};
  result.verdicts.push_back(enough);
  if (enough.pass) {
    result.verdicts.push_back(
        trend_verdict("kappa_l1_gap", collect(result.records, &SweepRecord::kappa_l1_gap), tail));
    result.verdicts.push_back(
        trend_verdict("state_gap", collect(result.records, &SweepRecord::state_gap), tail));
    result.verdicts.push_back(
        trend_verdict("tv_gap", collect(result.records, &SweepRecord::tv_gap), tail));
    result.verdicts.push_back(
        trend_verdict("energy_gap", collect(result.records, &SweepRecord::energy_gap), tail));
    result.verdicts.push_back(trend_verdict("objective_gap",
                                            collect(result.records, &SweepRecord::objective_gap),
                                            tail, options.objective_tolerance));
    result.verdicts.push_back(check_level_set_vanishing(result, options));
  }
  return result;
}

Verdict check_level_set_vanishing(const SweepResult& sweep, const SweepOptions& options) {
  const int tail = sweep.schedule.size() - sweep.schedule.size() / 2;
  const Verdict measure = trend_verdict("level_set_measure",
                                        collect(sweep.records, &SweepRecord::level_measure), tail,
                                        options.level_set_tolerance);
  Verdict v{"level_set_vanishing", measure.pass, "measure: " + measure.detail};
  if (sweep.p != 2.0) {
    const Verdict energy = trend_verdict("level_set_energy",
                                         collect(sweep.records, &SweepRecord::level_energy), tail,
                                         options.level_set_tolerance);
    v.pass = v.pass && energy.pass;
    v.detail += "; energy: " + energy.detail;
  }
  return v;
}

std::string sweep_stem(const SweepResult& sweep) {
  return "sweep_p" + short_number(sweep.p) + "_s" + short_number(sweep.s) + "_m" +
         std::to_string(sweep.m) + "_" + sweep.schedule.hash();
}

ReportFiles emit_convergence_report(const SweepResult& sweep, const std::filesystem::path& dir) {
  if (sweep.records.empty()) throw std::invalid_argument("cannot report an empty sweep");
  const std::string stem = sweep_stem(sweep);
  ReportFiles files;

  std::vector<std::string> header{"k",          "epsilon",      "n",          "ok",
                                  "objective",  "tracking",     "tv",         "reg_energy",
                                  "p_energy",   "kappa_l1_gap", "state_gap",  "tv_gap",
                                  "energy_gap", "objective_gap", "level_measure", "level_mu",
                                  "level_energy", "outer_iterations"};
  const Eigen::Index K = sweep.reference.kappa.size() ? sweep.reference.kappa.size()
                                                      : sweep.records.front().kappa.size();
  for (Eigen::Index k = 0; k < K; ++k) header.push_back("kappa_" + std::to_string(k + 1));
  for (int i = 0; i < sweep.m; ++i) header.push_back("u_" + std::to_string(i + 1));
  io::CsvTable table(header);
  for (std::size_t idx = 0; idx < sweep.records.size(); ++idx) {
    const SweepRecord& r = sweep.records[idx];
    std::vector<std::string> row{std::to_string(idx + 1),
                                 io::format_double(r.epsilon),
                                 std::to_string(r.n),
                                 r.ok ? "1" : "0"};
    for (double v : {r.objective, r.tracking, r.tv, r.reg_energy, r.p_energy, r.kappa_l1_gap,
                     r.state_gap, r.tv_gap, r.energy_gap, r.objective_gap, r.level_measure,
                     r.level_mu, r.level_energy})
      row.push_back(io::format_double(v));
    row.push_back(std::to_string(r.outer_iterations));
    for (Eigen::Index k = 0; k < K; ++k)
      row.push_back(r.ok ? io::format_double(r.kappa[k]) : "nan");
    for (int i = 0; i < sweep.m; ++i) row.push_back(r.ok ? io::format_double(r.u[i]) : "nan");
    table.add_row(row);
  }
  files.csv = dir / (stem + ".csv");
  table.write(files.csv);

  const std::pair<const char*, double SweepRecord::*> series[] = {
      {"objective_gap", &SweepRecord::objective_gap}, {"state_gap", &SweepRecord::state_gap},
      {"kappa_l1_gap", &SweepRecord::kappa_l1_gap},   {"tv_gap", &SweepRecord::tv_gap},
      {"energy_gap", &SweepRecord::energy_gap},       {"level_measure", &SweepRecord::level_measure}};
  for (const auto& [name, field] : series) {
    std::vector<double> xs, ys;
    for (std::size_t idx = 0; idx < sweep.records.size(); ++idx) {
      if (!sweep.records[idx].ok) continue;
      xs.push_back(static_cast<double>(idx + 1));
      ys.push_back(sweep.records[idx].*field);
    }
    const auto path = dir / (stem + "_" + name + ".dat");
    io::write_plot_data(path, xs, ys, std::string("k ") + name + " (log-scale y)");
    files.plots.push_back(path);
  }

  nlohmann::json summary;
  summary["stem"] = stem;
  summary["p"] = sweep.p;
  summary["s"] = sweep.s;
  summary["m"] = sweep.m;
  summary["schedule"] = {{"epsilon", sweep.schedule.epsilon},
                         {"n", sweep.schedule.n},
                         {"t", sweep.schedule.t},
                         {"hash", sweep.schedule.hash()}};
  summary["reference"] = {{"source", sweep.reference.source},
                          {"objective", sweep.reference.objective},
                          {"tv", sweep.reference.tv},
                          {"p_energy", sweep.reference.p_energy},
                          {"kappa", io::to_json(sweep.reference.kappa)},
                          {"u", io::to_json(sweep.reference.u)}};
  nlohmann::json verdicts = nlohmann::json::array();
  for (const auto& v : sweep.verdicts)
    verdicts.push_back({{"name", v.name}, {"pass", v.pass}, {"detail", v.detail}});
  summary["verdicts"] = verdicts;
  summary["all_pass"] = sweep.all_pass();
  files.verdicts = dir / (stem + "_verdicts.json");
  io::write_json(files.verdicts, summary);
  return files;
}

}  // namespace fpl
