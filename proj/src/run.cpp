#include "fpl/run.hpp"

#include <algorithm>

#include <Eigen/Core>

#include "fpl/invariants.hpp"
#include "fpl/io.hpp"

#ifndef FPL_VERSION
#define FPL_VERSION "0.0.0"
#endif

namespace fpl {
namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

json solve_report_json(const SolveReport& r) {
  json j;
  j["iterations"] = r.iterations;
  j["final_residual"] = r.final_residual;
  j["energy_value"] = r.energy_value;
  j["quasi_norm_value"] = r.quasi_norm_value;
  j["hessian_floor"] = r.hessian_floor;
  j["u"] = io::to_json(r.u);
  if (r.minty_margin) j["minty_margin"] = *r.minty_margin;
  if (r.apriori) {
    const AprioriFlags& a = *r.apriori;
    j["apriori"] = {{"energy_identity", a.energy_identity},
                    {"energy_identity_gap", a.energy_identity_gap},
                    {"quasi_norm_bound", a.quasi_norm_bound},
                    {"quasi_norm_slack", a.quasi_norm_slack},
                    {"scaling_law", a.scaling_law},
                    {"scaling_slope", a.scaling_slope},
                    {"scaling_limit", a.scaling_limit}};
  }
  return j;
}

json optimize_report_json(const OptimizeReport& r) {
  return {{"kappa", io::to_json(r.kappa_star.values)},
          {"dofs", io::to_json(r.dofs)},
          {"u", io::to_json(r.u_star)},
          {"objective", r.objective_value},
          {"tracking", r.tracking_value},
          {"tv", r.tv_value},
          {"outer_iterations", r.outer_iterations},
          {"inner_solves", r.inner_solves},
          {"inner_iterations", r.inner_iterations},
          {"stop_reason", r.stop_reason}};
}

json verdicts_json(const std::vector<Verdict>& verdicts) {
  json arr = json::array();
  for (const auto& v : verdicts) arr.push_back({{"name", v.name}, {"pass", v.pass}, {"detail", v.detail}});
  return arr;
}

class Writer {
 public:
  Writer(const RunConfig& cfg, RunOutcome& out) : cfg_(cfg), out_(out) {}

  void csv(const std::string& name, const io::CsvTable& table) {
    if (!cfg_.output.csv) return;
    const fs::path path = cfg_.output.directory / name;
    table.write(path);
    out_.files.push_back(path);
  }

  void state(const Discretization& d, const StateVector& u) {
    io::CsvTable t({"x", "u"});
    for (int i = 0; i < d.m(); ++i) t.add_row(std::vector<double>{d.grid.x(i + 1), u[i]});
    csv("state.csv", t);
  }

  void control(const Discretization& d, const Eigen::VectorXd& kappa, const Eigen::VectorXd& lo,
               const Eigen::VectorXd& hi) {
    io::CsvTable t({"offset", "kappa", "xi1", "xi2"});
    for (int k = 0; k < d.num_offsets(); ++k)
      t.add_row(std::vector<double>{d.diff.offsets[k], kappa[k], lo[k], hi[k]});
    csv("control.csv", t);
  }

  void history(const std::vector<OuterRecord>& records) {
    io::CsvTable t({"outer_iter", "objective", "tracking", "tv", "step"});
    for (const auto& r : records)
      t.add_row(std::vector<std::string>{std::to_string(r.iteration), io::format_double(r.objective),
                                         io::format_double(r.tracking), io::format_double(r.tv),
                                         io::format_double(r.step)});
    csv("history.csv", t);
  }

  void iterations(const std::vector<IterationRecord>& records) {
    io::CsvTable t({"iteration", "residual", "energy"});
    for (const auto& r : records)
      t.add_row(std::vector<std::string>{std::to_string(r.iteration), io::format_double(r.residual),
                                         io::format_double(r.energy)});
    csv("iterations.csv", t);
  }

 private:
  const RunConfig& cfg_;
  RunOutcome& out_;
};

json run_solve_state(const RunConfig& cfg, Writer& w) {
  const Discretization d = cfg.discretization();
  const Eigen::VectorXd f = cfg.force(d);
  const Eigen::VectorXd kappa = cfg.kappa(d);
  const SolveOptions opts = cfg.solve_options();
  std::optional<RegParams> rp;
  if (cfg.regularization.regularized_state)
    rp = RegParams{cfg.regularization.epsilon, cfg.regularization.n};
  SolveReport r = rp ? solve_state_regularized(d, f, kappa, *rp, opts)
                     : solve_state(d, f, kappa, opts);
  r.minty_margin = minty_margin(d, r.u, f, kappa, rp, cfg.solver.minty_probes, cfg.solver.seed);
  r.apriori = apriori_report(d, r, f, kappa, rp, opts);
  w.state(d, r.u);
  w.iterations(r.history);
  json j = solve_report_json(r);
  j["regularized"] = rp.has_value();
  return j;
}

json run_optimize(const RunConfig& cfg, Writer& w, bool reference) {
  const ControlProblem cp = cfg.control_problem();
  const OptimizeReport r = reference ? solve_ocp_reference(cp) : solve_rocp(cp);
  w.state(cp.disc, r.u_star);
  w.control(cp.disc, r.kappa_star.values, cp.lo, cp.hi);
  w.history(r.objective_history);
  json j = optimize_report_json(r);
  j["regularized"] = !reference;
  return j;
}

json run_sweep_command(const RunConfig& cfg, RunOutcome& out) {
  const ControlProblem cp = cfg.control_problem();
  SweepOptions options;
  options.objective_tolerance = cfg.solver.objective_tolerance;
  options.level_set_tolerance = cfg.solver.level_set_tolerance;
  const SweepResult sweep = run_sweep(cp, cfg.schedule(), options);
  const ReportFiles files = emit_convergence_report(sweep, cfg.output.directory);
  out.files.push_back(files.csv);
  out.files.push_back(files.verdicts);
  if (cfg.output.plots)
    out.files.insert(out.files.end(), files.plots.begin(), files.plots.end());
  else
    for (const auto& p : files.plots) fs::remove(p);

  json records = json::array();
  for (const auto& r : sweep.records)
    records.push_back({{"epsilon", r.epsilon},
                       {"n", r.n},
                       {"ok", r.ok},
                       {"error", r.error},
                       {"objective", r.objective},
                       {"objective_gap", r.objective_gap}});
  return {{"stem", sweep_stem(sweep)},
          {"schedule_hash", sweep.schedule.hash()},
          {"t", sweep.schedule.t},
          {"reference", {{"source", sweep.reference.source},
                         {"objective", sweep.reference.objective},
                         {"kappa", io::to_json(sweep.reference.kappa)}}},
          {"records", records},
          {"verdicts", verdicts_json(sweep.verdicts)},
          {"all_pass", sweep.all_pass()}};
}

}  // namespace

std::string library_version() { return FPL_VERSION; }

std::string eigen_version() {
  return std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
         std::to_string(EIGEN_MINOR_VERSION);
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e)) return kExitConfig;
  if (dynamic_cast<const NonConvergence*>(&e)) return kExitNonConvergence;
  return kExitRuntime;
}

json error_document(const std::exception& e) {
  json j;
  j["status"] = "error";
  j["exit_code"] = exit_code_for(e);
  j["message"] = e.what();
  if (const auto* ce = dynamic_cast<const ConfigErrors*>(&e)) {
    j["kind"] = "config";
    j["violations"] = ce->messages();
  } else if (dynamic_cast<const ConfigError*>(&e)) {
    j["kind"] = "config";
    j["violations"] = json::array({e.what()});
  } else if (const auto* nc = dynamic_cast<const NonConvergence*>(&e)) {
    j["kind"] = "nonconvergence";
    j["iterations"] = nc->iterations();
    j["residual"] = nc->residual();
  } else {
    j["kind"] = "runtime";
  }
  return j;
}

RunOutcome run(const std::string& subcommand, const RunConfig& cfg) {
  RunOutcome out;
  try {
    if (std::find(subcommands().begin(), subcommands().end(), subcommand) == subcommands().end())
      throw ConfigError("unknown subcommand '" + subcommand + "'");
    cfg.validate();
    Writer w(cfg, out);
    json results;
    if (subcommand == "solve-state") {
      results = run_solve_state(cfg, w);
    } else if (subcommand == "solve-rocp") {
      results = run_optimize(cfg, w, false);
    } else if (subcommand == "solve-ocp") {
      results = run_optimize(cfg, w, true);
    } else if (subcommand == "sweep") {
      results = run_sweep_command(cfg, out);
    } else {
      const std::vector<Verdict> checks = check_invariants(cfg);
      const bool pass = std::all_of(checks.begin(), checks.end(), [](const Verdict& v) { return v.pass; });
      results = {{"checks", verdicts_json(checks)}, {"all_pass", pass}};
      if (!pass) out.exit_code = kExitCheckFailed;
    }
    json& m = out.manifest;
    m["status"] = "ok";
    m["subcommand"] = subcommand;
    m["version"] = library_version();
    m["eigen_version"] = eigen_version();
    m["seed"] = cfg.solver.seed;
    m["delta"] = kBlendOvershoot;
    m["config"] = config_to_json(cfg);
    m["results"] = results;
    json files = json::array();
    for (const auto& p : out.files) files.push_back(p.filename().string());
    m["files"] = files;
    const fs::path path = cfg.output.directory / "manifest.json";
    io::write_json(path, m);
    out.files.push_back(path);
  } catch (const std::exception& e) {
    out.exit_code = exit_code_for(e);
    out.manifest = error_document(e);
    out.manifest["subcommand"] = subcommand;
    try {
      const fs::path path = cfg.output.directory / "error.json";
      io::write_json(path, out.manifest);
      out.files.push_back(path);
    } catch (const std::exception&) {
      // The error document is still returned to the caller.
    }
  }
  return out;
}

}  // namespace fpl
