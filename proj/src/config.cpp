#include "fpl/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <toml.hpp>

#include "fpl/expression.hpp"
#include "fpl/io.hpp"

namespace fpl {
namespace {

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& s : items) out += (out.empty() ? "" : "; ") + s;
  return out;
}

using json = nlohmann::json;

// Reads typed values out of a JSON object and records every problem instead
// of throwing on the first.
class Reader {
 public:
  explicit Reader(std::vector<std::string>& errors) : errors_(errors) {}

  const json* block(const json& root, const std::string& name,
                    const std::set<std::string>& allowed) {
    if (!root.contains(name)) return nullptr;
    const json& b = root.at(name);
    if (!b.is_object()) {
      errors_.push_back("[" + name + "] must be a table");
      return nullptr;
    }
    for (const auto& [key, value] : b.items())
      if (!allowed.count(key)) errors_.push_back("unknown key " + name + "." + key);
    return &b;
  }

  template <typename T>
  void get(const json* b, const std::string& where, const std::string& key, T& out,
           bool required = false) {
    if (!b || !b->contains(key)) {
      if (required) errors_.push_back("missing required key " + where + "." + key);
      return;
    }
    const json& v = b->at(key);
    if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) return type_error(where, key, "a boolean");
      out = v.get<bool>();
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) return type_error(where, key, "a string");
      out = v.get<std::string>();
    } else if constexpr (std::is_same_v<T, std::uint64_t>) {
      if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() &&
                                     v.get<long long>() < 0))
        return type_error(where, key, "a non-negative integer");
      out = v.get<std::uint64_t>();
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) return type_error(where, key, "an integer");
      out = v.get<T>();
    } else {
      if (!v.is_number()) return type_error(where, key, "a number");
      out = v.get<T>();
    }
  }

  template <typename T>
  void get_optional(const json* b, const std::string& where, const std::string& key,
                    std::optional<T>& out) {
    if (!b || !b->contains(key)) return;
    T value{};
    const std::size_t before = errors_.size();
    get(b, where, key, value);
    if (errors_.size() == before) out = value;
  }

  // A field is given either inline under `key` or as a file under `key_csv`.
  void field(const json* b, const std::string& key, FieldSource& out, bool required,
             const std::filesystem::path& base_dir) {
    const bool has_inline = b && b->contains(key);
    const bool has_csv = b && b->contains(key + "_csv");
    if (has_inline && has_csv) {
      errors_.push_back("data." + key + " and data." + key + "_csv are mutually exclusive");
      return;
    }
    if (!has_inline && !has_csv) {
      if (required) errors_.push_back("missing required key data." + key);
      return;
    }
    if (has_csv) {
      const json& v = b->at(key + "_csv");
      if (!v.is_string()) return type_error("data", key + "_csv", "a file path");
      std::filesystem::path path = v.get<std::string>();
      if (path.is_relative() && !base_dir.empty()) path = base_dir / path;
      if (!std::filesystem::exists(path)) {
        errors_.push_back("data." + key + "_csv: file not found: " + path.string());
        return;
      }
      try {
        out.kind = FieldSource::Kind::Csv;
        out.path = path;
        out.values = io::read_csv_column(path);
      } catch (const std::exception& e) {
        errors_.push_back("data." + key + "_csv: " + e.what());
      }
      return;
    }
    const json& v = b->at(key);
    if (v.is_number()) {
      out = FieldSource::constant(v.get<double>());
    } else if (v.is_string()) {
      try {
        Expression probe(v.get<std::string>());
        out = FieldSource::expr(v.get<std::string>());
      } catch (const std::exception& e) {
        errors_.push_back("data." + key + ": " + e.what());
      }
    } else if (v.is_array()) {
      out.kind = FieldSource::Kind::Array;
      out.values.clear();
      for (const auto& x : v) {
        if (!x.is_number()) return type_error("data", key, "an array of numbers");
        out.values.push_back(x.get<double>());
      }
    } else {
      type_error("data", key, "a number, expression string or array");
    }
  }

 private:
  std::vector<std::string>& errors_;

  void type_error(const std::string& where, const std::string& key, const std::string& what) {
    errors_.push_back(where + "." + key + " must be " + what);
  }
};

json toml_to_json(const toml::node& node) {
  if (const auto* t = node.as_table()) {
    json out = json::object();
    for (const auto& [k, v] : *t) out[std::string(k.str())] = toml_to_json(v);
    return out;
  }
  if (const auto* a = node.as_array()) {
    json out = json::array();
    for (const auto& v : *a) out.push_back(toml_to_json(v));
    return out;
  }
  if (const auto* v = node.as_string()) return v->get();
  if (const auto* v = node.as_integer()) return v->get();
  if (const auto* v = node.as_floating_point()) return v->get();
  if (const auto* v = node.as_boolean()) return v->get();
  throw ConfigError("unsupported TOML value (dates and times are not configuration values)");
}

std::vector<double> interior_points(const Grid& g) {
  std::vector<double> x;
  for (int i = 1; i <= g.m; ++i) x.push_back(g.x(i));
  return x;
}

std::vector<double> offset_points(const DifferenceGrid& diff) {
  return std::vector<double>(diff.offsets.begin(), diff.offsets.end());
}

}  // namespace

ConfigErrors::ConfigErrors(std::vector<std::string> messages)
    : ConfigError(join(messages)), messages_(std::move(messages)) {}

FieldSource FieldSource::constant(double v) {
  FieldSource f;
  f.kind = Kind::Number;
  f.number = v;
  return f;
}

FieldSource FieldSource::expr(std::string text) {
  FieldSource f;
  f.kind = Kind::Expression;
  f.expression = std::move(text);
  return f;
}

Eigen::VectorXd FieldSource::sample(const std::vector<double>& points,
                                    const std::string& name) const {
  const Eigen::Index size = static_cast<Eigen::Index>(points.size());
  switch (kind) {
    case Kind::Number: return Eigen::VectorXd::Constant(size, number);
    case Kind::Expression: {
      const Expression e(expression);
      Eigen::VectorXd out(size);
      for (Eigen::Index i = 0; i < size; ++i) {
        out[i] = e(points[static_cast<std::size_t>(i)]);
        if (!std::isfinite(out[i]))
          throw ConfigError(name + " is not finite at x = " + io::format_double(points[i]));
      }
      return out;
    }
    case Kind::Array:
    case Kind::Csv:
      if (values.size() != points.size())
        throw ConfigError(name + " has " + std::to_string(values.size()) + " values, expected " +
                          std::to_string(points.size()));
      return Eigen::Map<const Eigen::VectorXd>(values.data(), size);
  }
  return {};
}

nlohmann::json FieldSource::to_json() const {
  switch (kind) {
    case Kind::Number: return number;
    case Kind::Expression: return expression;
    default: return values;
  }
}

RunConfig RunConfig::defaults() {
  RunConfig cfg;
  cfg.problem.m = 8;
  cfg.problem.s = 0.75;
  cfg.problem.p = 3.0;
  cfg.problem.control_blocks = 3;
  cfg.data.f = FieldSource::constant(10.0);
  cfg.data.xi = FieldSource::expr("2*sin(pi*x)");
  return cfg;
}

void RunConfig::validate() const {
  std::vector<std::string> errors;
  const ProblemConfig& pr = problem;
  if (pr.m < 1) errors.push_back("problem.m: m must be >= 1");
  if (!(pr.b > pr.a)) errors.push_back("problem: b must be greater than a");
  if (pr.variant == Variant::Regional && !(pr.s > 0.5 && pr.s < 1.0))
    errors.push_back("problem.s: regional variant requires 1/2<s<1");
  if (pr.variant == Variant::Full && !(pr.s > 0.0 && pr.s < 1.0))
    errors.push_back("problem.s: full variant requires 0<s<1");
  if (!(pr.p >= 2.0) || !std::isfinite(pr.p)) errors.push_back("problem.p: p must be >= 2");
  if (!(pr.c_norm > 0.0)) errors.push_back("problem.c_norm must be > 0");
  if (pr.variant == Variant::Full) {
    if (!pr.r_trunc)
      errors.push_back("problem.r_trunc: truncation radius required for the full variant");
    else if (!(*pr.r_trunc > pr.b - pr.a))
      errors.push_back("problem.r_trunc: truncation radius must exceed b - a");
  }
  if (pr.kappa_far && !(*pr.kappa_far > 0.0)) errors.push_back("problem.kappa_far must be > 0");
  if (pr.control_blocks < 0) errors.push_back("problem.control_blocks must be >= 0");

  const RegularizationConfig& rg = regularization;
  if (!(rg.epsilon > 0.0)) errors.push_back("regularization.epsilon must be > 0");
  if (rg.n < 1) errors.push_back("regularization.n must be >= 1");
  const ScheduleConfig& sc = rg.schedule;
  if (sc.epsilon.empty() != sc.n.empty())
    errors.push_back("regularization.schedule: epsilon and n lists must be given together");
  if (sc.epsilon.empty()) {
    if (sc.points < 1) errors.push_back("regularization.schedule.points must be >= 1");
    if (!(sc.eps_base > 1.0)) errors.push_back("regularization.schedule.eps_base must be > 1");
    if (sc.n_base < 2) errors.push_back("regularization.schedule.n_base must be >= 2");
  }

  const SolverConfig& so = solver;
  if (!(so.tol_residual > 0.0)) errors.push_back("solver.tol_residual must be > 0");
  if (!(so.inner_tol > 0.0)) errors.push_back("solver.inner_tol must be > 0");
  if (so.max_iter < 1) errors.push_back("solver.max_iter must be >= 1");
  if (so.minty_probes < 0) errors.push_back("solver.minty_probes must be >= 0");
  if (!(so.step > 0.0)) errors.push_back("solver.step must be > 0");
  if (!(so.fd_step > 0.0)) errors.push_back("solver.fd_step must be > 0");
  if (!(so.outer_tol > 0.0)) errors.push_back("solver.outer_tol must be > 0");
  if (so.max_outer < 0) errors.push_back("solver.max_outer must be >= 0");
  if (!(so.objective_tolerance > 0.0)) errors.push_back("solver.objective_tolerance must be > 0");
  if (!(so.level_set_tolerance > 0.0)) errors.push_back("solver.level_set_tolerance must be > 0");
  if (output.directory.empty()) errors.push_back("output.directory must not be empty");

  // Data-dependent checks need a well-formed grid.
  if (errors.empty()) {
    try {
      const Discretization d = discretization();
      force(d);
      target(d);
      if (!(kappa(d).array() > 0.0).all()) throw ConfigError("data.kappa must be > 0");
      const ControlProblem cp = control_problem();
      cp.validate();
      // No admissible t exists for s <= 1/2; only the sweep needs one.
      if (pr.s > 0.5 || regularization.schedule.t) schedule().validate(pr.s, pr.p);
    } catch (const std::exception& e) {
      errors.push_back(e.what());
    }
  }
  if (!errors.empty()) throw ConfigErrors(errors);
}

Discretization RunConfig::discretization() const {
  const Grid g = build_grid(problem.a, problem.b, problem.m);
  FracParams fp{problem.s, problem.p, problem.c_norm, problem.variant};
  return make_discretization(g, fp, problem.r_trunc, problem.kappa_far);
}

Eigen::VectorXd RunConfig::force(const Discretization& d) const {
  return data.f.sample(interior_points(d.grid), "data.f");
}

Eigen::VectorXd RunConfig::target(const Discretization& d) const {
  return data.xi.sample(interior_points(d.grid), "data.xi");
}

Eigen::VectorXd RunConfig::kappa(const Discretization& d) const {
  return data.kappa.sample(offset_points(d.diff), "data.kappa");
}

SolveOptions RunConfig::solve_options() const {
  SolveOptions o;
  o.tol_residual = solver.tol_residual;
  o.max_iter = solver.max_iter;
  return o;
}

ControlProblem RunConfig::control_problem() const {
  ControlProblem cp;
  cp.disc = discretization();
  const auto offsets = offset_points(cp.disc.diff);
  cp.f = force(cp.disc);
  cp.xi = target(cp.disc);
  cp.lo = data.xi1.sample(offsets, "data.xi1");
  cp.hi = data.xi2.sample(offsets, "data.xi2");
  cp.alpha = data.alpha.value_or(cp.lo.size() ? cp.lo.minCoeff() : 0.0);
  cp.rp = RegParams{regularization.epsilon, regularization.n};
  cp.solve = solve_options();
  cp.solve.tol_residual = solver.inner_tol;
  cp.opt.step = solver.step;
  cp.opt.fd_step = solver.fd_step;
  cp.opt.tol = solver.outer_tol;
  cp.opt.max_outer = solver.max_outer;
  cp.control_blocks = problem.control_blocks;
  return cp;
}

Schedule RunConfig::schedule() const {
  const ScheduleConfig& sc = regularization.schedule;
  const double t = sc.t.value_or(Schedule::default_t(problem.s, problem.p));
  if (sc.epsilon.empty()) return Schedule::geometric(sc.points, sc.eps_base, sc.n_base, t);
  Schedule s;
  s.epsilon = sc.epsilon;
  s.n = sc.n;
  s.t = t;
  return s;
}

RunConfig config_from_json(const nlohmann::json& input, const std::filesystem::path& base_dir) {
  const json& j = (input.is_object() && input.contains("config") && input.at("config").is_object())
                      ? input.at("config")
                      : input;
  if (!j.is_object()) throw ConfigErrors({"configuration must be a table"});
  std::vector<std::string> errors;
  Reader r(errors);
  static const std::set<std::string> top = {"problem", "data", "regularization", "solver",
                                            "output"};
  for (const auto& [key, value] : j.items())
    if (!top.count(key)) errors.push_back("unknown table [" + key + "]");

  RunConfig cfg;
  const json* pb = r.block(j, "problem",
                           {"a", "b", "m", "s", "p", "variant", "r_trunc", "c_norm", "kappa_far",
                            "control_blocks"});
  if (!pb) errors.push_back("missing required table [problem]");
  r.get(pb, "problem", "a", cfg.problem.a);
  r.get(pb, "problem", "b", cfg.problem.b);
  if (pb) {
    r.get(pb, "problem", "m", cfg.problem.m, true);
    r.get(pb, "problem", "s", cfg.problem.s, true);
    r.get(pb, "problem", "p", cfg.problem.p, true);
  }
  std::string variant = "regional";
  r.get(pb, "problem", "variant", variant);
  try {
    cfg.problem.variant = variant_from_string(variant);
  } catch (const std::exception& e) {
    errors.push_back(std::string("problem.variant: ") + e.what());
  }
  r.get_optional(pb, "problem", "r_trunc", cfg.problem.r_trunc);
  r.get(pb, "problem", "c_norm", cfg.problem.c_norm);
  r.get_optional(pb, "problem", "kappa_far", cfg.problem.kappa_far);
  r.get(pb, "problem", "control_blocks", cfg.problem.control_blocks);

  const json* db = r.block(j, "data",
                           {"f", "xi", "xi1", "xi2", "alpha", "kappa", "f_csv", "xi_csv",
                            "xi1_csv", "xi2_csv", "kappa_csv"});
  if (!db) errors.push_back("missing required table [data]");
  if (db) r.field(db, "f", cfg.data.f, true, base_dir);
  r.field(db, "xi", cfg.data.xi, false, base_dir);
  r.field(db, "xi1", cfg.data.xi1, false, base_dir);
  r.field(db, "xi2", cfg.data.xi2, false, base_dir);
  r.field(db, "kappa", cfg.data.kappa, false, base_dir);
  r.get_optional(db, "data", "alpha", cfg.data.alpha);

  const json* rb =
      r.block(j, "regularization", {"epsilon", "n", "regularized_state", "schedule"});
  r.get(rb, "regularization", "epsilon", cfg.regularization.epsilon);
  r.get(rb, "regularization", "n", cfg.regularization.n);
  r.get(rb, "regularization", "regularized_state", cfg.regularization.regularized_state);
  if (rb) {
    const json* sb = r.block(*rb, "schedule", {"points", "eps_base", "n_base", "epsilon", "n", "t"});
    ScheduleConfig& sc = cfg.regularization.schedule;
    r.get(sb, "regularization.schedule", "points", sc.points);
    r.get(sb, "regularization.schedule", "eps_base", sc.eps_base);
    r.get(sb, "regularization.schedule", "n_base", sc.n_base);
    r.get_optional(sb, "regularization.schedule", "t", sc.t);
    if (sb && sb->contains("epsilon")) {
      const json& v = sb->at("epsilon");
      if (!v.is_array() || !std::all_of(v.begin(), v.end(), [](const json& x) { return x.is_number(); }))
        errors.push_back("regularization.schedule.epsilon must be an array of numbers");
      else
        sc.epsilon = v.get<std::vector<double>>();
    }
    if (sb && sb->contains("n")) {
      const json& v = sb->at("n");
      if (!v.is_array() ||
          !std::all_of(v.begin(), v.end(), [](const json& x) { return x.is_number_integer(); }))
        errors.push_back("regularization.schedule.n must be an array of integers");
      else
        sc.n = v.get<std::vector<int>>();
    }
  }

  const json* sb = r.block(j, "solver",
                           {"tol_residual", "max_iter", "inner_tol", "minty_probes", "seed", "step",
                            "fd_step", "outer_tol", "max_outer", "objective_tolerance",
                            "level_set_tolerance"});
  SolverConfig& so = cfg.solver;
  r.get(sb, "solver", "tol_residual", so.tol_residual);
  r.get(sb, "solver", "max_iter", so.max_iter);
  r.get(sb, "solver", "inner_tol", so.inner_tol);
  r.get(sb, "solver", "minty_probes", so.minty_probes);
  r.get(sb, "solver", "seed", so.seed);
  r.get(sb, "solver", "step", so.step);
  r.get(sb, "solver", "fd_step", so.fd_step);
  r.get(sb, "solver", "outer_tol", so.outer_tol);
  r.get(sb, "solver", "max_outer", so.max_outer);
  r.get(sb, "solver", "objective_tolerance", so.objective_tolerance);
  r.get(sb, "solver", "level_set_tolerance", so.level_set_tolerance);

  const json* ob = r.block(j, "output", {"directory", "csv", "plots"});
  std::string dir = cfg.output.directory.string();
  r.get(ob, "output", "directory", dir);
  cfg.output.directory = dir;
  r.get(ob, "output", "csv", cfg.output.csv);
  r.get(ob, "output", "plots", cfg.output.plots);

  if (!errors.empty()) throw ConfigErrors(errors);
  cfg.validate();
  return cfg;
}

RunConfig parse_config_toml(const std::string& text, const std::filesystem::path& base_dir) {
  toml::table table;
  try {
    table = toml::parse(text);
  } catch (const toml::parse_error& e) {
    std::ostringstream msg;
    msg << "TOML syntax error: " << e.description() << " (line " << e.source().begin.line
        << ", column " << e.source().begin.column << ")";
    throw ConfigErrors({msg.str()});
  }
  return config_from_json(toml_to_json(table), base_dir);
}

RunConfig parse_config(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigErrors({"cannot read configuration file " + path.string()});
  std::ostringstream buf;
  buf << is.rdbuf();
  const std::filesystem::path base = path.parent_path();
  if (path.extension() == ".json") {
    json j;
    try {
      j = json::parse(buf.str());
    } catch (const json::parse_error& e) {
      throw ConfigErrors({std::string("JSON syntax error: ") + e.what()});
    }
    return config_from_json(j, base);
  }
  return parse_config_toml(buf.str(), base);
}

nlohmann::json config_to_json(const RunConfig& cfg) {
  json j;
  json& p = j["problem"];
  p["a"] = cfg.problem.a;
  p["b"] = cfg.problem.b;
  p["m"] = cfg.problem.m;
  p["s"] = cfg.problem.s;
  p["p"] = cfg.problem.p;
  p["variant"] = to_string(cfg.problem.variant);
  if (cfg.problem.r_trunc) p["r_trunc"] = *cfg.problem.r_trunc;
  p["c_norm"] = cfg.problem.c_norm;
  if (cfg.problem.kappa_far) p["kappa_far"] = *cfg.problem.kappa_far;
  p["control_blocks"] = cfg.problem.control_blocks;

  json& d = j["data"];
  d["f"] = cfg.data.f.to_json();
  d["xi"] = cfg.data.xi.to_json();
  d["xi1"] = cfg.data.xi1.to_json();
  d["xi2"] = cfg.data.xi2.to_json();
  d["kappa"] = cfg.data.kappa.to_json();
  if (cfg.data.alpha) d["alpha"] = *cfg.data.alpha;

  json& r = j["regularization"];
  r["epsilon"] = cfg.regularization.epsilon;
  r["n"] = cfg.regularization.n;
  r["regularized_state"] = cfg.regularization.regularized_state;
  const ScheduleConfig& sc = cfg.regularization.schedule;
  json& s = r["schedule"];
  s["points"] = sc.points;
  s["eps_base"] = sc.eps_base;
  s["n_base"] = sc.n_base;
  if (!sc.epsilon.empty()) {
    s["epsilon"] = sc.epsilon;
    s["n"] = sc.n;
  }
  if (sc.t) s["t"] = *sc.t;

  const SolverConfig& so = cfg.solver;
  j["solver"] = {{"tol_residual", so.tol_residual},
                 {"max_iter", so.max_iter},
                 {"inner_tol", so.inner_tol},
                 {"minty_probes", so.minty_probes},
                 {"seed", so.seed},
                 {"step", so.step},
                 {"fd_step", so.fd_step},
                 {"outer_tol", so.outer_tol},
                 {"max_outer", so.max_outer},
                 {"objective_tolerance", so.objective_tolerance},
                 {"level_set_tolerance", so.level_set_tolerance}};
  j["output"] = {{"directory", cfg.output.directory.string()},
                 {"csv", cfg.output.csv},
                 {"plots", cfg.output.plots}};
  return j;
}

}  // namespace fpl
