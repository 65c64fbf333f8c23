#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "resdet/cli.hpp"

namespace resdet::cli {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json density_json(const Report& r) {
  json out = json::array();
  for (std::size_t i = 0; i < r.density.size(); ++i) {
    json x = json::array();
    for (int k = 0; k < r.n; ++k) x.push_back(r.density_x[i][k]);
    out.push_back({{"x", x}, {"value", r.density[i].real()}, {"value_im", r.density[i].imag()}});
  }
  return out;
}

json params_json(const RunConfig& cfg, const TaskSpec& task, const NumericSettings& s, const Report* r) {
  json p = {{"n", cfg.n},
            {"sphereRes", s.sphere_resolution(cfg.n)},
            {"contourNodes", s.contour_nodes},
            {"xGrid", s.x_grid},
            {"theta", s.theta},
            {"thetaDegrees", s.theta * 180.0 / kPi},
            {"jetOrder", cfg.jet_order.value_or(cfg.n)},
            {"seed", cfg.seed},
            {"verify", cfg.verify},
            {"crossCheck", s.cross_check},
            {"estimateError", s.estimate_error},
            {"serial", s.mode == ExecutionMode::Serial}};
  if (task.kind == "zeta0" || task.kind == "zeta_poly") p["h0"] = task.h0;
  if (task.kind == "det0") p["perRank"] = task.per_rank;
  if (task.kind == "zeta_poly") {
    json sh = json::array();
    for (const auto& b : task.shifts) sh.push_back(b.empty() ? json(nullptr) : json(b));
    p["shifts"] = sh;
    p["tValues"] = task.t_values;
  }
  if (!task.op.empty()) p["operatorDescription"] = cfg.operators.at(task.op).describe();
  if (r) {
    p["sphereNodes"] = r->sphere_nodes;
    p["xCollapsed"] = r->x_collapsed;
  }
  return p;
}

json base_report(const RunConfig& cfg, const TaskSpec& task) {
  return {{"task", task.name},
          {"kind", task.kind},
          {"operator", task.op},
          {"software_version", kSoftwareVersion},
          {"config_hash", cfg.hash}};
}

std::vector<std::string> csv_row(const TaskSpec& task, const std::string& t, cplx v, const std::optional<double>& err) {
  return {task.name, task.op, t, fmt(v.real()), fmt(v.imag()), err ? fmt(*err) : ""};
}

}  // namespace

void verify_resolvent_identity(const ClassicalSymbol& a, double theta, unsigned long long seed) {
  const int S = a.n() + 1;
  for (const Point& p : sample_points(a.n(), 8, seed)) {
    const CMatrix a0 = a.slot_value(p, 0);
    Eigen::ComplexEigenSolver<CMatrix> es(a0, false);
    double radius = 1.0;
    for (int i = 0; i < es.eigenvalues().size(); ++i) radius = std::max(radius, std::abs(es.eigenvalues()(i)));
    const cplx lambda = 2.0 * radius * std::polar(1.0, theta);
    SymbolJetStack shifted = a.stack(p, S);
    shifted[0].add_identity(-lambda);
    const SymbolJetStack r = resolvent_slots(a, lambda, p, S);
    const SymbolJetStack product = compose_stacks(shifted, r);
    const double err = max_difference(product, identity_stack(p, S, S - 1, a.dim()));
    if (!(err <= 1e-8 * radius))
      throw Error(ErrorKind::CrossCheckFailed, "resolvent identity violated by " + fmt(err) + " at a sample point");
  }
}

TaskResult run_task(const RunConfig& cfg, const TaskSpec& task) {
  NumericSettings s = cfg.numerics;
  s.theta = task.theta;
  if (cfg.verify) s.cross_check = true;
  TaskResult out;
  out.report = base_report(cfg, task);

  if (task.kind == "selfcheck") {
    const auto checks = run_selfcheck(s, cfg.selfcheck_tolerance, cfg.seed);
    json list = json::array();
    int passed = 0;
    for (const auto& c : checks) {
      passed += c.pass ? 1 : 0;
      list.push_back({{"name", c.name}, {"pass", c.pass}, {"error", c.error}, {"tolerance", c.tolerance}, {"detail", c.detail}});
    }
    const int failed = static_cast<int>(checks.size()) - passed;
    out.report["value_re"] = passed;
    out.report["value_im"] = 0.0;
    out.report["passed"] = passed;
    out.report["failed"] = failed;
    out.report["checks"] = list;
    out.report["density"] = json::array();
    out.report["quad_error"] = nullptr;
    out.report["params"] = params_json(cfg, task, s, nullptr);
    out.csv_rows.push_back(csv_row(task, "", cplx(passed, 0.0), std::nullopt));
    return out;
  }

  const ClassicalSymbol& a = cfg.operators.at(task.op);
  if (cfg.verify) verify_resolvent_identity(a, s.theta, cfg.seed);

  Report r;
  if (task.kind == "res") {
    r = residue_trace(a, s);
  } else if (task.kind == "detres") {
    r = log_det_res(a, s);
  } else if (task.kind == "det0") {
    r = log_det_zero(a, s, task.per_rank);
  } else if (task.kind == "zeta0") {
    r = zeta_at_zero(a, task.h0, s);
  } else if (task.kind == "detres_one_plus") {
    r = log_det_res_one_plus(a, s);
  } else if (task.kind == "index") {
    r = index_from_res(a, s);
  } else if (task.kind == "zeta_poly") {
    std::vector<ClassicalSymbol> shifts;
    for (const auto& name : task.shifts) shifts.push_back(name.empty() ? ClassicalSymbol() : cfg.operators.at(name));
    r = zeta_shift_polynomial(a, shifts, task.h0, s);
  } else {
    throw Error(ErrorKind::ConfigSchemaError, "unknown task kind " + task.kind);
  }

  json& j = out.report;
  j["value_re"] = r.value.real();
  j["value_im"] = r.value.imag();
  if (r.exp_value) {
    j["exp_value_re"] = r.exp_value->real();
    j["exp_value_im"] = r.exp_value->imag();
  }
  if (r.nearest_integer) j["nearest_integer"] = *r.nearest_integer;
  j["density"] = density_json(r);
  j["quad_error"] = r.quad_error ? json(*r.quad_error) : json(nullptr);
  j["params"] = params_json(cfg, task, s, &r);

  if (task.kind == "zeta_poly") {
    json coef = json::array();
    for (const auto& c : r.polynomial) coef.push_back({{"re", c.real()}, {"im", c.imag()}});
    j["polynomial"] = coef;
    const std::vector<double> ts = task.t_values.empty() ? std::vector<double>{0.0} : task.t_values;
    json values = json::array();
    for (double t : ts) {
      const cplx v = evaluate_polynomial(r.polynomial, t);
      values.push_back({{"t", t}, {"value_re", v.real()}, {"value_im", v.imag()}});
      out.csv_rows.push_back(csv_row(task, fmt(t), v, r.quad_error));
    }
    j["values"] = values;
  } else {
    out.csv_rows.push_back(csv_row(task, "", r.value, r.quad_error));
  }
  return out;
}

namespace {

int exit_code_for(ErrorKind k) {
  switch (k) {
    case ErrorKind::ConfigSchemaError:
    case ErrorKind::SyntaxError:
    case ErrorKind::UnknownIdentifier: return 2;
    default: return 3;
  }
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::IoError, "cannot open " + path.string() + " for writing");
  f << content;
  if (!f) throw Error(ErrorKind::IoError, "write to " + path.string() + " failed");
}

std::string csv_text(const std::vector<std::vector<std::string>>& rows) {
  std::string s = "task,operator,t,value_re,value_im,quad_error\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) s += ',';
      s += row[i];
    }
    s += '\n';
  }
  return s;
}

}  // namespace

int run(const std::string& config_path, const Flags& flags, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  try {
    std::ifstream f(config_path);
    if (!f) throw Error(ErrorKind::IoError, "cannot read config " + config_path);
    std::stringstream buf;
    buf << f.rdbuf();
    json doc;
    try {
      doc = json::parse(buf.str());
    } catch (const json::parse_error& e) {
      throw SchemaError("", std::string("invalid JSON: ") + e.what());
    }
    cfg = load_config(doc, flags);
    if (flags.task) {
      std::vector<TaskSpec> kept;
      for (const auto& t : cfg.tasks)
        if (t.name == *flags.task || t.kind == *flags.task) kept.push_back(t);
      if (kept.empty()) throw SchemaError("/tasks", "no task matches --task " + *flags.task);
      cfg.tasks = kept;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.kind() == ErrorKind::IoError ? 2 : exit_code_for(e.kind());
  }

  try {
    std::filesystem::create_directories(flags.out);
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: IoError: " << e.what() << '\n';
    return 3;
  }

  int status = 0;
  for (const auto& task : cfg.tasks) {
    try {
      const TaskResult r = run_task(cfg, task);
      const std::filesystem::path base = std::filesystem::path(flags.out) / task.name;
      if (flags.format == "csv")
        write_file(base.string() + ".csv", csv_text(r.csv_rows));
      else
        write_file(base.string() + ".json", r.report.dump(2) + "\n");
      out << task.name << ": value_re = " << fmt(r.report["value_re"].get<double>())
          << ", value_im = " << fmt(r.report["value_im"].get<double>());
      if (r.report.contains("quad_error") && !r.report["quad_error"].is_null())
        out << "  (quad_error " << fmt(r.report["quad_error"].get<double>()) << ")";
      out << '\n';
      if (r.report.value("failed", 0) > 0) {
        err << "error: task " << task.name << ": CrossCheckFailed: " << r.report["failed"].get<int>()
            << " self-checks failed\n";
        status = std::max(status, 3);
      }
    } catch (const Error& e) {
      err << "error: task " << task.name << ": " << e.what() << '\n';
      status = std::max(status, exit_code_for(e.kind()));
    }
  }
  return status;
}

}  // namespace resdet::cli
