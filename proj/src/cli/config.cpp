#include <cmath>
#include <functional>
#include <set>

#include <openssl/evp.h>

#include "resdet/cli.hpp"
#include "resdet/expr.hpp"
#include "resdet/oplib.hpp"

namespace resdet::cli {

SchemaError::SchemaError(std::string pointer, const std::string& message)
    : Error(ErrorKind::ConfigSchemaError, (pointer.empty() ? "/" : pointer) + ": " + message),
      pointer_(std::move(pointer)) {}

namespace {

const std::set<std::string> kTaskKinds = {"res",   "detres", "det0",      "zeta0",    "detres_one_plus",
                                          "index", "zeta_poly", "selfcheck"};

std::string child(const std::string& ptr, const std::string& key) {
  std::string escaped;
  for (char c : key) {
    if (c == '~')
      escaped += "~0";
    else if (c == '/')
      escaped += "~1";
    else
      escaped += c;
  }
  return ptr + "/" + escaped;
}
std::string child(const std::string& ptr, std::size_t i) { return ptr + "/" + std::to_string(i); }

void require_object(const json& v, const std::string& ptr, const std::set<std::string>& allowed) {
  if (!v.is_object()) throw SchemaError(ptr, "expected an object");
  for (const auto& [k, _] : v.items())
    if (!allowed.count(k)) throw SchemaError(child(ptr, k), "unknown field");
}

const json* field(const json& obj, const std::string& key) {
  auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

const json& required(const json& obj, const std::string& ptr, const std::string& key) {
  const json* v = field(obj, key);
  if (!v) throw SchemaError(child(ptr, key), "required field missing");
  return *v;
}

long long as_int(const json& v, const std::string& ptr, long long lo, long long hi) {
  if (!v.is_number_integer()) throw SchemaError(ptr, "expected an integer");
  const long long x = v.get<long long>();
  if (x < lo || x > hi)
    throw SchemaError(ptr, "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  return x;
}

double as_number(const json& v, const std::string& ptr) {
  if (!v.is_number()) throw SchemaError(ptr, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw SchemaError(ptr, "must be finite");
  return x;
}

std::string as_string(const json& v, const std::string& ptr) {
  if (!v.is_string()) throw SchemaError(ptr, "expected a string");
  return v.get<std::string>();
}

bool as_bool(const json& v, const std::string& ptr) {
  if (!v.is_boolean()) throw SchemaError(ptr, "expected a boolean");
  return v.get<bool>();
}

const json& as_array(const json& v, const std::string& ptr) {
  if (!v.is_array()) throw SchemaError(ptr, "expected an array");
  return v;
}

FourierMode parse_mode(const json& v, const std::string& ptr, int n, const std::set<std::string>& extra = {}) {
  std::set<std::string> allowed = {"k", "cos", "sin"};
  allowed.insert(extra.begin(), extra.end());
  require_object(v, ptr, allowed);
  FourierMode m;
  const json& k = as_array(required(v, ptr, "k"), child(ptr, "k"));
  if (static_cast<int>(k.size()) != n) throw SchemaError(child(ptr, "k"), "needs " + std::to_string(n) + " entries");
  for (int i = 0; i < n; ++i) m.k[i] = static_cast<int>(as_int(k[i], child(child(ptr, "k"), i), -64, 64));
  if (const json* c = field(v, "cos")) m.cos_coef = as_number(*c, child(ptr, "cos"));
  if (const json* s = field(v, "sin")) m.sin_coef = as_number(*s, child(ptr, "sin"));
  return m;
}

std::vector<FourierMode> parse_modes(const json& v, const std::string& ptr, int n) {
  std::vector<FourierMode> out;
  const json& arr = as_array(v, ptr);
  for (std::size_t i = 0; i < arr.size(); ++i) out.push_back(parse_mode(arr[i], child(ptr, i), n));
  return out;
}

std::vector<MetricMode> parse_entries(const json& v, const std::string& ptr, int n, int size) {
  std::vector<MetricMode> out;
  const json& arr = as_array(v, ptr);
  for (std::size_t e = 0; e < arr.size(); ++e) {
    const std::string p = child(ptr, e);
    MetricMode m;
    m.mode = parse_mode(arr[e], p, n, {"i", "j"});
    m.i = static_cast<int>(as_int(required(arr[e], p, "i"), child(p, "i"), 1, size)) - 1;
    m.j = static_cast<int>(as_int(required(arr[e], p, "j"), child(p, "j"), 1, size)) - 1;
    out.push_back(m);
  }
  return out;
}

cplx parse_complex(const json& v, const std::string& ptr) {
  if (v.is_number()) return as_number(v, ptr);
  if (v.is_array() && v.size() == 2) return {as_number(v[0], child(ptr, 0)), as_number(v[1], child(ptr, 1))};
  throw SchemaError(ptr, "expected a number or [re, im]");
}

ClassicalSymbol build_terms(const json& def, const std::string& ptr, const RunConfig& cfg, const std::string& name) {
  require_object(def, ptr, {"builder", "order", "dim", "terms", "complete"});
  const double order = as_number(required(def, ptr, "order"), child(ptr, "order"));
  const int dim = field(def, "dim") ? static_cast<int>(as_int(def["dim"], child(ptr, "dim"), 1, 8)) : 1;
  const bool complete = field(def, "complete") ? as_bool(def["complete"], child(ptr, "complete")) : true;
  const std::string tptr = child(ptr, "terms");
  const json& terms = as_array(required(def, ptr, "terms"), tptr);
  if (terms.empty()) throw SchemaError(tptr, "at least one term is required");
  std::vector<HomogeneousTerm> list;
  const auto samples = sample_points(cfg.n, 12, cfg.seed ^ 0x7e57ULL);
  for (std::size_t j = 0; j < terms.size(); ++j) {
    const std::string p = child(tptr, j);
    require_object(terms[j], p, {"degree", "expr"});
    const double degree = as_number(required(terms[j], p, "degree"), child(p, "degree"));
    if (std::abs(degree - (order - static_cast<double>(j))) > 1e-12)
      throw SchemaError(child(p, "degree"), "term " + std::to_string(j) + " must have degree order - " + std::to_string(j));
    const std::string src = as_string(required(terms[j], p, "expr"), child(p, "expr"));
    expr::ExprPtr e;
    // parse errors keep their kind and gain the config location
    try {
      e = expr::parse(src);
    } catch (const expr::ParseError& err) {
      throw Error(err.kind(), child(p, "expr") + ": " + std::string(err.what()).substr(err.name().size() + 2));
    }
    if (expr::max_index(*e) > cfg.n)
      throw SchemaError(child(p, "expr"), "index exceeds the manifold dimension " + std::to_string(cfg.n));
    HomogeneousTerm term = expr_term(e, degree, cfg.chart, dim);
    validate_term(cfg.n, term, samples);
    list.push_back(std::move(term));
  }
  return term_symbol(cfg.n, dim, order, std::move(list), name, complete);
}

ClassicalSymbol build_operator(const std::string& name, const json& def, const std::string& ptr, RunConfig& cfg,
                               const std::function<ClassicalSymbol(const std::string&, const std::string&)>& lookup) {
  if (!def.is_object()) throw SchemaError(ptr, "expected an object");
  const std::string builder = as_string(required(def, ptr, "builder"), child(ptr, "builder"));
  auto need_n = [&](int n) {
    if (cfg.n != n)
      throw SchemaError(child(ptr, "builder"), builder + " requires manifold.n = " + std::to_string(n));
  };
  auto operand = [&](const char* key) {
    return lookup(as_string(required(def, ptr, key), child(ptr, key)), child(ptr, key));
  };
  auto seed_of = [&]() {
    return field(def, "seed") ? static_cast<unsigned long long>(as_int(def["seed"], child(ptr, "seed"), 0, 1LL << 62))
                              : cfg.seed;
  };

  if (builder == "laplace") {
    require_object(def, ptr, {"builder", "t", "rank", "potential", "matrixPotential"});
    LaplaceSpec spec;
    spec.chart = cfg.chart;
    if (field(def, "t")) spec.t = as_number(def["t"], child(ptr, "t"));
    if (field(def, "rank")) spec.rank = static_cast<int>(as_int(def["rank"], child(ptr, "rank"), 1, 8));
    if (field(def, "potential")) spec.scalar_potential = parse_modes(def["potential"], child(ptr, "potential"), cfg.n);
    if (field(def, "matrixPotential"))
      spec.matrix_potential = parse_entries(def["matrixPotential"], child(ptr, "matrixPotential"), cfg.n, spec.rank);
    return laplace_symbol(spec);
  }
  if (builder == "dbar_t2") {
    require_object(def, ptr, {"builder", "part"});
    need_n(2);
    const std::string part = field(def, "part") ? as_string(def["part"], child(ptr, "part")) : "D";
    if (part != "D" && part != "DstarD") throw SchemaError(child(ptr, "part"), "must be \"D\" or \"DstarD\"");
    const auto pair = dbar_symbols_t2();
    return part == "D" ? pair.first : pair.second;
  }
  if (builder == "winding_s1") {
    require_object(def, ptr, {"builder", "w"});
    need_n(1);
    return winding_symbol_s1(static_cast<int>(as_int(required(def, ptr, "w"), child(ptr, "w"), -64, 64)));
  }
  if (builder == "random_negorder") {
    require_object(def, ptr, {"builder", "k", "seed", "dim"});
    const int k = static_cast<int>(as_int(required(def, ptr, "k"), child(ptr, "k"), -16, -1));
    const int dim = field(def, "dim") ? static_cast<int>(as_int(def["dim"], child(ptr, "dim"), 1, 8)) : 1;
    return negative_order_symbol(k, seed_of(), cfg.n, dim);
  }
  if (builder == "random_elliptic") {
    require_object(def, ptr, {"builder", "order", "seed", "dim"});
    const int order = static_cast<int>(as_int(required(def, ptr, "order"), child(ptr, "order"), 1, 4));
    const int dim = field(def, "dim") ? static_cast<int>(as_int(def["dim"], child(ptr, "dim"), 1, 2)) : 1;
    return random_elliptic_symbol(cfg.n, dim, order, seed_of());
  }
  if (builder == "terms") return build_terms(def, ptr, cfg, name);
  if (builder == "parametrix") {
    require_object(def, ptr, {"builder", "operand", "power"});
    const int k = field(def, "power") ? static_cast<int>(as_int(def["power"], child(ptr, "power"), 1, 16)) : 1;
    return power_of_parametrix(operand("operand"), k);
  }
  if (builder == "compose" || builder == "add") {
    require_object(def, ptr, {"builder", "operands"});
    const std::string optr = child(ptr, "operands");
    const json& ops = as_array(required(def, ptr, "operands"), optr);
    if (ops.size() < 2) throw SchemaError(optr, "needs at least two operands");
    ClassicalSymbol acc = lookup(as_string(ops[0], child(optr, 0)), child(optr, 0));
    for (std::size_t i = 1; i < ops.size(); ++i) {
      const ClassicalSymbol next = lookup(as_string(ops[i], child(optr, i)), child(optr, i));
      if (next.dim() != acc.dim()) throw SchemaError(child(optr, i), "operand rank differs");
      acc = builder == "compose" ? compose_symbols(acc, next) : add_merge(acc, next);
    }
    return acc;
  }
  if (builder == "adjoint") {
    require_object(def, ptr, {"builder", "operand"});
    return adjoint_symbol(operand("operand"));
  }
  if (builder == "shift") {
    require_object(def, ptr, {"builder", "operand", "t"});
    return shift_symbol(operand("operand"), parse_complex(required(def, ptr, "t"), child(ptr, "t")));
  }
  if (builder == "scale") {
    require_object(def, ptr, {"builder", "operand", "factor"});
    return scale_symbol(operand("operand"), parse_complex(required(def, ptr, "factor"), child(ptr, "factor")));
  }
  throw SchemaError(child(ptr, "builder"), "unknown builder \"" + builder + "\"");
}

void load_operators(const json& ops, RunConfig& cfg) {
  const std::string root = "/operators";
  if (!ops.is_object()) throw SchemaError(root, "expected an object");
  std::set<std::string> in_progress;
  std::function<ClassicalSymbol(const std::string&, const std::string&)> lookup =
      [&](const std::string& name, const std::string& ref_ptr) -> ClassicalSymbol {
    if (auto it = cfg.operators.find(name); it != cfg.operators.end()) return it->second;
    auto def = ops.find(name);
    if (def == ops.end()) throw SchemaError(ref_ptr, "unknown operator \"" + name + "\"");
    if (in_progress.count(name)) throw SchemaError(ref_ptr, "operator definitions form a cycle at \"" + name + "\"");
    in_progress.insert(name);
    ClassicalSymbol s = build_operator(name, *def, child(root, name), cfg, lookup);
    in_progress.erase(name);
    if (s.n() != cfg.n) throw SchemaError(child(root, name), "operator dimension differs from manifold.n");
    cfg.operators.emplace(name, s);
    return s;
  };
  for (const auto& [name, _] : ops.items()) lookup(name, child(root, name));
}

void load_tasks(const json& tasks, RunConfig& cfg, double default_theta) {
  const std::string root = "/tasks";
  const json& arr = as_array(tasks, root);
  std::set<std::string> names;
  auto known = [&](const std::string& op, const std::string& ptr) {
    if (!cfg.operators.count(op)) throw SchemaError(ptr, "unknown operator \"" + op + "\"");
  };
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::string ptr = child(root, i);
    require_object(arr[i], ptr, {"name", "kind", "operator", "shifts", "theta", "tValues", "h0", "perRank"});
    TaskSpec t;
    t.pointer = ptr;
    t.kind = as_string(required(arr[i], ptr, "kind"), child(ptr, "kind"));
    if (!kTaskKinds.count(t.kind)) throw SchemaError(child(ptr, "kind"), "unknown task kind \"" + t.kind + "\"");
    if (t.kind != "selfcheck") {
      t.op = as_string(required(arr[i], ptr, "operator"), child(ptr, "operator"));
      known(t.op, child(ptr, "operator"));
    } else if (field(arr[i], "operator")) {
      throw SchemaError(child(ptr, "operator"), "selfcheck takes no operator");
    }
    t.name = field(arr[i], "name") ? as_string(arr[i]["name"], child(ptr, "name"))
                                   : t.kind + (t.op.empty() ? "" : "_" + t.op);
    if (!names.insert(t.name).second) throw SchemaError(child(ptr, "name"), "duplicate task name \"" + t.name + "\"");
    t.theta = field(arr[i], "theta") ? as_number(arr[i]["theta"], child(ptr, "theta")) : default_theta;
    if (field(arr[i], "h0")) t.h0 = static_cast<int>(as_int(arr[i]["h0"], child(ptr, "h0"), 0, 1 << 20));
    if (field(arr[i], "perRank")) {
      if (t.kind != "det0") throw SchemaError(child(ptr, "perRank"), "only det0 accepts perRank");
      t.per_rank = as_bool(arr[i]["perRank"], child(ptr, "perRank"));
    }
    if (field(arr[i], "shifts")) {
      if (t.kind != "zeta_poly") throw SchemaError(child(ptr, "shifts"), "only zeta_poly accepts shifts");
      const std::string sptr = child(ptr, "shifts");
      const json& sh = as_array(arr[i]["shifts"], sptr);
      for (std::size_t k = 0; k < sh.size(); ++k) {
        if (sh[k].is_null()) {
          t.shifts.emplace_back();
          continue;
        }
        t.shifts.push_back(as_string(sh[k], child(sptr, k)));
        known(t.shifts.back(), child(sptr, k));
      }
    }
    if (field(arr[i], "tValues")) {
      if (t.kind != "zeta_poly") throw SchemaError(child(ptr, "tValues"), "only zeta_poly accepts tValues");
      const std::string tptr = child(ptr, "tValues");
      const json& tv = as_array(arr[i]["tValues"], tptr);
      for (std::size_t k = 0; k < tv.size(); ++k) t.t_values.push_back(as_number(tv[k], child(tptr, k)));
    }
    cfg.tasks.push_back(std::move(t));
  }
}

}  // namespace

json apply_flags(json doc, const Flags& flags) {
  if (!doc.is_object()) return doc;
  auto section = [&](const char* key) -> json& {
    if (!doc.contains(key) || !doc[key].is_object()) doc[key] = json::object();
    return doc[key];
  };
  if (flags.sphere_res) section("numerics")["sphereRes"] = *flags.sphere_res;
  if (flags.contour_nodes) section("numerics")["contourNodes"] = *flags.contour_nodes;
  if (flags.x_grid) section("manifold")["xGrid"] = *flags.x_grid;
  if (flags.seed) doc["seed"] = *flags.seed;
  if (flags.verify) section("numerics")["verify"] = true;
  if (flags.theta_degrees) {
    section("numerics")["theta"] = *flags.theta_degrees * kPi / 180.0;
    if (doc.contains("tasks") && doc["tasks"].is_array())
      for (auto& t : doc["tasks"])
        if (t.is_object()) t.erase("theta");
  }
  return doc;
}

std::string config_hash(const json& doc) {
  const std::string canonical = doc.dump();
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (!ctx || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx, canonical.data(), canonical.size()) != 1 || EVP_DigestFinal_ex(ctx, digest, &length) != 1) {
    EVP_MD_CTX_free(ctx);
    throw Error(ErrorKind::IoError, "SHA-256 digest failed");
  }
  EVP_MD_CTX_free(ctx);
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < length; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 15];
  }
  return out;
}

RunConfig load_config(const json& raw, const Flags& flags) {
  RunConfig cfg;
  cfg.effective = apply_flags(raw, flags);
  const json& doc = cfg.effective;
  require_object(doc, "", {"manifold", "operators", "tasks", "numerics", "seed"});
  if (flags.format != "json" && flags.format != "csv") throw SchemaError("/format", "format must be json or csv");

  if (const json* s = field(doc, "seed")) cfg.seed = static_cast<unsigned long long>(as_int(*s, "/seed", 0, 1LL << 62));

  double default_theta = kPi;
  if (const json* num = field(doc, "numerics")) {
    const std::string p = "/numerics";
    require_object(*num, p,
                   {"sphereRes", "contourNodes", "jetOrder", "tolerances", "theta", "estimateError", "crossCheck", "verify",
                    "serial"});
    if (field(*num, "sphereRes")) cfg.numerics.sphere_res = static_cast<int>(as_int((*num)["sphereRes"], p + "/sphereRes", 2, 256));
    if (field(*num, "contourNodes"))
      cfg.numerics.contour_nodes = static_cast<int>(as_int((*num)["contourNodes"], p + "/contourNodes", 8, 4096));
    if (field(*num, "jetOrder")) cfg.jet_order = static_cast<int>(as_int((*num)["jetOrder"], p + "/jetOrder", 0, 16));
    if (field(*num, "theta")) default_theta = as_number((*num)["theta"], p + "/theta");
    if (field(*num, "estimateError")) cfg.numerics.estimate_error = as_bool((*num)["estimateError"], p + "/estimateError");
    if (field(*num, "crossCheck")) cfg.numerics.cross_check = as_bool((*num)["crossCheck"], p + "/crossCheck");
    if (field(*num, "verify")) cfg.verify = as_bool((*num)["verify"], p + "/verify");
    if (field(*num, "serial") && as_bool((*num)["serial"], p + "/serial")) cfg.numerics.mode = ExecutionMode::Serial;
    if (const json* tol = field(*num, "tolerances")) {
      require_object(*tol, p + "/tolerances", {"selfcheck"});
      if (field(*tol, "selfcheck")) {
        cfg.selfcheck_tolerance = as_number((*tol)["selfcheck"], p + "/tolerances/selfcheck");
        if (!(cfg.selfcheck_tolerance > 0.0)) throw SchemaError(p + "/tolerances/selfcheck", "must be positive");
      }
    }
  }

  const json& manifold = required(doc, "", "manifold");
  require_object(manifold, "/manifold", {"n", "xGrid", "metricFourier"});
  cfg.n = static_cast<int>(as_int(required(manifold, "/manifold", "n"), "/manifold/n", 1, kMaxDim));
  if (cfg.jet_order && *cfg.jet_order < cfg.n)
    throw SchemaError("/numerics/jetOrder", "jetOrder must be at least manifold.n = " + std::to_string(cfg.n));
  int x_grid = 16;
  if (field(manifold, "xGrid")) x_grid = static_cast<int>(as_int(manifold["xGrid"], "/manifold/xGrid", 1, 512));
  cfg.numerics.x_grid = x_grid;
  MetricData metric;
  if (const json* mf = field(manifold, "metricFourier")) {
    const std::string p = "/manifold/metricFourier";
    require_object(*mf, p, {"conformal", "entries"});
    if (field(*mf, "conformal")) metric.conformal = parse_modes((*mf)["conformal"], p + "/conformal", cfg.n);
    if (field(*mf, "entries")) metric.entries = parse_entries((*mf)["entries"], p + "/entries", cfg.n, cfg.n);
  }
  cfg.chart = std::make_shared<const TorusChart>(build_metric(cfg.n, metric, x_grid));

  if (const json* ops = field(doc, "operators"))
    load_operators(*ops, cfg);
  load_tasks(required(doc, "", "tasks"), cfg, default_theta);
  cfg.hash = config_hash(doc);
  return cfg;
}

}  // namespace resdet::cli
