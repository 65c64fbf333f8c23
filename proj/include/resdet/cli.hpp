#pragma once

#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "resdet/error.hpp"
#include "resdet/functionals.hpp"
#include "resdet/geometry.hpp"
#include "resdet/symbols.hpp"

namespace resdet::cli {

using json = nlohmann::json;

inline constexpr const char* kSoftwareVersion = "0.3.0";

// ConfigSchemaError carrying the JSON pointer of the offending field.
class SchemaError : public Error {
 public:
  SchemaError(std::string pointer, const std::string& message);
  const std::string& pointer() const { return pointer_; }

 private:
  std::string pointer_;
};

struct Flags {
  std::optional<std::string> task;  // task name or kind filter
  std::string out = ".";
  std::string format = "json";
  std::optional<int> sphere_res;
  std::optional<int> contour_nodes;
  std::optional<int> x_grid;
  std::optional<double> theta_degrees;
  bool verify = false;
  std::optional<unsigned long long> seed;
};

struct TaskSpec {
  std::string name;
  std::string kind;
  std::string op;                   // operator name ("" for selfcheck)
  std::vector<std::string> shifts;  // zeta_poly B_0, B_1, ...; "" means absent
  std::vector<double> t_values;
  int h0 = 0;
  bool per_rank = false;
  double theta = 0.0;  // radians
  std::string pointer;
};

struct RunConfig {
  json effective;  // config after flag overrides; hashed
  std::string hash;
  int n = 0;
  std::shared_ptr<const TorusChart> chart;
  std::map<std::string, ClassicalSymbol> operators;
  std::vector<TaskSpec> tasks;
  NumericSettings numerics;
  std::optional<int> jet_order;
  double selfcheck_tolerance = 1e-6;
  unsigned long long seed = 0;
  bool verify = false;
};

// Applies flag overrides to a raw config document.
json apply_flags(json doc, const Flags& flags);
// Validates and builds everything; throws SchemaError, ParseError or numerical errors.
RunConfig load_config(const json& doc, const Flags& flags);
// Hex SHA-256 of the canonical dump.
std::string config_hash(const json& doc);

struct TaskResult {
  json report;
  std::vector<std::vector<std::string>> csv_rows;  // task, operator, t, value_re, value_im, quad_error
};

TaskResult run_task(const RunConfig& cfg, const TaskSpec& task);

struct CheckResult {
  std::string name;
  bool pass = false;
  double error = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

// Invariant suite on built-in fixtures.
std::vector<CheckResult> run_selfcheck(const NumericSettings& base, double tolerance, unsigned long long seed);

// Resolvent identity (a - lambda) o r(lambda) = I at a few sample points; throws CrossCheckFailed.
void verify_resolvent_identity(const ClassicalSymbol& a, double theta, unsigned long long seed);

// Full run: returns the process exit code (0 ok, 2 config error, 3 numerical failure).
int run(const std::string& config_path, const Flags& flags, std::ostream& out, std::ostream& err);

}  // namespace resdet::cli
