#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "resdet/geometry.hpp"
#include "resdet/symbols.hpp"

namespace resdet {

enum class ExecutionMode { Serial, Parallel };

struct NumericSettings {
  int x_grid = 16;
  int sphere_res = 0;  // 0 selects a per-dimension default
  int contour_nodes = 64;
  double theta = kPi;
  bool estimate_error = true;
  bool cross_check = false;
  ExecutionMode mode = ExecutionMode::Parallel;

  int sphere_resolution(int n) const;
  ContourOptions contour() const;
  // Twice the sphere resolution and contour nodes, no nested error estimate.
  NumericSettings doubled(int n) const;
};

struct Report {
  std::string functional;
  int n = 0;
  cplx value{};
  std::optional<cplx> exp_value;
  std::vector<std::array<double, kMaxDim>> density_x;
  std::vector<double> x_weights;
  std::vector<cplx> density;
  std::optional<double> quad_error;
  std::optional<int> h0;
  std::optional<long> nearest_integer;
  std::vector<cplx> polynomial;
  NumericSettings settings;
  int sphere_nodes = 0;
  bool x_collapsed = false;
};

// Per-point integrand at (x, xi) with |xi| = 1.
using PointFunction = std::function<cplx(const Point&)>;

struct DensityResult {
  cplx value{};
  std::vector<cplx> density;  // (2 pi)^{-n} sum_s w_s f(x, xi_s) per x node
};

// Evaluates f on every (x, xi) node, then reduces in a fixed order.
DensityResult assemble_density(const QuadratureGrid& grid, const PointFunction& f, ExecutionMode mode);

// Compensated summation in the order given.
cplx neumaier_sum(const std::vector<cplx>& values);

// (2 pi)^{-n} int int tr sigma_{-n} dS dx.  Zero when no slot has degree -n.
Report residue_trace(const ClassicalSymbol& a, const NumericSettings& s = {});
// res(log_theta A); exp_value holds det_res A.
Report log_det_res(const ClassicalSymbol& a, const NumericSettings& s = {});
// Cosphere average of log det a_0; with per_rank the average is divided by N.
Report log_det_zero(const ClassicalSymbol& a, const NumericSettings& s = {}, bool per_rank = false);
// -res(log A)/alpha - h0.
Report zeta_at_zero(const ClassicalSymbol& a, int h0, const NumericSettings& s = {});
// sum_{j=1}^{[n/|k|]} (-1)^{j+1}/j res(Q^j) for Q of negative integer order k.
Report log_det_res_one_plus(const ClassicalSymbol& q, const NumericSettings& s = {});
// (1/2d)(res log(DD* + I) - res log(D*D + I)).
Report index_from_res(const ClassicalSymbol& d, const NumericSettings& s = {});

// Coefficients c_0..c_K of zeta(A + B[t], 0) + h0(A + B[t]) in powers of t,
// B[t] = sum_i B_i t^i.  An empty list means B[t] = t I.
Report zeta_shift_polynomial(const ClassicalSymbol& a, const std::vector<ClassicalSymbol>& shifts, int h0,
                             const NumericSettings& s = {});
cplx evaluate_polynomial(const std::vector<cplx>& coefficients, double t);

// res(Q^k), Q the parametrix of a.
Report res_parametrix_power(const ClassicalSymbol& a, int k, const NumericSettings& s = {});

}  // namespace resdet
