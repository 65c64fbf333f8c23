#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "resdet/jet.hpp"

namespace resdet {

inline constexpr double kPi = 3.14159265358979323846;

struct ContourOptions {
  double theta = kPi;
  int nodes_per_circle = 64;
  double min_radius = 1e-8;
  double max_radius = 1e8;
  // Eigenvalues closer than cut_tolerance * max(1, |lambda|) to R_theta are rejected.
  double cut_tolerance = 1e-10;
  // Compare the constant term with an eigendecomposition logarithm.
  bool cross_check = false;
};

struct Circle {
  cplx center;
  double radius;
};

struct ContourSpec {
  double theta = kPi;
  int nodes_per_circle = 64;
  double min_radius = 1e-8;
  double max_radius = 1e8;
  std::vector<Circle> circles;
};

// f(A) ~= sum_k weight_k * f(lambda_k) * (A - lambda_k)^{-1}
struct ContourNode {
  cplx lambda;
  cplx weight;
};

// Distance from lambda to the closed ray R_theta = { r e^{i theta}, r >= 0 }.
double distance_to_cut(cplx lambda, double theta);
// log|lambda| + i arg with theta - 2 pi <= arg < theta.
cplx log_branch(cplx lambda, double theta);
// lambda^{-s} on the same branch.
cplx power_branch(cplx lambda, cplx s, double theta);

ContourSpec make_contour(std::span<const cplx> eigenvalues, const ContourOptions& options);
ContourSpec contour_for(const CMatrix& a0, const ContourOptions& options);
std::vector<ContourNode> contour_nodes(const ContourSpec& spec);

// (i / 2 pi) \oint f(lambda) (a - lambda)^{-1} d lambda over the circles of spec.
Jet jet_contour_apply(const Jet& a, const ContourSpec& spec, const std::function<cplx(cplx)>& f);

Jet jet_log_contour(const Jet& a, const ContourOptions& options = {});
Jet jet_power_contour(const Jet& a, cplx s, const ContourOptions& options = {});

// Eigendecomposition logarithm; empty when eigenvalues are not separated by 1e-6.
std::optional<CMatrix> matrix_log_eig(const CMatrix& a, double theta);

}  // namespace resdet
