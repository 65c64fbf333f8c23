#pragma once

#include <array>
#include <vector>

#include <Eigen/Dense>

#include "resdet/jet.hpp"

namespace resdet {

using Wave = std::array<int, kMaxDim>;

// c cos(k.x) + s sin(k.x)
struct FourierMode {
  Wave k{};
  double cos_coef = 0.0;
  double sin_coef = 0.0;
};

// Contribution to the symmetric entries (i, j) and (j, i), 0-based.
struct MetricMode {
  int i = 0;
  int j = 0;
  FourierMode mode;
};

// g(x) = exp(2 omega(x)) (I + sum of entry modes)
struct MetricData {
  std::vector<MetricMode> entries;
  std::vector<FourierMode> conformal;  // omega
};

double eval_fourier(const std::vector<FourierMode>& modes, const double* x, int n);
// Scalar jet in the x variables of a Fourier series at p.
Jet fourier_jet(const std::vector<FourierMode>& modes, const JetSpacePtr& space, const Point& p);

class TorusChart {
 public:
  TorusChart() = default;
  TorusChart(int n, MetricData data, int x_grid);

  int n() const { return n_; }
  int x_grid() const { return x_grid_; }
  bool flat() const { return flat_; }
  const MetricData& data() const { return data_; }

  Eigen::MatrixXd metric(const double* x) const;
  double sqrt_det(const double* x) const;

  // n x n matrix jets in the x variables at p.
  Jet metric_jet(const Point& p, const JetSpacePtr& space) const;
  Jet inverse_metric_jet(const Point& p, const JetSpacePtr& space) const;
  Jet sqrt_det_jet(const Point& p, const JetSpacePtr& space) const;
  // sqrt(g^{ij}(x) xi_i xi_j) as a scalar jet in (x, xi).
  Jet abs_xi_g_jet(const Point& p, const JetSpacePtr& space) const;
  // Scalar jet of entry (i, j) of a matrix jet.
  static Jet entry(const Jet& m, int i, int j);

 private:
  int n_ = 0;
  int x_grid_ = 16;
  bool flat_ = true;
  MetricData data_;
};

// Throws NotPositiveDefinite naming the first node with min eigenvalue <= 1e-8.
TorusChart build_metric(int n, const MetricData& data, int x_grid = 16);

struct SphereRule {
  std::vector<std::array<double, kMaxDim>> nodes;
  std::vector<double> weights;
};

// Exact for polynomials of degree <= resolution restricted to S^{n-1}.
SphereRule cosphere_quadrature(int n, int resolution);

// Gauss-Legendre rule on [a, b].
void gauss_legendre(int m, double a, double b, std::vector<double>& nodes, std::vector<double>& weights);

struct QuadratureGrid {
  int n = 0;
  std::vector<std::array<double, kMaxDim>> x_nodes;
  std::vector<double> x_weights;
  SphereRule sphere;
  int contour_nodes = 64;
  bool x_collapsed = false;
};

// Product trapezoid grid with `x_grid` points per axis; one node of weight
// (2 pi)^n when collapse_x is set.
QuadratureGrid make_grid(int n, int x_grid, int sphere_resolution, int contour_nodes, bool collapse_x);

double metric_volume(const TorusChart& chart);

}  // namespace resdet
