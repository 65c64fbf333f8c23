#pragma once
// Reference computations that share no code with the library.

#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

inline constexpr double pi = 3.14159265358979323846;

// theta(eps) = sum_{k in Z} exp(-eps k^2), summed directly.
inline double theta_sum(double eps) {
  const int K = static_cast<int>(std::ceil(std::sqrt(60.0 / eps))) + 1;
  double s = 1.0;
  for (int k = K; k >= 1; --k) s += 2.0 * std::exp(-eps * k * k);
  return s;
}

// Tr exp(-eps (Delta + m)) on the flat n-torus of circumference 2 pi.
inline double heat_trace_flat(int n, double mass, double eps) {
  return std::exp(-eps * mass) * std::pow(theta_sum(eps), n);
}

// Coefficient of eps^0 in the small-eps expansion of Tr exp(-eps A) on T^2:
// fits h(eps) = eps * Tr(...) by a polynomial through nested points and reads h'(0)
// (Richardson extrapolation of the difference quotient).
inline double heat_constant_term_t2(double mass) {
  const int levels = 7;
  const double eps0 = 0.08;
  std::vector<double> eps(levels), h(levels);
  for (int i = 0; i < levels; ++i) {
    eps[i] = eps0 / std::pow(2.0, i);
    h[i] = eps[i] * heat_trace_flat(2, mass, eps[i]);
  }
  // polynomial interpolation in eps, then derivative at 0
  Eigen::MatrixXd V(levels, levels);
  Eigen::VectorXd y(levels);
  for (int i = 0; i < levels; ++i) {
    for (int j = 0; j < levels; ++j) V(i, j) = std::pow(eps[i] / eps0, j);
    y(i) = h[i];
  }
  const Eigen::VectorXd c = V.colPivHouseholderQr().solve(y);
  return c(1) / eps0;
}

// For A invertible the constant heat coefficient is zeta(A, 0).
inline double zeta0_flat_t2(double mass) { return heat_constant_term_t2(mass); }

// Fredholm index of f -> sum_k |k| (e^{iwx} 1_{k>0} + 1_{k<0}) f_k e^{ikx} on S^1, from the
// rank of the Fourier matrix between the matched windows [-M, M] and [-M, M + w].
inline int toeplitz_index(int w, int M = 24) {
  const int lo_out = -M, hi_out = M + w;
  const int rows = hi_out - lo_out + 1;
  const int cols = 2 * M + 1;
  if (rows <= 0) return cols;
  Eigen::MatrixXcd T = Eigen::MatrixXcd::Zero(rows, cols);
  for (int k = -M; k <= M; ++k) {
    const int target = k > 0 ? k + w : k;
    if (target < lo_out || target > hi_out) continue;
    T(target - lo_out, k + M) += std::abs(static_cast<double>(k));
  }
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(T);
  int rank = 0;
  for (int i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()(i) > 1e-9) ++rank;
  return (cols - rank) - (rows - rank);
}

// Modified Bessel function I_0 by its power series.
inline double bessel_i0(double x) {
  double term = 1.0, sum = 1.0;
  for (int k = 1; k < 60; ++k) {
    term *= (x / 2.0) * (x / 2.0) / (static_cast<double>(k) * k);
    sum += term;
  }
  return sum;
}

// Taylor coefficients c_0..c_m of f(1 + u) around u = 0 for f = log and f = power -s.
inline std::vector<std::complex<double>> log1p_series(int m) {
  std::vector<std::complex<double>> c(m + 1, 0.0);
  for (int k = 1; k <= m; ++k) c[k] = ((k % 2) ? 1.0 : -1.0) / k;
  return c;
}

inline std::vector<std::complex<double>> binomial_series(std::complex<double> exponent, int m) {
  std::vector<std::complex<double>> c(m + 1, 1.0);
  for (int k = 1; k <= m; ++k) c[k] = c[k - 1] * (exponent - static_cast<double>(k - 1)) / static_cast<double>(k);
  return c;
}

// Central differences of order 1 and 2 along a coordinate direction.
inline double central_first(const std::function<double(double)>& f, double x, double h) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}
inline double central_second(const std::function<double(double)>& f, double x, double h) {
  return (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
}

// Volume of the unit sphere S^{n-1}.
inline double sphere_volume(int n) { return 2.0 * std::pow(pi, n / 2.0) / std::tgamma(n / 2.0); }

}  // namespace oracle
