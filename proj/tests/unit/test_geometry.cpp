#include <doctest.h>

#include <cmath>

#include "oracles/oracles.hpp"
#include "resdet/error.hpp"
#include "resdet/geometry.hpp"
#include "test_util.hpp"

using namespace resdet;

namespace {

double weight_sum(const SphereRule& r) {
  double s = 0.0;
  for (double w : r.weights) s += w;
  return s;
}

MetricData conformal(double c) {
  MetricData m;
  m.conformal.push_back({{1, 0, 0, 0}, c, 0.0});
  return m;
}

}  // namespace

TEST_CASE("cosphere volumes") {
  CHECK(std::abs(weight_sum(cosphere_quadrature(1, 8)) - 2.0) < 1e-15);
  CHECK(std::abs(weight_sum(cosphere_quadrature(2, 8)) - 2.0 * oracle::pi) < 1e-14);
  CHECK(std::abs(weight_sum(cosphere_quadrature(3, 8)) - 4.0 * oracle::pi) < 1e-13);
  CHECK(std::abs(weight_sum(cosphere_quadrature(4, 8)) - 2.0 * oracle::pi * oracle::pi) < 1e-12);
  for (int n = 1; n <= 4; ++n) CHECK(std::abs(weight_sum(cosphere_quadrature(n, 6)) - oracle::sphere_volume(n)) < 1e-12);
}

TEST_CASE("cosphere second moments") {
  for (int n = 1; n <= 4; ++n) {
    const SphereRule r = cosphere_quadrature(n, 6);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double s = 0.0;
        for (std::size_t q = 0; q < r.weights.size(); ++q) s += r.weights[q] * r.nodes[q][i] * r.nodes[q][j];
        const double expected = i == j ? oracle::sphere_volume(n) / n : 0.0;
        CHECK(std::abs(s - expected) < 1e-10);
      }
  }
}

TEST_CASE("cosphere rule is exact up to its resolution") {
  // xi_1^4 integrates to 3 vol / (n (n + 2))
  for (int n = 2; n <= 4; ++n) {
    const SphereRule r = cosphere_quadrature(n, 8);
    double s = 0.0;
    for (std::size_t q = 0; q < r.weights.size(); ++q) s += r.weights[q] * std::pow(r.nodes[q][0], 4);
    CHECK(std::abs(s - 3.0 * oracle::sphere_volume(n) / (n * (n + 2))) < 1e-12);
  }
  CHECK_THROWS_AS(cosphere_quadrature(5, 4), Error);
}

TEST_CASE("nodes lie on the unit sphere") {
  for (int n = 1; n <= 4; ++n) {
    const SphereRule r = cosphere_quadrature(n, 7);
    for (const auto& v : r.nodes) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += v[i] * v[i];
      CHECK(std::abs(s - 1.0) < 1e-14);
    }
  }
}

TEST_CASE("Gauss-Legendre integrates polynomials") {
  std::vector<double> x, w;
  gauss_legendre(5, -1.0, 2.0, x, w);
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += w[i] * std::pow(x[i], 9);
  CHECK(std::abs(s - (std::pow(2.0, 10) - 1.0) / 10.0) < 1e-11);
}

TEST_CASE("flat metrics") {
  const TorusChart t2 = build_metric(2, {});
  CHECK(t2.flat());
  CHECK(std::abs(metric_volume(t2) - 4.0 * oracle::pi * oracle::pi) < 1e-12);
  const TorusChart t4 = build_metric(4, {}, 4);
  CHECK(std::abs(metric_volume(t4) - std::pow(2.0 * oracle::pi, 4)) < 1e-9);
  const double x[2] = {0.3, 0.4};
  CHECK((t2.metric(x) - Eigen::MatrixXd::Identity(2, 2)).norm() == 0.0);
}

TEST_CASE("conformal volume matches the Bessel oracle") {
  const TorusChart c = build_metric(2, conformal(0.1), 16);
  CHECK_FALSE(c.flat());
  const double expected = 4.0 * oracle::pi * oracle::pi * oracle::bessel_i0(0.2);
  CHECK(std::abs(metric_volume(c) - expected) < 1e-12 * expected);
  CHECK(std::abs(expected / (4.0 * oracle::pi * oracle::pi) - 1.0100250) < 1e-7);
  const TorusChart c2 = build_metric(2, conformal(0.1), 32);
  CHECK(std::abs(metric_volume(c2) - metric_volume(c)) < 1e-12);
}

TEST_CASE("indefinite metrics are rejected") {
  MetricData m;
  m.entries.push_back({0, 0, {{0, 0, 0, 0}, -1.0, 0.0}});
  m.entries.push_back({0, 0, {{1, 0, 0, 0}, 1.0, 0.0}});
  try {
    build_metric(2, m, 8);
    FAIL("expected NotPositiveDefinite");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NotPositiveDefinite);
  }
}

TEST_CASE("metric jets") {
  MetricData m = conformal(0.2);
  m.entries.push_back({0, 1, {{1, 1, 0, 0}, 0.1, 0.05}});
  const TorusChart c = build_metric(2, m, 8);
  const Point p = testutil::point(2, {0.4, -0.9}, {0.6, 0.8});
  const auto space = JetSpace::get(2, 3);
  const Jet g = c.metric_jet(p, space), ginv = c.inverse_metric_jet(p, space);
  CHECK(max_difference(jet_product(g, ginv), Jet::identity(space, p, 2)) < 1e-13);

  const double x[2] = {0.4, -0.9};
  CHECK(std::abs(c.sqrt_det_jet(p, space).scalar(0) - c.sqrt_det(x)) < 1e-14);
  CHECK(std::abs(c.sqrt_det(x) - std::sqrt(c.metric(x).determinant())) < 1e-14);

  // d/dx_1 of sqrt det g against central differences
  const double h = 1e-5;
  const double xp[2] = {0.4 + h, -0.9}, xm[2] = {0.4 - h, -0.9};
  const double fd = (c.sqrt_det(xp) - c.sqrt_det(xm)) / (2 * h);
  CHECK(std::abs(c.sqrt_det_jet(p, space).coefficient(testutil::mono({1, 0, 0, 0}))(0, 0) - fd) < 1e-8);

  const Eigen::MatrixXd gi = c.metric(x).inverse();
  const double abs_g = std::sqrt(0.6 * 0.6 * gi(0, 0) + 2 * 0.6 * 0.8 * gi(0, 1) + 0.8 * 0.8 * gi(1, 1));
  CHECK(std::abs(c.abs_xi_g_jet(p, space).scalar(0) - abs_g) < 1e-14);
}

TEST_CASE("quadrature grid weights") {
  const QuadratureGrid g = make_grid(2, 8, 0 + 6, 64, false);
  double s = 0.0;
  for (double w : g.x_weights) s += w;
  CHECK(g.x_nodes.size() == 64);
  CHECK(std::abs(s - 4.0 * oracle::pi * oracle::pi) < 1e-12);
  const QuadratureGrid c = make_grid(3, 8, 6, 64, true);
  CHECK(c.x_nodes.size() == 1);
  CHECK(c.x_collapsed);
  CHECK(std::abs(c.x_weights[0] - std::pow(2.0 * oracle::pi, 3)) < 1e-12);
}

TEST_CASE("Fourier jets") {
  const std::vector<FourierMode> modes = {{{1, 2, 0, 0}, 0.5, -0.25}};
  const Point p = testutil::point(2, {0.3, 0.1}, {1.0, 0.0});
  const Jet f = fourier_jet(modes, JetSpace::get(2, 2), p);
  const double phase = 0.3 + 0.2;
  CHECK(std::abs(f.scalar(0) - (0.5 * std::cos(phase) - 0.25 * std::sin(phase))) < 1e-15);
  // second derivative in x_2 has factor k_2^2 = 4
  const cplx d22 = f.coefficient(testutil::mono({0, 2, 0, 0}))(0, 0);
  CHECK(std::abs(2.0 * d22 + 4.0 * (0.5 * std::cos(phase) - 0.25 * std::sin(phase))) < 1e-14);
  const double xx[2] = {0.3, 0.1};
  CHECK(std::abs(eval_fourier(modes, xx, 2) - f.scalar(0).real()) < 1e-15);
}
