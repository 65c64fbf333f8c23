#include <doctest.h>

#include <cmath>

#include "oracles/oracles.hpp"
#include "resdet/error.hpp"
#include "resdet/functionals.hpp"
#include "resdet/oplib.hpp"
#include "test_util.hpp"

using namespace resdet;

namespace {

cplx value(const ClassicalSymbol& a, const Point& p, int j) { return a.slot_value(p, j)(0, 0); }

std::shared_ptr<const TorusChart> conformal_chart(int n, double c) {
  MetricData m;
  m.conformal.push_back({{1, 0, 0, 0}, c, 0.0});
  return std::make_shared<const TorusChart>(build_metric(n, m, 8));
}

}  // namespace

TEST_CASE("flat Laplacian slots") {
  const Point p = testutil::point(2, {0.1, 0.2}, {0.6, 0.8});
  const auto l0 = flat_laplace(2, 0.0);
  CHECK(std::abs(value(l0, p, 0) - 1.0) < 1e-15);
  CHECK(std::abs(value(l0, p, 1)) == 0.0);
  CHECK(std::abs(value(l0, p, 2)) == 0.0);
  CHECK(l0.x_independent());
  const auto l1 = flat_laplace(2, 1.0, 3);
  CHECK(l1.dim() == 3);
  CHECK((l1.slot_value(p, 2) - CMatrix::Identity(3, 3)).norm() == 0.0);
}

TEST_CASE("shifts") {
  const Point p = testutil::unit_point(2);
  const auto l = flat_laplace(2, 0.0);
  const auto same = shift_symbol(l, 0.0);
  for (int j = 0; j < 3; ++j) CHECK(std::abs(value(same, p, j) - value(l, p, j)) == 0.0);
  const auto one = shift_symbol(l, 1.0);
  CHECK(std::abs(value(one, p, 2) - 1.0) == 0.0);
  CHECK(std::abs(value(one, p, 0) - 1.0) < 1e-15);
  const auto half = term_symbol(2, 1, 0.5, {zero_term(0.5, 1)});
  CHECK_THROWS_AS(shift_symbol(half, 1.0), Error);
  try {
    shift_symbol(half, 1.0);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::OrderMismatch);
  }
}

TEST_CASE("conformal Laplacian principal part") {
  const auto chart = conformal_chart(2, 0.1);
  LaplaceSpec spec;
  spec.chart = chart;
  const auto l = laplace_symbol(spec);
  CHECK_FALSE(l.x_independent());
  for (const Point& p : sample_points(2, 6, 3)) {
    const double w = 0.1 * std::cos(p.x[0]);
    const double xi2 = p.xi[0] * p.xi[0] + p.xi[1] * p.xi[1];
    CHECK(std::abs(value(l, p, 0) - std::exp(-2 * w) * xi2) < 1e-14);
    // in two dimensions sqrt(g) g^{ij} is the identity for a conformal metric
    CHECK(std::abs(value(l, p, 1)) < 1e-14);
  }
}

TEST_CASE("first order part in three dimensions") {
  const auto chart = conformal_chart(3, 0.2);
  LaplaceSpec spec;
  spec.chart = chart;
  const auto l = laplace_symbol(spec);
  for (const Point& p : sample_points(3, 6, 5)) {
    const double w = 0.2 * std::cos(p.x[0]);
    const double dw = -0.2 * std::sin(p.x[0]);
    // -i e^{-3w} d_1(e^{w}) xi_1
    const cplx expected = cplx(0.0, -1.0) * std::exp(-2 * w) * dw * p.xi[0];
    CHECK(std::abs(value(l, p, 1) - expected) < 1e-13);
  }
}

TEST_CASE("curved Laplacian is symmetric after density conjugation") {
  const auto chart = conformal_chart(2, 0.15);
  LaplaceSpec spec;
  spec.chart = chart;
  spec.t = 0.5;
  spec.scalar_potential.push_back({{0, 1, 0, 0}, 0.2, 0.1});
  const auto up = expr_symbol(2, 1, 0.0, {"exp(0.15*cos(x(1)))"});
  const auto down = expr_symbol(2, 1, 0.0, {"exp(-0.15*cos(x(1)))"});
  const auto l = compose_symbols(compose_symbols(up, laplace_symbol(spec)), down);
  const auto adj = adjoint_symbol(l);
  for (const Point& p : sample_points(2, 4, 9)) CHECK(max_difference(l.stack(p, 3), adj.stack(p, 3)) < 1e-12);
}

TEST_CASE("matrix potential") {
  const auto chart = std::make_shared<const TorusChart>(build_metric(2, {}, 8));
  LaplaceSpec spec;
  spec.chart = chart;
  spec.rank = 2;
  spec.matrix_potential.push_back({0, 1, {{1, 0, 0, 0}, 0.5, 0.0}});
  const auto l = laplace_symbol(spec);
  const Point p = testutil::point(2, {0.3, 0.0}, {1.0, 0.0});
  const CMatrix v = l.slot_value(p, 2);
  CHECK(std::abs(v(0, 1) - 0.5 * std::cos(0.3)) < 1e-15);
  CHECK(std::abs(v(1, 0) - 0.5 * std::cos(0.3)) < 1e-15);
  CHECK(std::abs(v(0, 0)) < 1e-15);
}

TEST_CASE("potential density") {
  LaplaceSpec spec;
  spec.chart = std::make_shared<const TorusChart>(build_metric(2, {}, 16));
  spec.scalar_potential.push_back({{0, 0, 0, 0}, 1.0, 0.0});
  spec.scalar_potential.push_back({{1, 0, 0, 0}, 0.3, 0.0});
  NumericSettings s;
  s.estimate_error = false;
  const Report r = log_det_res(laplace_symbol(spec), s);
  CHECK(std::abs(r.value - 2.0 * oracle::pi) < 1e-10);
  REQUIRE(r.density.size() == 256);
  for (std::size_t i = 0; i < r.density.size(); ++i) {
    const double v = 1.0 + 0.3 * std::cos(r.density_x[i][0]);
    CHECK(std::abs(r.density[i] - v / (2.0 * oracle::pi)) < 1e-12);
  }
}

TEST_CASE("dbar symbols") {
  const auto [d, dd] = dbar_symbols_t2();
  const Point p = testutil::point(2, {0.0, 0.0}, {0.6, 0.8});
  CHECK(std::abs(value(d, p, 0) - cplx(-0.4, 0.3)) < 1e-15);
  CHECK(std::abs(value(dd, p, 0) - 0.25) < 1e-15);
  const auto adj = adjoint_symbol(d);
  CHECK(std::abs(value(adj, p, 0) - std::conj(value(d, p, 0))) < 1e-15);
  CHECK(std::abs(value(adj, p, 1)) < 1e-15);
}

TEST_CASE("winding symbols") {
  const auto w0 = winding_symbol_s1(0);
  for (double xi : {1.0, -1.0, 2.5}) {
    const Point p = testutil::point(1, {0.7}, {xi});
    CHECK(std::abs(value(w0, p, 0) - std::abs(xi)) < 1e-15);
  }
  const auto w2 = winding_symbol_s1(2);
  CHECK(std::abs(value(w2, testutil::point(1, {0.7}, {1.0}), 0) - std::polar(1.0, 1.4)) < 1e-15);
  CHECK(std::abs(value(w2, testutil::point(1, {0.7}, {-1.0}), 0) - 1.0) < 1e-15);
}

TEST_CASE("seeded fixtures are deterministic and homogeneous") {
  CHECK(negative_order_sources(-2, 5, 2) == negative_order_sources(-2, 5, 2));
  CHECK(negative_order_sources(-2, 5, 2) != negative_order_sources(-2, 6, 2));
  CHECK(random_elliptic_sources(2, 2, 2, 1) == random_elliptic_sources(2, 2, 2, 1));

  const auto samples = sample_points(2, 6, 2);
  const auto src = negative_order_sources(-1, 11, 2);
  for (std::size_t j = 0; j < src.size(); ++j)
    CHECK_NOTHROW(validate_term(2, expr_term(expr::parse(src[j]), -1.0 - static_cast<double>(j), nullptr, 1), samples));
  const auto esrc = random_elliptic_sources(2, 2, 2, 12);
  for (std::size_t j = 0; j < esrc.size(); ++j) {
    if (esrc[j].empty()) continue;
    CHECK_NOTHROW(validate_term(2, expr_term(expr::parse(esrc[j]), 2.0 - static_cast<double>(j), nullptr, 2), samples));
  }

  const auto a = random_elliptic_symbol(2, 2, 2, 12), b = random_elliptic_symbol(2, 2, 2, 12);
  for (const Point& p : samples) CHECK(max_difference(a.stack(p, 3), b.stack(p, 3)) == 0.0);
}

TEST_CASE("random elliptic principal parts are Hermitian positive") {
  for (unsigned long long seed = 0; seed < 10; ++seed) {
    const auto a = random_elliptic_symbol(2, 2, 1 + static_cast<int>(seed % 2), seed);
    for (const Point& p : sample_points(2, 6, seed)) {
      const CMatrix a0 = a.slot_value(p, 0);
      CHECK((a0 - a0.adjoint()).norm() < 1e-14);
      Eigen::SelfAdjointEigenSolver<CMatrix> es(a0);
      CHECK(es.eigenvalues().minCoeff() > 0.0);
    }
  }
}

TEST_CASE("expression symbols carry their declared order") {
  const auto s = expr_symbol(2, 1, 2.0, {"absxi^2", "", "cos(x(1))"});
  CHECK(s.order() == 2.0);
  CHECK(std::abs(value(s, testutil::point(2, {0.0, 0.0}, {0.0, 1.0}), 2) - 1.0) < 1e-15);
  CHECK(s.describe().find("terms") != std::string::npos);
}
