#include <doctest.h>

#include <cmath>

#include "resdet/error.hpp"
#include "resdet/oplib.hpp"
#include "resdet/symbols.hpp"
#include "test_util.hpp"

using namespace resdet;

namespace {

cplx value(const ClassicalSymbol& a, const Point& p, int j) { return a.slot_value(p, j)(0, 0); }

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::IoError;
}

double stack_gap(const ClassicalSymbol& a, const ClassicalSymbol& b, int n, int slots, unsigned long long seed) {
  double worst = 0.0;
  for (const Point& p : sample_points(n, 6, seed)) worst = std::max(worst, max_difference(a.stack(p, slots), b.stack(p, slots)));
  return worst;
}

}  // namespace

TEST_CASE("identity is neutral for composition") {
  const auto a = random_elliptic_symbol(2, 2, 2, 7);
  const auto id = identity_symbol(2, 2);
  CHECK(stack_gap(compose_symbols(id, a), a, 2, 3, 1) < 1e-13);
  CHECK(stack_gap(compose_symbols(a, id), a, 2, 3, 2) < 1e-13);
}

TEST_CASE("composition is not commutative") {
  const auto xi = expr_symbol(1, 1, 1.0, {"xi(1)"});
  const auto xxi = expr_symbol(1, 1, 1.0, {"x(1)*xi(1)"});
  const Point p = testutil::point(1, {0.4}, {1.3});
  const auto ab = compose_symbols(xi, xxi), ba = compose_symbols(xxi, xi);
  CHECK(std::abs(value(ab, p, 0) - value(ba, p, 0)) < 1e-14);
  CHECK(std::abs(value(ab, p, 1) - value(ba, p, 1) - cplx(0.0, -1.3)) < 1e-14);
  CHECK(std::abs(value(ab, p, 0) - 0.4 * 1.3 * 1.3) < 1e-14);
}

TEST_CASE("composition is associative") {
  const auto a = random_elliptic_symbol(2, 1, 2, 3);
  const auto b = random_elliptic_symbol(2, 1, 1, 4);
  const auto c = negative_order_symbol(-1, 5, 2);
  CHECK(stack_gap(compose_symbols(compose_symbols(a, b), c), compose_symbols(a, compose_symbols(b, c)), 2, 3, 9) <
        1e-11);
}

TEST_CASE("parametrix of the shifted flat Laplacian") {
  const auto a = flat_laplace(2, 1.0);
  const auto q = parametrix_symbol(a);
  const Point p = testutil::unit_point(2);
  CHECK(std::abs(value(q, p, 0) - 1.0) < 1e-14);
  CHECK(std::abs(value(q, p, 1)) < 1e-14);
  CHECK(std::abs(value(q, p, 2) + 1.0) < 1e-14);
  const Point p2 = testutil::point(2, {0.0, 0.0}, {0.0, 2.0});
  CHECK(std::abs(value(q, p2, 2) + 1.0 / 16.0) < 1e-14);
  for (const Point& s : sample_points(2, 5, 3)) {
    const SymbolJetStack prod = compose_stacks(a.stack(s, 3), q.stack(s, 3));
    CHECK(max_difference(prod, identity_stack(s, 3, 2, 1)) < 1e-13);
  }
}

TEST_CASE("addition requires integer order differences") {
  const auto a = flat_laplace(2, 0.0);
  const auto b = term_symbol(2, 1, 0.5, {zero_term(0.5, 1)});
  CHECK(kind_of([&] { add_merge(a, b); }) == ErrorKind::OrderMismatch);
  const auto c = add_merge(a, identity_symbol(2, 1));
  CHECK(std::abs(value(c, testutil::unit_point(2), 2) - 1.0) < 1e-15);
}

TEST_CASE("formal adjoint picks up a derivative term") {
  const auto a = expr_symbol(1, 1, 1.0, {"x(1)*xi(1)"});
  const auto adj = adjoint_symbol(a);
  const Point p = testutil::point(1, {0.7}, {0.9});
  CHECK(std::abs(value(adj, p, 0) - 0.7 * 0.9) < 1e-14);
  CHECK(std::abs(value(adj, p, 1) - cplx(0.0, -1.0)) < 1e-14);
  const auto twice = adjoint_symbol(adj);
  CHECK(stack_gap(twice, a, 1, 2, 4) < 1e-12);
}

TEST_CASE("resolvent slots with a potential") {
  const auto a = expr_symbol(2, 1, 2.0, {"xi(1)^2 + xi(2)^2", "", "0.3*cos(x(1))"});
  const cplx lambda(-0.5, 0.7);
  for (const Point& p : sample_points(2, 4, 11)) {
    const SymbolJetStack r = resolvent_slots(a, lambda, p, 3);
    const cplx d = p.xi[0] * p.xi[0] + p.xi[1] * p.xi[1] - lambda;
    CHECK(std::abs(r[0].scalar(0) - 1.0 / d) < 1e-14);
    CHECK(std::abs(r[1].scalar(0)) < 1e-14);
    CHECK(std::abs(r[2].scalar(0) + 0.3 * std::cos(p.x[0]) / (d * d)) < 1e-14);
  }
}

TEST_CASE("resolvent quasi-homogeneity") {
  for (const double t : {1.5, 2.0}) {
  const auto a = random_elliptic_symbol(2, 2, 2, 21);
  const Point p = testutil::point(2, {0.3, 1.9}, {0.6, 0.8});
  const cplx lambda(-1.0, 0.5);
  Point pt = p;
  pt.xi[0] *= t;
  pt.xi[1] *= t;
  const SymbolJetStack r = resolvent_slots(a, lambda, p, 3);
  const SymbolJetStack rt = resolvent_slots(a, lambda * t * t, pt, 3);
  for (int j = 0; j < 3; ++j) {
    const CMatrix lhs = rt[j].constant_term();
    const CMatrix rhs = std::pow(t, -2 - j) * r[j].constant_term();
    CHECK((lhs - rhs).norm() < 1e-8 * rhs.norm());
  }
  }
}

TEST_CASE("resolvent is a right inverse") {
  const auto a = random_elliptic_symbol(2, 2, 2, 31);
  const cplx lambda(-2.0, 1.0);
  for (const Point& p : sample_points(2, 4, 5)) {
    SymbolJetStack shifted = a.stack(p, 3);
    shifted[0].add_identity(-lambda);
    const SymbolJetStack prod = compose_stacks(shifted, resolvent_slots(a, lambda, p, 3));
    CHECK(max_difference(prod, identity_stack(p, 3, 2, 2)) < 1e-12);
  }
}

TEST_CASE("ellipticity is detected") {
  const auto a = expr_symbol(2, 1, 1.0, {"xi(1)"});
  CHECK(kind_of([&] { check_elliptic(a, {testutil::point(2, {0.2, 0.1}, {0, 1})}); }) == ErrorKind::NotElliptic);
  CHECK(kind_of([&] { parametrix_stack(a.stack(testutil::point(2, {0, 0}, {0, 1}), 2)); }) ==
        ErrorKind::NotElliptic);
  CHECK_NOTHROW(check_elliptic(flat_laplace(2, 1.0), sample_points(2, 16, 1)));
}

TEST_CASE("log symbol of the shifted Laplacian") {
  const auto lg = log_symbol(flat_laplace(2, 1.0), ContourOptions{});
  CHECK(lg.log_type() == doctest::Approx(2.0));
  const Point p = testutil::unit_point(2);
  CHECK(std::abs(value(lg, p, 0)) < 1e-12);
  CHECK(std::abs(value(lg, p, 1)) < 1e-12);
  CHECK(std::abs(value(lg, p, 2) - 1.0) < 1e-12);
  const Point p2 = testutil::point(2, {0.0, 0.0}, {2.0, 0.0});
  CHECK(std::abs(value(lg, p2, 0) - 2.0 * std::log(2.0)) < 1e-12);
  CHECK(std::abs(value(lg, p2, 2) - 0.25) < 1e-12);
}

TEST_CASE("complex powers") {
  const auto a = flat_laplace(2, 1.0);
  const Point p = testutil::unit_point(2);
  for (cplx s : {cplx(0.5, 0.0), cplx(-1.5, 0.0), cplx(0.25, 0.75)}) {
    const auto pw = power_symbol(a, s, ContourOptions{});
    const auto ps = power_symbol(a, s, ContourOptions{}, PowerMethod::LogSeries);
    CHECK(std::abs(value(pw, p, 0) - 1.0) < 1e-12);
    CHECK(std::abs(value(pw, p, 2) + s) < 1e-12);
    CHECK(stack_gap(pw, ps, 2, 3, 8) < 1e-10);
  }
}

TEST_CASE("derivative of the power at zero is minus the log") {
  const auto a = random_elliptic_symbol(2, 1, 2, 41);
  const double h = 1e-4;
  const ContourOptions o;
  for (const Point& p : sample_points(2, 4, 6)) {
    const SymbolJetStack A = a.stack(p, 3);
    const SymbolJetStack plus = power_stack_contour(A, h, o), minus = power_stack_contour(A, -h, o);
    const SymbolJetStack lg = log_stack(A, 2.0, o).q;
    for (int j = 0; j < 3; ++j) {
      const CMatrix fd = (plus[j].constant_term() - minus[j].constant_term()) / (2.0 * h);
      CHECK((fd + lg[j].constant_term()).norm() < 1e-6);
    }
  }
}

TEST_CASE("log is independent of the admissible cut") {
  const auto a = random_elliptic_symbol(2, 2, 2, 51);
  ContourOptions o1, o2;
  o2.theta = 0.55 * kPi;
  CHECK(stack_gap(log_symbol(a, o1), log_symbol(a, o2), 2, 3, 7) < 1e-10);
}

TEST_CASE("finite algebra is a homomorphic image") {
  const auto a = random_elliptic_symbol(2, 2, 2, 61);
  const auto b = negative_order_symbol(-1, 62, 2, 2);
  for (const Point& p : sample_points(2, 4, 63)) {
    const SymbolJetStack A = a.stack(p, 3, 4), B = b.stack(p, 3, 4);
    const FiniteSymbol lhs = finite_project(compose_stacks(A, B), 2);
    const FiniteSymbol rhs = finite_compose(finite_project(A, 2), finite_project(B, 2));
    CHECK(max_difference(lhs, rhs) < 1e-12);
  }
}

TEST_CASE("truncated term lists") {
  HomogeneousTerm t0 = expr_term(expr::parse("absxi^2"), 2.0, nullptr, 1);
  const auto incomplete = term_symbol(2, 1, 2.0, {t0}, "short", false);
  CHECK(kind_of([&] { incomplete.stack(testutil::unit_point(2), 3); }) == ErrorKind::TruncationUnderflow);
  const auto complete = term_symbol(2, 1, 2.0, {t0}, "short", true);
  CHECK(complete.stack(testutil::unit_point(2), 3)[2].is_zero());
}

TEST_CASE("term validation") {
  const auto samples = sample_points(2, 6, 1);
  CHECK_NOTHROW(validate_term(2, expr_term(expr::parse("xi(1)*xi(2)*cos(x(1))"), 2.0, nullptr, 1), samples));
  CHECK(kind_of([&] { validate_term(2, expr_term(expr::parse("xi(1)^2 + 1"), 2.0, nullptr, 1), samples); }) ==
        ErrorKind::NotHomogeneous);
  CHECK(kind_of([&] { validate_term(2, expr_term(expr::parse("x(1)*xi(1)"), 1.0, nullptr, 1), samples); }) ==
        ErrorKind::NotHomogeneous);
}
