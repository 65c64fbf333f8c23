#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles/oracles.hpp"
#include "resdet/contour.hpp"
#include "resdet/expr.hpp"
#include "test_util.hpp"

using namespace resdet;
using namespace resdet::expr;
using testutil::mono;

namespace {

cplx at(const std::string& src, const Point& p) { return eval_value(*parse(src), {}, p)(0, 0); }

// Random printable expressions over the grammar.
class Generator {
 public:
  explicit Generator(unsigned long long seed) : rng_(seed) {}

  // Transcendental functions take x-only arguments.
  ExprPtr make(int depth, bool x_only = false) {
    const int choice = pick(depth <= 0 ? 5 : 14);
    switch (choice) {
      case 0: return Expr::number(static_cast<double>(pick(9) + 1) / 4.0);
      case 1: return Expr::number(cplx(0.0, static_cast<double>(pick(5) + 1)));
      case 2: return Expr::leaf(Kind::X, pick(2) + 1);
      case 3: return x_only ? Expr::leaf(Kind::X, 1) : Expr::leaf(Kind::Xi, pick(2) + 1);
      case 4:
        if (x_only) return Expr::number(0.5);
        return pick(2) ? Expr::leaf(Kind::AbsXi) : Expr::leaf(Kind::Gup, pick(2) + 1, pick(2) + 1);
      case 5: return Expr::binary(Kind::Add, make(depth - 1, x_only), make(depth - 1, x_only));
      case 6: return Expr::binary(Kind::Sub, make(depth - 1, x_only), make(depth - 1, x_only));
      case 7: return Expr::binary(Kind::Mul, make(depth - 1, x_only), make(depth - 1, x_only));
      case 8: return Expr::binary(Kind::Div, make(depth - 1, x_only), make(depth - 1, x_only));
      case 9: return Expr::unary(Kind::Pow, make(depth - 1, x_only), pick(5) - 2);
      case 10: return Expr::unary(Kind::Neg, make(depth - 1, x_only));
      case 11: return Expr::unary(Kind::Cos, make(depth - 1, true));
      case 12: return Expr::unary(Kind::Exp, make(depth - 1, true));
      default: return Expr::unary(Kind::Sin, make(depth - 1, true));
    }
  }

 private:
  int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng_); }
  std::mt19937_64 rng_;
};

}  // namespace

TEST_CASE("parsing valid sources") {
  const auto e = parse("xi(1)^2 + xi(2)^2");
  CHECK(e->kind == Kind::Add);
  CHECK(depends_on_xi(*e));
  CHECK_FALSE(depends_on_x(*e, true));
  CHECK(max_index(*e) == 2);
  const auto c = parse("cos(x(1))*xi(1)");
  CHECK(depends_on_x(*c, true));
  CHECK(parse("gup(1,2)*xi(1)")->kind == Kind::Mul);
  CHECK_FALSE(depends_on_x(*parse("gup(1,2)"), true));
  CHECK(depends_on_x(*parse("gup(1,2)"), false));
  CHECK(parse("mat[[1, 2i], [-2i, 3]]*I")->kind == Kind::Mul);
}

TEST_CASE("syntax errors carry positions") {
  try {
    parse("xi(1) +");
    FAIL("expected SyntaxError");
  } catch (const ParseError& e) {
    CHECK(e.kind() == ErrorKind::SyntaxError);
    CHECK(e.position().line == 1);
    CHECK(e.position().column == 8);
    CHECK_FALSE(e.expected().empty());
  }
  try {
    parse("xi(1)\n  * foo(2)");
    FAIL("expected UnknownIdentifier");
  } catch (const ParseError& e) {
    CHECK(e.kind() == ErrorKind::UnknownIdentifier);
    CHECK(e.position().line == 2);
    CHECK(e.position().column == 5);
  }
  CHECK_THROWS_AS(parse("(xi(1)"), ParseError);
  CHECK_THROWS_AS(parse("xi(1) $ 2"), ParseError);
  CHECK_THROWS_AS(parse("mat[[1, 2], [3]]"), ParseError);
}

TEST_CASE("polynomial jet") {
  const Point p = testutil::point(2, {0.0, 0.0}, {1.0, 0.0});
  const Jet j = eval_jet(*parse("xi(1)^2+xi(2)^2"), {}, p, JetSpace::get(2, 2));
  auto c = [&](std::initializer_list<int> e) { return j.coefficient(mono(e))(0, 0); };
  CHECK(std::abs(c({0, 0, 0, 0}) - 1.0) < 1e-15);
  CHECK(std::abs(c({0, 0, 1, 0}) - 2.0) < 1e-15);
  CHECK(std::abs(c({0, 0, 0, 1})) < 1e-15);
  CHECK(std::abs(c({0, 0, 2, 0}) - 1.0) < 1e-15);
  CHECK(std::abs(c({0, 0, 0, 2}) - 1.0) < 1e-15);
  CHECK(std::abs(c({0, 0, 1, 1})) < 1e-15);
}

TEST_CASE("cosine jet") {
  const Point p = testutil::point(1, {0.0}, {1.0});
  const Jet j = eval_jet(*parse("cos(x(1))"), {}, p, JetSpace::get(1, 2));
  CHECK(std::abs(j.coefficient(mono({0, 0}))(0, 0) - 1.0) < 1e-15);
  CHECK(std::abs(j.coefficient(mono({1, 0}))(0, 0)) < 1e-15);
  CHECK(std::abs(j.coefficient(mono({2, 0}))(0, 0) + 0.5) < 1e-15);
}

TEST_CASE("evaluation domain") {
  const Point p = testutil::point(2, {0.0, 0.0}, {0.0, 1.0});
  try {
    eval_jet(*parse("1/xi(1)"), {}, p, JetSpace::get(2, 1));
    FAIL("expected EvaluationDomain");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::EvaluationDomain);
  }
  CHECK_THROWS_AS(eval_value(*parse("xi(3)"), {}, p), Error);
}

TEST_CASE("values of primitives") {
  const Point p = testutil::point(2, {0.5, 1.0}, {0.6, -0.8});
  CHECK(std::abs(at("absxi", p) - 1.0) < 1e-15);
  CHECK(std::abs(at("pos(xi(1)) + 2*neg(xi(2))", p) - 3.0) < 1e-15);
  CHECK(std::abs(at("exp(i*x(1))", p) - std::polar(1.0, 0.5)) < 1e-15);
  CHECK(std::abs(at("pi", p) - kPi) < 1e-15);
  CHECK(std::abs(at("absxi^(-2)*2", p) - 2.0) < 1e-15);
  CHECK(std::abs(at("2^3 - -1", p) - 9.0) < 1e-15);
  CHECK(std::abs(at("-2^2", p) + 4.0) < 1e-15);
  CHECK(std::abs(at("sqrtdetg*gup(1,1) + gup(1,2)", p) - 1.0) < 1e-15);
  CHECK(eval_value(*parse("mat[[1, 2], [3, 4]]*I"), {nullptr, 2}, p)(1, 0) == cplx(3.0, 0.0));
}

TEST_CASE("metric primitives use the chart") {
  MetricData m;
  m.conformal.push_back({{1, 0, 0, 0}, 0.1, 0.0});
  const TorusChart chart = build_metric(2, m, 8);
  const Point p = testutil::point(2, {0.7, 0.0}, {1.0, 0.0});
  const EvalContext ctx{&chart, 1};
  const double w = 0.1 * std::cos(0.7);
  CHECK(std::abs(eval_value(*parse("sqrtdetg"), ctx, p)(0, 0) - std::exp(2 * w)) < 1e-14);
  CHECK(std::abs(eval_value(*parse("gup(1,1)"), ctx, p)(0, 0) - std::exp(-2 * w)) < 1e-14);
  CHECK(std::abs(eval_value(*parse("absxi_g"), ctx, p)(0, 0) - std::exp(-w)) < 1e-14);
}

TEST_CASE("round trip over a generated corpus") {
  Generator gen(2024);
  for (int i = 0; i < 50; ++i) {
    const ExprPtr e = gen.make(4);
    const std::string text = print(*e);
    INFO(text);
    const ExprPtr back = parse(text);
    CHECK(equal(*e, *back));
    CHECK(print(*back) == text);
  }
}

TEST_CASE("jets agree with finite differences of values") {
  const char* sources[] = {"cos(x(1))*xi(1)^2*absxi^(-1)", "exp(i*x(2))*xi(1)*xi(2)/absxi^2",
                           "sin(x(1) - x(2))*(xi(1) + 2*xi(2))", "absxi^3 + 0.5*cos(2*x(1))*absxi"};
  const Point p = testutil::point(2, {0.4, 1.2}, {0.6, 0.7});
  const auto space = JetSpace::get(2, 2);
  const double h = 1e-4;
  for (const char* src : sources) {
    INFO(src);
    const auto e = parse(src);
    const Jet j = eval_jet(*e, {}, p, space);
    CHECK(std::abs(j.scalar(0) - eval_value(*e, {}, p)(0, 0)) < 1e-14);
    for (int v = 0; v < 4; ++v) {
      auto f = [&](double t) {
        Point q = p;
        if (v < 2)
          q.x[v] += t;
        else
          q.xi[v - 2] += t;
        return eval_value(*e, {}, q)(0, 0);
      };
      const cplx d1 = (f(h) - f(-h)) / (2 * h);
      const cplx d2 = (f(h) - 2.0 * f(0) + f(-h)) / (h * h);
      resdet::MultiIndex m1{}, m2{};
      m1[v] = 1;
      m2[v] = 2;
      CHECK(std::abs(j.coefficient(m1)(0, 0) - d1) < 1e-7);
      CHECK(std::abs(2.0 * j.coefficient(m2)(0, 0) - d2) < 1e-5);
    }
  }
}
