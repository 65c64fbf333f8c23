#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "resdet/error.hpp"
#include "resdet/geometry.hpp"
#include "resdet/jet.hpp"

namespace resdet::expr {

enum class Kind {
  Number,    // complex literal
  X,         // x(k)
  Xi,        // xi(k)
  Gup,       // gup(i, j)
  SqrtDetG,  // sqrtdetg
  AbsXiG,    // absxi_g
  AbsXi,     // absxi (Euclidean)
  Identity,  // I
  Matrix,    // mat[[..], ..]
  Neg,
  Add,
  Sub,
  Mul,
  Div,
  Pow,
  Cos,
  Sin,
  Exp,
  PosRay,  // pos(xi(k))
  NegRay,  // neg(xi(k))
};

class Expr;
using ExprPtr = std::shared_ptr<const Expr>;

class Expr {
 public:
  Kind kind = Kind::Number;
  cplx value{};         // Number
  int a = 0, b = 0;     // 1-based indices; Pow exponent in `a`; Matrix rows in `a`, cols in `b`
  std::vector<ExprPtr> children;

  static ExprPtr number(cplx v);
  static ExprPtr leaf(Kind k, int a = 0, int b = 0);
  static ExprPtr unary(Kind k, ExprPtr child, int a = 0);
  static ExprPtr binary(Kind k, ExprPtr l, ExprPtr r);
};

struct SourcePosition {
  int line = 1;
  int column = 1;
};

// SyntaxError / UnknownIdentifier with a position and the expected-token set.
class ParseError : public Error {
 public:
  ParseError(ErrorKind kind, SourcePosition pos, std::vector<std::string> expected, const std::string& message);
  const SourcePosition& position() const { return pos_; }
  const std::vector<std::string>& expected() const { return expected_; }

 private:
  SourcePosition pos_;
  std::vector<std::string> expected_;
};

ExprPtr parse(std::string_view source);
std::string print(const Expr& e);
bool equal(const Expr& a, const Expr& b);

// True when the value depends on x (metric primitives count unless the chart is flat).
bool depends_on_x(const Expr& e, bool flat_metric);
bool depends_on_xi(const Expr& e);
// Largest variable index used (x, xi, gup); 0 if none.
int max_index(const Expr& e);

struct EvalContext {
  const TorusChart* chart = nullptr;  // flat metric when null
  int dim = 1;                        // size of I
};

Jet eval_jet(const Expr& e, const EvalContext& ctx, const Point& p, const JetSpacePtr& space);
// Plain evaluation at (x, xi) without jets.
CMatrix eval_value(const Expr& e, const EvalContext& ctx, const Point& p);

}  // namespace resdet::expr
