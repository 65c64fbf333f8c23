#include <cmath>
#include <optional>

#include "resdet/contour.hpp"
#include "resdet/expr.hpp"

namespace resdet::expr {

namespace {

constexpr double kDivisionFloor = 1e-14;

// Lazily computed metric jets shared by one evaluation.
struct JetCache {
  const EvalContext& ctx;
  const Point& p;
  const JetSpacePtr& space;
  std::optional<Jet> ginv, sqrtdet, absxig;

  const Jet& inverse_metric() {
    if (!ginv) ginv = ctx.chart ? ctx.chart->inverse_metric_jet(p, space) : Jet::identity(space, p, p.n);
    return *ginv;
  }
  const Jet& sqrt_det() {
    if (!sqrtdet)
      sqrtdet = ctx.chart ? ctx.chart->sqrt_det_jet(p, space) : Jet::identity(space, p, 1);
    return *sqrtdet;
  }
  const Jet& abs_xi_g() {
    if (!absxig) {
      if (ctx.chart) {
        absxig = ctx.chart->abs_xi_g_jet(p, space);
      } else {
        TorusChart flat(p.n, {}, 1);
        absxig = flat.abs_xi_g_jet(p, space);
      }
    }
    return *absxig;
  }
};

Jet promote(const Jet& s, int dim) {
  if (s.dim() == dim) return s;
  return scalar_product(s, Jet::identity(s.space_ptr(), s.anchor(), dim));
}

Jet scalar_function(const Jet& u, const std::vector<cplx>& d) {
  if (u.dim() != 1) throw Error(ErrorKind::ShapeMismatch, "cos/sin/exp need a scalar argument");
  return compose_scalar(u, d);
}

Jet invert(const Jet& v) {
  if (v.dim() == 1) {
    const double scale = std::max(1.0, v.max_abs());
    if (std::abs(v.scalar(0)) < kDivisionFloor * scale)
      throw Error(ErrorKind::EvaluationDomain, "division by a value that vanishes at the evaluation point");
  }
  try {
    return jet_inverse(v);
  } catch (const Error& e) {
    throw Error(ErrorKind::EvaluationDomain, std::string("inverse failed: ") + e.what());
  }
}

void check_index(int k, int n) {
  if (k < 1 || k > n)
    throw Error(ErrorKind::ShapeMismatch, "index " + std::to_string(k) + " exceeds dimension " + std::to_string(n));
}

Jet eval(const Expr& e, JetCache& c) {
  const Point& p = c.p;
  const auto& space = c.space;
  const int n = p.n;
  switch (e.kind) {
    case Kind::Number: return Jet::constant(space, p, CMatrix::Constant(1, 1, e.value));
    case Kind::X:
      check_index(e.a, n);
      return Jet::coordinate(space, p, e.a - 1);
    case Kind::Xi:
      check_index(e.a, n);
      return Jet::coordinate(space, p, n + e.a - 1);
    case Kind::Gup:
      check_index(e.a, n);
      check_index(e.b, n);
      return TorusChart::entry(c.inverse_metric(), e.a - 1, e.b - 1);
    case Kind::SqrtDetG: return c.sqrt_det();
    case Kind::AbsXiG: return c.abs_xi_g();
    case Kind::AbsXi: {
      TorusChart flat(n, {}, 1);
      return flat.abs_xi_g_jet(p, space);
    }
    case Kind::Identity: return Jet::identity(space, p, c.ctx.dim);
    case Kind::Matrix: {
      if (e.a != e.b) throw Error(ErrorKind::ShapeMismatch, "mat[...] must be square");
      CMatrix m(e.a, e.b);
      for (int r = 0; r < e.a; ++r)
        for (int col = 0; col < e.b; ++col) {
          const Expr& entry = *e.children[r * e.b + col];
          if (depends_on_x(entry, false) || depends_on_xi(entry))
            throw Error(ErrorKind::EvaluationDomain, "mat[...] entries must be constants");
          const Jet v = eval(entry, c);
          if (v.dim() != 1) throw Error(ErrorKind::ShapeMismatch, "mat[...] entries must be scalars");
          m(r, col) = v.scalar(0);
        }
      return Jet::constant(space, p, m);
    }
    case Kind::Neg: return -eval(*e.children[0], c);
    case Kind::Add:
    case Kind::Sub: {
      Jet l = eval(*e.children[0], c);
      Jet r = eval(*e.children[1], c);
      const int dim = std::max(l.dim(), r.dim());
      if ((l.dim() != 1 && l.dim() != dim) || (r.dim() != 1 && r.dim() != dim))
        throw Error(ErrorKind::ShapeMismatch, "matrix sizes differ in a sum");
      l = promote(l, dim);
      r = promote(r, dim);
      return e.kind == Kind::Add ? l + r : l - r;
    }
    case Kind::Mul: {
      const Jet l = eval(*e.children[0], c);
      const Jet r = eval(*e.children[1], c);
      if (l.dim() == 1) return scalar_product(l, r);
      if (r.dim() == 1) return scalar_product(r, l);
      if (l.dim() != r.dim()) throw Error(ErrorKind::ShapeMismatch, "matrix sizes differ in a product");
      return jet_product(l, r);
    }
    case Kind::Div: {
      const Jet l = eval(*e.children[0], c);
      const Jet r = eval(*e.children[1], c);
      if (r.dim() != 1) throw Error(ErrorKind::ShapeMismatch, "division needs a scalar denominator");
      return scalar_product(invert(r), l);
    }
    case Kind::Pow: {
      Jet base = eval(*e.children[0], c);
      int k = e.a;
      if (k < 0) {
        base = invert(base);
        k = -k;
      }
      Jet result = Jet::identity(space, p, base.dim());
      while (k > 0) {
        if (k & 1) result = jet_product(result, base);
        k >>= 1;
        if (k) base = jet_product(base, base);
      }
      return result;
    }
    case Kind::Cos:
    case Kind::Sin: {
      const Jet u = eval(*e.children[0], c);
      const cplx u0 = u.scalar(0);
      std::vector<cplx> d(space->order() + 1);
      const double phase = e.kind == Kind::Cos ? 0.0 : -kPi / 2.0;
      for (int k = 0; k < static_cast<int>(d.size()); ++k) {
        const cplx arg = u0 + phase + k * kPi / 2.0;
        d[k] = std::cos(arg);
      }
      return scalar_function(u, d);
    }
    case Kind::Exp: {
      const Jet u = eval(*e.children[0], c);
      return scalar_function(u, std::vector<cplx>(space->order() + 1, std::exp(u.scalar(0))));
    }
    case Kind::PosRay:
    case Kind::NegRay: {
      check_index(e.a, n);
      const double v = p.xi[e.a - 1];
      if (v == 0.0) throw Error(ErrorKind::EvaluationDomain, "ray selector evaluated at xi = 0");
      const bool on = e.kind == Kind::PosRay ? v > 0.0 : v < 0.0;
      return Jet::constant(space, p, CMatrix::Constant(1, 1, on ? 1.0 : 0.0));
    }
  }
  throw Error(ErrorKind::EvaluationDomain, "unknown expression node");
}

// ---------------------------------------------------------------------------

struct ValueContext {
  const EvalContext& ctx;
  const Point& p;
  std::optional<Eigen::MatrixXd> g;

  const Eigen::MatrixXd& metric() {
    if (!g) g = ctx.chart ? ctx.chart->metric(p.x.data()) : Eigen::MatrixXd::Identity(p.n, p.n);
    return *g;
  }
};

CMatrix promote_value(const CMatrix& s, int dim) {
  if (s.rows() == dim) return s;
  return s(0, 0) * CMatrix::Identity(dim, dim);
}

CMatrix value(const Expr& e, ValueContext& c) {
  const Point& p = c.p;
  const int n = p.n;
  auto scalar = [](cplx v) { return CMatrix::Constant(1, 1, v); };
  switch (e.kind) {
    case Kind::Number: return scalar(e.value);
    case Kind::X: check_index(e.a, n); return scalar(p.x[e.a - 1]);
    case Kind::Xi: check_index(e.a, n); return scalar(p.xi[e.a - 1]);
    case Kind::Gup: {
      check_index(e.a, n);
      check_index(e.b, n);
      return scalar(c.metric().inverse()(e.a - 1, e.b - 1));
    }
    case Kind::SqrtDetG: return scalar(std::sqrt(c.metric().determinant()));
    case Kind::AbsXiG: {
      Eigen::VectorXd xi(n);
      for (int i = 0; i < n; ++i) xi(i) = p.xi[i];
      return scalar(std::sqrt(xi.dot(c.metric().inverse() * xi)));
    }
    case Kind::AbsXi: return scalar(p.xi_norm());
    case Kind::Identity: return CMatrix::Identity(c.ctx.dim, c.ctx.dim);
    case Kind::Matrix: {
      CMatrix m(e.a, e.b);
      for (int r = 0; r < e.a; ++r)
        for (int col = 0; col < e.b; ++col) m(r, col) = value(*e.children[r * e.b + col], c)(0, 0);
      return m;
    }
    case Kind::Neg: return -value(*e.children[0], c);
    case Kind::Add:
    case Kind::Sub: {
      CMatrix l = value(*e.children[0], c);
      CMatrix r = value(*e.children[1], c);
      const int dim = static_cast<int>(std::max(l.rows(), r.rows()));
      l = promote_value(l, dim);
      r = promote_value(r, dim);
      return e.kind == Kind::Add ? CMatrix(l + r) : CMatrix(l - r);
    }
    case Kind::Mul: {
      const CMatrix l = value(*e.children[0], c);
      const CMatrix r = value(*e.children[1], c);
      if (l.rows() == 1) return l(0, 0) * r;
      if (r.rows() == 1) return r(0, 0) * l;
      return l * r;
    }
    case Kind::Div: {
      const CMatrix l = value(*e.children[0], c);
      const CMatrix r = value(*e.children[1], c);
      if (std::abs(r(0, 0)) < kDivisionFloor) throw Error(ErrorKind::EvaluationDomain, "division by zero");
      return l / r(0, 0);
    }
    case Kind::Pow: {
      CMatrix b = value(*e.children[0], c);
      if (e.a < 0) b = b.inverse();
      CMatrix r = CMatrix::Identity(b.rows(), b.rows());
      for (int k = 0; k < std::abs(e.a); ++k) r = r * b;
      return r;
    }
    case Kind::Cos: return scalar(std::cos(value(*e.children[0], c)(0, 0)));
    case Kind::Sin: return scalar(std::sin(value(*e.children[0], c)(0, 0)));
    case Kind::Exp: return scalar(std::exp(value(*e.children[0], c)(0, 0)));
    case Kind::PosRay: return scalar(p.xi[e.a - 1] > 0.0 ? 1.0 : 0.0);
    case Kind::NegRay: return scalar(p.xi[e.a - 1] < 0.0 ? 1.0 : 0.0);
  }
  throw Error(ErrorKind::EvaluationDomain, "unknown expression node");
}

}  // namespace

Jet eval_jet(const Expr& e, const EvalContext& ctx, const Point& p, const JetSpacePtr& space) {
  JetCache cache{ctx, p, space, {}, {}, {}};
  Jet v = eval(e, cache);
  if (v.dim() == 1 && ctx.dim > 1) v = promote(v, ctx.dim);
  return v;
}

CMatrix eval_value(const Expr& e, const EvalContext& ctx, const Point& p) {
  ValueContext c{ctx, p, {}};
  CMatrix v = value(e, c);
  if (v.rows() == 1 && ctx.dim > 1) v = promote_value(v, ctx.dim);
  return v;
}

}  // namespace resdet::expr
