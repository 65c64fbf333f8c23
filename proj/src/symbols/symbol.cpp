#include <cmath>
#include <random>
#include <sstream>

#include "resdet/error.hpp"
#include "resdet/symbols.hpp"

namespace resdet {

namespace {

bool is_integer(double v) { return std::abs(v - std::round(v)) < 1e-12; }

std::string format_number(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

class TermSymbol final : public SymbolImpl {
 public:
  TermSymbol(int n, int dim, double order, std::vector<HomogeneousTerm> terms, std::string name,
             bool complete)
      : n_(n), dim_(dim), order_(order), terms_(std::move(terms)), name_(std::move(name)),
        complete_(complete) {
    if (n < 1 || n > kMaxDim) throw Error(ErrorKind::UnsupportedDimension, "chart dimension must be 1..4");
    x_independent_ = true;
    for (std::size_t j = 0; j < terms_.size(); ++j) {
      if (std::abs(terms_[j].degree - (order - static_cast<double>(j))) > 1e-12)
        throw Error(ErrorKind::OrderMismatch,
                    "term " + std::to_string(j) + " must have degree order - " + std::to_string(j));
      if (!terms_[j].evaluator)
        throw Error(ErrorKind::ShapeMismatch, "term " + std::to_string(j) + " has no evaluator");
      x_independent_ = x_independent_ && terms_[j].x_independent;
    }
  }

  int n() const override { return n_; }
  int dim() const override { return dim_; }
  double order() const override { return order_; }
  bool x_independent() const override { return x_independent_; }
  std::string describe() const override { return name_; }

  SymbolJetStack compute(const Point& p, int n_slots, int order) const override {
    SymbolJetStack s = zero_stack(p, n_slots, order, dim_);
    s.x_independent = x_independent_;
    const auto space = JetSpace::get(n_, order);
    for (int j = 0; j < n_slots; ++j) {
      if (j >= static_cast<int>(terms_.size())) {
        if (!complete_)
          throw Error(ErrorKind::TruncationUnderflow,
                      name_ + " declares " + std::to_string(terms_.size()) + " terms but slot " +
                          std::to_string(j) + " was requested");
        continue;
      }
      Jet v = terms_[j].evaluator(p, space);
      if (v.dim() != dim_) throw Error(ErrorKind::ShapeMismatch, "term evaluator returned the wrong size");
      s.slots[j] = std::move(v);
    }
    grade(s);
    return s;
  }

 private:
  int n_;
  int dim_;
  double order_;
  std::vector<HomogeneousTerm> terms_;
  std::string name_;
  bool complete_;
  bool x_independent_ = true;
};

class ComposeSymbol final : public SymbolImpl {
 public:
  ComposeSymbol(ClassicalSymbol a, ClassicalSymbol b) : a_(std::move(a)), b_(std::move(b)) {}
  int n() const override { return a_.n(); }
  int dim() const override { return a_.dim(); }
  double order() const override { return a_.order() + b_.order(); }
  double order_imag() const override { return a_.order_imag() + b_.order_imag(); }
  bool x_independent() const override { return a_.x_independent() && b_.x_independent(); }
  std::string describe() const override { return "(" + a_.describe() + " o " + b_.describe() + ")"; }
  SymbolJetStack compute(const Point& p, int s, int d) const override {
    return compose_stacks(a_.stack(p, s, d), b_.stack(p, s, d));
  }

 private:
  ClassicalSymbol a_, b_;
};

class SumSymbol final : public SymbolImpl {
 public:
  SumSymbol(ClassicalSymbol a, ClassicalSymbol b) {
    if (a.order() < b.order()) std::swap(a, b);
    shift_ = static_cast<int>(std::lround(a.order() - b.order()));
    top_ = std::move(a);
    low_ = std::move(b);
  }
  int n() const override { return top_.n(); }
  int dim() const override { return top_.dim(); }
  double order() const override { return top_.order(); }
  double order_imag() const override { return top_.order_imag(); }
  bool x_independent() const override { return top_.x_independent() && low_.x_independent(); }
  std::string describe() const override { return "(" + top_.describe() + " + " + low_.describe() + ")"; }
  SymbolJetStack compute(const Point& p, int s, int d) const override {
    SymbolJetStack out = top_.stack(p, s, d);
    out.x_independent = x_independent();
    if (s - shift_ >= 1) {
      const SymbolJetStack lo = low_.stack(p, s - shift_, d);
      for (int j = 0; j < lo.size(); ++j) out.slots[j + shift_] += lo[j];
    }
    grade(out);
    return out;
  }

 private:
  ClassicalSymbol top_, low_;
  int shift_ = 0;
};

class ScaleSymbol final : public SymbolImpl {
 public:
  ScaleSymbol(ClassicalSymbol a, cplx c) : a_(std::move(a)), c_(c) {}
  int n() const override { return a_.n(); }
  int dim() const override { return a_.dim(); }
  double order() const override { return a_.order(); }
  double order_imag() const override { return a_.order_imag(); }
  double log_type() const override { return a_.log_type(); }
  bool x_independent() const override { return a_.x_independent(); }
  std::string describe() const override {
    std::ostringstream os;
    os << "(" << c_.real() << (c_.imag() < 0 ? "" : "+") << c_.imag() << "i)*" << a_.describe();
    return os.str();
  }
  SymbolJetStack compute(const Point& p, int s, int d) const override {
    return scale_stack(a_.stack(p, s, d), c_);
  }

 private:
  ClassicalSymbol a_;
  cplx c_;
};

class AdjointSymbol final : public SymbolImpl {
 public:
  explicit AdjointSymbol(ClassicalSymbol a) : a_(std::move(a)) {}
  int n() const override { return a_.n(); }
  int dim() const override { return a_.dim(); }
  double order() const override { return a_.order(); }
  double order_imag() const override { return -a_.order_imag(); }
  bool x_independent() const override { return a_.x_independent(); }
  std::string describe() const override { return a_.describe() + "*"; }
  SymbolJetStack compute(const Point& p, int s, int d) const override {
    const int wide = a_.x_independent() ? d : d + s - 1;
    return adjoint_stack(a_.stack(p, s, wide), d);
  }

 private:
  ClassicalSymbol a_;
};

class ParametrixSymbol final : public SymbolImpl {
 public:
  explicit ParametrixSymbol(ClassicalSymbol a) : a_(std::move(a)) {}
  int n() const override { return a_.n(); }
  int dim() const override { return a_.dim(); }
  double order() const override { return -a_.order(); }
  double order_imag() const override { return -a_.order_imag(); }
  bool x_independent() const override { return a_.x_independent(); }
  std::string describe() const override { return "parametrix(" + a_.describe() + ")"; }
  SymbolJetStack compute(const Point& p, int s, int d) const override {
    return parametrix_stack(a_.stack(p, s, d));
  }

 private:
  ClassicalSymbol a_;
};

class LogSymbol final : public SymbolImpl {
 public:
  LogSymbol(ClassicalSymbol a, ContourOptions options) : a_(std::move(a)), options_(options) {}
  int n() const override { return a_.n(); }
  int dim() const override { return a_.dim(); }
  double order() const override { return 0.0; }
  double log_type() const override { return a_.order(); }
  bool x_independent() const override { return a_.x_independent(); }
  std::string describe() const override { return "log(" + a_.describe() + ")"; }
  SymbolJetStack compute(const Point& p, int s, int d) const override {
    return log_stack(a_.stack(p, s, d), a_.order(), options_).q;
  }

 private:
  ClassicalSymbol a_;
  ContourOptions options_;
};

class PowerSymbol final : public SymbolImpl {
 public:
  PowerSymbol(ClassicalSymbol a, cplx s, ContourOptions options, PowerMethod method)
      : a_(std::move(a)), s_(s), options_(options), method_(method) {}
  int n() const override { return a_.n(); }
  int dim() const override { return a_.dim(); }
  double order() const override { return -s_.real() * a_.order(); }
  double order_imag() const override { return -s_.imag() * a_.order(); }
  bool x_independent() const override { return a_.x_independent(); }
  std::string describe() const override {
    return "(" + a_.describe() + ")^(-" + format_number(s_.real()) + ")";
  }
  SymbolJetStack compute(const Point& p, int s, int d) const override {
    const SymbolJetStack a = a_.stack(p, s, d);
    return method_ == PowerMethod::Contour ? power_stack_contour(a, s_, options_)
                                           : power_stack_series(a, s_, options_);
  }

 private:
  ClassicalSymbol a_;
  cplx s_;
  ContourOptions options_;
  PowerMethod method_;
};

void require_same_chart(const ClassicalSymbol& a, const ClassicalSymbol& b) {
  if (!a.valid() || !b.valid()) throw Error(ErrorKind::ShapeMismatch, "empty symbol");
  if (a.n() != b.n()) throw Error(ErrorKind::ShapeMismatch, "symbols live on different charts");
  if (a.dim() != b.dim()) throw Error(ErrorKind::ShapeMismatch, "symbols have different matrix sizes");
}

}  // namespace

SymbolJetStack ClassicalSymbol::stack(const Point& p, int n_slots, int order) const {
  if (!impl_) throw Error(ErrorKind::ShapeMismatch, "empty symbol");
  if (p.n != impl_->n()) throw Error(ErrorKind::ShapeMismatch, "point and symbol differ in dimension");
  if (n_slots < 1 || order < n_slots - 1)
    throw Error(ErrorKind::InvalidProjection, "jet order must be at least the number of slots minus one");
  return impl_->compute(p, n_slots, order);
}

CMatrix ClassicalSymbol::slot_value(const Point& p, int j) const {
  return stack(p, j + 1, j)[j].constant_term();
}

ClassicalSymbol term_symbol(int n, int dim, double order, std::vector<HomogeneousTerm> terms,
                            std::string name, bool complete) {
  return ClassicalSymbol(
      std::make_shared<TermSymbol>(n, dim, order, std::move(terms), std::move(name), complete));
}

ClassicalSymbol constant_symbol(int n, const CMatrix& value) {
  HomogeneousTerm t;
  t.degree = 0.0;
  t.x_independent = true;
  t.evaluator = [value](const Point& p, const JetSpacePtr& space) { return Jet::constant(space, p, value); };
  std::ostringstream name;
  if (value.rows() == 1)
    name << "const(" << value(0, 0).real() << ")";
  else
    name << "const[" << value.rows() << "x" << value.rows() << "]";
  return term_symbol(n, static_cast<int>(value.rows()), 0.0, {t}, name.str());
}

ClassicalSymbol identity_symbol(int n, int dim) {
  ClassicalSymbol c = constant_symbol(n, CMatrix::Identity(dim, dim));
  return c;
}

ClassicalSymbol compose_symbols(const ClassicalSymbol& a, const ClassicalSymbol& b) {
  require_same_chart(a, b);
  return ClassicalSymbol(std::make_shared<ComposeSymbol>(a, b));
}

ClassicalSymbol add_merge(const ClassicalSymbol& a, const ClassicalSymbol& b) {
  require_same_chart(a, b);
  if (!is_integer(a.order() - b.order()) || std::abs(a.order_imag() - b.order_imag()) > 1e-12)
    throw Error(ErrorKind::OrderMismatch, "orders " + format_number(a.order()) + " and " +
                                              format_number(b.order()) + " differ by a non-integer");
  return ClassicalSymbol(std::make_shared<SumSymbol>(a, b));
}

ClassicalSymbol scale_symbol(const ClassicalSymbol& a, cplx c) {
  return ClassicalSymbol(std::make_shared<ScaleSymbol>(a, c));
}

ClassicalSymbol adjoint_symbol(const ClassicalSymbol& a) {
  return ClassicalSymbol(std::make_shared<AdjointSymbol>(a));
}

ClassicalSymbol commutator_symbol(const ClassicalSymbol& a, const ClassicalSymbol& b) {
  return add_merge(compose_symbols(a, b), scale_symbol(compose_symbols(b, a), -1.0));
}

ClassicalSymbol shift_symbol(const ClassicalSymbol& a, cplx t) {
  if (!is_integer(a.order()))
    throw Error(ErrorKind::OrderMismatch, "shift needs an integer order, got " + format_number(a.order()));
  if (t == cplx(0.0)) return a;
  return add_merge(a, constant_symbol(a.n(), t * CMatrix::Identity(a.dim(), a.dim())));
}

ClassicalSymbol parametrix_symbol(const ClassicalSymbol& a) {
  return ClassicalSymbol(std::make_shared<ParametrixSymbol>(a));
}

SymbolJetStack resolvent_slots(const ClassicalSymbol& a, cplx lambda, const Point& p, int n_slots) {
  return resolvent_stack(a.stack(p, n_slots), lambda);
}

ClassicalSymbol power_of_parametrix(const ClassicalSymbol& a, int k) {
  if (k < 1) throw Error(ErrorKind::InvalidOrder, "parametrix power must be >= 1");
  const ClassicalSymbol q = parametrix_symbol(a);
  ClassicalSymbol out = q;
  for (int i = 1; i < k; ++i) out = compose_symbols(out, q);
  return out;
}

ClassicalSymbol log_symbol(const ClassicalSymbol& a, const ContourOptions& options) {
  return ClassicalSymbol(std::make_shared<LogSymbol>(a, options));
}

ClassicalSymbol power_symbol(const ClassicalSymbol& a, cplx s, const ContourOptions& options,
                             PowerMethod method) {
  return ClassicalSymbol(std::make_shared<PowerSymbol>(a, s, options, method));
}

std::vector<Point> sample_points(int n, int count, unsigned long long seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(0.0, 2.0 * kPi);
  std::normal_distribution<double> gauss;
  std::vector<Point> out;
  out.reserve(count);
  for (int c = 0; c < count; ++c) {
    Point p;
    p.n = n;
    for (int i = 0; i < n; ++i) p.x[i] = ux(rng);
    if (n == 1) {
      p.xi[0] = (c % 2 == 0) ? 1.0 : -1.0;
    } else {
      double norm = 0.0;
      do {
        norm = 0.0;
        for (int i = 0; i < n; ++i) {
          p.xi[i] = gauss(rng);
          norm += p.xi[i] * p.xi[i];
        }
      } while (norm < 1e-12);
      norm = std::sqrt(norm);
      for (int i = 0; i < n; ++i) p.xi[i] /= norm;
    }
    out.push_back(p);
  }
  return out;
}

bool is_elliptic(const ClassicalSymbol& a, const std::vector<Point>& samples, double condition_cap) {
  for (const auto& p : samples) {
    const CMatrix a0 = a.slot_value(p, 0);
    Eigen::JacobiSVD<CMatrix> svd(a0);
    const auto& sv = svd.singularValues();
    const double smin = sv(sv.size() - 1);
    if (!(smin > 0.0) || sv(0) / smin > condition_cap) return false;
  }
  return true;
}

void check_elliptic(const ClassicalSymbol& a, const std::vector<Point>& samples, double condition_cap) {
  if (!is_elliptic(a, samples, condition_cap))
    throw Error(ErrorKind::NotElliptic, a.describe() + " has a singular leading symbol on the cosphere");
}

void validate_term(int n, const HomogeneousTerm& term, const std::vector<Point>& samples, double tolerance) {
  const auto space = JetSpace::get(n, 0);
  for (const auto& p : samples) {
    const CMatrix v = term.evaluator(p, space).constant_term();
    for (double t : {1.5, 2.0}) {
      Point q = p;
      for (int i = 0; i < n; ++i) q.xi[i] *= t;
      const CMatrix vt = term.evaluator(q, space).constant_term();
      const CMatrix expect = std::pow(t, term.degree) * v;
      const double scale = std::max(vt.norm(), expect.norm());
      if ((vt - expect).norm() > tolerance * std::max(scale, 1e-300) && scale > 1e-300)
        throw Error(ErrorKind::NotHomogeneous,
                    "term fails the scaling test for degree " + format_number(term.degree));
    }
    for (int i = 0; i < n; ++i) {
      Point q = p;
      q.x[i] += 2.0 * kPi;
      const CMatrix vq = term.evaluator(q, space).constant_term();
      if ((vq - v).norm() > 1e-9 * (1.0 + v.norm()))
        throw Error(ErrorKind::NotHomogeneous, "term is not 2 pi periodic in x(" + std::to_string(i + 1) + ")");
    }
  }
}

}  // namespace resdet
