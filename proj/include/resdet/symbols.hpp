#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "resdet/contour.hpp"
#include "resdet/jet.hpp"

namespace resdet {

namespace expr {
class Expr;
}

// Jets of the homogeneous terms of a symbol at one (x, xi) point.
// Slot j is meaningful through total degree order - j; coefficients above
// that are kept at zero, so a stack with order = size - 1 is exactly an
// element of the finite symbol algebra.
struct SymbolJetStack {
  Point point;
  int order = 0;
  int dim = 1;
  bool x_independent = false;
  std::vector<Jet> slots;

  int size() const { return static_cast<int>(slots.size()); }
  const Jet& operator[](int j) const { return slots[j]; }
  Jet& operator[](int j) { return slots[j]; }
};

SymbolJetStack identity_stack(const Point& p, int n_slots, int order, int dim);
SymbolJetStack zero_stack(const Point& p, int n_slots, int order, int dim);
// Zeroes slot j above degree order - j.
void grade(SymbolJetStack& s);
double max_difference(const SymbolJetStack& a, const SymbolJetStack& b);

// (a o b)_j = sum_{|mu|+k+l=j} (1/mu!) d_xi^mu a_k D_x^mu b_l,  D_x = -i d_x
SymbolJetStack compose_stacks(const SymbolJetStack& a, const SymbolJetStack& b);
SymbolJetStack add_stacks(const SymbolJetStack& a, const SymbolJetStack& b, int shift_b = 0);
SymbolJetStack scale_stack(const SymbolJetStack& a, cplx c);
// Formal adjoint; `a` must carry order >= target_order + size - 1.
SymbolJetStack adjoint_stack(const SymbolJetStack& a, int target_order);

// Resolvent recursion with the lambda-independent derivatives of `a`
// evaluated once.
class ResolventPlan {
 public:
  explicit ResolventPlan(const SymbolJetStack& a);
  // Throws ResolventSingular when a_0 - lambda is not invertible.
  SymbolJetStack operator()(cplx lambda) const;
  const SymbolJetStack& symbol() const { return a_; }

 private:
  struct Term {
    int k;
    MultiIndex mu;
    double mu_degree;
    Jet dxi_a;  // d_xi^mu a_k / mu!
  };
  SymbolJetStack a_;
  std::vector<std::vector<Term>> by_slot_;  // terms with k + |mu| = m, indexed by m
};

SymbolJetStack resolvent_stack(const SymbolJetStack& a, cplx lambda);
// Resolvent at lambda = 0; throws NotElliptic when a_0 is singular.
SymbolJetStack parametrix_stack(const SymbolJetStack& a);

// (i/2pi) \oint f(lambda) r(lambda)_j d lambda for every slot j.
SymbolJetStack contour_stack(const SymbolJetStack& a, const std::function<cplx(cplx)>& f,
                             const ContourOptions& options);

struct LogStack {
  SymbolJetStack q;   // q_0 ... q_{S-1}
  double type = 0.0;  // alpha
  Jet p0;             // q_0 - alpha log|xi| I
};

LogStack log_stack(const SymbolJetStack& a, double alpha, const ContourOptions& options);
SymbolJetStack power_stack_contour(const SymbolJetStack& a, cplx s, const ContourOptions& options);
// a^{-s} = sum_k (-s)^k / k! (log a)^k with an adaptive number of terms.
SymbolJetStack power_stack_series(const SymbolJetStack& a, cplx s, const ContourOptions& options,
                                  double tolerance = 1e-16, int max_terms = 400);
// Scalar jet of log|xi| at the anchor.
Jet log_abs_xi_jet(const JetSpacePtr& space, const Point& p);

// ---------------------------------------------------------------------------
// Finite symbol algebra: slot j lives in a jet space of order n - j.

struct FiniteSymbol {
  Point point;
  int dim = 1;
  std::vector<Jet> slots;  // n + 1 slots
};

FiniteSymbol finite_project(const SymbolJetStack& a, int n);
FiniteSymbol finite_compose(const FiniteSymbol& a, const FiniteSymbol& b);
FiniteSymbol finite_log(const FiniteSymbol& a, const ContourOptions& options);
double max_difference(const FiniteSymbol& a, const FiniteSymbol& b);

// ---------------------------------------------------------------------------

struct HomogeneousTerm {
  double degree = 0.0;
  // Jet of the term at p in the given space, as an N x N matrix jet.
  std::function<Jet(const Point& p, const JetSpacePtr& space)> evaluator;
  bool x_independent = false;
  std::shared_ptr<const expr::Expr> source;
};

class SymbolImpl {
 public:
  virtual ~SymbolImpl() = default;
  virtual int n() const = 0;
  virtual int dim() const = 0;
  virtual double order() const = 0;
  // Nonzero only for complex powers.
  virtual double order_imag() const { return 0.0; }
  // Coefficient c of the c log|xi| part carried by log symbols.
  virtual double log_type() const { return 0.0; }
  virtual bool x_independent() const = 0;
  virtual std::string describe() const = 0;
  // Slots 0..n_slots-1 graded at the given jet order (>= n_slots - 1).
  virtual SymbolJetStack compute(const Point& p, int n_slots, int order) const = 0;
};

class ClassicalSymbol {
 public:
  ClassicalSymbol() = default;
  explicit ClassicalSymbol(std::shared_ptr<const SymbolImpl> impl) : impl_(std::move(impl)) {}

  bool valid() const { return static_cast<bool>(impl_); }
  int n() const { return impl_->n(); }
  int dim() const { return impl_->dim(); }
  double order() const { return impl_->order(); }
  double order_imag() const { return impl_->order_imag(); }
  double log_type() const { return impl_->log_type(); }
  bool x_independent() const { return impl_->x_independent(); }
  std::string describe() const { return impl_->describe(); }
  const SymbolImpl& impl() const { return *impl_; }

  SymbolJetStack stack(const Point& p, int n_slots, int order) const;
  SymbolJetStack stack(const Point& p, int n_slots) const { return stack(p, n_slots, n_slots - 1); }
  // Value of slot j (constant term) at p.
  CMatrix slot_value(const Point& p, int j) const;

 private:
  std::shared_ptr<const SymbolImpl> impl_;
};

// Term-list symbol. When `complete` is false, slots past the declared terms
// raise TruncationUnderflow instead of reading as zero.
ClassicalSymbol term_symbol(int n, int dim, double order, std::vector<HomogeneousTerm> terms,
                            std::string name = "terms", bool complete = true);
ClassicalSymbol identity_symbol(int n, int dim);
ClassicalSymbol constant_symbol(int n, const CMatrix& value);

ClassicalSymbol compose_symbols(const ClassicalSymbol& a, const ClassicalSymbol& b);
ClassicalSymbol add_merge(const ClassicalSymbol& a, const ClassicalSymbol& b);
ClassicalSymbol scale_symbol(const ClassicalSymbol& a, cplx c);
ClassicalSymbol adjoint_symbol(const ClassicalSymbol& a);
ClassicalSymbol commutator_symbol(const ClassicalSymbol& a, const ClassicalSymbol& b);
ClassicalSymbol shift_symbol(const ClassicalSymbol& a, cplx t);
ClassicalSymbol parametrix_symbol(const ClassicalSymbol& a);
// Resolvent slots of `a` at one point (not a classical symbol for lambda != 0).
SymbolJetStack resolvent_slots(const ClassicalSymbol& a, cplx lambda, const Point& p, int n_slots);
ClassicalSymbol power_of_parametrix(const ClassicalSymbol& a, int k);
// Slots of the log symbol; order() reports 0 and log_type() the alpha.
ClassicalSymbol log_symbol(const ClassicalSymbol& a, const ContourOptions& options);

enum class PowerMethod { Contour, LogSeries };
ClassicalSymbol power_symbol(const ClassicalSymbol& a, cplx s, const ContourOptions& options,
                             PowerMethod method = PowerMethod::Contour);

// Points (x, xi) used for sampling checks: cosphere directions and x nodes.
std::vector<Point> sample_points(int n, int count, unsigned long long seed);

// Throws NotElliptic if a_0 is singular (condition > cap) at any sample.
void check_elliptic(const ClassicalSymbol& a, const std::vector<Point>& samples,
                    double condition_cap = kDefaultConditionCap);
bool is_elliptic(const ClassicalSymbol& a, const std::vector<Point>& samples,
                 double condition_cap = kDefaultConditionCap);

// t-scaling and 2 pi periodicity checks; throws NotHomogeneous on failure.
void validate_term(int n, const HomogeneousTerm& term, const std::vector<Point>& samples,
                   double tolerance = 1e-9);

}  // namespace resdet
