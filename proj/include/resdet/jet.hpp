#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace resdet {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;

inline constexpr int kMaxDim = 4;

// A point (x, xi) of T*T^n. Only the first n entries of each array are used.
struct Point {
  int n = 0;
  std::array<double, kMaxDim> x{};
  std::array<double, kMaxDim> xi{};

  double xi_norm() const;
  friend bool operator==(const Point&, const Point&) = default;
};

// Exponents over the 2n Taylor variables (dx_1..dx_n, dxi_1..dxi_n).
using MultiIndex = std::array<std::uint8_t, 2 * kMaxDim>;

// Monomial bookkeeping shared by every jet with the same (n, order).
// Monomials are stored in graded order, so the monomials of total degree
// <= m always form the prefix [0, count_upto(m)).
class JetSpace {
 public:
  struct DerivEntry {
    int src;
    int dst;
    double factor;
  };

  static std::shared_ptr<const JetSpace> get(int n, int order);

  int n() const { return n_; }
  int variables() const { return 2 * n_; }
  int order() const { return order_; }
  int size() const { return static_cast<int>(monomials_.size()); }
  int count_upto(int degree) const;
  int degree(int i) const { return degrees_[i]; }
  const MultiIndex& exponents(int i) const { return monomials_[i]; }
  int index_of(const MultiIndex& e) const;

  // products(i)[j] is the index of monomial_i * monomial_j, defined for
  // j < count_upto(order - degree(i)).
  std::span<const int> products(int i) const {
    return {product_table_.data() + product_offsets_[i],
            product_table_.data() + product_offsets_[i + 1]};
  }

  // Table for the plain partial derivative d^mu; cached per mu.
  std::span<const DerivEntry> derivative(const MultiIndex& mu) const;

  int x_var(int i) const { return i; }
  int xi_var(int i) const { return n_ + i; }

  JetSpace(int n, int order);

 private:
  int n_;
  int order_;
  std::vector<MultiIndex> monomials_;
  std::vector<int> degrees_;
  std::vector<int> degree_prefix_;
  std::vector<int> product_offsets_;
  std::vector<int> product_table_;
  struct Cache;
  std::unique_ptr<Cache> cache_;

 public:
  ~JetSpace();
};

using JetSpacePtr = std::shared_ptr<const JetSpace>;

// Truncated Taylor polynomial in (dx, dxi) at an anchor point with N x N
// complex matrix coefficients. Blocks are stored row-major.
class Jet {
 public:
  Jet() = default;
  Jet(JetSpacePtr space, const Point& anchor, int dim);

  static Jet constant(JetSpacePtr space, const Point& anchor, const CMatrix& value);
  static Jet identity(JetSpacePtr space, const Point& anchor, int dim);
  // Scalar jet of the coordinate function `var` (value + d var).
  static Jet coordinate(JetSpacePtr space, const Point& anchor, int var);

  int order() const { return space_->order(); }
  int dim() const { return dim_; }
  int size() const { return space_->size(); }
  const Point& anchor() const { return anchor_; }
  const JetSpace& space() const { return *space_; }
  const JetSpacePtr& space_ptr() const { return space_; }
  bool empty() const { return !space_; }

  cplx* block(int i) { return coeffs_.data() + static_cast<std::size_t>(i) * dim_ * dim_; }
  const cplx* block(int i) const {
    return coeffs_.data() + static_cast<std::size_t>(i) * dim_ * dim_;
  }
  bool block_is_zero(int i) const;

  CMatrix coefficient(int i) const;
  CMatrix coefficient(const MultiIndex& e) const;
  void set_coefficient(int i, const CMatrix& value);
  CMatrix constant_term() const { return coefficient(0); }
  cplx scalar(int i) const { return coeffs_[i]; }

  std::span<cplx> data() { return coeffs_; }
  std::span<const cplx> data() const { return coeffs_; }

  Jet& operator+=(const Jet& other);
  Jet& operator-=(const Jet& other);
  Jet& operator*=(cplx s);
  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator*(cplx s, Jet a) { return a *= s; }
  Jet operator-() const;

  // this += value * I (constant term only)
  void add_to_constant(const CMatrix& value);
  void add_identity(cplx s);

  double max_abs() const;
  bool is_zero() const;
  // Drops every coefficient of total degree > degree, keeping the space.
  void zero_above(int degree);

  Jet conj_transpose() const;
  Jet trace() const;

 private:
  JetSpacePtr space_;
  Point anchor_;
  int dim_ = 0;
  std::vector<cplx> coeffs_;
};

void check_compatible(const Jet& a, const Jet& b);

// Truncated product a * b (matrix order preserved).
Jet jet_product(const Jet& a, const Jet& b);
// out += scale * a * b keeping only terms of total degree <= max_degree.
void multiply_accumulate(Jet& out, const Jet& a, const Jet& b, cplx scale, int max_degree);
// Product of a scalar jet with a matrix jet.
Jet scalar_product(const Jet& scalar, const Jet& m);
// Left-multiplies every coefficient block by a constant matrix.
Jet left_multiply(const CMatrix& c, const Jet& a);

inline constexpr double kDefaultConditionCap = 1e12;

Jet jet_inverse(const Jet& a, double condition_cap = kDefaultConditionCap);

// Keeps monomials of degree <= m in a space of order m.
Jet taylor_project(const Jet& a, int m);
// Re-expresses a jet in a space of higher order (new coefficients zero).
Jet embed(const Jet& a, const JetSpacePtr& target);

// Plain partial derivative d^mu; the result lives in the same space.
Jet derivative(const Jet& a, const MultiIndex& mu, cplx scale = 1.0);

// f(a) for a scalar jet given f^(k)(a(0)) for k = 0..order.
Jet compose_scalar(const Jet& a, std::span<const cplx> derivatives);

double max_difference(const Jet& a, const Jet& b);

MultiIndex xi_index(int n, std::span<const int> mu);
MultiIndex x_index(int n, std::span<const int> mu);
double multi_factorial(const MultiIndex& mu);
int total_degree(const MultiIndex& mu);

}  // namespace resdet
