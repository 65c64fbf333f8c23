#include "resdet/jet.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <unordered_map>

#include "resdet/error.hpp"

namespace resdet {

double Point::xi_norm() const {
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += xi[i] * xi[i];
  return std::sqrt(s);
}

namespace {

std::uint64_t encode(const MultiIndex& e) {
  std::uint64_t key = 0;
  for (int v = 0; v < 2 * kMaxDim; ++v) key = (key << 6) | e[v];
  return key;
}

void enumerate_degree(int vars, int degree, int v, MultiIndex& cur, std::vector<MultiIndex>& out) {
  if (v == vars - 1) {
    cur[v] = static_cast<std::uint8_t>(degree);
    out.push_back(cur);
    cur[v] = 0;
    return;
  }
  for (int e = degree; e >= 0; --e) {
    cur[v] = static_cast<std::uint8_t>(e);
    enumerate_degree(vars, degree - e, v + 1, cur, out);
  }
  cur[v] = 0;
}

}  // namespace

struct JetSpace::Cache {
  std::unordered_map<std::uint64_t, int> index;
  std::mutex mutex;
  std::map<std::uint64_t, std::vector<DerivEntry>> derivatives;
};

JetSpace::~JetSpace() = default;

JetSpace::JetSpace(int n, int order) : n_(n), order_(order), cache_(std::make_unique<Cache>()) {
  if (n < 1 || n > kMaxDim) throw Error(ErrorKind::UnsupportedDimension, "jet dimension n must be in 1..4");
  if (order < 0 || order > 40) throw Error(ErrorKind::InvalidProjection, "jet order out of range");
  const int vars = 2 * n;
  degree_prefix_.assign(order + 1, 0);
  for (int d = 0; d <= order; ++d) {
    MultiIndex cur{};
    enumerate_degree(vars, d, 0, cur, monomials_);
    degree_prefix_[d] = static_cast<int>(monomials_.size());
  }
  degrees_.reserve(monomials_.size());
  for (std::size_t i = 0; i < monomials_.size(); ++i) {
    degrees_.push_back(total_degree(monomials_[i]));
    cache_->index.emplace(encode(monomials_[i]), static_cast<int>(i));
  }
  product_offsets_.reserve(monomials_.size() + 1);
  product_offsets_.push_back(0);
  for (std::size_t i = 0; i < monomials_.size(); ++i) {
    const int nj = count_upto(order - degrees_[i]);
    for (int j = 0; j < nj; ++j) {
      MultiIndex e{};
      for (int v = 0; v < vars; ++v) e[v] = monomials_[i][v] + monomials_[j][v];
      product_table_.push_back(cache_->index.at(encode(e)));
    }
    product_offsets_.push_back(static_cast<int>(product_table_.size()));
  }
}

std::shared_ptr<const JetSpace> JetSpace::get(int n, int order) {
  static std::mutex mutex;
  static std::map<std::pair<int, int>, std::shared_ptr<const JetSpace>> registry;
  std::lock_guard lock(mutex);
  auto& slot = registry[{n, order}];
  if (!slot) slot = std::make_shared<const JetSpace>(n, order);
  return slot;
}

int JetSpace::count_upto(int degree) const {
  if (degree < 0) return 0;
  if (degree > order_) degree = order_;
  return degree_prefix_[degree];
}

int JetSpace::index_of(const MultiIndex& e) const {
  auto it = cache_->index.find(encode(e));
  return it == cache_->index.end() ? -1 : it->second;
}

std::span<const JetSpace::DerivEntry> JetSpace::derivative(const MultiIndex& mu) const {
  const std::uint64_t key = encode(mu);
  std::lock_guard lock(cache_->mutex);
  auto it = cache_->derivatives.find(key);
  if (it != cache_->derivatives.end()) return it->second;
  std::vector<DerivEntry> table;
  const int vars = 2 * n_;
  for (int i = 0; i < size(); ++i) {
    const auto& e = monomials_[i];
    bool ok = true;
    double factor = 1.0;
    MultiIndex r{};
    for (int v = 0; v < vars && ok; ++v) {
      if (e[v] < mu[v]) {
        ok = false;
        break;
      }
      r[v] = e[v] - mu[v];
      for (int t = e[v]; t > r[v]; --t) factor *= t;
    }
    if (!ok) continue;
    table.push_back({i, cache_->index.at(encode(r)), factor});
  }
  return cache_->derivatives.emplace(key, std::move(table)).first->second;
}

// ---------------------------------------------------------------------------

Jet::Jet(JetSpacePtr space, const Point& anchor, int dim)
    : space_(std::move(space)), anchor_(anchor), dim_(dim) {
  if (dim < 1) throw Error(ErrorKind::ShapeMismatch, "jet matrix dimension must be >= 1");
  coeffs_.assign(static_cast<std::size_t>(space_->size()) * dim * dim, cplx(0.0));
}

Jet Jet::constant(JetSpacePtr space, const Point& anchor, const CMatrix& value) {
  if (value.rows() != value.cols()) throw Error(ErrorKind::ShapeMismatch, "jet coefficients must be square");
  Jet j(std::move(space), anchor, static_cast<int>(value.rows()));
  j.set_coefficient(0, value);
  return j;
}

Jet Jet::identity(JetSpacePtr space, const Point& anchor, int dim) {
  return constant(std::move(space), anchor, CMatrix::Identity(dim, dim));
}

Jet Jet::coordinate(JetSpacePtr space, const Point& anchor, int var) {
  Jet j(space, anchor, 1);
  const int n = space->n();
  j.coeffs_[0] = var < n ? anchor.x[var] : anchor.xi[var - n];
  if (space->order() >= 1) {
    MultiIndex e{};
    e[var] = 1;
    j.coeffs_[space->index_of(e)] = 1.0;
  }
  return j;
}

bool Jet::block_is_zero(int i) const {
  const cplx* b = block(i);
  for (int k = 0; k < dim_ * dim_; ++k)
    if (b[k] != cplx(0.0)) return false;
  return true;
}

CMatrix Jet::coefficient(int i) const {
  CMatrix m(dim_, dim_);
  const cplx* b = block(i);
  for (int r = 0; r < dim_; ++r)
    for (int c = 0; c < dim_; ++c) m(r, c) = b[r * dim_ + c];
  return m;
}

CMatrix Jet::coefficient(const MultiIndex& e) const {
  const int i = space_->index_of(e);
  if (i < 0) return CMatrix::Zero(dim_, dim_);
  return coefficient(i);
}

void Jet::set_coefficient(int i, const CMatrix& value) {
  if (value.rows() != dim_ || value.cols() != dim_)
    throw Error(ErrorKind::ShapeMismatch, "coefficient block has the wrong size");
  cplx* b = block(i);
  for (int r = 0; r < dim_; ++r)
    for (int c = 0; c < dim_; ++c) b[r * dim_ + c] = value(r, c);
}

Jet& Jet::operator+=(const Jet& other) {
  check_compatible(*this, other);
  for (std::size_t k = 0; k < coeffs_.size(); ++k) coeffs_[k] += other.coeffs_[k];
  return *this;
}

Jet& Jet::operator-=(const Jet& other) {
  check_compatible(*this, other);
  for (std::size_t k = 0; k < coeffs_.size(); ++k) coeffs_[k] -= other.coeffs_[k];
  return *this;
}

Jet& Jet::operator*=(cplx s) {
  for (auto& c : coeffs_) c *= s;
  return *this;
}

Jet Jet::operator-() const {
  Jet r = *this;
  r *= -1.0;
  return r;
}

void Jet::add_to_constant(const CMatrix& value) {
  if (value.rows() != dim_ || value.cols() != dim_)
    throw Error(ErrorKind::ShapeMismatch, "constant has the wrong size");
  cplx* b = block(0);
  for (int r = 0; r < dim_; ++r)
    for (int c = 0; c < dim_; ++c) b[r * dim_ + c] += value(r, c);
}

void Jet::add_identity(cplx s) {
  cplx* b = block(0);
  for (int r = 0; r < dim_; ++r) b[r * dim_ + r] += s;
}

double Jet::max_abs() const {
  double m = 0.0;
  for (const auto& c : coeffs_) m = std::max(m, std::abs(c));
  return m;
}

bool Jet::is_zero() const {
  return std::all_of(coeffs_.begin(), coeffs_.end(), [](cplx c) { return c == cplx(0.0); });
}

void Jet::zero_above(int degree) {
  const std::size_t from = static_cast<std::size_t>(space_->count_upto(degree)) * dim_ * dim_;
  std::fill(coeffs_.begin() + static_cast<std::ptrdiff_t>(from), coeffs_.end(), cplx(0.0));
}

Jet Jet::conj_transpose() const {
  Jet r(space_, anchor_, dim_);
  for (int i = 0; i < size(); ++i) {
    const cplx* b = block(i);
    cplx* o = r.block(i);
    for (int p = 0; p < dim_; ++p)
      for (int q = 0; q < dim_; ++q) o[q * dim_ + p] = std::conj(b[p * dim_ + q]);
  }
  return r;
}

Jet Jet::trace() const {
  Jet r(space_, anchor_, 1);
  for (int i = 0; i < size(); ++i) {
    const cplx* b = block(i);
    cplx s = 0.0;
    for (int p = 0; p < dim_; ++p) s += b[p * dim_ + p];
    r.coeffs_[i] = s;
  }
  return r;
}

// ---------------------------------------------------------------------------

void check_compatible(const Jet& a, const Jet& b) {
  if (a.empty() || b.empty()) throw Error(ErrorKind::ShapeMismatch, "empty jet");
  if (a.space_ptr() != b.space_ptr())
    throw Error(ErrorKind::ShapeMismatch, "jets have different order or chart dimension");
  if (a.dim() != b.dim()) throw Error(ErrorKind::ShapeMismatch, "jets have different matrix size");
  if (!(a.anchor() == b.anchor())) throw Error(ErrorKind::ShapeMismatch, "jets have different anchors");
}

namespace {

template <int N>
void fixed_block_accumulate(Jet& out, const Jet& a, const Jet& b, cplx scale, int max_degree,
                            const std::vector<char>& nzb) {
  constexpr int NN = N * N;
  const JetSpace& sp = a.space();
  const int na = sp.count_upto(max_degree);
  for (int i = 0; i < na; ++i) {
    if (a.block_is_zero(i)) continue;
    const cplx* ai = a.block(i);
    cplx s[NN];
    for (int k = 0; k < NN; ++k) s[k] = scale * ai[k];
    const int nj = sp.count_upto(max_degree - sp.degree(i));
    const auto prod = sp.products(i);
    for (int j = 0; j < nj; ++j) {
      if (!nzb[j]) continue;
      const cplx* bj = b.block(j);
      cplx* o = out.block(prod[j]);
      for (int r = 0; r < N; ++r)
        for (int c = 0; c < N; ++c) {
          cplx acc = o[r * N + c];
          for (int t = 0; t < N; ++t) acc += s[r * N + t] * bj[t * N + c];
          o[r * N + c] = acc;
        }
    }
  }
}

}  // namespace

void multiply_accumulate(Jet& out, const Jet& a, const Jet& b, cplx scale, int max_degree) {
  check_compatible(a, b);
  check_compatible(out, a);
  const JetSpace& sp = a.space();
  max_degree = std::min(max_degree, sp.order());
  if (max_degree < 0) return;
  const int N = a.dim();
  const int NN = N * N;
  const int na = sp.count_upto(max_degree);

  thread_local std::vector<char> nzb;
  nzb.assign(na, 0);
  for (int j = 0; j < na; ++j) nzb[j] = b.block_is_zero(j) ? 0 : 1;

  if (N == 1) {
    const auto ad = a.data();
    const auto bd = b.data();
    auto od = out.data();
    for (int i = 0; i < na; ++i) {
      if (ad[i] == cplx(0.0)) continue;
      const cplx ai = scale * ad[i];
      const int nj = sp.count_upto(max_degree - sp.degree(i));
      const auto prod = sp.products(i);
      for (int j = 0; j < nj; ++j) {
        if (!nzb[j]) continue;
        od[prod[j]] += ai * bd[j];
      }
    }
    return;
  }

  switch (N) {
    case 2: return fixed_block_accumulate<2>(out, a, b, scale, max_degree, nzb);
    case 3: return fixed_block_accumulate<3>(out, a, b, scale, max_degree, nzb);
    default: break;
  }
  thread_local std::vector<cplx> scaled;
  scaled.resize(NN);
  for (int i = 0; i < na; ++i) {
    if (a.block_is_zero(i)) continue;
    const cplx* ai = a.block(i);
    for (int k = 0; k < NN; ++k) scaled[k] = scale * ai[k];
    const int nj = sp.count_upto(max_degree - sp.degree(i));
    const auto prod = sp.products(i);
    for (int j = 0; j < nj; ++j) {
      if (!nzb[j]) continue;
      const cplx* bj = b.block(j);
      cplx* o = out.block(prod[j]);
      for (int r = 0; r < N; ++r)
        for (int t = 0; t < N; ++t) {
          const cplx art = scaled[r * N + t];
          if (art == cplx(0.0)) continue;
          for (int c = 0; c < N; ++c) o[r * N + c] += art * bj[t * N + c];
        }
    }
  }
}

Jet jet_product(const Jet& a, const Jet& b) {
  check_compatible(a, b);
  Jet out(a.space_ptr(), a.anchor(), a.dim());
  multiply_accumulate(out, a, b, 1.0, a.order());
  return out;
}

Jet scalar_product(const Jet& scalar, const Jet& m) {
  if (scalar.dim() != 1) throw Error(ErrorKind::ShapeMismatch, "scalar_product expects a scalar jet");
  if (scalar.space_ptr() != m.space_ptr() || !(scalar.anchor() == m.anchor()))
    throw Error(ErrorKind::ShapeMismatch, "scalar_product operands differ in space or anchor");
  const JetSpace& sp = m.space();
  const int NN = m.dim() * m.dim();
  Jet out(m.space_ptr(), m.anchor(), m.dim());
  for (int i = 0; i < sp.size(); ++i) {
    const cplx s = scalar.scalar(i);
    if (s == cplx(0.0)) continue;
    const int nj = sp.count_upto(sp.order() - sp.degree(i));
    const auto prod = sp.products(i);
    for (int j = 0; j < nj; ++j) {
      const cplx* bj = m.block(j);
      cplx* o = out.block(prod[j]);
      for (int k = 0; k < NN; ++k) o[k] += s * bj[k];
    }
  }
  return out;
}

Jet left_multiply(const CMatrix& c, const Jet& a) {
  const int N = a.dim();
  if (c.rows() != N || c.cols() != N) throw Error(ErrorKind::ShapeMismatch, "left_multiply size mismatch");
  Jet out(a.space_ptr(), a.anchor(), N);
  for (int i = 0; i < a.size(); ++i) {
    if (a.block_is_zero(i)) continue;
    const cplx* b = a.block(i);
    cplx* o = out.block(i);
    for (int r = 0; r < N; ++r)
      for (int t = 0; t < N; ++t) {
        const cplx crt = c(r, t);
        for (int q = 0; q < N; ++q) o[r * N + q] += crt * b[t * N + q];
      }
  }
  return out;
}

Jet jet_inverse(const Jet& a, double condition_cap) {
  const int N = a.dim();
  const CMatrix c0 = a.constant_term();
  CMatrix inv0;
  if (N == 1) {
    if (std::abs(c0(0, 0)) < 1e-300) throw Error(ErrorKind::SingularJet, "constant term is zero");
    inv0 = CMatrix::Constant(1, 1, 1.0 / c0(0, 0));
  } else {
    Eigen::JacobiSVD<CMatrix> svd(c0);
    const auto& sv = svd.singularValues();
    const double smax = sv(0);
    const double smin = sv(N - 1);
    if (!(smax > 0.0) || !(smin > 0.0) || smax / smin > condition_cap)
      throw Error(ErrorKind::SingularJet, "constant term is singular or ill-conditioned");
    inv0 = c0.partialPivLu().inverse();
  }
  // (c0 + d)^{-1} = sum_k (-c0^{-1} d)^k c0^{-1}
  Jet e = left_multiply(inv0, a);
  {
    cplx* b = e.block(0);
    for (int k = 0; k < N * N; ++k) b[k] = 0.0;
  }
  Jet result = Jet::constant(a.space_ptr(), a.anchor(), inv0);
  Jet term = result;
  for (int k = 1; k <= a.order(); ++k) {
    Jet next(a.space_ptr(), a.anchor(), N);
    multiply_accumulate(next, e, term, -1.0, a.order());
    if (next.is_zero()) break;
    result += next;
    term = std::move(next);
  }
  return result;
}

Jet taylor_project(const Jet& a, int m) {
  if (m < 0 || m > a.order())
    throw Error(ErrorKind::InvalidProjection, "projection degree must lie in [0, order]");
  auto target = JetSpace::get(a.space().n(), m);
  Jet out(target, a.anchor(), a.dim());
  const int NN = a.dim() * a.dim();
  // graded ordering makes the target monomials a prefix of the source ones
  for (int i = 0; i < target->size(); ++i)
    std::copy(a.block(i), a.block(i) + NN, out.block(i));
  return out;
}

Jet embed(const Jet& a, const JetSpacePtr& target) {
  if (target->n() != a.space().n() || target->order() < a.order())
    throw Error(ErrorKind::ShapeMismatch, "embed needs a space of the same chart and higher order");
  Jet out(target, a.anchor(), a.dim());
  const int NN = a.dim() * a.dim();
  for (int i = 0; i < a.size(); ++i) std::copy(a.block(i), a.block(i) + NN, out.block(i));
  return out;
}

Jet derivative(const Jet& a, const MultiIndex& mu, cplx scale) {
  Jet out(a.space_ptr(), a.anchor(), a.dim());
  const int NN = a.dim() * a.dim();
  for (const auto& d : a.space().derivative(mu)) {
    const cplx* b = a.block(d.src);
    cplx* o = out.block(d.dst);
    const cplx f = scale * d.factor;
    for (int k = 0; k < NN; ++k) o[k] += f * b[k];
  }
  return out;
}

Jet compose_scalar(const Jet& a, std::span<const cplx> derivatives) {
  if (a.dim() != 1) throw Error(ErrorKind::ShapeMismatch, "compose_scalar expects a scalar jet");
  const int d = a.order();
  Jet u = a;
  u.data()[0] = 0.0;
  Jet result = Jet::constant(a.space_ptr(), a.anchor(), CMatrix::Constant(1, 1, derivatives[0]));
  Jet power = Jet::identity(a.space_ptr(), a.anchor(), 1);
  double fact = 1.0;
  for (int k = 1; k <= d && k < static_cast<int>(derivatives.size()); ++k) {
    power = jet_product(power, u);
    fact *= k;
    if (power.is_zero()) break;
    result += (derivatives[k] / fact) * power;
  }
  return result;
}

double max_difference(const Jet& a, const Jet& b) {
  check_compatible(a, b);
  double m = 0.0;
  for (std::size_t k = 0; k < a.data().size(); ++k) m = std::max(m, std::abs(a.data()[k] - b.data()[k]));
  return m;
}

MultiIndex xi_index(int n, std::span<const int> mu) {
  MultiIndex e{};
  for (int i = 0; i < n; ++i) e[n + i] = static_cast<std::uint8_t>(mu[i]);
  return e;
}

MultiIndex x_index(int n, std::span<const int> mu) {
  MultiIndex e{};
  for (int i = 0; i < n; ++i) e[i] = static_cast<std::uint8_t>(mu[i]);
  return e;
}

double multi_factorial(const MultiIndex& mu) {
  double f = 1.0;
  for (auto e : mu)
    for (int t = 2; t <= e; ++t) f *= t;
  return f;
}

int total_degree(const MultiIndex& mu) {
  int s = 0;
  for (auto e : mu) s += e;
  return s;
}

}  // namespace resdet
