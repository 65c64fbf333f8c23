#include <algorithm>
#include <cmath>

#include "resdet/error.hpp"
#include "resdet/symbols.hpp"

namespace resdet {

namespace {

void enumerate(int n, int remaining, int v, MultiIndex& cur, std::vector<MultiIndex>& out,
               bool xi) {
  if (v == n) {
    out.push_back(cur);
    return;
  }
  const int slot = xi ? n + v : v;
  for (int e = 0; e <= remaining; ++e) {
    cur[slot] = static_cast<std::uint8_t>(e);
    enumerate(n, remaining - e, v + 1, cur, out, xi);
  }
  cur[slot] = 0;
}

// Multi-indices over the xi variables with |mu| <= max_degree.
std::vector<MultiIndex> xi_indices(int n, int max_degree) {
  std::vector<MultiIndex> out;
  MultiIndex cur{};
  if (max_degree >= 0) enumerate(n, max_degree, 0, cur, out, true);
  return out;
}

// Same multi-index moved onto the x variables.
MultiIndex to_x(int n, const MultiIndex& mu) {
  MultiIndex r{};
  for (int i = 0; i < n; ++i) r[i] = mu[n + i];
  return r;
}

cplx minus_i_power(int k) {
  static const cplx table[4] = {1.0, cplx(0, -1), -1.0, cplx(0, 1)};
  return table[k & 3];
}

void check_same_shape(const SymbolJetStack& a, const SymbolJetStack& b) {
  if (a.size() != b.size() || a.order != b.order || a.dim != b.dim || !(a.point == b.point))
    throw Error(ErrorKind::ShapeMismatch, "symbol stacks differ in slots, order, size or point");
}

}  // namespace

SymbolJetStack zero_stack(const Point& p, int n_slots, int order, int dim) {
  SymbolJetStack s;
  s.point = p;
  s.order = order;
  s.dim = dim;
  s.x_independent = true;
  auto space = JetSpace::get(p.n, order);
  s.slots.assign(n_slots, Jet(space, p, dim));
  return s;
}

SymbolJetStack identity_stack(const Point& p, int n_slots, int order, int dim) {
  SymbolJetStack s = zero_stack(p, n_slots, order, dim);
  s.slots[0].add_identity(1.0);
  return s;
}

void grade(SymbolJetStack& s) {
  for (int j = 0; j < s.size(); ++j) s.slots[j].zero_above(s.order - j);
}

double max_difference(const SymbolJetStack& a, const SymbolJetStack& b) {
  check_same_shape(a, b);
  double m = 0.0;
  for (int j = 0; j < a.size(); ++j) m = std::max(m, max_difference(a[j], b[j]));
  return m;
}

SymbolJetStack compose_stacks(const SymbolJetStack& a, const SymbolJetStack& b) {
  check_same_shape(a, b);
  const int S = a.size();
  const int d = a.order;
  const int n = a.point.n;
  SymbolJetStack out = zero_stack(a.point, S, d, a.dim);
  out.x_independent = a.x_independent && b.x_independent;
  const auto mus = xi_indices(n, b.x_independent ? 0 : S - 1);
  for (const auto& mu : mus) {
    const int m = total_degree(mu);
    const MultiIndex mx = to_x(n, mu);
    std::vector<Jet> db(S - m);
    for (int l = 0; l + m < S; ++l)
      db[l] = m == 0 ? b[l] : derivative(b[l], mx, minus_i_power(m));
    for (int k = 0; k + m < S; ++k) {
      if (a[k].is_zero()) continue;
      const Jet da = m == 0 ? a[k] : derivative(a[k], mu, 1.0 / multi_factorial(mu));
      for (int l = 0; k + l + m < S; ++l) {
        const int j = k + l + m;
        multiply_accumulate(out.slots[j], da, db[l], 1.0, d - j);
      }
    }
  }
  return out;
}

SymbolJetStack add_stacks(const SymbolJetStack& a, const SymbolJetStack& b, int shift_b) {
  check_same_shape(a, b);
  SymbolJetStack out = a;
  out.x_independent = a.x_independent && b.x_independent;
  for (int j = shift_b; j < a.size(); ++j) out.slots[j] += b[j - shift_b];
  grade(out);
  return out;
}

SymbolJetStack scale_stack(const SymbolJetStack& a, cplx c) {
  SymbolJetStack out = a;
  for (auto& s : out.slots) s *= c;
  return out;
}

SymbolJetStack adjoint_stack(const SymbolJetStack& a, int target_order) {
  const int S = a.size();
  const int n = a.point.n;
  if (a.order < target_order + (a.x_independent ? 0 : S - 1))
    throw Error(ErrorKind::TruncationUnderflow, "adjoint needs input jets of higher order");
  SymbolJetStack wide = zero_stack(a.point, S, a.order, a.dim);
  const auto mus = xi_indices(n, a.x_independent ? 0 : S - 1);
  std::vector<Jet> ah(S);
  for (int k = 0; k < S; ++k) ah[k] = a[k].conj_transpose();
  for (const auto& mu : mus) {
    const int m = total_degree(mu);
    MultiIndex both = mu;
    for (int i = 0; i < n; ++i) both[i] = mu[n + i];
    for (int k = 0; k + m < S; ++k) {
      if (m == 0) {
        wide.slots[k] += ah[k];
      } else {
        wide.slots[k + m] += derivative(ah[k], both, minus_i_power(m) / multi_factorial(mu));
      }
    }
  }
  SymbolJetStack out;
  out.point = a.point;
  out.order = target_order;
  out.dim = a.dim;
  out.x_independent = a.x_independent;
  for (int j = 0; j < S; ++j) out.slots.push_back(taylor_project(wide[j], target_order));
  grade(out);
  return out;
}

// ---------------------------------------------------------------------------

ResolventPlan::ResolventPlan(const SymbolJetStack& a) : a_(a) {
  const int S = a.size();
  const int n = a.point.n;
  by_slot_.resize(S);
  for (const auto& mu : xi_indices(n, S - 1)) {
    const int m = total_degree(mu);
    if (m > 0 && a.x_independent) continue;
    for (int k = 0; k + m < S; ++k) {
      if (k + m == 0) continue;
      if (a[k].is_zero()) continue;
      Jet da = m == 0 ? a[k] : derivative(a[k], mu, 1.0 / multi_factorial(mu));
      if (da.is_zero()) continue;
      by_slot_[k + m].push_back({k, mu, static_cast<double>(m), std::move(da)});
    }
  }
}

SymbolJetStack ResolventPlan::operator()(cplx lambda) const {
  const int S = a_.size();
  const int d = a_.order;
  const int n = a_.point.n;
  SymbolJetStack r = zero_stack(a_.point, S, d, a_.dim);
  r.x_independent = a_.x_independent;
  Jet shifted = a_[0];
  shifted.add_identity(-lambda);
  try {
    r.slots[0] = jet_inverse(shifted);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::SingularJet) throw;
    throw Error(ErrorKind::ResolventSingular, "lambda lies in the spectrum of a_0");
  }
  // D_x^mu r_l, filled on demand
  std::vector<std::vector<std::pair<MultiIndex, Jet>>> dx(S);
  auto dx_of = [&](int l, const MultiIndex& mu, int m) -> const Jet& {
    if (m == 0) return r.slots[l];
    for (const auto& [key, jet] : dx[l])
      if (key == mu) return jet;
    dx[l].emplace_back(mu, derivative(r.slots[l], to_x(n, mu), minus_i_power(m)));
    return dx[l].back().second;
  };
  for (int j = 1; j < S; ++j) {
    Jet sum(r.slots[0].space_ptr(), a_.point, a_.dim);
    bool any = false;
    for (int m = 1; m <= j; ++m) {
      const int l = j - m;
      for (const auto& t : by_slot_[m]) {
        const int deg = static_cast<int>(t.mu_degree);
        const Jet& b = dx_of(l, t.mu, deg);
        if (b.is_zero()) continue;
        multiply_accumulate(sum, t.dxi_a, b, 1.0, d - j);
        any = true;
      }
    }
    if (any) multiply_accumulate(r.slots[j], r.slots[0], sum, -1.0, d - j);
  }
  return r;
}

SymbolJetStack resolvent_stack(const SymbolJetStack& a, cplx lambda) { return ResolventPlan(a)(lambda); }

SymbolJetStack parametrix_stack(const SymbolJetStack& a) {
  try {
    return resolvent_stack(a, 0.0);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::ResolventSingular) throw;
    throw Error(ErrorKind::NotElliptic, "leading symbol is singular at the evaluation point");
  }
}

SymbolJetStack contour_stack(const SymbolJetStack& a, const std::function<cplx(cplx)>& f,
                             const ContourOptions& options) {
  const ContourSpec spec = contour_for(a[0].constant_term(), options);
  const ResolventPlan plan(a);
  SymbolJetStack out = zero_stack(a.point, a.size(), a.order, a.dim);
  out.x_independent = a.x_independent;
  for (const auto& node : contour_nodes(spec)) {
    SymbolJetStack r = plan(node.lambda);
    const cplx w = node.weight * f(node.lambda);
    for (int j = 0; j < a.size(); ++j) {
      auto dst = out.slots[j].data();
      const auto src = r.slots[j].data();
      for (std::size_t k = 0; k < dst.size(); ++k) dst[k] += w * src[k];
    }
  }
  if (options.cross_check) {
    const auto ref = matrix_log_eig(a[0].constant_term(), options.theta);
    const CMatrix got = out[0].constant_term();
    // only meaningful for the logarithm; callers pass cross_check for log only
    if (ref && (got - *ref).norm() > 1e-8 * (1.0 + ref->norm()))
      throw Error(ErrorKind::CrossCheckFailed, "contour logarithm disagrees with eigendecomposition");
  }
  return out;
}

Jet log_abs_xi_jet(const JetSpacePtr& space, const Point& p) {
  const int n = p.n;
  Jet u(space, p, 1);
  for (int i = 0; i < n; ++i) {
    const Jet c = Jet::coordinate(space, p, n + i);
    u += jet_product(c, c);
  }
  const double u0 = u.scalar(0).real();
  if (!(u0 > 0.0)) throw Error(ErrorKind::EvaluationDomain, "log|xi| at xi = 0");
  std::vector<cplx> derivs(space->order() + 1);
  derivs[0] = 0.5 * std::log(u0);
  double fact = 1.0;
  for (int k = 1; k <= space->order(); ++k) {
    derivs[k] = 0.5 * ((k % 2) ? 1.0 : -1.0) * fact / std::pow(u0, k);
    fact *= k;
  }
  return compose_scalar(u, derivs);
}

LogStack log_stack(const SymbolJetStack& a, double alpha, const ContourOptions& options) {
  LogStack out;
  const double theta = options.theta;
  out.q = contour_stack(a, [theta](cplx l) { return log_branch(l, theta); }, options);
  out.type = alpha;
  Jet lx = log_abs_xi_jet(a[0].space_ptr(), a.point);
  Jet scaled = scalar_product(lx, Jet::identity(a[0].space_ptr(), a.point, a.dim));
  scaled *= alpha;
  out.p0 = out.q[0] - scaled;
  return out;
}

SymbolJetStack power_stack_contour(const SymbolJetStack& a, cplx s, const ContourOptions& options) {
  if (s == cplx(0.0)) {
    contour_for(a[0].constant_term(), options);
    return identity_stack(a.point, a.size(), a.order, a.dim);
  }
  ContourOptions opts = options;
  opts.cross_check = false;
  const double theta = options.theta;
  return contour_stack(a, [s, theta](cplx l) { return power_branch(l, s, theta); }, opts);
}

SymbolJetStack power_stack_series(const SymbolJetStack& a, cplx s, const ContourOptions& options,
                                  double tolerance, int max_terms) {
  const SymbolJetStack L = log_stack(a, 0.0, options).q;
  SymbolJetStack result = identity_stack(a.point, a.size(), a.order, a.dim);
  result.x_independent = a.x_independent;
  if (s == cplx(0.0)) return result;
  SymbolJetStack term = result;
  int small = 0;
  for (int k = 1; k <= max_terms; ++k) {
    term = scale_stack(compose_stacks(term, L), -s / static_cast<double>(k));
    for (int j = 0; j < a.size(); ++j) result.slots[j] += term[j];
    double tnorm = 0.0;
    double rnorm = 0.0;
    for (int j = 0; j < a.size(); ++j) {
      tnorm = std::max(tnorm, term[j].max_abs());
      rnorm = std::max(rnorm, result[j].max_abs());
    }
    if (!std::isfinite(tnorm) || !std::isfinite(rnorm)) break;
    small = tnorm <= tolerance * (1.0 + rnorm) ? small + 1 : 0;
    if (small >= 2) return result;
  }
  throw Error(ErrorKind::SeriesNotConverged, "log-series for the power symbol did not converge");
}

// ---------------------------------------------------------------------------

namespace {

SymbolJetStack embed_finite(const FiniteSymbol& a) {
  const int S = static_cast<int>(a.slots.size());
  auto space = JetSpace::get(a.point.n, S - 1);
  SymbolJetStack s;
  s.point = a.point;
  s.order = S - 1;
  s.dim = a.dim;
  s.x_independent = false;
  for (const auto& j : a.slots) s.slots.push_back(embed(j, space));
  return s;
}

}  // namespace

FiniteSymbol finite_project(const SymbolJetStack& a, int n) {
  if (a.size() < n + 1 || a.order < n)
    throw Error(ErrorKind::InvalidProjection, "stack too short for the finite projection");
  FiniteSymbol f;
  f.point = a.point;
  f.dim = a.dim;
  for (int j = 0; j <= n; ++j) f.slots.push_back(taylor_project(a[j], n - j));
  return f;
}

FiniteSymbol finite_compose(const FiniteSymbol& a, const FiniteSymbol& b) {
  if (a.slots.size() != b.slots.size())
    throw Error(ErrorKind::ShapeMismatch, "finite symbols of different length");
  const int n = static_cast<int>(a.slots.size()) - 1;
  return finite_project(compose_stacks(embed_finite(a), embed_finite(b)), n);
}

FiniteSymbol finite_log(const FiniteSymbol& a, const ContourOptions& options) {
  const int n = static_cast<int>(a.slots.size()) - 1;
  return finite_project(log_stack(embed_finite(a), 0.0, options).q, n);
}

double max_difference(const FiniteSymbol& a, const FiniteSymbol& b) {
  if (a.slots.size() != b.slots.size())
    throw Error(ErrorKind::ShapeMismatch, "finite symbols of different length");
  double m = 0.0;
  for (std::size_t j = 0; j < a.slots.size(); ++j) m = std::max(m, max_difference(a.slots[j], b.slots[j]));
  return m;
}

}  // namespace resdet
