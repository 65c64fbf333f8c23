#include "resdet/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "resdet/error.hpp"

namespace resdet {

int NumericSettings::sphere_resolution(int n) const {
  if (sphere_res > 0) return sphere_res;
  switch (n) {
    case 1:
    case 2: return 16;
    case 3: return 12;
    default: return 8;
  }
}

ContourOptions NumericSettings::contour() const {
  ContourOptions o;
  o.theta = theta;
  o.nodes_per_circle = contour_nodes;
  o.cross_check = cross_check;
  return o;
}

NumericSettings NumericSettings::doubled(int n) const {
  NumericSettings d = *this;
  d.sphere_res = 2 * sphere_resolution(n);
  d.contour_nodes = 2 * contour_nodes;
  d.estimate_error = false;
  return d;
}

namespace {

bool is_integer(double v) { return std::abs(v - std::round(v)) < 1e-9; }

NumericSettings without_error(NumericSettings s) {
  s.estimate_error = false;
  return s;
}

template <class Compute>
Report with_error(const NumericSettings& s, int n, Compute&& compute) {
  Report r = compute(without_error(s));
  r.settings = s;
  if (s.estimate_error) {
    const Report fine = compute(s.doubled(n));
    double err = std::abs(fine.value - r.value);
    for (std::size_t k = 0; k < std::min(r.polynomial.size(), fine.polynomial.size()); ++k)
      err = std::max(err, std::abs(fine.polynomial[k] - r.polynomial[k]));
    r.quad_error = err;
  }
  return r;
}

Report integrate(const std::string& name, int n, bool x_independent, const NumericSettings& s,
                 const PointFunction& f) {
  const QuadratureGrid grid = make_grid(n, s.x_grid, s.sphere_resolution(n), s.contour_nodes, x_independent);
  const DensityResult d = assemble_density(grid, f, s.mode);
  Report r;
  r.functional = name;
  r.n = n;
  r.value = d.value;
  r.density = d.density;
  r.density_x = grid.x_nodes;
  r.x_weights = grid.x_weights;
  r.sphere_nodes = static_cast<int>(grid.sphere.nodes.size());
  r.x_collapsed = grid.x_collapsed;
  r.settings = s;
  return r;
}

Report zero_report(const std::string& name, int n, const NumericSettings& s) {
  const QuadratureGrid grid = make_grid(n, s.x_grid, 0, s.contour_nodes, true);
  Report r;
  r.functional = name;
  r.n = n;
  r.density.assign(1, 0.0);
  r.density_x = grid.x_nodes;
  r.x_weights = grid.x_weights;
  r.x_collapsed = true;
  r.settings = s;
  return r;
}

// Slot of homogeneity -n, or -1 when there is none.
int residue_slot(const ClassicalSymbol& a) {
  if (std::abs(a.order_imag()) > 1e-12) return -1;
  const double j = a.order() + a.n();
  if (!is_integer(j) || j < -0.5) return -1;
  return static_cast<int>(std::lround(j));
}

Report residue_plain(const std::string& name, const ClassicalSymbol& a, const NumericSettings& s) {
  const int j = residue_slot(a);
  if (j < 0) return zero_report(name, a.n(), s);
  return integrate(name, a.n(), a.x_independent(), s, [&a, j](const Point& p) { return a.slot_value(p, j).trace(); });
}

void require_elliptic(const ClassicalSymbol& a) {
  check_elliptic(a, sample_points(a.n(), 48, 0x5eedULL));
}

}  // namespace

Report residue_trace(const ClassicalSymbol& a, const NumericSettings& s) {
  return with_error(s, a.n(), [&](const NumericSettings& t) { return residue_plain("res", a, t); });
}

Report log_det_res(const ClassicalSymbol& a, const NumericSettings& s) {
  require_elliptic(a);
  Report r = with_error(s, a.n(), [&](const NumericSettings& t) {
    return residue_plain("detres", log_symbol(a, t.contour()), t);
  });
  r.exp_value = std::exp(r.value);
  return r;
}

Report log_det_zero(const ClassicalSymbol& a, const NumericSettings& s, bool per_rank) {
  require_elliptic(a);
  const int n = a.n();
  const double theta = s.theta;
  const double rank = per_rank ? static_cast<double>(a.dim()) : 1.0;
  Report r = with_error(s, n, [&](const NumericSettings& t) {
    const PointFunction f = [&a, theta, rank](const Point& p) {
      const CMatrix a0 = a.slot_value(p, 0);
      Eigen::ComplexEigenSolver<CMatrix> es(a0, false);
      cplx sum = 0.0;
      for (int i = 0; i < es.eigenvalues().size(); ++i) {
        const cplx ev = es.eigenvalues()(i);
        if (distance_to_cut(ev, theta) <= 1e-10 * std::max(1.0, std::abs(ev)))
          throw Error(ErrorKind::PrincipalAngleViolation, "leading symbol eigenvalue on the cut");
        sum += log_branch(ev, theta);
      }
      return sum / rank;
    };
    Report out = integrate("det0", n, a.x_independent(), t, f);
    double sphere_volume = 0.0;
    for (double w : cosphere_quadrature(n, t.sphere_resolution(n)).weights) sphere_volume += w;
    out.value /= sphere_volume;
    for (auto& d : out.density) d /= sphere_volume;
    return out;
  });
  r.exp_value = std::exp(r.value);
  return r;
}

Report zeta_at_zero(const ClassicalSymbol& a, int h0, const NumericSettings& s) {
  const double alpha = a.order();
  if (std::abs(alpha) < 1e-12) throw Error(ErrorKind::ZeroOrder, "zeta(A, 0) is undefined for order 0");
  Report r = log_det_res(a, s);
  r.functional = "zeta0";
  r.value = -r.value / alpha - static_cast<double>(h0);
  for (auto& d : r.density) d = -d / alpha;
  if (r.quad_error) r.quad_error = *r.quad_error / std::abs(alpha);
  r.exp_value.reset();
  r.h0 = h0;
  return r;
}

Report log_det_res_one_plus(const ClassicalSymbol& q, const NumericSettings& s) {
  const double k = q.order();
  if (!is_integer(k) || k > -0.5 || std::abs(q.order_imag()) > 1e-12)
    throw Error(ErrorKind::InvalidOrder, "Q must have negative integer order");
  const int n = q.n();
  const int J = n / static_cast<int>(std::lround(-k));
  Report r = with_error(s, n, [&](const NumericSettings& t) {
    Report acc = zero_report("detres_one_plus", n, t);
    if (J == 0) return acc;
    ClassicalSymbol power = q;
    for (int j = 1; j <= J; ++j) {
      if (j > 1) power = compose_symbols(power, q);
      const Report rj = residue_plain("res", power, t);
      const double c = ((j % 2) ? 1.0 : -1.0) / j;
      if (acc.density.size() != rj.density.size()) {
        acc.density.assign(rj.density.size(), 0.0);
        acc.density_x = rj.density_x;
        acc.x_weights = rj.x_weights;
        acc.x_collapsed = rj.x_collapsed;
        acc.sphere_nodes = rj.sphere_nodes;
      }
      acc.value += c * rj.value;
      for (std::size_t i = 0; i < acc.density.size(); ++i) acc.density[i] += c * rj.density[i];
    }
    return acc;
  });
  r.exp_value = std::exp(r.value);
  return r;
}

Report index_from_res(const ClassicalSymbol& d, const NumericSettings& s) {
  const double order = d.order();
  if (!(order > 0.0)) throw Error(ErrorKind::InvalidOrder, "index needs an operator of positive order");
  const ClassicalSymbol ds = adjoint_symbol(d);
  const ClassicalSymbol id = identity_symbol(d.n(), d.dim());
  const ClassicalSymbol dds = add_merge(compose_symbols(d, ds), id);
  const ClassicalSymbol dsd = add_merge(compose_symbols(ds, d), id);
  require_elliptic(dds);
  require_elliptic(dsd);
  Report r = with_error(s, d.n(), [&](const NumericSettings& t) {
    const Report a = residue_plain("index", log_symbol(dds, t.contour()), t);
    const Report b = residue_plain("index", log_symbol(dsd, t.contour()), t);
    Report out = a;
    out.value = (a.value - b.value) / (2.0 * order);
    for (std::size_t i = 0; i < out.density.size(); ++i) out.density[i] = (a.density[i] - b.density[i]) / (2.0 * order);
    return out;
  });
  r.nearest_integer = std::lround(r.value.real());
  return r;
}

Report zeta_shift_polynomial(const ClassicalSymbol& a, const std::vector<ClassicalSymbol>& shifts, int h0,
                             const NumericSettings& s) {
  const double alpha = a.order();
  if (std::abs(alpha) < 1e-12) throw Error(ErrorKind::ZeroOrder, "zeta polynomial needs a nonzero order");
  if (alpha < 0.0) throw Error(ErrorKind::InvalidOrder, "zeta polynomial needs a positive order");
  const int n = a.n();

  std::vector<ClassicalSymbol> B = shifts;
  const bool plain_shift = B.empty();
  if (plain_shift) B = {ClassicalSymbol(), identity_symbol(n, a.dim())};
  double beta = -1e300;
  for (const auto& b : B) {
    if (!b.valid()) continue;
    const double gap = alpha - b.order();
    if (!is_integer(gap) || gap < 0.5)
      throw Error(ErrorKind::InvalidOrder, "alpha - beta_j must be a strictly positive integer");
    beta = std::max(beta, b.order());
  }
  if (beta == -1e300) throw Error(ErrorKind::InvalidOrder, "no shift operators given");
  const int K = static_cast<int>(std::floor(n / (alpha - beta) + 1e-9));
  const int D = static_cast<int>(B.size()) - 1;

  Report r = with_error(s, n, [&](const NumericSettings& t) {
    Report out = residue_plain("zeta_poly", log_symbol(a, t.contour()), t);
    out.functional = "zeta_poly";
    out.value = -out.value / alpha - static_cast<double>(h0);
    for (auto& d : out.density) d = -d / alpha;
    std::vector<cplx> coef(static_cast<std::size_t>(D * K + 1), 0.0);
    coef[0] = out.value;
    const ClassicalSymbol Q = parametrix_symbol(a);
    std::vector<ClassicalSymbol> QB(B.size());
    for (std::size_t i = 0; i < B.size(); ++i)
      if (B[i].valid()) QB[i] = plain_shift ? Q : compose_symbols(Q, B[i]);
    for (int k = 1; k <= K; ++k) {
      std::vector<int> tuple(k, 0);
      while (true) {
        bool usable = true;
        int degree = 0;
        for (int i : tuple) {
          usable = usable && QB[i].valid();
          degree += i;
        }
        if (usable) {
          ClassicalSymbol prod = QB[tuple[0]];
          for (int m = 1; m < k; ++m) prod = compose_symbols(prod, QB[tuple[m]]);
          const cplx res = residue_plain("res", prod, t).value;
          coef[degree] += (1.0 / alpha) * (((k % 2) ? -1.0 : 1.0) / k) * res;
        }
        int pos = k - 1;
        while (pos >= 0 && tuple[pos] == D) tuple[pos--] = 0;
        if (pos < 0) break;
        ++tuple[pos];
      }
    }
    out.polynomial = coef;
    return out;
  });
  r.h0 = h0;
  return r;
}

cplx evaluate_polynomial(const std::vector<cplx>& c, double t) {
  cplx v = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) v = v * t + *it;
  return v;
}

Report res_parametrix_power(const ClassicalSymbol& a, int k, const NumericSettings& s) {
  require_elliptic(a);
  const ClassicalSymbol qk = power_of_parametrix(a, k);
  Report r = with_error(s, a.n(), [&](const NumericSettings& t) { return residue_plain("res_parametrix_power", qk, t); });
  return r;
}

}  // namespace resdet
