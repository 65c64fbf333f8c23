#include "resdet/oplib.hpp"

#include <array>
#include <cstdio>
#include <random>

#include "resdet/error.hpp"

namespace resdet {

namespace {

Jet times_identity(const Jet& s, int rank) {
  return rank == 1 ? s : scalar_product(s, Jet::identity(s.space_ptr(), s.anchor(), rank));
}

// g^{ij} xi_i xi_j
Jet quadratic_form(const Jet& ginv, const Point& p, const JetSpacePtr& space, int n) {
  Jet q(space, p, 1);
  for (int i = 0; i < n; ++i) {
    const Jet xi_i = Jet::coordinate(space, p, n + i);
    for (int j = 0; j < n; ++j)
      q += jet_product(jet_product(TorusChart::entry(ginv, i, j), xi_i), Jet::coordinate(space, p, n + j));
  }
  return q;
}

// -i (1/sqrt g) d_i (sqrt g g^{ij}) xi_j, differentiated one order above the target.
Jet first_order_term(const TorusChart& chart, const Point& p, const JetSpacePtr& space) {
  const int n = chart.n();
  const auto wide = JetSpace::get(n, space->order() + 1);
  const Jet ginv = chart.inverse_metric_jet(p, wide);
  const Jet root = chart.sqrt_det_jet(p, wide);
  Jet sum(wide, p, 1);
  for (int j = 0; j < n; ++j) {
    Jet w(wide, p, 1);
    for (int i = 0; i < n; ++i) {
      std::array<int, kMaxDim> mu{};
      mu[i] = 1;
      w += derivative(jet_product(root, TorusChart::entry(ginv, i, j)), x_index(n, std::span<const int>(mu.data(), n)));
    }
    sum += jet_product(w, Jet::coordinate(wide, p, n + j));
  }
  const Jet projected = taylor_project(sum, space->order());
  const Jet inv_root = jet_inverse(taylor_project(root, space->order()));
  return cplx(0.0, -1.0) * jet_product(inv_root, projected);
}

Jet potential_jet(const LaplaceSpec& spec, const Point& p, const JetSpacePtr& space) {
  const int rank = spec.rank;
  Jet eps = Jet::constant(space, p, spec.t * CMatrix::Identity(rank, rank));
  if (!spec.scalar_potential.empty())
    eps += times_identity(fourier_jet(spec.scalar_potential, space, p), rank);
  for (const auto& m : spec.matrix_potential) {
    const Jet f = fourier_jet({m.mode}, space, p);
    CMatrix unit = CMatrix::Zero(rank, rank);
    unit(m.i, m.j) = 1.0;
    unit(m.j, m.i) = 1.0;
    eps += scalar_product(f, Jet::constant(space, p, unit));
  }
  return eps;
}

std::string num(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, v < 0 ? "(%.6f)" : "%.6f", v);
  return buf;
}

std::string cnum(double re, double im) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "(%.6f%+.6fi)", re, im);
  return buf;
}

std::string absxi_power(int k) {
  if (k == 0) return "1";
  if (k == 1) return "absxi";
  return k > 0 ? "absxi^" + std::to_string(k) : "absxi^(" + std::to_string(k) + ")";
}

std::string x_wave(std::mt19937_64& rng, int n) {
  std::uniform_int_distribution<int> axis(1, n);
  std::uniform_int_distribution<int> freq(1, 2);
  const int a = axis(rng);
  const int f = freq(rng);
  std::string arg = (f == 1 ? "" : std::to_string(f) + "*") + "x(" + std::to_string(a) + ")";
  if (n >= 2 && std::bernoulli_distribution(0.3)(rng)) {
    const int b = a % n + 1;
    arg += "+x(" + std::to_string(b) + ")";
  }
  return arg;
}

// Degree-0 angular factor built from low spherical harmonics.
std::string harmonic(std::mt19937_64& rng, int n) {
  const int choices = n >= 2 ? 4 : 2;
  switch (std::uniform_int_distribution<int>(0, choices - 1)(rng)) {
    case 0: return "1";
    case 1: return "xi(1)/absxi";
    case 2: return "xi(1)*xi(2)/absxi^2";
    default: return "(xi(1)^2-xi(2)^2)/absxi^2";
  }
}

}  // namespace

ClassicalSymbol laplace_symbol(const LaplaceSpec& spec) {
  if (!spec.chart) throw Error(ErrorKind::ShapeMismatch, "laplace_symbol needs a chart");
  if (spec.rank < 1) throw Error(ErrorKind::ShapeMismatch, "bundle rank must be positive");
  for (const auto& m : spec.matrix_potential)
    if (m.i < 0 || m.j < 0 || m.i >= spec.rank || m.j >= spec.rank)
      throw Error(ErrorKind::ShapeMismatch, "potential entry index out of range");
  const auto chart = spec.chart;
  const int n = chart->n();
  const int rank = spec.rank;
  const bool flat = chart->flat();
  const bool constant_eps = spec.scalar_potential.empty() && spec.matrix_potential.empty();

  std::vector<HomogeneousTerm> terms(3);
  terms[0].degree = 2.0;
  terms[0].x_independent = flat;
  terms[0].evaluator = [chart, n, rank](const Point& p, const JetSpacePtr& space) {
    return times_identity(quadratic_form(chart->inverse_metric_jet(p, space), p, space, n), rank);
  };
  terms[1].degree = 1.0;
  terms[1].x_independent = flat;
  if (flat) {
    terms[1] = zero_term(1.0, rank);
  } else {
    terms[1].evaluator = [chart, rank](const Point& p, const JetSpacePtr& space) {
      return times_identity(first_order_term(*chart, p, space), rank);
    };
  }
  terms[2].degree = 0.0;
  terms[2].x_independent = constant_eps;
  terms[2].evaluator = [spec](const Point& p, const JetSpacePtr& space) { return potential_jet(spec, p, space); };

  char name[64];
  std::snprintf(name, sizeof name, "laplace(n=%d, rank=%d, t=%g)", n, rank, spec.t);
  return term_symbol(n, rank, 2.0, std::move(terms), name);
}

ClassicalSymbol flat_laplace(int n, double t, int rank) {
  LaplaceSpec spec;
  spec.chart = std::make_shared<const TorusChart>(n, MetricData{}, 1);
  spec.rank = rank;
  spec.t = t;
  return laplace_symbol(spec);
}

HomogeneousTerm zero_term(double degree, int dim) {
  HomogeneousTerm t;
  t.degree = degree;
  t.x_independent = true;
  t.evaluator = [dim](const Point& p, const JetSpacePtr& space) { return Jet(space, p, dim); };
  return t;
}

HomogeneousTerm expr_term(expr::ExprPtr e, double degree, std::shared_ptr<const TorusChart> chart, int dim) {
  HomogeneousTerm t;
  t.degree = degree;
  t.x_independent = !expr::depends_on_x(*e, !chart || chart->flat());
  t.source = e;
  t.evaluator = [e, chart, dim](const Point& p, const JetSpacePtr& space) {
    const expr::EvalContext ctx{chart.get(), dim};
    Jet v = expr::eval_jet(*e, ctx, p, space);
    if (v.dim() != dim) throw Error(ErrorKind::ShapeMismatch, "term matrix size differs from the operator rank");
    return v;
  };
  return t;
}

ClassicalSymbol expr_symbol(int n, int dim, double order, const std::vector<std::string>& sources,
                            std::shared_ptr<const TorusChart> chart, std::string name, bool complete) {
  std::vector<HomogeneousTerm> terms;
  for (std::size_t j = 0; j < sources.size(); ++j) {
    const double degree = order - static_cast<double>(j);
    if (sources[j].empty()) {
      terms.push_back(zero_term(degree, dim));
      continue;
    }
    const expr::ExprPtr e = expr::parse(sources[j]);
    if (expr::max_index(*e) > n)
      throw Error(ErrorKind::ShapeMismatch, "expression index exceeds the dimension " + std::to_string(n));
    terms.push_back(expr_term(e, degree, chart, dim));
  }
  return term_symbol(n, dim, order, std::move(terms), std::move(name), complete);
}

std::pair<ClassicalSymbol, ClassicalSymbol> dbar_symbols_t2() {
  const ClassicalSymbol d = expr_symbol(2, 1, 1.0, {"(i*xi(1) - xi(2))/2"}, nullptr, "dbar_t2");
  return {d, compose_symbols(adjoint_symbol(d), d)};
}

ClassicalSymbol winding_symbol_s1(int w) {
  const std::string src = "absxi*(exp(i*" + num(static_cast<double>(w)) + "*x(1))*pos(xi(1)) + neg(xi(1)))";
  return expr_symbol(1, 1, 1.0, {src}, nullptr, "winding_s1(w=" + std::to_string(w) + ")");
}

std::vector<std::string> negative_order_sources(int k, unsigned long long seed, int n) {
  if (k >= 0) throw Error(ErrorKind::InvalidOrder, "negative_order_symbol needs k < 0");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coef(-0.5, 0.5);
  const int slots = std::max(2, n + k + 1);
  std::vector<std::string> out;
  for (int j = 0; j < slots; ++j) {
    std::string c = cnum(1.0 + coef(rng), coef(rng)) + " + " + cnum(coef(rng), coef(rng)) + "*cos(" +
                    x_wave(rng, n) + ") + " + num(coef(rng)) + "*sin(" + x_wave(rng, n) + ")";
    out.push_back("(" + c + ")*" + absxi_power(k - j) + "*" + harmonic(rng, n));
  }
  return out;
}

ClassicalSymbol negative_order_symbol(int k, unsigned long long seed, int n, int dim) {
  return expr_symbol(n, dim, static_cast<double>(k), negative_order_sources(k, seed, n), nullptr,
                     "random_negorder(k=" + std::to_string(k) + ", seed=" + std::to_string(seed) + ")");
}

std::vector<std::string> random_elliptic_sources(int n, int dim, int order, unsigned long long seed) {
  if (order < 1) throw Error(ErrorKind::InvalidOrder, "random_elliptic_symbol needs a positive order");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  // a_0 = |xi|^order (c(x) I + s xi_1/|xi| H), with |s| ||H|| < c(x)
  const double base = 2.0 + 0.5 * u(rng);
  const double wave = 0.4 * u(rng);
  std::string lead = "(" + num(base) + " + " + num(wave) + "*cos(" + x_wave(rng, n) + "))*I";
  if (dim == 1) {
    lead += " + " + num(0.4 * u(rng)) + "*xi(1)/absxi";
  } else if (dim == 2) {
    const double a = 0.3 * u(rng), d = 0.3 * u(rng), br = 0.2 * u(rng), bi = 0.2 * u(rng);
    lead += " + xi(" + std::to_string(n) + ")/absxi*mat[[" + num(a) + ", " + cnum(br, bi) + "], [" + cnum(br, -bi) +
            ", " + num(d) + "]]";
    lead += " + " + num(0.3 * u(rng)) + "*sin(" + x_wave(rng, n) + ")*mat[[0, 1], [1, 0]]";
  } else {
    throw Error(ErrorKind::ShapeMismatch, "random_elliptic_symbol supports rank 1 or 2");
  }
  std::vector<std::string> out{absxi_power(order) + "*(" + lead + ")"};
  const int lower = std::min(order + n, 2);
  for (int j = 1; j <= lower; ++j) {
    std::string c = cnum(0.3 * u(rng), 0.3 * u(rng)) + "*cos(" + x_wave(rng, n) + ") + " + cnum(0.3 * u(rng), 0.3 * u(rng));
    out.push_back("(" + c + ")*" + absxi_power(order - j) + "*" + harmonic(rng, n) + "*I");
  }
  return out;
}

ClassicalSymbol random_elliptic_symbol(int n, int dim, int order, unsigned long long seed) {
  return expr_symbol(n, dim, static_cast<double>(order), random_elliptic_sources(n, dim, order, seed), nullptr,
                     "random_elliptic(n=" + std::to_string(n) + ", seed=" + std::to_string(seed) + ")");
}

}  // namespace resdet
