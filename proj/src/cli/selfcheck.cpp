#include <cmath>
#include <functional>

#include "resdet/cli.hpp"
#include "resdet/expr.hpp"
#include "resdet/oplib.hpp"

namespace resdet::cli {

namespace {

using Check = std::function<double()>;

struct Entry {
  std::string name;
  double tolerance;
  Check error;
};

cplx detres(const ClassicalSymbol& a, const NumericSettings& s) { return log_det_res(a, s).value; }
cplx res(const ClassicalSymbol& a, const NumericSettings& s) { return residue_trace(a, s).value; }

}  // namespace

std::vector<CheckResult> run_selfcheck(const NumericSettings& base, double tolerance, unsigned long long seed) {
  NumericSettings s = base;
  s.estimate_error = false;
  s.x_grid = std::min(s.x_grid, 8);
  s.theta = kPi;
  const double tight = std::min(tolerance, 1e-9);

  std::vector<Entry> suite;
  suite.push_back({"res_parametrix_t2", tolerance, [&] {
                     return std::abs(res_parametrix_power(flat_laplace(2, 1.0), 1, s).value - 2.0 * kPi) / (2.0 * kPi);
                   }});
  suite.push_back({"detres_surface_shift", tolerance, [&] {
                     return std::abs(detres(flat_laplace(2, 2.0), s) - 4.0 * kPi) / (4.0 * kPi);
                   }});
  suite.push_back({"tracial", tight, [&] {
                     const auto a = random_elliptic_symbol(2, 1, 1, seed + 11);
                     const auto q = negative_order_symbol(-2, seed + 12, 2);
                     return std::abs(res(commutator_symbol(a, q), s));
                   }});
  suite.push_back({"linearity", tight, [&] {
                     const auto a = negative_order_symbol(-2, seed + 21, 2);
                     const auto b = negative_order_symbol(-2, seed + 22, 2);
                     const cplx c(2.0, -1.0);
                     const cplx lhs = res(add_merge(scale_symbol(a, c), scale_symbol(b, 3.0)), s);
                     return std::abs(lhs - c * res(a, s) - 3.0 * res(b, s));
                   }});
  suite.push_back({"theta_independence", tolerance, [&] {
                     const auto a = random_elliptic_symbol(2, 1, 2, seed + 31);
                     NumericSettings other = s;
                     other.theta = 0.6 * kPi;
                     return std::abs(detres(a, s) - detres(a, other));
                   }});
  suite.push_back({"stability", tolerance, [&] {
                     const auto a = random_elliptic_symbol(2, 1, 2, seed + 41);
                     const auto q = negative_order_symbol(-1, seed + 42, 2);
                     return std::abs(detres(add_merge(a, q), s) - detres(a, s));
                   }});
  suite.push_back({"triviality", tolerance, [&] {
                     const auto q = negative_order_symbol(-3, seed + 51, 2);
                     return std::abs(detres(add_merge(identity_symbol(2, 1), q), s));
                   }});
  suite.push_back({"multiplicativity_t1", tolerance, [&] {
                     const auto a = random_elliptic_symbol(1, 2, 1, seed + 61);
                     const auto b = random_elliptic_symbol(1, 2, 2, seed + 62);
                     NumericSettings line = s;
                     line.x_grid = 32;
                     return std::abs(detres(compose_symbols(a, b), line) - detres(a, line) - detres(b, line));
                   }});
  suite.push_back({"finite_homomorphism", tight, [&] {
                     const auto a = random_elliptic_symbol(2, 1, 2, seed + 71);
                     const auto b = negative_order_symbol(-1, seed + 72, 2);
                     double worst = 0.0;
                     for (const Point& p : sample_points(2, 4, seed + 73)) {
                       const SymbolJetStack A = a.stack(p, 3, 4), B = b.stack(p, 3, 4);
                       const FiniteSymbol lhs = finite_project(compose_stacks(A, B), 2);
                       const FiniteSymbol rhs = finite_compose(finite_project(A, 2), finite_project(B, 2));
                       worst = std::max(worst, max_difference(lhs, rhs));
                     }
                     return worst;
                   }});
  suite.push_back({"finite_log_commutes", tight, [&] {
                     const auto a = random_elliptic_symbol(2, 1, 1, seed + 81);
                     double worst = 0.0;
                     for (const Point& p : sample_points(2, 4, seed + 82)) {
                       const SymbolJetStack A = a.stack(p, 3, 4);
                       const FiniteSymbol lhs = finite_project(log_stack(A, 0.0, s.contour()).q, 2);
                       const FiniteSymbol rhs = finite_log(finite_project(A, 2), s.contour());
                       worst = std::max(worst, max_difference(lhs, rhs));
                     }
                     return worst;
                   }});
  suite.push_back({"power_dual_method", 1e-8, [&] {
                     const auto a = random_elliptic_symbol(2, 1, 2, seed + 91);
                     double worst = 0.0;
                     for (const Point& p : sample_points(2, 4, seed + 92)) {
                       const SymbolJetStack A = a.stack(p, 3);
                       worst = std::max(worst, max_difference(power_stack_contour(A, 0.5, s.contour()),
                                                              power_stack_series(A, 0.5, s.contour())));
                     }
                     return worst;
                   }});
  suite.push_back({"laplace_self_adjoint", tight, [&] {
                     MetricData m;
                     m.conformal.push_back({{1, 0, 0, 0}, 0.1, 0.0});
                     LaplaceSpec spec;
                     spec.chart = std::make_shared<const TorusChart>(build_metric(2, m, 8));
                     spec.t = 1.0;
                     spec.scalar_potential.push_back({{0, 1, 0, 0}, 0.2, 0.0});
                     // e^{omega} L e^{-omega} is symmetric for dx when sqrt g = e^{2 omega}
                     const auto up = expr_symbol(2, 1, 0.0, {"exp(0.1*cos(x(1)))"});
                     const auto down = expr_symbol(2, 1, 0.0, {"exp(-0.1*cos(x(1)))"});
                     const auto l = compose_symbols(compose_symbols(up, laplace_symbol(spec)), down);
                     const auto adj = adjoint_symbol(l);
                     double worst = 0.0;
                     for (const Point& p : sample_points(2, 4, seed + 101))
                       worst = std::max(worst, max_difference(l.stack(p, 3), adj.stack(p, 3)));
                     return worst;
                   }});
  suite.push_back({"winding_index", 1e-3, [&] {
                     return std::abs(index_from_res(winding_symbol_s1(1), s).value - cplx(-1.0, 0.0));
                   }});
  suite.push_back({"parser_round_trip", 0.0, [&] {
                     const char* corpus[] = {"xi(1)^2 + xi(2)^2", "cos(x(1))*xi(1)", "-absxi^(-2)*(1+0.5i)",
                                             "mat[[1, 2i], [-2i, 3]]*I", "gup(1,2)*xi(1)*xi(2)/absxi_g"};
                     double bad = 0.0;
                     for (const char* src : corpus) {
                       const auto e = expr::parse(src);
                       if (!expr::equal(*e, *expr::parse(expr::print(*e)))) bad += 1.0;
                     }
                     return bad;
                   }});

  std::vector<CheckResult> out;
  for (const auto& entry : suite) {
    CheckResult r;
    r.name = entry.name;
    r.tolerance = entry.tolerance;
    try {
      r.error = entry.error();
      r.pass = r.error <= entry.tolerance;
    } catch (const Error& e) {
      r.pass = false;
      r.error = INFINITY;
      r.detail = e.what();
    }
    out.push_back(r);
  }
  return out;
}

}  // namespace resdet::cli
