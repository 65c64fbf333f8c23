#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "resdet/expr.hpp"
#include "resdet/geometry.hpp"
#include "resdet/symbols.hpp"

namespace resdet {

struct LaplaceSpec {
  std::shared_ptr<const TorusChart> chart;  // required
  int rank = 1;
  double t = 0.0;
  std::vector<FourierMode> scalar_potential;  // v(x) I
  std::vector<MetricMode> matrix_potential;   // Hermitian entries added to eps(x)
};

// -(1/sqrt g) d_i (sqrt g g^{ij} d_j) + eps + t:
// slots |xi|_g^2 I, -i (1/sqrt g) d_i(sqrt g g^{ij}) xi_j I, eps + t.
ClassicalSymbol laplace_symbol(const LaplaceSpec& spec);
ClassicalSymbol flat_laplace(int n, double t = 0.0, int rank = 1);

// Zero term of the given degree.
HomogeneousTerm zero_term(double degree, int dim);
// Term evaluated from an expression; x-independence follows the AST and chart.
HomogeneousTerm expr_term(expr::ExprPtr e, double degree, std::shared_ptr<const TorusChart> chart, int dim);
// Symbol whose slot j is sources[j] of degree order - j (empty strings are zero terms).
ClassicalSymbol expr_symbol(int n, int dim, double order, const std::vector<std::string>& sources,
                            std::shared_ptr<const TorusChart> chart = nullptr, std::string name = "terms",
                            bool complete = true);

// dbar = (1/2)(d_1 + i d_2) on flat T^2: D = (i xi_1 - xi_2)/2 and D*D = |xi|^2/4.
std::pair<ClassicalSymbol, ClassicalSymbol> dbar_symbols_t2();

// |xi| (e^{i w x} on xi > 0, 1 on xi < 0) on T^1.
ClassicalSymbol winding_symbol_s1(int w);

// Expression sources of a seeded negative-order fixture, one per slot.
std::vector<std::string> negative_order_sources(int k, unsigned long long seed, int n);
ClassicalSymbol negative_order_symbol(int k, unsigned long long seed, int n = 2, int dim = 1);

// Seeded order-`order` symbol with a Hermitian positive definite principal part.
std::vector<std::string> random_elliptic_sources(int n, int dim, int order, unsigned long long seed);
ClassicalSymbol random_elliptic_symbol(int n, int dim, int order, unsigned long long seed);

}  // namespace resdet
