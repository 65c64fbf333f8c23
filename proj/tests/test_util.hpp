#pragma once

#include <random>

#include "resdet/jet.hpp"

namespace testutil {

using resdet::cplx;
using resdet::Jet;
using resdet::JetSpace;
using resdet::Point;

inline Point point(int n, std::initializer_list<double> x, std::initializer_list<double> xi) {
  Point p;
  p.n = n;
  int i = 0;
  for (double v : x) p.x[i++] = v;
  i = 0;
  for (double v : xi) p.xi[i++] = v;
  return p;
}

inline Point unit_point(int n) {
  Point p;
  p.n = n;
  p.xi[0] = 1.0;
  return p;
}

// Scalar jet with the given coefficient on monomial exponent e.
inline resdet::MultiIndex mono(std::initializer_list<int> exps) {
  resdet::MultiIndex e{};
  int i = 0;
  for (int v : exps) e[i++] = static_cast<std::uint8_t>(v);
  return e;
}

inline Jet random_jet(const resdet::JetSpacePtr& space, const Point& p, int dim, std::mt19937_64& rng,
                      double constant_shift = 0.0, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Jet j(space, p, dim);
  for (auto& c : j.data()) c = scale * cplx(u(rng), u(rng));
  if (constant_shift != 0.0) j.add_identity(constant_shift);
  return j;
}

}  // namespace testutil
