#include <cmath>
#include <exception>

#include "resdet/functionals.hpp"

namespace resdet {

cplx neumaier_sum(const std::vector<cplx>& values) {
  double sr = 0.0, cr = 0.0, si = 0.0, ci = 0.0;
  auto step = [](double& s, double& c, double v) {
    const double t = s + v;
    if (std::abs(s) >= std::abs(v))
      c += (s - t) + v;
    else
      c += (v - t) + s;
    s = t;
  };
  for (const auto& v : values) {
    step(sr, cr, v.real());
    step(si, ci, v.imag());
  }
  return {sr + cr, si + ci};
}

DensityResult assemble_density(const QuadratureGrid& grid, const PointFunction& f, ExecutionMode mode) {
  const std::size_t nx = grid.x_nodes.size();
  const std::size_t ns = grid.sphere.nodes.size();
  const std::size_t total = nx * ns;
  std::vector<cplx> values(total);

  auto point_at = [&](std::size_t idx) {
    Point p;
    p.n = grid.n;
    p.x = grid.x_nodes[idx / ns];
    p.xi = grid.sphere.nodes[idx % ns];
    return p;
  };

  if (mode == ExecutionMode::Serial) {
    for (std::size_t idx = 0; idx < total; ++idx) values[idx] = f(point_at(idx));
  } else {
    std::exception_ptr failure;
    const long long count = static_cast<long long>(total);
#pragma omp parallel for schedule(dynamic, 4)
    for (long long idx = 0; idx < count; ++idx) {
      try {
        values[idx] = f(point_at(static_cast<std::size_t>(idx)));
      } catch (...) {
#pragma omp critical(resdet_assembly_failure)
        if (!failure) failure = std::current_exception();
      }
    }
    if (failure) std::rethrow_exception(failure);
  }

  // fixed-order reduction, independent of the thread schedule
  const double norm = std::pow(2.0 * kPi, -grid.n);
  DensityResult out;
  out.density.resize(nx);
  std::vector<cplx> row(ns);
  std::vector<cplx> weighted(nx);
  for (std::size_t ix = 0; ix < nx; ++ix) {
    for (std::size_t is = 0; is < ns; ++is) row[is] = grid.sphere.weights[is] * values[ix * ns + is];
    out.density[ix] = norm * neumaier_sum(row);
    weighted[ix] = grid.x_weights[ix] * out.density[ix];
  }
  out.value = neumaier_sum(weighted);
  return out;
}

}  // namespace resdet
