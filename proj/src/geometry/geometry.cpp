#include "resdet/geometry.hpp"

#include <cmath>
#include <sstream>

#include "resdet/contour.hpp"
#include "resdet/error.hpp"

namespace resdet {

namespace {

Jet scalar_const(const JetSpacePtr& space, const Point& p, cplx v) {
  return Jet::constant(space, p, CMatrix::Constant(1, 1, v));
}

Jet exp_jet(const Jet& u) {
  const double e = std::exp(u.scalar(0).real());
  std::vector<cplx> d(u.order() + 1, cplx(e));
  return compose_scalar(u, d);
}

Jet sqrt_jet(const Jet& u) {
  const double u0 = u.scalar(0).real();
  std::vector<cplx> d(u.order() + 1);
  double coef = 1.0;
  for (int k = 0; k <= u.order(); ++k) {
    d[k] = coef * std::pow(u0, 0.5 - k);
    coef *= 0.5 - k;
  }
  return compose_scalar(u, d);
}

// Matrix jet assembled from n x n scalar jets.
Jet assemble(const std::vector<Jet>& entries, int n) {
  const Jet& e0 = entries[0];
  Jet m(e0.space_ptr(), e0.anchor(), n);
  for (int mono = 0; mono < e0.size(); ++mono) {
    cplx* b = m.block(mono);
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) b[r * n + c] = entries[r * n + c].scalar(mono);
  }
  return m;
}

Jet determinant(const std::vector<Jet>& a, int n) {
  if (n == 1) return a[0];
  if (n == 2) return jet_product(a[0], a[3]) - jet_product(a[1], a[2]);
  Jet det(a[0].space_ptr(), a[0].anchor(), 1);
  for (int c = 0; c < n; ++c) {
    std::vector<Jet> minor;
    for (int r = 1; r < n; ++r)
      for (int cc = 0; cc < n; ++cc)
        if (cc != c) minor.push_back(a[r * n + cc]);
    Jet term = jet_product(a[c], determinant(minor, n - 1));
    if (c % 2) det -= term;
    else det += term;
  }
  return det;
}

}  // namespace

double eval_fourier(const std::vector<FourierMode>& modes, const double* x, int n) {
  double s = 0.0;
  for (const auto& m : modes) {
    double ph = 0.0;
    for (int i = 0; i < n; ++i) ph += m.k[i] * x[i];
    s += m.cos_coef * std::cos(ph) + m.sin_coef * std::sin(ph);
  }
  return s;
}

Jet fourier_jet(const std::vector<FourierMode>& modes, const JetSpacePtr& space, const Point& p) {
  Jet out(space, p, 1);
  const int n = p.n;
  for (const auto& m : modes) {
    Jet u(space, p, 1);
    bool any = false;
    for (int i = 0; i < n; ++i)
      if (m.k[i] != 0) {
        u += static_cast<double>(m.k[i]) * Jet::coordinate(space, p, i);
        any = true;
      }
    const double u0 = u.scalar(0).real();
    if (!any) {
      out.add_identity(m.cos_coef);
      continue;
    }
    std::vector<cplx> d(space->order() + 1);
    for (int k = 0; k <= space->order(); ++k) {
      const double shift = k * kPi / 2.0;
      d[k] = m.cos_coef * std::cos(u0 + shift) + m.sin_coef * std::sin(u0 + shift);
    }
    out += compose_scalar(u, d);
  }
  return out;
}

TorusChart::TorusChart(int n, MetricData data, int x_grid)
    : n_(n), x_grid_(x_grid), data_(std::move(data)) {
  if (n < 1 || n > kMaxDim) throw Error(ErrorKind::UnsupportedDimension, "torus dimension must be 1..4");
  if (x_grid < 1) throw Error(ErrorKind::ShapeMismatch, "x grid must have at least one point");
  for (const auto& e : data_.entries)
    if (e.i < 0 || e.j < 0 || e.i >= n || e.j >= n)
      throw Error(ErrorKind::ShapeMismatch, "metric entry index out of range");
  flat_ = data_.entries.empty() && data_.conformal.empty();
}

Eigen::MatrixXd TorusChart::metric(const double* x) const {
  Eigen::MatrixXd g = Eigen::MatrixXd::Identity(n_, n_);
  for (const auto& e : data_.entries) {
    const double v = eval_fourier({e.mode}, x, n_);
    g(e.i, e.j) += v;
    if (e.i != e.j) g(e.j, e.i) += v;
  }
  if (!data_.conformal.empty()) g *= std::exp(2.0 * eval_fourier(data_.conformal, x, n_));
  return g;
}

double TorusChart::sqrt_det(const double* x) const {
  if (flat_) return 1.0;
  return std::sqrt(metric(x).determinant());
}

Jet TorusChart::entry(const Jet& m, int i, int j) {
  const int N = m.dim();
  Jet out(m.space_ptr(), m.anchor(), 1);
  for (int mono = 0; mono < m.size(); ++mono) out.data()[mono] = m.block(mono)[i * N + j];
  return out;
}

Jet TorusChart::metric_jet(const Point& p, const JetSpacePtr& space) const {
  if (flat_) return Jet::identity(space, p, n_);
  std::vector<Jet> entries;
  for (int r = 0; r < n_; ++r)
    for (int c = 0; c < n_; ++c) entries.push_back(scalar_const(space, p, r == c ? 1.0 : 0.0));
  for (const auto& e : data_.entries) {
    const Jet f = fourier_jet({e.mode}, space, p);
    entries[e.i * n_ + e.j] += f;
    if (e.i != e.j) entries[e.j * n_ + e.i] += f;
  }
  if (!data_.conformal.empty()) {
    Jet w = fourier_jet(data_.conformal, space, p);
    w *= 2.0;
    const Jet conf = exp_jet(w);
    for (auto& en : entries) en = jet_product(conf, en);
  }
  return assemble(entries, n_);
}

Jet TorusChart::inverse_metric_jet(const Point& p, const JetSpacePtr& space) const {
  if (flat_) return Jet::identity(space, p, n_);
  return jet_inverse(metric_jet(p, space));
}

Jet TorusChart::sqrt_det_jet(const Point& p, const JetSpacePtr& space) const {
  if (flat_) return scalar_const(space, p, 1.0);
  const Jet g = metric_jet(p, space);
  std::vector<Jet> entries;
  for (int r = 0; r < n_; ++r)
    for (int c = 0; c < n_; ++c) entries.push_back(entry(g, r, c));
  return sqrt_jet(determinant(entries, n_));
}

Jet TorusChart::abs_xi_g_jet(const Point& p, const JetSpacePtr& space) const {
  const Jet ginv = inverse_metric_jet(p, space);
  std::vector<Jet> xi;
  for (int i = 0; i < n_; ++i) xi.push_back(Jet::coordinate(space, p, n_ + i));
  Jet q(space, p, 1);
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) {
      if (flat_ && i != j) continue;
      q += jet_product(entry(ginv, i, j), jet_product(xi[i], xi[j]));
    }
  if (!(q.scalar(0).real() > 0.0)) throw Error(ErrorKind::EvaluationDomain, "|xi|_g at xi = 0");
  return sqrt_jet(q);
}

TorusChart build_metric(int n, const MetricData& data, int x_grid) {
  TorusChart chart(n, data, x_grid);
  if (chart.flat()) return chart;
  const int total = static_cast<int>(std::pow(x_grid, n));
  double x[kMaxDim] = {0, 0, 0, 0};
  for (int idx = 0; idx < total; ++idx) {
    int rest = idx;
    for (int i = 0; i < n; ++i) {
      x[i] = 2.0 * kPi * (rest % x_grid) / x_grid;
      rest /= x_grid;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(chart.metric(x), Eigen::EigenvaluesOnly);
    if (es.eigenvalues()(0) <= 1e-8) {
      std::ostringstream os;
      os << "metric not positive definite at x = (";
      for (int i = 0; i < n; ++i) os << (i ? ", " : "") << x[i];
      os << "), min eigenvalue " << es.eigenvalues()(0);
      throw Error(ErrorKind::NotPositiveDefinite, os.str());
    }
  }
  return chart;
}

void gauss_legendre(int m, double a, double b, std::vector<double>& nodes, std::vector<double>& weights) {
  nodes.assign(m, 0.0);
  weights.assign(m, 0.0);
  for (int i = 0; i < m; ++i) {
    double z = std::cos(kPi * (i + 0.75) / (m + 0.5));
    double dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= m; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (m == 1) p0 = 1.0, p1 = z;
      dp = m * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    double p0 = 1.0, p1 = z;
    for (int k = 2; k <= m; ++k) {
      const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = m * (z * p1 - p0) / (z * z - 1.0);
    nodes[i] = 0.5 * (b - a) * (-z) + 0.5 * (a + b);
    weights[i] = (b - a) / ((1.0 - z * z) * dp * dp);
  }
}

SphereRule cosphere_quadrature(int n, int resolution) {
  if (resolution < 0) throw Error(ErrorKind::ShapeMismatch, "resolution must be >= 0");
  SphereRule rule;
  switch (n) {
    case 1:
      rule.nodes = {{1.0, 0, 0, 0}, {-1.0, 0, 0, 0}};
      rule.weights = {1.0, 1.0};
      break;
    case 2: {
      const int m = resolution + 1;
      for (int k = 0; k < m; ++k) {
        const double phi = 2.0 * kPi * k / m;
        rule.nodes.push_back({std::cos(phi), std::sin(phi), 0, 0});
        rule.weights.push_back(2.0 * kPi / m);
      }
      break;
    }
    case 3: {
      std::vector<double> z, wz;
      gauss_legendre(resolution / 2 + 1, -1.0, 1.0, z, wz);
      const int m = resolution + 1;
      for (std::size_t a = 0; a < z.size(); ++a) {
        const double r = std::sqrt(std::max(0.0, 1.0 - z[a] * z[a]));
        for (int k = 0; k < m; ++k) {
          const double phi = 2.0 * kPi * k / m;
          rule.nodes.push_back({r * std::cos(phi), r * std::sin(phi), z[a], 0});
          rule.weights.push_back(wz[a] * 2.0 * kPi / m);
        }
      }
      break;
    }
    case 4: {
      // xi = (cos eta e^{i phi1}, sin eta e^{i phi2}), dS = 1/2 du dphi1 dphi2, u = sin^2 eta
      std::vector<double> u, wu;
      gauss_legendre(resolution / 4 + 1, 0.0, 1.0, u, wu);
      const int m = resolution + 1;
      for (std::size_t a = 0; a < u.size(); ++a) {
        const double s = std::sqrt(u[a]);
        const double c = std::sqrt(1.0 - u[a]);
        for (int k1 = 0; k1 < m; ++k1)
          for (int k2 = 0; k2 < m; ++k2) {
            const double p1 = 2.0 * kPi * k1 / m;
            const double p2 = 2.0 * kPi * k2 / m;
            rule.nodes.push_back({c * std::cos(p1), c * std::sin(p1), s * std::cos(p2), s * std::sin(p2)});
            rule.weights.push_back(0.5 * wu[a] * (2.0 * kPi / m) * (2.0 * kPi / m));
          }
      }
      break;
    }
    default:
      throw Error(ErrorKind::UnsupportedDimension, "cosphere quadrature supports n = 1..4");
  }
  return rule;
}

QuadratureGrid make_grid(int n, int x_grid, int sphere_resolution, int contour_nodes, bool collapse_x) {
  if (n < 1 || n > kMaxDim) throw Error(ErrorKind::UnsupportedDimension, "grid dimension must be 1..4");
  QuadratureGrid g;
  g.n = n;
  g.sphere = cosphere_quadrature(n, sphere_resolution);
  g.contour_nodes = contour_nodes;
  g.x_collapsed = collapse_x;
  const double full = std::pow(2.0 * kPi, n);
  if (collapse_x) {
    g.x_nodes.push_back({0, 0, 0, 0});
    g.x_weights.push_back(full);
    return g;
  }
  const int total = static_cast<int>(std::pow(x_grid, n));
  const double w = full / total;
  for (int idx = 0; idx < total; ++idx) {
    std::array<double, kMaxDim> x{};
    int rest = idx;
    for (int i = 0; i < n; ++i) {
      x[i] = 2.0 * kPi * (rest % x_grid) / x_grid;
      rest /= x_grid;
    }
    g.x_nodes.push_back(x);
    g.x_weights.push_back(w);
  }
  return g;
}

double metric_volume(const TorusChart& chart) {
  const QuadratureGrid g = make_grid(chart.n(), chart.x_grid(), 0, 0, chart.flat());
  double vol = 0.0;
  for (std::size_t i = 0; i < g.x_nodes.size(); ++i) vol += g.x_weights[i] * chart.sqrt_det(g.x_nodes[i].data());
  return vol;
}

}  // namespace resdet
