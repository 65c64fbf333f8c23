#include "resdet/contour.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "resdet/error.hpp"

namespace resdet {

double distance_to_cut(cplx lambda, double theta) {
  const cplx r = lambda * std::polar(1.0, -theta);
  if (r.real() <= 0.0) return std::abs(lambda);
  return std::abs(r.imag());
}

cplx log_branch(cplx lambda, double theta) {
  double a = std::arg(lambda);
  while (a >= theta) a -= 2.0 * kPi;
  while (a < theta - 2.0 * kPi) a += 2.0 * kPi;
  return {std::log(std::abs(lambda)), a};
}

cplx power_branch(cplx lambda, cplx s, double theta) {
  if (s == cplx(0.0)) return 1.0;
  return std::exp(-s * log_branch(lambda, theta));
}

namespace {

struct Cluster {
  std::vector<cplx> members;
  cplx center;
  double spread = 0.0;
};

void finish(Cluster& c) {
  c.center = std::accumulate(c.members.begin(), c.members.end(), cplx(0.0)) /
             static_cast<double>(c.members.size());
  c.spread = 0.0;
  for (auto m : c.members) c.spread = std::max(c.spread, std::abs(m - c.center));
}

}  // namespace

ContourSpec make_contour(std::span<const cplx> eigenvalues, const ContourOptions& options) {
  ContourSpec spec;
  spec.theta = options.theta;
  spec.nodes_per_circle = options.nodes_per_circle;
  spec.min_radius = options.min_radius;
  spec.max_radius = options.max_radius;
  if (eigenvalues.empty()) return spec;

  std::vector<double> dcut(eigenvalues.size());
  for (std::size_t i = 0; i < eigenvalues.size(); ++i) {
    dcut[i] = distance_to_cut(eigenvalues[i], options.theta);
    if (dcut[i] <= options.cut_tolerance * std::max(1.0, std::abs(eigenvalues[i])))
      throw Error(ErrorKind::PrincipalAngleViolation, "eigenvalue lies on or near the spectral cut");
  }

  // single-linkage clustering relative to the distance to the cut
  const std::size_t m = eigenvalues.size();
  std::vector<std::size_t> parent(m);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j) {
      const double sep = std::abs(eigenvalues[i] - eigenvalues[j]);
      const double scale = std::max(1.0, std::max(std::abs(eigenvalues[i]), std::abs(eigenvalues[j])));
      if (sep < 0.5 * std::min(dcut[i], dcut[j]) || sep < 1e-6 * scale) parent[find(i)] = find(j);
    }
  std::vector<Cluster> clusters;
  std::vector<int> slot(m, -1);
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t r = find(i);
    if (slot[r] < 0) {
      slot[r] = static_cast<int>(clusters.size());
      clusters.emplace_back();
    }
    clusters[slot[r]].members.push_back(eigenvalues[i]);
  }
  for (auto& c : clusters) finish(c);

  std::vector<Circle> circles;
  for (std::size_t i = 0; i < clusters.size(); ++i) {
    const auto& c = clusters[i];
    double room = distance_to_cut(c.center, options.theta) - c.spread;
    for (std::size_t j = 0; j < clusters.size(); ++j) {
      if (j == i) continue;
      room = std::min(room, std::abs(c.center - clusters[j].center) - c.spread - clusters[j].spread);
    }
    double radius = c.spread + 0.5 * room;
    radius = std::clamp(radius, options.min_radius, options.max_radius);
    circles.push_back({c.center, radius});
  }

  // merge overlapping candidates into enclosing circles
  bool merged = true;
  while (merged) {
    merged = false;
    for (std::size_t i = 0; i < circles.size() && !merged; ++i)
      for (std::size_t j = i + 1; j < circles.size() && !merged; ++j) {
        const double d = std::abs(circles[i].center - circles[j].center);
        if (d >= circles[i].radius + circles[j].radius) continue;
        if (d + circles[j].radius <= circles[i].radius) {
          circles.erase(circles.begin() + static_cast<std::ptrdiff_t>(j));
        } else if (d + circles[i].radius <= circles[j].radius) {
          circles.erase(circles.begin() + static_cast<std::ptrdiff_t>(i));
        } else {
          const double r = 0.5 * (d + circles[i].radius + circles[j].radius);
          const cplx dir = (circles[j].center - circles[i].center) / d;
          const cplx center = circles[i].center + dir * (r - circles[i].radius);
          circles[i] = {center, r};
          circles.erase(circles.begin() + static_cast<std::ptrdiff_t>(j));
        }
        merged = true;
      }
  }
  for (const auto& c : circles)
    if (distance_to_cut(c.center, options.theta) <= c.radius)
      throw Error(ErrorKind::PrincipalAngleViolation, "contour circle cannot avoid the spectral cut");
  spec.circles = std::move(circles);
  return spec;
}

ContourSpec contour_for(const CMatrix& a0, const ContourOptions& options) {
  std::vector<cplx> eig;
  if (a0.rows() == 1) {
    eig.push_back(a0(0, 0));
  } else {
    Eigen::ComplexEigenSolver<CMatrix> solver(a0, false);
    const auto& ev = solver.eigenvalues();
    eig.assign(ev.data(), ev.data() + ev.size());
  }
  return make_contour(eig, options);
}

std::vector<ContourNode> contour_nodes(const ContourSpec& spec) {
  std::vector<ContourNode> nodes;
  const int M = spec.nodes_per_circle;
  nodes.reserve(spec.circles.size() * static_cast<std::size_t>(M));
  for (const auto& c : spec.circles)
    for (int k = 0; k < M; ++k) {
      const cplx e = std::polar(1.0, 2.0 * kPi * (k + 0.5) / M);
      nodes.push_back({c.center + c.radius * e, -c.radius * e / static_cast<double>(M)});
    }
  return nodes;
}

Jet jet_contour_apply(const Jet& a, const ContourSpec& spec, const std::function<cplx(cplx)>& f) {
  Jet out(a.space_ptr(), a.anchor(), a.dim());
  for (const auto& node : contour_nodes(spec)) {
    Jet shifted = a;
    shifted.add_identity(-node.lambda);
    Jet r = jet_inverse(shifted);
    r *= node.weight * f(node.lambda);
    out += r;
  }
  return out;
}

namespace {

void cross_check_constant(const Jet& result, const Jet& a, double theta) {
  const auto ref = matrix_log_eig(a.constant_term(), theta);
  if (!ref) return;
  const double err = (result.constant_term() - *ref).norm();
  if (err > 1e-8 * (1.0 + ref->norm()))
    throw Error(ErrorKind::CrossCheckFailed, "contour logarithm disagrees with eigendecomposition");
}

}  // namespace

Jet jet_log_contour(const Jet& a, const ContourOptions& options) {
  const ContourSpec spec = contour_for(a.constant_term(), options);
  const double theta = options.theta;
  Jet out = jet_contour_apply(a, spec, [theta](cplx l) { return log_branch(l, theta); });
  if (options.cross_check) cross_check_constant(out, a, theta);
  return out;
}

Jet jet_power_contour(const Jet& a, cplx s, const ContourOptions& options) {
  if (s == cplx(0.0)) {
    contour_for(a.constant_term(), options);  // admissibility only
    return Jet::identity(a.space_ptr(), a.anchor(), a.dim());
  }
  const ContourSpec spec = contour_for(a.constant_term(), options);
  const double theta = options.theta;
  return jet_contour_apply(a, spec, [s, theta](cplx l) { return power_branch(l, s, theta); });
}

std::optional<CMatrix> matrix_log_eig(const CMatrix& a, double theta) {
  const int N = static_cast<int>(a.rows());
  Eigen::ComplexEigenSolver<CMatrix> solver(a, true);
  const auto& ev = solver.eigenvalues();
  for (int i = 0; i < N; ++i)
    for (int j = i + 1; j < N; ++j)
      if (std::abs(ev(i) - ev(j)) <= 1e-6 * std::max(1.0, std::abs(ev(i)))) return std::nullopt;
  const CMatrix& V = solver.eigenvectors();
  Eigen::VectorXcd logs(N);
  for (int i = 0; i < N; ++i) logs(i) = log_branch(ev(i), theta);
  return CMatrix(V * logs.asDiagonal() * V.inverse());
}

}  // namespace resdet
