#include "kvplate/carleman/critical_points.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

#include "kvplate/errors.hpp"

namespace kvplate::carleman {

std::string_view to_string(CriticalKind kind) {
  switch (kind) {
    case CriticalKind::minimum: return "minimum";
    case CriticalKind::saddle: return "saddle";
    case CriticalKind::maximum: return "maximum";
  }
  return "minimum";
}

namespace {

struct ScanGrid {
  int n = 0;
  double lo = 0.0, step = 0.0;
  std::vector<double> gnorm;  // +inf outside the domain

  Point node(int i, int j) const { return {lo + step * i, lo + step * j}; }
  double at(int i, int j) const { return gnorm[static_cast<std::size_t>(i) * static_cast<std::size_t>(n) + static_cast<std::size_t>(j)]; }
};

ScanGrid scan(const Field2D& psi, const AnnularDomain2D& domain, const ScanOptions& opts) {
  if (opts.grid < 8) throw ConfigError("critical point scan: grid must be >= 8");
  ScanGrid g;
  g.n = opts.grid;
  g.lo = -domain.outer_radius;
  g.step = 2.0 * domain.outer_radius / (g.n - 1);
  g.gnorm.assign(static_cast<std::size_t>(g.n) * static_cast<std::size_t>(g.n), std::numeric_limits<double>::infinity());
  for_each_index(opts.exec, g.n, [&](std::ptrdiff_t i) {
    for (int j = 0; j < g.n; ++j) {
      const Point p = g.node(static_cast<int>(i), j);
      if (!domain.contains(p)) continue;
      g.gnorm[static_cast<std::size_t>(i) * static_cast<std::size_t>(g.n) + static_cast<std::size_t>(j)] =
          psi.jet(p).grad.norm();
    }
  });
  return g;
}

double scale_of(const ScanGrid& g) {
  double s = 0.0;
  for (double v : g.gnorm)
    if (std::isfinite(v)) s = std::max(s, v);
  return s > 0.0 ? s : 1.0;
}

std::optional<Point> newton(const Field2D& psi, const AnnularDomain2D& domain, Point x, double tol) {
  for (int it = 0; it < 100; ++it) {
    const Jet2 j = psi.jet(x);
    const double gn = j.grad.norm();
    if (gn < tol) return x;
    Eigen::Vector2d dir;
    const double det = j.hess.determinant();
    if (std::abs(det) > 1e-14 * std::max(1.0, j.hess.squaredNorm()))
      dir = -j.hess.inverse() * j.grad;
    else
      dir = -j.grad;
    double t = 1.0;
    bool improved = false;
    while (t > 1e-6) {
      const Point y = x + t * dir;
      if (domain.boundary_distance(y) > -1e-3 && psi.jet(y).grad.norm() < gn) {
        x = y;
        improved = true;
        break;
      }
      t *= 0.5;
    }
    if (!improved) return std::nullopt;
  }
  return psi.jet(x).grad.norm() < tol ? std::optional<Point>(x) : std::nullopt;
}

}  // namespace

double field_scale(const Field2D& psi, const AnnularDomain2D& domain, const ScanOptions& opts) {
  return scale_of(scan(psi, domain, opts));
}

std::vector<CriticalPoint> find_critical_points(const Field2D& psi, const AnnularDomain2D& domain,
                                                const ScanOptions& opts) {
  validate(domain);
  const ScanGrid g = scan(psi, domain, opts);
  const double scale = scale_of(g);
  const double tol = opts.tolerance * scale;

  std::vector<Point> seeds;
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j) {
      const double v = g.at(i, j);
      if (!std::isfinite(v)) continue;
      bool local_min = true;
      for (int di = -1; di <= 1 && local_min; ++di)
        for (int dj = -1; dj <= 1; ++dj) {
          if (di == 0 && dj == 0) continue;
          const int a = i + di, b = j + dj;
          if (a < 0 || b < 0 || a >= g.n || b >= g.n) continue;
          if (g.at(a, b) < v) {
            local_min = false;
            break;
          }
        }
      if (local_min) seeds.push_back(g.node(i, j));
    }

  std::vector<std::optional<Point>> refined(seeds.size());
  for_each_index(opts.exec, static_cast<std::ptrdiff_t>(seeds.size()), [&](std::ptrdiff_t k) {
    refined[static_cast<std::size_t>(k)] = newton(psi, domain, seeds[static_cast<std::size_t>(k)], tol);
  });

  std::vector<Point> found;
  for (const auto& r : refined) {
    if (!r) continue;
    const double bd = domain.boundary_distance(*r);
    if (bd < -1e-9) continue;
    if (bd < 1e-6) {
      std::ostringstream os;
      os << "critical point on the boundary at (" << r->x() << ", " << r->y() << ")";
      throw NumericalError(os.str());
    }
    bool duplicate = false;
    for (const auto& f : found)
      if ((f - *r).norm() < opts.merge_distance) duplicate = true;
    if (!duplicate) found.push_back(*r);
  }
  std::sort(found.begin(), found.end(), [](const Point& a, const Point& b) {
    return a.x() != b.x() ? a.x() < b.x() : a.y() < b.y();
  });

  std::vector<CriticalPoint> out;
  for (const auto& x : found) {
    const Jet2 j = psi.jet(x);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(j.hess);
    CriticalPoint c;
    c.x = x;
    c.value = j.value;
    c.gradient_norm = j.grad.norm();
    c.curvatures = eig.eigenvalues();
    c.axes = eig.eigenvectors();
    if (c.curvatures.cwiseAbs().minCoeff() < opts.degenerate_curvature * scale) {
      std::ostringstream os;
      os << "degenerate critical point at (" << x.x() << ", " << x.y() << "), Hessian eigenvalues "
         << c.curvatures[0] << ", " << c.curvatures[1];
      throw NumericalError(os.str());
    }
    if (c.curvatures[0] > 0.0)
      c.kind = CriticalKind::minimum;
    else if (c.curvatures[1] < 0.0)
      c.kind = CriticalKind::maximum;
    else
      c.kind = CriticalKind::saddle;
    out.push_back(c);
  }
  return out;
}

}  // namespace kvplate::carleman
