#include "kvplate/reduction.hpp"

#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "kvplate/errors.hpp"

namespace kvplate {

std::vector<double> fd_weights(double x0, const std::vector<double>& xs, int m) {
  const int n = static_cast<int>(xs.size()) - 1;
  if (m < 0 || m > n) throw ConfigError("fd_weights: derivative order must be in [0, nodes-1]");
  // c[k][i]: weight of node i for the k-th derivative.
  std::vector<std::vector<double>> c(static_cast<std::size_t>(m + 1), std::vector<double>(xs.size(), 0.0));
  double c1 = 1.0;
  double c4 = xs[0] - x0;
  c[0][0] = 1.0;
  for (int i = 1; i <= n; ++i) {
    const int mn = std::min(i, m);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = xs[static_cast<std::size_t>(i)] - x0;
    for (int j = 0; j < i; ++j) {
      const double c3 = xs[static_cast<std::size_t>(i)] - xs[static_cast<std::size_t>(j)];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k)
          c[k][i] = c1 * (k * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
        c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
      }
      for (int k = mn; k >= 1; --k) c[k][j] = (c4 * c[k][j] - k * c[k - 1][j]) / c3;
      c[0][j] = c4 * c[0][j] / c3;
    }
    c1 = c2;
  }
  return c[static_cast<std::size_t>(m)];
}

ForcingPair smooth_forcing(const Grid1D& grid, std::uint64_t seed, int terms) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::vector<double> cf(static_cast<std::size_t>(terms)), cg(static_cast<std::size_t>(terms));
  for (auto& c : cf) c = normal(rng);
  for (auto& c : cg) c = normal(rng);
  const int n = grid.unknowns();
  ForcingPair out{Eigen::VectorXcd::Zero(n), Eigen::VectorXcd::Zero(n)};
  for (int i = 0; i < n; ++i) {
    const double x = grid.unknown_x(i);
    for (int k = 1; k <= terms; ++k) {
      const double s = std::sin(k * M_PI * x / grid.length) / (k * k);
      out.f[i] += cf[static_cast<std::size_t>(k - 1)] * s;
      out.g[i] += cg[static_cast<std::size_t>(k - 1)] * s;
    }
  }
  return out;
}

namespace {

// A maximal run of strictly interior nodes of one subdomain (unknown indices).
struct Segment {
  int first;
  int last;
  double c;
};

std::vector<Segment> segments(const DiscreteGenerator& gen) {
  const Grid1D& g = gen.grid();
  const int il = g.interface_left_unknown(), ir = g.interface_right_unknown();
  const auto& m = gen.model();
  return {{0, il - 1, m.c2}, {il + 1, ir - 1, m.c1}, {ir + 1, g.unknowns() - 1, m.c2}};
}

// 6-node window inside [first, last], as centered on j as possible.
std::pair<int, int> window(int j, int first, int last, int width = 6) {
  int lo = j - width / 2 + 1;
  lo = std::clamp(lo, first, last - width + 1);
  return {lo, lo + width - 1};
}

Complex apply_stencil(const Eigen::VectorXcd& w, const Grid1D& grid, int lo, int hi, double x0, int m) {
  std::vector<double> xs;
  for (int i = lo; i <= hi; ++i) xs.push_back(grid.unknown_x(i));
  const auto c = fd_weights(x0, xs, m);
  Complex acc = 0.0;
  for (int i = lo; i <= hi; ++i) acc += c[static_cast<std::size_t>(i - lo)] * w[i];
  return acc;
}

double l2(const Eigen::VectorXcd& x, double h) { return std::sqrt(h * x.squaredNorm()); }

// Solves -z'' = r (3-point, zero Dirichlet data just outside the segment).
std::vector<Complex> inverse_laplacian(const std::vector<Complex>& r, double h) {
  const std::size_t m = r.size();
  std::vector<double> diag(m, 2.0);
  std::vector<Complex> z(m);
  for (std::size_t i = 0; i < m; ++i) z[i] = r[i] * h * h;
  for (std::size_t i = 1; i < m; ++i) {
    const double f = -1.0 / diag[i - 1];
    diag[i] -= f * -1.0;
    z[i] -= f * z[i - 1];
  }
  for (std::size_t i = m; i-- > 0;) {
    if (i + 1 < m) z[i] += z[i + 1];
    z[i] /= diag[i];
  }
  return z;
}

}  // namespace

ReductionReport reduction_check(const DiscreteGenerator& gen, double mu, const ForcingPair& forcing) {
  const Grid1D& grid = gen.grid();
  const auto& model = gen.model();
  const int n = gen.unknowns();
  const double h = grid.spacing;
  if (forcing.f.size() != n || forcing.g.size() != n)
    throw ConfigError("reduction_check: forcing does not match the grid");

  ReductionReport rep;
  rep.mu = mu;
  rep.data_norm = l2(forcing.f, h) + l2(forcing.g, h);

  Eigen::SparseMatrix<Complex> t = gen.matrix().cast<Complex>();
  for (int i = 0; i < 2 * n; ++i) t.coeffRef(i, i) -= Complex(0.0, mu);
  t.makeCompressed();
  Eigen::SparseLU<Eigen::SparseMatrix<Complex>> lu(t);
  if (lu.info() != Eigen::Success) {
    std::ostringstream os;
    os << "reduction_check: (A - i mu) is singular at mu=" << mu;
    throw NumericalError(os.str());
  }
  Eigen::VectorXcd rhs(2 * n);
  rhs << forcing.f, forcing.g;
  const Eigen::VectorXcd sol = lu.solve(rhs);
  if (lu.info() != Eigen::Success || !sol.allFinite())
    throw NumericalError("reduction_check: resolvent solve failed");
  const double rhs_norm = rhs.norm();
  rep.solve_residual = rhs_norm > 0.0 ? (t * sol - rhs).norm() / rhs_norm : (t * sol).norm();

  const Eigen::VectorXcd u = sol.head(n), v = sol.tail(n);
  rep.velocity_defect = (v - Complex(0.0, mu) * u - forcing.f).cwiseAbs().maxCoeff();

  const double amu = std::abs(mu);
  const Eigen::SparseMatrix<Complex> lap = gen.second_difference().cast<Complex>();
  const Eigen::SparseMatrix<Complex> G = gen.laplacian().G.cast<Complex>();
  const Eigen::VectorXd& a = gen.damping_values();
  const Eigen::VectorXd& c = gen.laplacian().speed;
  const Eigen::VectorXcd lv = lap * v;

  rep.w = -(G * u) - amu * u + (a / model.c1).cast<Complex>().cwiseProduct(lv);
  rep.phi.resize(n);
  for (int i = 0; i < n; ++i)
    rep.phi[i] = forcing.g[i] / c[i] + Complex(0.0, mu) * forcing.f[i] / c[i] -
                 amu * a[i] / (c[i] * c[i]) * lv[i];

  if (rep.data_norm == 0.0) return rep;

  const Eigen::VectorXcd lw = lap * rep.w;
  Eigen::VectorXcd alg(n);
  for (int i = 0; i < n; ++i) alg[i] = -lw[i] - amu / c[i] * rep.w[i] - rep.phi[i];
  rep.algebraic_residual = l2(alg, h) / rep.data_norm;

  double ss = 0.0, weak = 0.0;
  for (const auto& seg : segments(gen)) {
    std::vector<Complex> r;
    for (int j = seg.first; j <= seg.last; ++j) {
      const auto [lo, hi] = window(j, seg.first, seg.last);
      const Complex d2 = apply_stencil(rep.w, grid, lo, hi, grid.unknown_x(j), 2);
      r.push_back(-d2 - amu / seg.c * rep.w[j] - rep.phi[j]);
      ss += std::norm(r.back());
    }
    for (const Complex& z : inverse_laplacian(r, h)) weak += std::norm(z);
  }
  rep.consistency_residual_l2 = std::sqrt(h * ss) / rep.data_norm;
  rep.consistency_residual = std::sqrt(h * weak) / rep.data_norm;

  // One-sided extrapolation of w and w' from each side of an interface or wall.
  const auto trace = [&](const Segment& seg, bool from_left_side, double x, int m) {
    const int lo = from_left_side ? seg.last - 3 : seg.first;
    return apply_stencil(rep.w, grid, lo, lo + 3, x, m);
  };
  const auto segs = segments(gen);
  const double w_scale = std::max(l2(rep.w, h), 1e-300);
  double jump = 0.0, flux = 0.0;
  for (int s = 0; s < 2; ++s) {
    const double x = s == 0 ? model.interface_left : model.interface_right;
    const Segment& left = segs[static_cast<std::size_t>(s)];
    const Segment& right = segs[static_cast<std::size_t>(s + 1)];
    jump = std::max(jump, std::abs(trace(left, true, x, 0) - trace(right, false, x, 0)));
    flux = std::max(flux, std::abs(trace(left, true, x, 1) - trace(right, false, x, 1)));
  }
  rep.interface_value_jump = jump / w_scale;
  rep.interface_flux_jump = flux / w_scale;
  rep.boundary_trace =
      std::max(std::abs(trace(segs[0], false, 0.0, 0)), std::abs(trace(segs[2], true, model.length, 0))) /
      w_scale;

  const Eigen::VectorXcd lu_ = lap * u;
  const Eigen::VectorXcd lf = lap * forcing.f;
  double damped = 0.0, ball = 0.0;
  const double b_lo = model.damping.center - 0.5 * model.damping.half_width;
  const double b_hi = model.damping.center + 0.5 * model.damping.half_width;
  for (int i = 0; i < n; ++i) {
    damped += h * a[i] * std::norm(lv[i]);
    const double x = grid.unknown_x(i);
    if (x >= b_lo && x <= b_hi) ball += h * std::norm(u[i]);
  }
  rep.estimate_lhs = h * (lu_.squaredNorm() + v.squaredNorm());
  rep.estimate_rhs = h * (lf.squaredNorm() + forcing.g.squaredNorm()) + damped + ball;
  rep.estimate_ratio = rep.estimate_lhs / rep.estimate_rhs;
  return rep;
}

}  // namespace kvplate
