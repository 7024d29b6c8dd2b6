#include "kvplate/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "kvplate/errors.hpp"

namespace kvplate {

namespace {

using ComplexSparse = Eigen::SparseMatrix<Complex>;

double one_norm(const SparseMatrix& m) {
  double best = 0.0;
  for (int col = 0; col < m.outerSize(); ++col) {
    double s = 0.0;
    for (SparseMatrix::InnerIterator it(m, col); it; ++it) s += std::abs(it.value());
    best = std::max(best, s);
  }
  return best;
}

}  // namespace

std::vector<Complex> spectrum(const DiscreteGenerator& gen) {
  if (gen.dimension() > kMaxDenseDimension) {
    std::ostringstream os;
    os << "spectrum: dimension " << gen.dimension() << " exceeds the dense limit " << kMaxDenseDimension
       << "; reduce n_cells";
    throw ConfigError(os.str());
  }
  const Eigen::MatrixXd a(gen.symmetrized());
  Eigen::EigenSolver<Eigen::MatrixXd> solver(a, false);
  if (solver.info() != Eigen::Success) throw NumericalError("spectrum: eigensolver did not converge");
  std::vector<Complex> ev(solver.eigenvalues().data(), solver.eigenvalues().data() + a.rows());
  std::sort(ev.begin(), ev.end(), [](const Complex& x, const Complex& y) {
    if (x.imag() != y.imag()) return x.imag() < y.imag();
    return x.real() < y.real();
  });
  return ev;
}

double distance_to_spectrum(const std::vector<Complex>& eigenvalues, double mu) {
  double d = std::numeric_limits<double>::infinity();
  for (const auto& l : eigenvalues) d = std::min(d, std::abs(l - Complex(0.0, mu)));
  return d;
}

ResolventSample resolvent_norm(const DiscreteGenerator& gen, double mu, const ResolventOptions& opts) {
  ResolventSample out;
  out.mu = mu;
  const int dim = gen.dimension();
  const SparseMatrix& a = gen.symmetrized();

  ComplexSparse t = a.cast<Complex>();
  for (int i = 0; i < dim; ++i) t.coeffRef(i, i) -= Complex(0.0, mu);
  t.makeCompressed();

  Eigen::VectorXd scale(dim);
  for (int i = 0; i < dim; ++i) scale[i] = 1.0 / std::sqrt(std::max(std::abs(t.coeff(i, i)), 1.0));
  const ComplexSparse scaled = scale.asDiagonal() * t * scale.asDiagonal();
  Eigen::SparseLU<ComplexSparse> lu;
  lu.compute(scaled);
  double sigma = 0.0;
  const auto singular = [&] {
    out.norm = std::numeric_limits<double>::infinity();
    out.singular = true;
    return out;
  };
  if (lu.info() != Eigen::Success) return singular();
  const auto solve = [&](const Eigen::VectorXcd& b) -> Eigen::VectorXcd {
    return scale.asDiagonal() * lu.solve((scale.asDiagonal() * b).eval());
  };
  const auto solve_adjoint = [&](const Eigen::VectorXcd& b) -> Eigen::VectorXcd {
    return scale.asDiagonal() * lu.adjoint().solve((scale.asDiagonal() * b).eval());
  };

  // Below this sigma_min the LU backward error dominates the answer.
  const double floor = 16.0 * std::numeric_limits<double>::epsilon() * std::max(one_norm(a), std::abs(mu));

  // Restarted Lanczos with full reorthogonalization on K = (T^H T)^{-1};
  // its largest eigenvalue is 1/sigma_min(T)^2.
  const int m = std::min(opts.krylov_dimension, dim);
  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> normal;
  Eigen::VectorXcd start(dim);
  for (int i = 0; i < dim; ++i) start[i] = Complex(normal(rng), normal(rng));
  start.normalize();

  Eigen::MatrixXcd basis(dim, m);
  double theta = 0.0;
  int applications = 0;
  for (int restart = 0; restart < opts.max_restarts; ++restart) {
    basis.col(0) = start;
    std::vector<double> alpha, beta;
    Eigen::VectorXd ritz;
    for (int j = 0; j < m; ++j) {
      Eigen::VectorXcd w = solve_adjoint(solve(basis.col(j)));
      ++applications;
      if (!w.allFinite()) return singular();
      alpha.push_back(basis.col(j).dot(w).real());
      for (int pass = 0; pass < 2; ++pass) w -= basis.leftCols(j + 1) * (basis.leftCols(j + 1).adjoint() * w);
      beta.push_back(w.norm());

      Eigen::MatrixXd tri = Eigen::MatrixXd::Zero(j + 1, j + 1);
      for (int k = 0; k <= j; ++k) {
        tri(k, k) = alpha[static_cast<std::size_t>(k)];
        if (k < j) tri(k, k + 1) = tri(k + 1, k) = beta[static_cast<std::size_t>(k)];
      }
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(tri);
      theta = eig.eigenvalues()[j];
      ritz = eig.eigenvectors().col(j);
      out.residual = beta.back() * std::abs(ritz[j]) / theta;
      const bool exhausted = beta.back() <= 1e-14 * theta;
      if (out.residual <= opts.tolerance || exhausted || j + 1 == m) {
        start = (basis.leftCols(j + 1) * ritz.cast<Complex>()).normalized();
        break;
      }
      basis.col(j + 1) = w / beta.back();
    }
    sigma = std::sqrt(theta);
    if (1.0 / sigma < floor) return singular();
    if (out.residual <= opts.tolerance) break;
  }
  const Eigen::VectorXcd check = solve_adjoint(solve(start));
  ++applications;
  theta = start.dot(check).real();
  out.residual = (check - theta * start).norm() / theta;
  out.iterations = applications;
  sigma = std::sqrt(theta);
  if (!(out.residual <= 1e-8)) {
    std::ostringstream os;
    os << "resolvent_norm: Lanczos iteration stalled at mu=" << mu << " (residual " << out.residual
       << " after " << out.iterations << " iterations)";
    throw NumericalError(os.str());
  }
  out.norm = sigma;
  return out;
}

double GrowthEnvelope::operator()(double mu) const { return c_a + c_b * std::abs(mu); }

GrowthEnvelope fit_envelope(const std::vector<ResolventSample>& samples) {
  std::vector<double> xs, ys;
  for (const auto& s : samples) {
    if (!std::isfinite(s.norm)) continue;
    xs.push_back(std::abs(s.mu));
    ys.push_back(std::log(s.norm));
  }
  GrowthEnvelope env;
  env.finite_samples = xs.size();
  if (xs.empty()) return env;

  const auto [lo, hi] = std::minmax_element(xs.begin(), xs.end());
  const double mid = 0.5 * (*lo + *hi);
  std::vector<double> slopes{0.0};
  for (std::size_t i = 0; i < xs.size(); ++i)
    for (std::size_t j = i + 1; j < xs.size(); ++j)
      if (xs[i] != xs[j]) {
        const double b = (ys[j] - ys[i]) / (xs[j] - xs[i]);
        if (b > 0.0) slopes.push_back(b);
      }

  double best = std::numeric_limits<double>::infinity();
  for (double b : slopes) {
    double a = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < xs.size(); ++i) a = std::max(a, ys[i] - b * xs[i]);
    const double value = a + b * mid;
    if (value < best) {
      best = value;
      env.c_a = a;
      env.c_b = b;
    }
  }
  return env;
}

ResolventSweep resolvent_sweep(const DiscreteGenerator& gen, const std::vector<double>& mus, Exec exec,
                               const ResolventOptions& opts) {
  ResolventSweep out;
  out.samples.resize(mus.size());
  for_each_index(exec, static_cast<std::ptrdiff_t>(mus.size()), [&](std::ptrdiff_t i) {
    const auto k = static_cast<std::size_t>(i);
    out.samples[k] = resolvent_norm(gen, mus[k], opts);
  });
  out.envelope = fit_envelope(out.samples);
  return out;
}

std::vector<double> log_spaced(double lo, double hi, int count) {
  if (!(lo > 0.0) || !(hi >= lo)) throw ConfigError("log_spaced: need 0 < lo <= hi");
  if (count < 1) throw ConfigError("log_spaced: need at least one point");
  std::vector<double> out(static_cast<std::size_t>(count));
  if (count == 1) {
    out[0] = lo;
    return out;
  }
  const double step = std::log(hi / lo) / (count - 1);
  for (int i = 0; i < count; ++i) out[static_cast<std::size_t>(i)] = lo * std::exp(step * i);
  out.back() = hi;
  return out;
}

}  // namespace kvplate
