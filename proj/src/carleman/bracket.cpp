#include "kvplate/carleman/bracket.hpp"

#include <cmath>

namespace kvplate::carleman {

double ConjugatedSymbol::phi(const Point& x) const { return std::exp(lambda * psi.value(x)); }

Eigen::Vector2d ConjugatedSymbol::grad_phi(const Point& x) const {
  const Jet2 j = psi.jet(x);
  return lambda * std::exp(lambda * j.value) * j.grad;
}

std::complex<double> ConjugatedSymbol::operator()(const Point& x, const Eigen::Vector2d& xi) const {
  const Eigen::Vector2d g = grad_phi(x);
  return {xi.squaredNorm() - g.squaredNorm(), 2.0 * xi.dot(g)};
}

std::array<Eigen::Vector2d, 2> ConjugatedSymbol::characteristic(const Point& x) const {
  const Eigen::Vector2d g = grad_phi(x);
  const Eigen::Vector2d t{-g.y(), g.x()};
  return {t, -t};
}

double poisson_bracket(const Jet2& j, double lambda, const Eigen::Vector2d& xi) {
  const double l = lambda;
  const double e1 = std::exp(l * j.value);
  const double e3 = e1 * e1 * e1;
  const double xg = xi.dot(j.grad);
  const double g2 = j.grad.squaredNorm();
  return 4.0 * e1 * (l * l * xg * xg + l * xi.dot(j.hess * xi)) +
         4.0 * e3 * (l * l * l * l * g2 * g2 + l * l * l * j.grad.dot(j.hess * j.grad));
}

double poisson_bracket(const ConjugatedSymbol& symbol, const Point& x, const Eigen::Vector2d& xi) {
  return poisson_bracket(symbol.psi.jet(x), symbol.lambda, xi);
}

double normalized_characteristic_bracket(const Jet2& j, double lambda, int sign) {
  const Eigen::Vector2d xh = (sign >= 0 ? 1.0 : -1.0) * Eigen::Vector2d{-j.grad.y(), j.grad.x()};
  const double g2 = j.grad.squaredNorm();
  return xh.dot(j.hess * xh) + lambda * g2 * g2 + j.grad.dot(j.hess * j.grad);
}

namespace {

template <class F>
double d6(F&& f, double s) {
  return (45.0 * (f(s) - f(-s)) - 9.0 * (f(2.0 * s) - f(-2.0 * s)) + (f(3.0 * s) - f(-3.0 * s))) / (60.0 * s);
}

}  // namespace

double poisson_bracket_fd(const std::function<double(const Point&)>& psi, double lambda, const Point& x,
                          const Eigen::Vector2d& xi, double inner, double outer) {
  const auto phi = [&](const Point& y) { return std::exp(lambda * psi(y)); };
  const auto grad_phi = [&](const Point& y) {
    Eigen::Vector2d g;
    for (int k = 0; k < 2; ++k) {
      const Eigen::Vector2d e = Eigen::Vector2d::Unit(k);
      g[k] = d6([&](double s) { return phi(y + s * e); }, inner);
    }
    return g;
  };
  const auto re = [&](const Point& y, const Eigen::Vector2d& z) { return z.squaredNorm() - grad_phi(y).squaredNorm(); };
  const auto im = [&](const Point& y, const Eigen::Vector2d& z) { return 2.0 * z.dot(grad_phi(y)); };

  double out = 0.0;
  for (int k = 0; k < 2; ++k) {
    const Eigen::Vector2d e = Eigen::Vector2d::Unit(k);
    const double dxi_re = d6([&](double s) { return re(x, xi + s * e); }, outer);
    const double dx_im = d6([&](double s) { return im(x + s * e, xi); }, outer);
    const double dx_re = d6([&](double s) { return re(x + s * e, xi); }, outer);
    const double dxi_im = d6([&](double s) { return im(x, xi + s * e); }, outer);
    out += dxi_re * dx_im - dx_re * dxi_im;
  }
  return out;
}

}  // namespace kvplate::carleman
