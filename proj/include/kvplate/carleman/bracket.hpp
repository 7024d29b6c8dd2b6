#pragma once

#include <array>
#include <complex>
#include <functional>

#include "kvplate/carleman/field.hpp"

namespace kvplate::carleman {

/// p(x, xi) = |xi|^2 conjugated by the weight phi = exp(lambda psi):
/// p_phi(x, xi) = p(x, xi + i grad phi).
struct ConjugatedSymbol {
  Field2D psi;
  double lambda = 1.0;

  double phi(const Point& x) const;
  Eigen::Vector2d grad_phi(const Point& x) const;
  std::complex<double> operator()(const Point& x, const Eigen::Vector2d& xi) const;
  /// The two covectors with <xi, grad phi> = 0 and |xi| = |grad phi|.
  std::array<Eigen::Vector2d, 2> characteristic(const Point& x) const;
};

/// {Re p_phi, Im p_phi}(x, xi) from exact derivatives of psi:
///   4 e^{l psi} (l^2 (xi.grad psi)^2 + l xi^T psi'' xi)
/// + 4 e^{3 l psi} (l^4 |grad psi|^4 + l^3 grad psi^T psi'' grad psi).
double poisson_bracket(const ConjugatedSymbol& symbol, const Point& x, const Eigen::Vector2d& xi);
double poisson_bracket(const Jet2& psi, double lambda, const Eigen::Vector2d& xi);

/// Bracket on the characteristic set divided by 4 l^3 e^{3 l psi}:
///   xh^T psi'' xh + l |grad psi|^4 + grad psi^T psi'' grad psi,
/// xh = +-|grad psi| t with t the unit tangent. Same sign as the bracket and
/// finite for any lambda. sign picks the covector.
double normalized_characteristic_bracket(const Jet2& psi, double lambda, int sign = 1);

/// Independent oracle: Re p_phi and Im p_phi are evaluated from values of
/// psi only (grad phi by 6th-order central differences with step inner),
/// and the bracket sum_j d_xi_j Re d_x_j Im - d_x_j Re d_xi_j Im by 6th-order
/// central differences with step outer.
double poisson_bracket_fd(const std::function<double(const Point&)>& psi, double lambda, const Point& x,
                          const Eigen::Vector2d& xi, double inner = 2.5e-4, double outer = 2.5e-4);

}  // namespace kvplate::carleman
