#pragma once

#include <array>
#include <functional>
#include <string_view>
#include <vector>

#include "kvplate/exec.hpp"
#include "kvplate/model.hpp"

namespace kvplate::carleman {

/// phi(x) = exp(lambda psi(x)), psi(x) = -slope (x - anchor).
struct Phase1D {
  double lambda = 1.0;
  double slope = 1.0;
  double anchor = 0.0;

  double psi(double x) const { return -slope * (x - anchor); }
  double phi(double x) const;
  double dphi(double x) const;
};

/// Two-piece layout on the beam: O1 = (gamma1, gamma) inside the damped
/// part, O2 = (gamma, gamma2). The normal on gamma points out of O1 (+x),
/// on gamma1 it is -x and on gamma2 +x. P_k = -h^2 d^2/dx^2 - alpha_k h.
struct CarlemanSetup {
  double gamma1 = 0.5;
  double gamma = 0.7;
  double gamma2 = 1.0;
  Phase1D phase1, phase2;
  double alpha1 = 1.0;
  double alpha2 = 1.0;
  int n_cells = 400;
  double h0 = 0.2;
  /// Leave out the d_n phi1 != 0 check on gamma1.
  bool skip_gamma1_checks = false;
};

struct CarlemanOptions {
  int n_cells = 400;
  double lambda = 1.0;
  std::array<double, 2> slopes{2.0, 1.0};
  double h0 = 0.2;
  bool skip_gamma1_checks = false;
};

/// gamma1 = damping centre, gamma = right interface, gamma2 = L; both phases
/// anchored at gamma; alpha_k = 1/c_k.
CarlemanSetup make_carleman_setup(const TransmissionModel1D& model, const CarlemanOptions& opts = {});

/// Throws ConfigError when the phases break the trace or sign conditions.
void check_phases(const CarlemanSetup& setup);

struct Profile1D {
  std::function<double(double)> value, first, second;
};

/// w1 on O1, w2 on O2. Forcing, jumps and traces follow from them.
struct ManufacturedPair {
  Profile1D w1, w2;

  ManufacturedPair scaled(double s) const;
  /// w1 = w2 = 0.
  static ManufacturedPair zero();
  /// w1 = w2 = amplitude cos(pi/2 (x - gamma1)/(gamma2 - gamma1)): smooth
  /// across gamma (no jumps), w2(gamma2) = 0, flat at gamma1.
  static ManufacturedPair cosine(const CarlemanSetup& setup, double amplitude = 1.0);
};

/// Every term of the weighted estimate, each multiplied by the common factor
/// exp(-2 max phi / h) so large h^{-1} stays finite.
///
/// lhs: h|e w1|^2_O1, h^3|e w1'|^2_O1, h|e w1|^2_g, h^3|e grad w1|^2_g,
///      h^3|e d_n w1|^2_g, and the same five for w2 on O2 and gamma.
/// rhs: h^4|e f1|^2_O1, h^4|e f2|^2_O2, h|e w1|^2_g1, h^3|e d_n w1|^2_g1,
///      h|e e1|^2_g, h^3|e grad_tan e1|^2_g (zero in 1-D), h^3|e e2|^2_g.
/// Weights are phi1 on O1 and its boundary, phi2 on O2.
struct CarlemanTerms {
  double h = 0.0;
  std::array<double, 10> lhs{};
  std::array<double, 7> rhs{};
  double lhs_total = 0.0;
  double rhs_total = 0.0;
  double ratio = 0.0;  ///< lhs/rhs, 0 when both vanish
  double log_scale = 0.0;  ///< 2 max phi / h

  static const std::array<std::string_view, 10>& lhs_names();
  static const std::array<std::string_view, 7>& rhs_names();
};

/// Composite 8-point Gauss-Legendre over n_cells cells per piece, each cell
/// split until (2 |phi'| / h) * width <= 1.
/// Throws ConfigError for h outside (0, h0], w2(gamma2) != 0 or bad phases.
CarlemanTerms carleman_ratio(const CarlemanSetup& setup, double h, const ManufacturedPair& w);

std::vector<CarlemanTerms> carleman_sweep(const CarlemanSetup& setup, const std::vector<double>& hs,
                                          const ManufacturedPair& w, Exec exec = Exec::parallel);

}  // namespace kvplate::carleman
