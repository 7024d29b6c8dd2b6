#pragma once

#include <cstdint>
#include <vector>

#include "kvplate/generator.hpp"

namespace kvplate {

/// Finite-difference weights (Fornberg) for the m-th derivative at x0 from
/// values at nodes xs.
std::vector<double> fd_weights(double x0, const std::vector<double>& xs, int m);

/// Right-hand side F = (f, g) of (A_h - i mu) U = F, sampled on the unknowns.
struct ForcingPair {
  Eigen::VectorXcd f;
  Eigen::VectorXcd g;
};

/// Seeded sine series sum_k c_k sin(k pi x / L), k = 1..terms, for both
/// components; c_k standard normal scaled by 1/k^2. Vanishes at 0 and L.
ForcingPair smooth_forcing(const Grid1D& grid, std::uint64_t seed, int terms = 4);

/// Residuals of the second-order transmission problem satisfied by
///   w = c Δu - |mu| u + (a/c1) Δv        (Omega1)
///   w = c Δu - |mu| u                    (Omega2)
/// where U = (u, v) solves (A_h - i mu) U = F:
///   -Δw - (|mu|/c) w = Phi,
///   Phi = g/c + i mu f / c - |mu| a / c^2 Δv.
///
/// algebraic_residual checks the identity with the scheme's own 3-point Δ
/// (exact up to round-off). The consistency residual r applies an
/// independent 4th-order stencil restricted to each subdomain, so it
/// measures how far the discrete w is from satisfying the continuous system.
/// consistency_residual is r measured on the scale of w, ||(-Δ)^{-1} r||
/// per subdomain; consistency_residual_l2 is ||r|| itself, which carries
/// the fourth derivatives of the damping profile and is slow to reach its
/// asymptotic O(h^2) regime. All are divided by the data norm ||f|| + ||g||.
struct ReductionReport {
  double mu = 0.0;
  double data_norm = 0.0;
  double solve_residual = 0.0;      ///< ||(A - i mu)U - F|| / ||F|| (Euclidean)
  double velocity_defect = 0.0;     ///< max |v - i mu u - f|
  double algebraic_residual = 0.0;
  double consistency_residual = 0.0;
  double consistency_residual_l2 = 0.0;
  double interface_value_jump = 0.0;  ///< |w1 - w2| at S, one-sided extrapolation, both ends
  double interface_flux_jump = 0.0;   ///< |dw1/dx - dw2/dx| at S
  double boundary_trace = 0.0;        ///< max(|w2(0)|, |w2(L)|)
  double estimate_lhs = 0.0;             ///< ||Δu||^2 + ||v||^2
  double estimate_rhs = 0.0;             ///< ||Δf||^2 + ||g||^2 + ∫a|Δv1|^2 + ∫_B |u1|^2
  double estimate_ratio = 0.0;
  Eigen::VectorXcd w;
  Eigen::VectorXcd phi;
};

/// Throws NumericalError when the complex solve fails (i mu in the
/// spectrum) and ConfigError on a forcing layout mismatch.
ReductionReport reduction_check(const DiscreteGenerator& gen, double mu, const ForcingPair& forcing);

}  // namespace kvplate
