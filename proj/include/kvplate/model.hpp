#pragma once

#include <Eigen/Core>
#include <json.hpp>
#include <string>
#include <string_view>

namespace kvplate {

enum class DampingShape { smooth_bump, plateau_bump, none };

std::string_view to_string(DampingShape shape);
DampingShape parse_damping_shape(std::string_view name);

/// Localized Kelvin-Voigt coefficient a(x), supported in [m - w, m + w].
///
/// smooth-bump:  a(x) = a_max * exp(1 - 1/(1 - s^2)),  s = (x - m)/w, |s| < 1.
/// plateau-bump: a(x) = a_max on |s| <= 1/2, then a C-infinity step down to
///               zero at |s| = 1.
/// none:         a(x) = 0 (undamped runs).
///
/// Both bumps are exactly zero outside the support and satisfy
/// a >= a_max/2 on |s| <= 1/2.
struct DampingProfile {
  double center = 0.5;
  double half_width = 0.1;
  double amplitude = 1.0;
  DampingShape shape = DampingShape::smooth_bump;

  double operator()(double x) const;
  bool active() const { return shape != DampingShape::none; }
  double support_left() const { return center - half_width; }
  double support_right() const { return center + half_width; }
};

/// 1-D transmission beam on [0, L]: the damped material occupies
/// Omega1 = (a_if, b_if); Omega2 = (0, a_if) u (b_if, L) is undamped.
struct TransmissionModel1D {
  double length = 1.0;
  double interface_left = 0.3;
  double interface_right = 0.7;
  double c1 = 1.0;
  double c2 = 1.0;
  DampingProfile damping;

  /// True for x in the open damped region (a_if, b_if).
  bool in_omega1(double x) const { return x > interface_left && x < interface_right; }
};

/// Throws ConfigError when an invariant fails.
void validate(const TransmissionModel1D& model);

/// Builds a model from a key-value object. Keys: L, a_if, b_if, c1, c2 and a
/// "damping" object with shape, m, w, a_max. Missing keys take the defaults
/// of TransmissionModel1D; unknown keys are rejected.
TransmissionModel1D make_model(const nlohmann::json& config);
nlohmann::json to_json(const TransmissionModel1D& model);

/// a(x) for 0 <= x <= L; throws ConfigError outside the domain.
double eval_damping(const TransmissionModel1D& model, double x);

/// Disc of radius R centred at the origin with a circular hole removed.
/// gamma1 is the hole boundary, gamma2 the outer circle.
struct AnnularDomain2D {
  double outer_radius = 1.0;
  Eigen::Vector2d hole_center{0.3, 0.0};
  double hole_radius = 0.2;

  bool contains(const Eigen::Vector2d& p) const;
  /// Distance to the nearest boundary piece (negative outside).
  double boundary_distance(const Eigen::Vector2d& p) const;
  /// Unit normal pointing out of the domain at the boundary point nearest p
  /// on the hole (gamma1) or the outer circle (gamma2).
  Eigen::Vector2d hole_normal(const Eigen::Vector2d& p) const;
  Eigen::Vector2d outer_normal(const Eigen::Vector2d& p) const;
};

void validate(const AnnularDomain2D& domain);

}  // namespace kvplate
