#pragma once

#include <string_view>
#include <vector>

#include "kvplate/carleman/field.hpp"
#include "kvplate/exec.hpp"
#include "kvplate/model.hpp"

namespace kvplate::carleman {

enum class CriticalKind { minimum, saddle, maximum };

std::string_view to_string(CriticalKind kind);

struct CriticalPoint {
  Point x = Point::Zero();
  double value = 0.0;
  double gradient_norm = 0.0;
  Eigen::Vector2d curvatures = Eigen::Vector2d::Zero();  ///< Hessian eigenvalues, ascending
  Eigen::Matrix2d axes = Eigen::Matrix2d::Identity();     ///< matching unit eigenvectors (columns)
  CriticalKind kind = CriticalKind::minimum;
};

struct ScanOptions {
  int grid = 200;                  ///< nodes per side of the bounding box of the outer disc
  double tolerance = 1e-10;        ///< accept |grad| < tolerance * field scale
  double merge_distance = 1e-8;
  double degenerate_curvature = 1e-8;  ///< relative to the field scale
  Exec exec = Exec::parallel;
};

/// Largest |grad psi| over the scan grid; the unit for gradient tolerances.
double field_scale(const Field2D& psi, const AnnularDomain2D& domain, const ScanOptions& opts = {});

/// Grid scan for local minima of |grad psi| followed by damped Newton.
/// Throws NumericalError for a critical point on the boundary or one with
/// a degenerate Hessian. Results are sorted by x then y.
std::vector<CriticalPoint> find_critical_points(const Field2D& psi, const AnnularDomain2D& domain,
                                                const ScanOptions& opts = {});

}  // namespace kvplate::carleman
