#pragma once

#include <cstdint>
#include <vector>

#include "kvplate/carleman/critical_points.hpp"
#include "kvplate/carleman/field.hpp"
#include "kvplate/exec.hpp"
#include "kvplate/model.hpp"

namespace kvplate::carleman {

/// Straight arc t -> center + t*length*direction, t in [-1, 1], through a
/// critical point of psi1, with psi1 equal at both ends and above psi1(center).
struct Arc {
  Point center = Point::Zero();
  Eigen::Vector2d direction{1.0, 0.0};
  double length = 0.0;
  double rise = 0.0;          ///< psi1(end) - psi1(center), smaller of the two ends
  double end_mismatch = 0.0;  ///< |psi1(center + L e) - psi1(center - L e)|
  Tube tube;                  ///< shared by parallel arcs whose tubes would touch
};

/// Morse perturbation psi1 = |x - c_hole|^2 - amplitude exp(-|x - q|^2 / width^2).
struct BumpParameters {
  Point center = Point::Zero();
  double amplitude = 0.0;
  double width = 0.0;
};

struct WeightPair {
  AnnularDomain2D domain;
  Field2D psi1, psi2;
  double lambda = 1.0;
  double epsilon = 0.0;
  std::vector<CriticalPoint> critical1, critical2;
  std::vector<Point> predicted2;  ///< images of critical1 under the inverse flow
  std::vector<Arc> arcs;
  bool concentric = false;
  BumpParameters bump;
  std::uint64_t seed_used = 0;
  int attempts = 0;

  const Field2D& psi(int k) const { return k == 1 ? psi1 : psi2; }
  const std::vector<CriticalPoint>& critical(int k) const { return k == 1 ? critical1 : critical2; }
};

struct WeightOptions {
  std::uint64_t seed = 1;
  int max_attempts = 8;
  int flow_steps = 64;
  /// Candidate arc lengths (fractions of the outer radius), tried in order;
  /// all arcs of a pair share one length.
  std::vector<double> arc_lengths{0.16, 0.14, 0.12, 0.10, 0.08, 0.06};
  /// Tube plateau margins and cutoff tapers as multiples of the arc length.
  /// The tapers bound the shear and compression of the flow; the plateau
  /// keeps psi2 a translate of psi1 around each of its critical points.
  double along_margin_ratio = 0.5;
  double cross_inner_ratio = 0.3;
  double along_taper_ratio = 3.0;
  double cross_taper_ratio = 1.5;
  /// Bump width as a fraction of the widest hole-to-circle gap, and its
  /// amplitude as a multiple of the smallest one that creates critical points.
  double bump_width = 0.22;
  double bump_strength = 1.5;
  ScanOptions scan;
};

/// Concentric hole: psi1 = |x|, no critical points, psi2 = psi1.
/// Otherwise psi1 is the bumped quadratic above, psi2 = psi1 o phi_1 with
/// phi_t the flow of a tube field along one arc per critical point.
/// Throws NumericalError when no seed in [seed, seed + max_attempts) works.
WeightPair build_weight_pair(const AnnularDomain2D& domain, const WeightOptions& opts = {});

struct PairCheck {
  double min_order_gap = 0.0;         ///< min over critical c of psi_k of psi_s(c) - psi_k(c)
  double min_partner_gradient = 0.0;  ///< min |grad psi_s| at critical points of psi_k
  double min_ball_separation = 0.0;   ///< min distance between critical points of psi1 and psi2, minus 4 eps
  double min_ball_clearance = 0.0;    ///< min boundary distance of a critical point, minus 2 eps
  double min_ball_gap = 0.0;          ///< min of psi_s - psi_k sampled on the closed 2 eps balls
  double max_hole_normal = 0.0;       ///< max d_n psi_k on the hole; must be < 0
  double min_outer_normal = 0.0;      ///< min d_n psi_k on the outer circle; must be > 0
  double normal_mismatch = 0.0;       ///< max |d_n psi2 - d_n psi1|, one-sided differences
  double prediction_error = 0.0;      ///< max distance from a found critical point of psi2 to its prediction
  bool has_maximum = false;
  std::size_t boundary_samples = 0;

  bool order_ok() const { return min_order_gap > 0.0 && min_partner_gradient > 0.0; }
  bool balls_ok() const { return min_ball_separation > 0.0 && min_ball_clearance > 0.0 && min_ball_gap > 0.0; }
  bool signs_ok() const { return max_hole_normal < 0.0 && min_outer_normal > 0.0; }
  bool valid() const {
    return order_ok() && balls_ok() && signs_ok() && normal_mismatch <= 1e-8 && prediction_error <= 1e-6 &&
           !has_maximum;
  }
};

PairCheck verify(const WeightPair& pair, int boundary_samples = 720);

struct CertifyOptions {
  double lambda_start = 1.0;
  double lambda_cap = 1024.0;
  int grid = 160;
  int boundary_samples = 512;
  /// Remove the open eps-balls around the phase's critical points. Turning
  /// this off samples a region that contains them.
  bool exclude_critical_balls = true;
  Exec exec = Exec::parallel;
};

struct SubellipticityCertificate {
  bool certified = false;
  double lambda_used = 0.0;
  /// min over samples of {Re p_phi, Im p_phi} / (4 l^3 e^{3 l psi}) at lambda_used
  double min_bracket = 0.0;
  std::size_t samples = 0;  ///< (x, xi) pairs
  Point worst_point = Point::Zero();
};

/// Doubles lambda from lambda_start until the bracket is positive at every
/// sample of the characteristic set over the region, or lambda exceeds the cap.
SubellipticityCertificate certify_subellipticity(const Field2D& psi, const AnnularDomain2D& domain,
                                                 const std::vector<Point>& excluded, double radius,
                                                 const CertifyOptions& opts = {});
/// Region U_k: the domain minus the eps-balls of psi_k (phase = 1 or 2).
SubellipticityCertificate certify_subellipticity(const WeightPair& pair, int phase, const CertifyOptions& opts = {});

/// Boundary points: count equally spaced points on the hole and on the outer circle.
std::vector<Point> hole_points(const AnnularDomain2D& domain, int count);
std::vector<Point> outer_points(const AnnularDomain2D& domain, int count);

}  // namespace kvplate::carleman
