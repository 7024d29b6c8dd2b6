#pragma once

#include <Eigen/Core>
#include <array>
#include <memory>
#include <vector>

namespace kvplate::carleman {

using Point = Eigen::Vector2d;

/// Value, gradient and Hessian of a scalar field at one point.
struct Jet2 {
  double value = 0.0;
  Eigen::Vector2d grad = Eigen::Vector2d::Zero();
  Eigen::Matrix2d hess = Eigen::Matrix2d::Zero();
};

class FieldNode {
public:
  virtual ~FieldNode() = default;
  virtual Jet2 jet(const Point& x) const = 0;
  virtual double value(const Point& x) const { return jet(x).value; }
};

/// Smooth scalar field on the plane built from closed-form pieces. Copies
/// share the immutable expression tree.
class Field2D {
public:
  Field2D();
  explicit Field2D(std::shared_ptr<const FieldNode> node) : node_(std::move(node)) {}

  Jet2 jet(const Point& x) const { return node_->jet(x); }
  double value(const Point& x) const { return node_->value(x); }
  double operator()(const Point& x) const { return value(x); }

  const std::shared_ptr<const FieldNode>& node() const { return node_; }

private:
  std::shared_ptr<const FieldNode> node_;
};

Field2D constant_field(double c);
/// c0 + a . x
Field2D linear_field(double c0, const Eigen::Vector2d& a);
/// |x - center|^2
Field2D squared_distance(const Point& center);
/// |x - center|; derivatives are set to zero at the centre itself.
Field2D distance_field(const Point& center);
/// amplitude * exp(-|x - center|^2 / width^2)
Field2D gaussian(double amplitude, const Point& center, double width);

Field2D operator+(const Field2D& a, const Field2D& b);
Field2D operator-(const Field2D& a, const Field2D& b);
Field2D operator*(double s, const Field2D& a);

/// Smooth tube around the straight arc t -> center + t*length*direction,
/// t in [-1, 1]. The cutoff is 1 on the box |s| <= length + along_margin,
/// |p| <= cross_inner (s, p the along/cross coordinates) and vanishes
/// outside |s| < length + along_margin + along_taper, |p| < cross_inner + cross_taper.
struct Tube {
  Point center = Point::Zero();
  Eigen::Vector2d direction{1.0, 0.0};
  double length = 0.1;
  double along_margin = 0.02;
  double along_taper = 0.04;
  double cross_inner = 0.02;
  double cross_taper = 0.03;

  Jet2 cutoff(const Point& x) const;
  double along_extent() const { return length + along_margin + along_taper; }
  double cross_extent() const { return cross_inner + cross_taper; }
  Eigen::Vector2d normal() const { return {-direction.y(), direction.x()}; }
  std::array<Point, 4> corners() const;
  bool covers(const Point& x) const;
};

/// Separating-axis test on the support rectangles.
bool tubes_overlap(const Tube& a, const Tube& b);

/// X(x) = sum over tubes of length * direction * cutoff(x). On the plateau
/// of each tube X equals the arc velocity.
class TubeVectorField {
public:
  TubeVectorField() = default;
  explicit TubeVectorField(std::vector<Tube> tubes) : tubes_(std::move(tubes)) {}

  struct Eval {
    Eigen::Vector2d value = Eigen::Vector2d::Zero();
    Eigen::Matrix2d jacobian = Eigen::Matrix2d::Zero();
    std::array<Eigen::Matrix2d, 2> second{Eigen::Matrix2d::Zero(), Eigen::Matrix2d::Zero()};
  };

  Eval eval(const Point& x) const;
  Eigen::Vector2d value(const Point& x) const;
  /// True when x lies outside every tube support (X and its jets vanish).
  bool vanishes_at(const Point& x) const;
  const std::vector<Tube>& tubes() const { return tubes_; }

private:
  std::vector<Tube> tubes_;
};

/// Time-t flow map of X with first and second variations, integrated by
/// classical RK4 with a fixed number of steps.
struct FlowJet {
  Point x = Point::Zero();
  Eigen::Matrix2d jacobian = Eigen::Matrix2d::Identity();
  std::array<Eigen::Matrix2d, 2> second{Eigen::Matrix2d::Zero(), Eigen::Matrix2d::Zero()};
};

FlowJet flow_jet(const TubeVectorField& field, const Point& x, double time, int steps);
Point flow(const TubeVectorField& field, const Point& x, double time, int steps);

/// base o phi_time with exact derivatives of the discrete flow map.
Field2D compose_with_flow(const Field2D& base, TubeVectorField field, double time = 1.0, int steps = 64);

}  // namespace kvplate::carleman
