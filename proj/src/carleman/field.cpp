#include "kvplate/carleman/field.hpp"

#include <cmath>

#include "kvplate/smooth_step.hpp"

namespace kvplate::carleman {

namespace {

class ConstantNode final : public FieldNode {
public:
  explicit ConstantNode(double c) : c_(c) {}
  Jet2 jet(const Point&) const override { return {c_, Eigen::Vector2d::Zero(), Eigen::Matrix2d::Zero()}; }
  double value(const Point&) const override { return c_; }

private:
  double c_;
};

class LinearNode final : public FieldNode {
public:
  LinearNode(double c0, const Eigen::Vector2d& a) : c0_(c0), a_(a) {}
  Jet2 jet(const Point& x) const override { return {value(x), a_, Eigen::Matrix2d::Zero()}; }
  double value(const Point& x) const override { return c0_ + a_.dot(x); }

private:
  double c0_;
  Eigen::Vector2d a_;
};

class SquaredDistanceNode final : public FieldNode {
public:
  explicit SquaredDistanceNode(const Point& c) : c_(c) {}
  Jet2 jet(const Point& x) const override {
    const Eigen::Vector2d r = x - c_;
    return {r.squaredNorm(), 2.0 * r, 2.0 * Eigen::Matrix2d::Identity()};
  }
  double value(const Point& x) const override { return (x - c_).squaredNorm(); }

private:
  Point c_;
};

class DistanceNode final : public FieldNode {
public:
  explicit DistanceNode(const Point& c) : c_(c) {}
  Jet2 jet(const Point& x) const override {
    const Eigen::Vector2d r = x - c_;
    const double d = r.norm();
    if (d == 0.0) return {};
    const Eigen::Vector2d u = r / d;
    return {d, u, (Eigen::Matrix2d::Identity() - u * u.transpose()) / d};
  }
  double value(const Point& x) const override { return (x - c_).norm(); }

private:
  Point c_;
};

class GaussianNode final : public FieldNode {
public:
  GaussianNode(double a, const Point& c, double w) : a_(a), c_(c), w2_(w * w) {}
  Jet2 jet(const Point& x) const override {
    const Eigen::Vector2d r = x - c_;
    const double g = a_ * std::exp(-r.squaredNorm() / w2_);
    return {g, -2.0 * g / w2_ * r,
            g * (4.0 / (w2_ * w2_) * r * r.transpose() - 2.0 / w2_ * Eigen::Matrix2d::Identity())};
  }
  double value(const Point& x) const override { return a_ * std::exp(-(x - c_).squaredNorm() / w2_); }

private:
  double a_;
  Point c_;
  double w2_;
};

class SumNode final : public FieldNode {
public:
  SumNode(std::shared_ptr<const FieldNode> a, double sa, std::shared_ptr<const FieldNode> b, double sb)
      : a_(std::move(a)), b_(std::move(b)), sa_(sa), sb_(sb) {}
  Jet2 jet(const Point& x) const override {
    Jet2 out;
    if (a_) {
      const Jet2 j = a_->jet(x);
      out.value += sa_ * j.value;
      out.grad += sa_ * j.grad;
      out.hess += sa_ * j.hess;
    }
    if (b_) {
      const Jet2 j = b_->jet(x);
      out.value += sb_ * j.value;
      out.grad += sb_ * j.grad;
      out.hess += sb_ * j.hess;
    }
    return out;
  }
  double value(const Point& x) const override {
    double v = 0.0;
    if (a_) v += sa_ * a_->value(x);
    if (b_) v += sb_ * b_->value(x);
    return v;
  }

private:
  std::shared_ptr<const FieldNode> a_, b_;
  double sa_, sb_;
};

class FlowComposedNode final : public FieldNode {
public:
  FlowComposedNode(Field2D base, TubeVectorField field, double time, int steps)
      : base_(std::move(base)), field_(std::move(field)), time_(time), steps_(steps) {}

  Jet2 jet(const Point& x) const override {
    if (field_.vanishes_at(x)) return base_.jet(x);
    const FlowJet f = flow_jet(field_, x, time_, steps_);
    const Jet2 b = base_.jet(f.x);
    Jet2 out;
    out.value = b.value;
    out.grad = f.jacobian.transpose() * b.grad;
    out.hess = f.jacobian.transpose() * b.hess * f.jacobian + b.grad[0] * f.second[0] + b.grad[1] * f.second[1];
    return out;
  }
  double value(const Point& x) const override {
    if (field_.vanishes_at(x)) return base_.value(x);
    return base_.value(flow(field_, x, time_, steps_));
  }

private:
  Field2D base_;
  TubeVectorField field_;
  double time_;
  int steps_;
};

}  // namespace

Field2D::Field2D() : node_(std::make_shared<ConstantNode>(0.0)) {}

Field2D constant_field(double c) { return Field2D(std::make_shared<ConstantNode>(c)); }
Field2D linear_field(double c0, const Eigen::Vector2d& a) { return Field2D(std::make_shared<LinearNode>(c0, a)); }
Field2D squared_distance(const Point& center) { return Field2D(std::make_shared<SquaredDistanceNode>(center)); }
Field2D distance_field(const Point& center) { return Field2D(std::make_shared<DistanceNode>(center)); }
Field2D gaussian(double amplitude, const Point& center, double width) {
  return Field2D(std::make_shared<GaussianNode>(amplitude, center, width));
}

Field2D operator+(const Field2D& a, const Field2D& b) {
  return Field2D(std::make_shared<SumNode>(a.node(), 1.0, b.node(), 1.0));
}
Field2D operator-(const Field2D& a, const Field2D& b) {
  return Field2D(std::make_shared<SumNode>(a.node(), 1.0, b.node(), -1.0));
}
Field2D operator*(double s, const Field2D& a) { return Field2D(std::make_shared<SumNode>(a.node(), s, nullptr, 0.0)); }

Jet2 Tube::cutoff(const Point& x) const {
  const Eigen::Vector2d r = x - center;
  const Eigen::Vector2d n = normal();
  const Jet1 qs = plateau_cutoff(r.dot(direction), length + along_margin, along_taper);
  const Jet1 qp = plateau_cutoff(r.dot(n), cross_inner, cross_taper);
  Jet2 out;
  out.value = qs.value * qp.value;
  out.grad = qs.d1 * qp.value * direction + qs.value * qp.d1 * n;
  const Eigen::Matrix2d en = direction * n.transpose();
  out.hess = qs.d2 * qp.value * direction * direction.transpose() + qs.d1 * qp.d1 * (en + en.transpose()) +
             qs.value * qp.d2 * n * n.transpose();
  return out;
}

std::array<Point, 4> Tube::corners() const {
  const Eigen::Vector2d a = along_extent() * direction;
  const Eigen::Vector2d c = cross_extent() * normal();
  return {center + a + c, center + a - c, center - a - c, center - a + c};
}

bool Tube::covers(const Point& x) const {
  const Eigen::Vector2d r = x - center;
  return std::abs(r.dot(direction)) < along_extent() && std::abs(r.dot(normal())) < cross_extent();
}

bool tubes_overlap(const Tube& a, const Tube& b) {
  const auto ca = a.corners();
  const auto cb = b.corners();
  for (const Eigen::Vector2d& axis : {a.direction, a.normal(), b.direction, b.normal()}) {
    double amin = 1e300, amax = -1e300, bmin = 1e300, bmax = -1e300;
    for (const auto& p : ca) {
      amin = std::min(amin, p.dot(axis));
      amax = std::max(amax, p.dot(axis));
    }
    for (const auto& p : cb) {
      bmin = std::min(bmin, p.dot(axis));
      bmax = std::max(bmax, p.dot(axis));
    }
    if (amax <= bmin || bmax <= amin) return false;
  }
  return true;
}

TubeVectorField::Eval TubeVectorField::eval(const Point& x) const {
  Eval out;
  for (const auto& t : tubes_) {
    if (!t.covers(x)) continue;
    const Jet2 chi = t.cutoff(x);
    const Eigen::Vector2d v = t.length * t.direction;
    out.value += v * chi.value;
    out.jacobian += v * chi.grad.transpose();
    out.second[0] += v[0] * chi.hess;
    out.second[1] += v[1] * chi.hess;
  }
  return out;
}

Eigen::Vector2d TubeVectorField::value(const Point& x) const { return eval(x).value; }

bool TubeVectorField::vanishes_at(const Point& x) const {
  for (const auto& t : tubes_)
    if (t.covers(x)) return false;
  return true;
}

namespace {

FlowJet rhs(const TubeVectorField& field, const FlowJet& s) {
  const auto e = field.eval(s.x);
  FlowJet d;
  d.x = e.value;
  d.jacobian = e.jacobian * s.jacobian;
  for (int i = 0; i < 2; ++i)
    d.second[i] = e.jacobian(i, 0) * s.second[0] + e.jacobian(i, 1) * s.second[1] +
                  s.jacobian.transpose() * e.second[i] * s.jacobian;
  return d;
}

FlowJet axpy(const FlowJet& s, double a, const FlowJet& d) {
  FlowJet out;
  out.x = s.x + a * d.x;
  out.jacobian = s.jacobian + a * d.jacobian;
  for (int i = 0; i < 2; ++i) out.second[i] = s.second[i] + a * d.second[i];
  return out;
}

}  // namespace

FlowJet flow_jet(const TubeVectorField& field, const Point& x, double time, int steps) {
  FlowJet s;
  s.x = x;
  const double dt = time / steps;
  for (int k = 0; k < steps; ++k) {
    const FlowJet k1 = rhs(field, s);
    const FlowJet k2 = rhs(field, axpy(s, 0.5 * dt, k1));
    const FlowJet k3 = rhs(field, axpy(s, 0.5 * dt, k2));
    const FlowJet k4 = rhs(field, axpy(s, dt, k3));
    s.x += dt / 6.0 * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x);
    s.jacobian += dt / 6.0 * (k1.jacobian + 2.0 * k2.jacobian + 2.0 * k3.jacobian + k4.jacobian);
    for (int i = 0; i < 2; ++i)
      s.second[i] += dt / 6.0 * (k1.second[i] + 2.0 * k2.second[i] + 2.0 * k3.second[i] + k4.second[i]);
  }
  return s;
}

Point flow(const TubeVectorField& field, const Point& x, double time, int steps) {
  Point y = x;
  const double dt = time / steps;
  for (int k = 0; k < steps; ++k) {
    const Eigen::Vector2d k1 = field.value(y);
    const Eigen::Vector2d k2 = field.value(y + 0.5 * dt * k1);
    const Eigen::Vector2d k3 = field.value(y + 0.5 * dt * k2);
    const Eigen::Vector2d k4 = field.value(y + dt * k3);
    y += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return y;
}

Field2D compose_with_flow(const Field2D& base, TubeVectorField field, double time, int steps) {
  return Field2D(std::make_shared<FlowComposedNode>(base, std::move(field), time, steps));
}

}  // namespace kvplate::carleman
