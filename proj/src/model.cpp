#include "kvplate/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "kvplate/errors.hpp"
#include "kvplate/smooth_step.hpp"
#include "json_fields.hpp"

namespace kvplate {

using detail::number;
using detail::reject_unknown;

std::string_view to_string(DampingShape shape) {
  switch (shape) {
    case DampingShape::smooth_bump: return "smooth-bump";
    case DampingShape::plateau_bump: return "plateau-bump";
    case DampingShape::none: return "none";
  }
  return "none";
}

DampingShape parse_damping_shape(std::string_view name) {
  if (name == "smooth-bump") return DampingShape::smooth_bump;
  if (name == "plateau-bump") return DampingShape::plateau_bump;
  if (name == "none") return DampingShape::none;
  throw ConfigError("damping.shape: unknown shape '" + std::string(name) +
                    "' (expected smooth-bump, plateau-bump or none)");
}

double DampingProfile::operator()(double x) const {
  if (shape == DampingShape::none) return 0.0;
  const double s = (x - center) / half_width;
  const double as = std::abs(s);
  if (as >= 1.0) return 0.0;
  if (shape == DampingShape::smooth_bump) return amplitude * std::exp(1.0 - 1.0 / (1.0 - s * s));
  if (as <= 0.5) return amplitude;
  return amplitude * (1.0 - smooth_step((as - 0.5) / 0.5).value);
}

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace

void validate(const TransmissionModel1D& m) {
  if (!(m.length > 0.0)) throw ConfigError("L: must be > 0 (got " + fmt(m.length) + ")");
  if (!(m.c1 > 0.0)) throw ConfigError("c1: must be > 0 (got " + fmt(m.c1) + ")");
  if (!(m.c2 > 0.0)) throw ConfigError("c2: must be > 0 (got " + fmt(m.c2) + ")");
  if (!(0.0 < m.interface_left && m.interface_left < m.interface_right &&
        m.interface_right < m.length))
    throw ConfigError("interfaces: need 0 < a_if < b_if < L (got a_if=" + fmt(m.interface_left) +
                      ", b_if=" + fmt(m.interface_right) + ")");
  const auto& d = m.damping;
  if (d.shape == DampingShape::none) return;
  if (!(d.amplitude > 0.0))
    throw ConfigError("damping.a_max: must be > 0; request an undamped run with shape \"none\"");
  if (!(d.half_width > 0.0)) throw ConfigError("damping.w: must be > 0 (got " + fmt(d.half_width) + ")");
  if (!(d.support_left() > m.interface_left && d.support_right() < m.interface_right))
    throw ConfigError("damping: support [" + fmt(d.support_left()) + ", " + fmt(d.support_right()) +
                      "] must lie strictly inside (a_if, b_if) = (" + fmt(m.interface_left) + ", " +
                      fmt(m.interface_right) + ")");
}

TransmissionModel1D make_model(const nlohmann::json& config) {
  const std::string where = "model";
  reject_unknown(config, {"L", "a_if", "b_if", "c1", "c2", "damping"}, where);
  TransmissionModel1D m;
  m.length = number(config, "L", m.length, where);
  m.interface_left = number(config, "a_if", m.interface_left, where);
  m.interface_right = number(config, "b_if", m.interface_right, where);
  m.c1 = number(config, "c1", m.c1, where);
  m.c2 = number(config, "c2", m.c2, where);
  if (config.contains("damping")) {
    const auto& d = config.at("damping");
    reject_unknown(d, {"shape", "m", "w", "a_max"}, where + ".damping");
    if (d.contains("shape")) {
      if (!d.at("shape").is_string()) throw ConfigError("model.damping.shape: expected a string");
      m.damping.shape = parse_damping_shape(d.at("shape").get<std::string>());
    }
    m.damping.center = number(d, "m", m.damping.center, where + ".damping");
    m.damping.half_width = number(d, "w", m.damping.half_width, where + ".damping");
    m.damping.amplitude = number(d, "a_max", m.damping.amplitude, where + ".damping");
  }
  validate(m);
  return m;
}

nlohmann::json to_json(const TransmissionModel1D& m) {
  return {{"L", m.length},
          {"a_if", m.interface_left},
          {"b_if", m.interface_right},
          {"c1", m.c1},
          {"c2", m.c2},
          {"damping",
           {{"shape", std::string(to_string(m.damping.shape))},
            {"m", m.damping.center},
            {"w", m.damping.half_width},
            {"a_max", m.damping.amplitude}}}};
}

double eval_damping(const TransmissionModel1D& model, double x) {
  if (!(x >= 0.0 && x <= model.length))
    throw ConfigError("eval_damping: x=" + fmt(x) + " outside [0, L]");
  return model.damping(x);
}

bool AnnularDomain2D::contains(const Eigen::Vector2d& p) const { return boundary_distance(p) > 0.0; }

double AnnularDomain2D::boundary_distance(const Eigen::Vector2d& p) const {
  return std::min(outer_radius - p.norm(), (p - hole_center).norm() - hole_radius);
}

Eigen::Vector2d AnnularDomain2D::hole_normal(const Eigen::Vector2d& p) const {
  return (hole_center - p).normalized();
}

Eigen::Vector2d AnnularDomain2D::outer_normal(const Eigen::Vector2d& p) const { return p.normalized(); }

void validate(const AnnularDomain2D& d) {
  if (!(d.outer_radius > 0.0)) throw ConfigError("weights: outer radius must be > 0");
  if (!(d.hole_radius > 0.0)) throw ConfigError("weights: hole radius must be > 0");
  if (!(d.hole_center.norm() + d.hole_radius < d.outer_radius))
    throw ConfigError("weights: hole must lie strictly inside the outer disc (|center| + r < R)");
}

}  // namespace kvplate
