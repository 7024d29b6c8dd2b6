#include "kvplate/carleman/weights.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>

#include "kvplate/carleman/bracket.hpp"
#include "kvplate/errors.hpp"

namespace kvplate::carleman {

std::vector<Point> hole_points(const AnnularDomain2D& domain, int count) {
  std::vector<Point> out;
  for (int i = 0; i < count; ++i) {
    const double t = 2.0 * std::numbers::pi * i / count;
    out.push_back(domain.hole_center + domain.hole_radius * Point{std::cos(t), std::sin(t)});
  }
  return out;
}

std::vector<Point> outer_points(const AnnularDomain2D& domain, int count) {
  std::vector<Point> out;
  for (int i = 0; i < count; ++i) {
    const double t = 2.0 * std::numbers::pi * i / count;
    out.push_back(domain.outer_radius * Point{std::cos(t), std::sin(t)});
  }
  return out;
}

namespace {

Eigen::Vector2d hole_normal_at(const AnnularDomain2D& d, const Point& p) {
  return (d.hole_center - p).normalized();
}

struct SignSummary {
  double max_hole = -std::numeric_limits<double>::infinity();
  double min_outer = std::numeric_limits<double>::infinity();
};

SignSummary boundary_signs(const Field2D& psi, const AnnularDomain2D& d, int count) {
  SignSummary s;
  for (const auto& p : hole_points(d, count)) s.max_hole = std::max(s.max_hole, psi.jet(p).grad.dot(hole_normal_at(d, p)));
  for (const auto& p : outer_points(d, count)) s.min_outer = std::min(s.min_outer, psi.jet(p).grad.dot(p.normalized()));
  return s;
}

/// min over the closed ball B(x, r) of hi - lo, sampled on rings.
double ball_gap(const Field2D& hi, const Field2D& lo, const Point& x, double r) {
  double gap = hi.value(x) - lo.value(x);
  for (int i = 1; i <= 8; ++i)
    for (int j = 0; j < 32; ++j) {
      const double t = 2.0 * std::numbers::pi * j / 32.0;
      const Point p = x + r * i / 8.0 * Point{std::cos(t), std::sin(t)};
      gap = std::min(gap, hi.value(p) - lo.value(p));
    }
  return gap;
}

double rectangle_distance(const Tube& t, const Point& p) {
  const Eigen::Vector2d r = p - t.center;
  const double ds = std::max(std::abs(r.dot(t.direction)) - t.along_extent(), 0.0);
  const double dp = std::max(std::abs(r.dot(t.normal())) - t.cross_extent(), 0.0);
  return std::hypot(ds, dp);
}

bool tube_inside(const Tube& t, const AnnularDomain2D& d, double clearance) {
  for (const auto& c : t.corners())
    if (c.norm() > d.outer_radius - clearance) return false;
  return rectangle_distance(t, d.hole_center) > d.hole_radius + clearance;
}

Tube make_tube(const Point& c, const Eigen::Vector2d& e, double length, const WeightOptions& opts) {
  Tube t;
  t.center = c;
  t.direction = e;
  t.length = length;
  t.along_margin = opts.along_margin_ratio * length;
  t.along_taper = opts.along_taper_ratio * length;
  t.cross_inner = opts.cross_inner_ratio * length;
  t.cross_taper = opts.cross_taper_ratio * length;
  return t;
}

std::vector<Arc> candidate_arcs(const Field2D& psi, const CriticalPoint& c, double length, double rise_margin) {
  const auto unit = [](double t) { return Eigen::Vector2d{std::cos(t), std::sin(t)}; };
  const auto odd = [&](double t) {
    const Eigen::Vector2d e = unit(t);
    return psi.value(c.x + length * e) - psi.value(c.x - length * e);
  };
  // odd(t + pi) = -odd(t): there is a zero in every half turn.
  constexpr int samples = 180;
  std::vector<double> roots;
  double prev = odd(0.0);
  for (int m = 1; m <= samples; ++m) {
    const double t = std::numbers::pi * m / samples;
    const double cur = m == samples ? -odd(0.0) : odd(t);
    if (prev == 0.0) roots.push_back(std::numbers::pi * (m - 1) / samples);
    else if ((prev < 0.0) != (cur < 0.0)) {
      double a = std::numbers::pi * (m - 1) / samples, b = t, fa = prev;
      for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (a + b);
        const double fm = odd(mid);
        if ((fm < 0.0) == (fa < 0.0)) {
          a = mid;
          fa = fm;
        } else {
          b = mid;
        }
      }
      roots.push_back(0.5 * (a + b));
    }
    prev = cur;
  }
  const Eigen::Vector2d ascend = c.axes.col(1);
  std::sort(roots.begin(), roots.end(),
            [&](double a, double b) { return std::abs(unit(a).dot(ascend)) > std::abs(unit(b).dot(ascend)); });
  std::vector<Arc> out;
  const double base = psi.value(c.x);
  for (double t : roots) {
    const Eigen::Vector2d e = unit(t);
    const double fwd = psi.value(c.x + length * e) - base;
    const double bwd = psi.value(c.x - length * e) - base;
    if (std::min(fwd, bwd) <= rise_margin) continue;
    Arc arc;
    arc.center = c.x;
    arc.direction = e;
    arc.length = length;
    arc.rise = std::min(fwd, bwd);
    arc.end_mismatch = std::abs(fwd - bwd);
    out.push_back(arc);
  }
  return out;
}

/// Parallel arcs whose tubes touch share one tube whose plateau holds all of
/// them, so X is constant between their critical points.
std::vector<Tube> merge_tubes(std::vector<Arc>& arcs, const WeightOptions& opts) {
  const std::size_t n = arcs.size();
  std::vector<std::size_t> group(n);
  for (std::size_t i = 0; i < n; ++i) group[i] = i;
  const auto root = [&](std::size_t i) {
    while (group[i] != i) i = group[i];
    return i;
  };
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const Eigen::Vector2d& a = arcs[i].direction;
      const Eigen::Vector2d& b = arcs[j].direction;
      if (std::abs(a.x() * b.y() - a.y() * b.x()) > 1e-9) continue;
      if (!tubes_overlap(make_tube(arcs[i].center, a, arcs[i].length, opts),
                         make_tube(arcs[j].center, b, arcs[j].length, opts)))
        continue;
      group[root(j)] = root(i);
    }
  std::vector<Tube> tubes;
  for (std::size_t g = 0; g < n; ++g) {
    if (root(g) != g) continue;
    const Eigen::Vector2d e = arcs[g].direction;
    const Eigen::Vector2d nrm{-e.y(), e.x()};
    double smin = std::numeric_limits<double>::infinity(), smax = -smin, pmin = smin, pmax = -smin;
    for (std::size_t i = 0; i < n; ++i) {
      if (root(i) != g) continue;
      if (arcs[i].direction.dot(e) < 0.0) arcs[i].direction = -arcs[i].direction;
      const double s = arcs[i].center.dot(e), q = arcs[i].center.dot(nrm);
      smin = std::min(smin, s);
      smax = std::max(smax, s);
      pmin = std::min(pmin, q);
      pmax = std::max(pmax, q);
    }
    Tube t = make_tube(0.5 * (smin + smax) * e + 0.5 * (pmin + pmax) * nrm, e, arcs[g].length, opts);
    t.along_margin += 0.5 * (smax - smin);
    t.cross_inner += 0.5 * (pmax - pmin);
    for (std::size_t i = 0; i < n; ++i)
      if (root(i) == g) arcs[i].tube = t;
    tubes.push_back(t);
  }
  return tubes;
}

double choose_epsilon(const WeightPair& p) {
  double cross = std::numeric_limits<double>::infinity();
  double clearance = std::numeric_limits<double>::infinity();
  for (const auto& a : p.critical1) {
    clearance = std::min(clearance, p.domain.boundary_distance(a.x));
    for (const auto& b : p.critical2) cross = std::min(cross, (a.x - b.x).norm());
  }
  for (const auto& b : p.critical2) clearance = std::min(clearance, p.domain.boundary_distance(b.x));
  double eps = std::min(cross / 4.2, clearance / 2.1);
  for (int halving = 0; halving < 30; ++halving, eps *= 0.5) {
    bool ok = true;
    for (const auto& c : p.critical1) ok = ok && ball_gap(p.psi2, p.psi1, c.x, 2.0 * eps) > 0.0;
    for (const auto& c : p.critical2) ok = ok && ball_gap(p.psi1, p.psi2, c.x, 2.0 * eps) > 0.0;
    if (ok) return eps;
  }
  throw NumericalError("build_weight_pair: no exclusion radius keeps the partner phase above");
}

struct Attempt {
  std::optional<WeightPair> pair;
  std::string failure;
};

Attempt try_seed(const AnnularDomain2D& domain, std::uint64_t seed, const WeightOptions& opts) {
  const double R = domain.outer_radius;
  const double ch = domain.hole_center.norm();
  const Eigen::Vector2d axis = domain.hole_center / ch;
  // Widest gap between hole and outer circle lies on the far side of the hole.
  const double near = ch - domain.hole_radius;
  const double gap = R + near;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  WeightPair p;
  p.domain = domain;
  p.seed_used = seed;
  p.bump.center = 0.5 * (near - R) * axis + 0.02 * gap * Point{uni(rng), uni(rng)};
  p.bump.width = opts.bump_width * gap * (1.0 + 0.05 * uni(rng));
  const double pull = 2.0 * (p.bump.center - domain.hole_center).norm();
  // The bump gradient peaks at amplitude * sqrt(2) e^{-1/2} / width.
  const double threshold = pull * p.bump.width / (std::sqrt(2.0) * std::exp(-0.5));
  p.bump.amplitude = threshold * (opts.bump_strength + 0.2 * uni(rng));
  p.psi1 = squared_distance(domain.hole_center) - gaussian(p.bump.amplitude, p.bump.center, p.bump.width);

  Attempt out;
  const SignSummary s = boundary_signs(p.psi1, domain, 720);
  if (!(s.max_hole < 0.0 && s.min_outer > 0.0)) {
    out.failure = "boundary signs of psi1 fail";
    return out;
  }
  p.critical1 = find_critical_points(p.psi1, domain, opts.scan);
  if (p.critical1.empty()) {
    out.failure = "psi1 has no critical points";
    return out;
  }
  for (const auto& c : p.critical1)
    if (c.kind == CriticalKind::maximum) {
      out.failure = "psi1 has a local maximum";
      return out;
    }

  const double scale = field_scale(p.psi1, domain, opts.scan);
  std::vector<Tube> tubes;
  for (double len : opts.arc_lengths) {
    const double length = len * R;
    const double clearance = 0.02 * R;
    std::vector<Arc> arcs;
    for (const auto& c : p.critical1) {
      for (const auto& a : candidate_arcs(p.psi1, c, length, 1e-3 * scale * R))
        if (tube_inside(make_tube(a.center, a.direction, a.length, opts), domain, clearance)) {
          arcs.push_back(a);
          break;
        }
      if (arcs.size() != static_cast<std::size_t>(&c - p.critical1.data()) + 1) break;
    }
    if (arcs.size() != p.critical1.size()) continue;
    std::vector<Tube> merged = merge_tubes(arcs, opts);
    bool ok = true;
    for (std::size_t i = 0; i < merged.size() && ok; ++i) {
      ok = tube_inside(merged[i], domain, clearance);
      for (std::size_t j = i + 1; j < merged.size() && ok; ++j) ok = !tubes_overlap(merged[i], merged[j]);
      for (std::size_t k = 0; k < arcs.size() && ok; ++k)
        if (merged[i].covers(arcs[k].center) && (arcs[k].tube.center - merged[i].center).norm() > 0.0) ok = false;
    }
    if (!ok) continue;
    p.arcs = std::move(arcs);
    tubes = std::move(merged);
    break;
  }
  if (p.arcs.empty()) {
    out.failure = "no arc length admits disjoint arcs for every critical point";
    return out;
  }
  for (const auto& a : p.arcs) p.predicted2.push_back(a.center - a.length * a.direction);
  p.psi2 = compose_with_flow(p.psi1, TubeVectorField(tubes), 1.0, opts.flow_steps);
  p.critical2 = find_critical_points(p.psi2, domain, opts.scan);
  if (p.critical2.size() != p.predicted2.size()) {
    std::ostringstream os;
    os << "psi2 has " << p.critical2.size() << " critical points, expected " << p.predicted2.size();
    out.failure = os.str();
    return out;
  }
  p.epsilon = choose_epsilon(p);
  out.pair = std::move(p);
  return out;
}

}  // namespace

WeightPair build_weight_pair(const AnnularDomain2D& domain, const WeightOptions& opts) {
  validate(domain);
  if (opts.max_attempts < 1) throw ConfigError("weights: max_attempts must be >= 1");
  if (opts.flow_steps < 1) throw ConfigError("weights: flow_steps must be >= 1");
  if (domain.hole_center.norm() <= 1e-12 * domain.outer_radius) {
    WeightPair p;
    p.domain = domain;
    p.concentric = true;
    p.psi1 = distance_field(Point::Zero());
    p.psi2 = p.psi1;
    p.critical1 = find_critical_points(p.psi1, domain, opts.scan);
    p.critical2 = p.critical1;
    p.seed_used = opts.seed;
    p.attempts = 1;
    return p;
  }
  std::string last;
  for (int a = 0; a < opts.max_attempts; ++a) {
    Attempt t = try_seed(domain, opts.seed + static_cast<std::uint64_t>(a), opts);
    if (t.pair) {
      t.pair->attempts = a + 1;
      return std::move(*t.pair);
    }
    last = t.failure;
  }
  std::ostringstream os;
  os << "build_weight_pair: no valid pair after " << opts.max_attempts << " seeds starting at " << opts.seed
     << " (last failure: " << last << ")";
  throw NumericalError(os.str());
}

PairCheck verify(const WeightPair& p, int boundary_samples) {
  PairCheck out;
  constexpr double inf = std::numeric_limits<double>::infinity();
  out.min_order_gap = inf;
  out.min_partner_gradient = inf;
  out.min_ball_separation = inf;
  out.min_ball_clearance = inf;
  out.min_ball_gap = inf;
  for (int k = 1; k <= 2; ++k) {
    const int s = 3 - k;
    for (const auto& c : p.critical(k)) {
      out.min_order_gap = std::min(out.min_order_gap, p.psi(s).value(c.x) - p.psi(k).value(c.x));
      out.min_partner_gradient = std::min(out.min_partner_gradient, p.psi(s).jet(c.x).grad.norm());
      out.min_ball_clearance = std::min(out.min_ball_clearance, p.domain.boundary_distance(c.x) - 2.0 * p.epsilon);
      out.min_ball_gap = std::min(out.min_ball_gap, ball_gap(p.psi(s), p.psi(k), c.x, 2.0 * p.epsilon));
      if (c.kind == CriticalKind::maximum && k == 1) out.has_maximum = true;
    }
  }
  for (const auto& a : p.critical1)
    for (const auto& b : p.critical2)
      out.min_ball_separation = std::min(out.min_ball_separation, (a.x - b.x).norm() - 4.0 * p.epsilon);

  out.max_hole_normal = -inf;
  out.min_outer_normal = inf;
  for (int k = 1; k <= 2; ++k) {
    const SignSummary s = boundary_signs(p.psi(k), p.domain, boundary_samples);
    out.max_hole_normal = std::max(out.max_hole_normal, s.max_hole);
    out.min_outer_normal = std::min(out.min_outer_normal, s.min_outer);
  }
  const double delta = 1e-4 * p.domain.outer_radius;
  const auto one_sided = [&](const Field2D& f, const Point& x, const Eigen::Vector2d& n) {
    return (3.0 * f.value(x) - 4.0 * f.value(x - delta * n) + f.value(x - 2.0 * delta * n)) / (2.0 * delta);
  };
  for (const auto& x : hole_points(p.domain, boundary_samples)) {
    const Eigen::Vector2d n = hole_normal_at(p.domain, x);
    out.normal_mismatch = std::max(out.normal_mismatch, std::abs(one_sided(p.psi2, x, n) - one_sided(p.psi1, x, n)));
  }
  for (const auto& x : outer_points(p.domain, boundary_samples)) {
    const Eigen::Vector2d n = x.normalized();
    out.normal_mismatch = std::max(out.normal_mismatch, std::abs(one_sided(p.psi2, x, n) - one_sided(p.psi1, x, n)));
  }
  out.boundary_samples = 2 * static_cast<std::size_t>(boundary_samples);

  for (const auto& c : p.critical2) {
    double best = inf;
    for (const auto& q : p.predicted2) best = std::min(best, (c.x - q).norm());
    out.prediction_error = std::max(out.prediction_error, best);
  }
  if (p.critical2.size() != p.predicted2.size() && !p.concentric) out.prediction_error = inf;

  if (p.critical1.empty() && p.critical2.empty()) {
    out.min_order_gap = out.min_partner_gradient = out.min_ball_separation = out.min_ball_clearance =
        out.min_ball_gap = inf;
  }
  return out;
}

SubellipticityCertificate certify_subellipticity(const Field2D& psi, const AnnularDomain2D& domain,
                                                 const std::vector<Point>& excluded, double radius,
                                                 const CertifyOptions& opts) {
  validate(domain);
  if (opts.grid < 2) throw ConfigError("certify_subellipticity: grid must be >= 2");
  if (!(opts.lambda_start > 0.0) || !(opts.lambda_cap >= opts.lambda_start))
    throw ConfigError("certify_subellipticity: need 0 < lambda_start <= lambda_cap");
  const auto outside_balls = [&](const Point& x) {
    if (!opts.exclude_critical_balls) return true;
    for (const auto& c : excluded)
      if ((x - c).norm() < radius) return false;
    return true;
  };

  std::vector<Point> xs;
  const double R = domain.outer_radius;
  const double step = 2.0 * R / (opts.grid - 1);
  for (int i = 0; i < opts.grid; ++i)
    for (int j = 0; j < opts.grid; ++j) {
      const Point x{-R + step * i, -R + step * j};
      if (domain.contains(x) && outside_balls(x)) xs.push_back(x);
    }
  for (const auto& x : hole_points(domain, opts.boundary_samples))
    if (outside_balls(x)) xs.push_back(x);
  for (const auto& x : outer_points(domain, opts.boundary_samples))
    if (outside_balls(x)) xs.push_back(x);
  for (const auto& c : excluded)
    if (domain.contains(c) && outside_balls(c)) xs.push_back(c);

  std::vector<Jet2> jets(xs.size());
  for_each_index(opts.exec, static_cast<std::ptrdiff_t>(xs.size()),
                 [&](std::ptrdiff_t i) { jets[static_cast<std::size_t>(i)] = psi.jet(xs[static_cast<std::size_t>(i)]); });

  SubellipticityCertificate out;
  out.samples = 2 * xs.size();
  for (double lambda = opts.lambda_start; lambda <= opts.lambda_cap; lambda *= 2.0) {
    double worst = std::numeric_limits<double>::infinity();
    std::size_t at = 0;
    for (std::size_t i = 0; i < jets.size(); ++i)
      for (int sign : {1, -1}) {
        const double b = normalized_characteristic_bracket(jets[i], lambda, sign);
        if (b < worst) {
          worst = b;
          at = i;
        }
      }
    out.lambda_used = lambda;
    out.min_bracket = worst;
    if (!xs.empty()) out.worst_point = xs[at];
    if (worst > 0.0) {
      out.certified = true;
      return out;
    }
  }
  return out;
}

SubellipticityCertificate certify_subellipticity(const WeightPair& pair, int phase, const CertifyOptions& opts) {
  if (phase != 1 && phase != 2) throw ConfigError("certify_subellipticity: phase must be 1 or 2");
  std::vector<Point> excluded;
  for (const auto& c : pair.critical(phase)) excluded.push_back(c.x);
  return certify_subellipticity(pair.psi(phase), pair.domain, excluded, pair.epsilon, opts);
}

}  // namespace kvplate::carleman
