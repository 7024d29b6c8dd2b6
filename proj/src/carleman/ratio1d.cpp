#include "kvplate/carleman/ratio1d.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "kvplate/errors.hpp"

namespace kvplate::carleman {

double Phase1D::phi(double x) const { return std::exp(lambda * psi(x)); }
double Phase1D::dphi(double x) const { return -lambda * slope * phi(x); }

CarlemanSetup make_carleman_setup(const TransmissionModel1D& model, const CarlemanOptions& opts) {
  validate(model);
  if (opts.n_cells < 1) throw ConfigError("carleman.n_cells: must be >= 1");
  if (!(opts.lambda > 0.0)) throw ConfigError("carleman.lambda: must be > 0");
  if (!(opts.h0 > 0.0)) throw ConfigError("carleman.h0: must be > 0");
  CarlemanSetup s;
  const double m = model.damping.center;
  s.gamma1 = (m > model.interface_left && m < model.interface_right)
                 ? m
                 : 0.5 * (model.interface_left + model.interface_right);
  s.gamma = model.interface_right;
  s.gamma2 = model.length;
  s.phase1 = {opts.lambda, opts.slopes[0], s.gamma};
  s.phase2 = {opts.lambda, opts.slopes[1], s.gamma};
  s.alpha1 = 1.0 / model.c1;
  s.alpha2 = 1.0 / model.c2;
  s.n_cells = opts.n_cells;
  s.h0 = opts.h0;
  s.skip_gamma1_checks = opts.skip_gamma1_checks;
  return s;
}

void check_phases(const CarlemanSetup& s) {
  if (!(s.gamma1 < s.gamma && s.gamma < s.gamma2)) throw ConfigError("carleman: need gamma1 < gamma < gamma2");
  const double p1 = s.phase1.phi(s.gamma), p2 = s.phase2.phi(s.gamma);
  if (std::abs(p1 - p2) > 1e-12 * std::max(std::abs(p1), std::abs(p2)))
    throw ConfigError("carleman: phases differ on the interface (phi1 - phi2 = " + std::to_string(p1 - p2) + ")");
  const double n1 = s.phase1.dphi(s.gamma), n2 = s.phase2.dphi(s.gamma);
  if (!(n1 < 0.0 && n2 < 0.0)) throw ConfigError("carleman: d_n phi_k on the interface must be < 0");
  if (!(n1 * n1 - n2 * n2 > 0.0))
    throw ConfigError("carleman: need (d_n phi1)^2 > (d_n phi2)^2 on the interface");
  if (!(s.phase2.dphi(s.gamma2) < 0.0)) throw ConfigError("carleman: d_n phi2 on gamma2 must be < 0");
  if (!s.skip_gamma1_checks && !(s.phase1.dphi(s.gamma1) != 0.0))
    throw ConfigError("carleman: d_n phi1 on gamma1 must be nonzero");
}

ManufacturedPair ManufacturedPair::scaled(double f) const {
  const auto scale = [f](const std::function<double(double)>& g) {
    return std::function<double(double)>([f, g](double x) { return f * g(x); });
  };
  return {{scale(w1.value), scale(w1.first), scale(w1.second)},
          {scale(w2.value), scale(w2.first), scale(w2.second)}};
}

ManufacturedPair ManufacturedPair::zero() {
  const auto z = [](double) { return 0.0; };
  return {{z, z, z}, {z, z, z}};
}

ManufacturedPair ManufacturedPair::cosine(const CarlemanSetup& s, double amplitude) {
  const double a = s.gamma1;
  const double k = 0.5 * std::numbers::pi / (s.gamma2 - s.gamma1);
  Profile1D p{[=](double x) { return amplitude * std::cos(k * (x - a)); },
              [=](double x) { return -amplitude * k * std::sin(k * (x - a)); },
              [=](double x) { return -amplitude * k * k * std::cos(k * (x - a)); }};
  return {p, p};
}

const std::array<std::string_view, 10>& CarlemanTerms::lhs_names() {
  static const std::array<std::string_view, 10> names{
      "w1_O1", "dw1_O1", "w1_gamma", "grad_w1_gamma", "dn_w1_gamma",
      "w2_O2", "dw2_O2", "w2_gamma", "grad_w2_gamma", "dn_w2_gamma"};
  return names;
}

const std::array<std::string_view, 7>& CarlemanTerms::rhs_names() {
  static const std::array<std::string_view, 7> names{"f1_O1",    "f2_O2",          "w1_gamma1", "dn_w1_gamma1",
                                                     "e1_gamma", "grad_e1_gamma", "e2_gamma"};
  return names;
}

namespace {

constexpr std::array<double, 8> gl_nodes{-0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
                                         -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
                                         0.7966664774136267,  0.9602898564975363};
constexpr std::array<double, 8> gl_weights{0.1012285362903763, 0.2223810344533745, 0.3137066645878740,
                                           0.3626837833783620, 0.3626837833783620, 0.3137066645878740,
                                           0.2223810344533745, 0.1012285362903763};

/// int_a^b g(x) exp(2 (phi(x) - top) / h) dx.
template <class G>
double weighted_integral(double a, double b, const Phase1D& phase, double h, double top, int n_cells, G&& g) {
  double sum = 0.0;
  const double cell = (b - a) / n_cells;
  for (int c = 0; c < n_cells; ++c) {
    const double x0 = a + c * cell, x1 = x0 + cell;
    const double rate = 2.0 * std::max(std::abs(phase.dphi(x0)), std::abs(phase.dphi(x1))) / h;
    const int pieces = std::max(1, static_cast<int>(std::ceil(rate * cell)));
    const double w = cell / pieces;
    for (int p = 0; p < pieces; ++p) {
      const double mid = x0 + (p + 0.5) * w;
      for (std::size_t q = 0; q < gl_nodes.size(); ++q) {
        const double x = mid + 0.5 * w * gl_nodes[q];
        sum += 0.5 * w * gl_weights[q] * g(x) * std::exp(2.0 * (phase.phi(x) - top) / h);
      }
    }
  }
  return sum;
}

}  // namespace

CarlemanTerms carleman_ratio(const CarlemanSetup& s, double h, const ManufacturedPair& w) {
  if (!(h > 0.0 && h <= s.h0)) {
    std::ostringstream os;
    os << "carleman: h must lie in (0, " << s.h0 << "] (got " << h << ")";
    throw ConfigError(os.str());
  }
  if (s.n_cells < 1) throw ConfigError("carleman: n_cells must be >= 1");
  check_phases(s);
  const double tail = w.w2.value(s.gamma2);
  const double size = std::max({1.0, std::abs(w.w2.value(s.gamma)), std::abs(w.w1.value(s.gamma1))});
  if (std::abs(tail) > 1e-12 * size) {
    std::ostringstream os;
    os << "carleman: w2 must vanish on gamma2 (w2 = " << tail << ")";
    throw ConfigError(os.str());
  }

  // phi is monotone on each piece: the maxima sit at the end points.
  const double top = std::max({s.phase1.phi(s.gamma1), s.phase1.phi(s.gamma), s.phase2.phi(s.gamma),
                               s.phase2.phi(s.gamma2)});
  const auto weight = [&](const Phase1D& p, double x) { return std::exp(2.0 * (p.phi(x) - top) / h); };
  const double h3 = h * h * h, h4 = h3 * h;

  CarlemanTerms t;
  t.h = h;
  t.log_scale = 2.0 * top / h;
  const auto sq = [](double v) { return v * v; };
  const auto f1 = [&](double x) { return -w.w1.second(x) - s.alpha1 / h * w.w1.value(x); };
  const auto f2 = [&](double x) { return -w.w2.second(x) - s.alpha2 / h * w.w2.value(x); };

  const double g = s.gamma;
  const double e1 = weight(s.phase1, g);
  const double e2 = weight(s.phase2, g);
  t.lhs[0] = h * weighted_integral(s.gamma1, g, s.phase1, h, top, s.n_cells, [&](double x) { return sq(w.w1.value(x)); });
  t.lhs[1] = h3 * weighted_integral(s.gamma1, g, s.phase1, h, top, s.n_cells, [&](double x) { return sq(w.w1.first(x)); });
  t.lhs[2] = h * e1 * sq(w.w1.value(g));
  t.lhs[3] = h3 * e1 * sq(w.w1.first(g));
  t.lhs[4] = h3 * e1 * sq(w.w1.first(g));
  t.lhs[5] = h * weighted_integral(g, s.gamma2, s.phase2, h, top, s.n_cells, [&](double x) { return sq(w.w2.value(x)); });
  t.lhs[6] = h3 * weighted_integral(g, s.gamma2, s.phase2, h, top, s.n_cells, [&](double x) { return sq(w.w2.first(x)); });
  t.lhs[7] = h * e2 * sq(w.w2.value(g));
  t.lhs[8] = h3 * e2 * sq(w.w2.first(g));
  t.lhs[9] = h3 * e2 * sq(w.w2.first(g));

  const double jump = w.w1.value(g) - w.w2.value(g);
  const double flux_jump = w.w1.first(g) - w.w2.first(g);
  const double b1 = weight(s.phase1, s.gamma1);
  t.rhs[0] = h4 * weighted_integral(s.gamma1, g, s.phase1, h, top, s.n_cells, [&](double x) { return sq(f1(x)); });
  t.rhs[1] = h4 * weighted_integral(g, s.gamma2, s.phase2, h, top, s.n_cells, [&](double x) { return sq(f2(x)); });
  t.rhs[2] = h * b1 * sq(w.w1.value(s.gamma1));
  t.rhs[3] = h3 * b1 * sq(w.w1.first(s.gamma1));
  t.rhs[4] = h * e1 * sq(jump);
  t.rhs[5] = 0.0;
  t.rhs[6] = h3 * e1 * sq(flux_jump);

  for (double v : t.lhs) t.lhs_total += v;
  for (double v : t.rhs) t.rhs_total += v;
  if (t.rhs_total > 0.0) t.ratio = t.lhs_total / t.rhs_total;
  else if (t.lhs_total > 0.0) throw NumericalError("carleman: right-hand side vanishes while the left does not");
  return t;
}

std::vector<CarlemanTerms> carleman_sweep(const CarlemanSetup& setup, const std::vector<double>& hs,
                                          const ManufacturedPair& w, Exec exec) {
  std::vector<CarlemanTerms> out(hs.size());
  for_each_index(exec, static_cast<std::ptrdiff_t>(hs.size()), [&](std::ptrdiff_t i) {
    out[static_cast<std::size_t>(i)] = carleman_ratio(setup, hs[static_cast<std::size_t>(i)], w);
  });
  return out;
}

}  // namespace kvplate::carleman
