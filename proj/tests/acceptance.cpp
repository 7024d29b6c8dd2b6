#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>

#include "kvplate/carleman/bracket.hpp"
#include "kvplate/carleman/ratio1d.hpp"
#include "kvplate/carleman/weights.hpp"
#include "kvplate/disc.hpp"
#include "kvplate/evolution.hpp"
#include "kvplate/generator.hpp"
#include "kvplate/reduction.hpp"
#include "kvplate/spectral.hpp"

using namespace kvplate;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

TransmissionModel1D undamped_uniform() {
  TransmissionModel1D m;
  m.damping.shape = DampingShape::none;
  return m;
}

Outcome dissipativity() {
  const TransmissionModel1D m;
  const DiscreteGenerator gen = assemble_generator(m, build_grid(m, 200));
  double worst = 0.0;
  for (std::uint64_t s = 1; s <= 10; ++s) {
    const State u = random_state(gen.unknowns(), 1000 + s);
    const double re = gen.inner(gen.apply(u), u);
    const double rate = gen.dissipation_rate(u);
    worst = std::max(worst, std::abs(re + rate) / gen.inner(u, u));
  }
  return {worst <= 1e-10, fmt("max |Re<AU,U> + c1^-1 |sqrt(a) D v1|^2| / |U|^2 = %.3g (<= 1e-10)", worst)};
}

Outcome energy_law() {
  const TransmissionModel1D m;
  const DiscreteGenerator gen = assemble_generator(m, build_grid(m, 200));
  const EnergyTrace damped = simulate(gen, SmoothData{8, 1}, 50.0, 0.01);
  const double increase = damped.max_relative_increase();
  const double identity = damped.max_identity_residual();

  const TransmissionModel1D u = undamped_uniform();
  const DiscreteGenerator ugen = assemble_generator(u, build_grid(u, 200));
  const EnergyTrace free = simulate(ugen, SmoothData{8, 1}, 50.0, 0.01);
  double drift = 0.0;
  for (const auto& s : free.samples) drift = std::max(drift, std::abs(s.energy - free.samples.front().energy));
  drift /= free.samples.front().energy;
  const std::size_t steps = free.samples.size() - 1;
  const bool ok = increase <= 1e-10 && identity <= 1e-6 && drift <= 1e-9 && steps >= 5000;
  return {ok, fmt("damped: max step increase %.3g E0 (<= 1e-10), identity residual %.3g E0 (<= 1e-6); "
                  "undamped: drift %.3g E0 over %zu steps (<= 1e-9)",
                  increase, identity, drift, steps)};
}

Outcome spectrum_oracle() {
  const TransmissionModel1D m = undamped_uniform();
  const Grid1D grid = build_grid(m, 200);
  const DiscreteGenerator gen = assemble_generator(m, grid);
  const auto eig = spectrum(gen);
  std::vector<double> up;
  double max_re = 0.0;
  for (const auto& z : eig) {
    max_re = std::max(max_re, std::abs(z.real()));
    if (z.imag() > 0.0) up.push_back(z.imag());
  }
  std::sort(up.begin(), up.end());
  const double h = grid.spacing;
  double worst = 0.0;
  for (int k = 1; k <= 20; ++k) {
    const double s = std::sin(k * std::numbers::pi * h / 2.0);
    const double g = 4.0 / (h * h) * s * s;
    worst = std::max(worst, std::abs(up[static_cast<std::size_t>(k - 1)] - g) / g);
  }
  const double pi4 = std::pow(std::numbers::pi, 4);
  const double g1sq = up[0] * up[0];
  const double dev = std::abs(g1sq - pi4) / pi4;
  const bool ok = worst <= 1e-8 && dev <= 5e-3 && max_re <= 1e-10 * up.back();
  return {ok, fmt("max rel error k<=20 %.3g (<= 1e-8); k=1 squared magnitude %.6g vs pi^4 %.6g, off %.3g%% (<= 0.5%%)",
                  worst, g1sq, pi4, 100.0 * dev)};
}

Outcome resolvent_identity() {
  const TransmissionModel1D m = undamped_uniform();
  const DiscreteGenerator gen = assemble_generator(m, build_grid(m, 200));
  const auto eig = spectrum(gen);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> mu_dist(-400.0, 400.0);
  double worst = 0.0;
  for (int i = 0; i < 10; ++i) {
    const double mu = mu_dist(rng);
    const ResolventSample s = resolvent_norm(gen, mu);
    const double exact = 1.0 / distance_to_spectrum(eig, mu);
    worst = std::max(worst, std::abs(s.norm - exact) / exact);
  }

  const TransmissionModel1D d;
  const auto mus = log_spaced(5.0, 400.0, 100);
  GrowthEnvelope env[2];
  bool below = true;
  const int cells[2] = {150, 300};
  for (int i = 0; i < 2; ++i) {
    const ResolventSweep sw = resolvent_sweep(assemble_generator(d, build_grid(d, cells[i])), mus);
    env[i] = sw.envelope;
    for (const auto& s : sw.samples) below = below && std::isfinite(s.norm) && std::log(s.norm) <= env[i](s.mu) + 1e-12;
  }
  const double cb_gap = std::abs(env[0].c_b - env[1].c_b);
  const double cb_tol = 0.2 * std::max(env[0].c_b, env[1].c_b);
  const double ca_gap = std::abs(env[0].c_a - env[1].c_a);
  const double ca_tol = 0.2 * std::max(env[0].c_a, env[1].c_a);
  const bool ok = worst <= 1e-6 && below && cb_gap <= cb_tol && ca_gap <= ca_tol;
  return {ok, fmt("skew: max rel error vs 1/dist %.3g (<= 1e-6); damped envelope n=150 (C_a %.4f, C_b %.4g), "
                  "n=300 (C_a %.4f, C_b %.4g), all samples below: %s, C_b gap %.3g (<= %.3g), C_a gap %.3g (<= %.3g)",
                  worst, env[0].c_a, env[0].c_b, env[1].c_a, env[1].c_b, below ? "yes" : "no", cb_gap, cb_tol, ca_gap,
                  ca_tol)};
}

Outcome reduction_order() {
  const TransmissionModel1D m;
  std::string detail;
  bool ok = true;
  for (double mu : {-10.0, 10.0, 50.0}) {
    double r[2];
    const int cells[2] = {100, 200};
    for (int i = 0; i < 2; ++i) {
      const DiscreteGenerator gen = assemble_generator(m, build_grid(m, cells[i]));
      r[i] = reduction_check(gen, mu, smooth_forcing(gen.grid(), 7)).consistency_residual;
    }
    const double order = std::log2(r[0] / r[1]);
    ok = ok && order >= 1.9;
    detail += fmt("mu=%g order %.3f; ", mu, order);
  }
  return {ok, detail + "(>= 1.9)"};
}

Outcome weight_construction() {
  using namespace carleman;
  const AnnularDomain2D domain;
  const WeightPair pair = build_weight_pair(domain);
  const PairCheck check = verify(pair);
  const auto c1 = certify_subellipticity(pair, 1);
  const auto c2 = certify_subellipticity(pair, 2);
  const bool cert = c1.certified && c2.certified && c1.lambda_used <= 1024.0 && c2.lambda_used <= 1024.0 &&
                    c1.min_bracket > 0.0 && c2.min_bracket > 0.0 && c1.samples >= 10000 && c2.samples >= 10000;

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0), lam(0.5, 3.0);
  double worst = 0.0;
  for (int k = 0; k < 20;) {
    const Point x{u(rng), u(rng)};
    if (!domain.contains(x)) continue;
    const Field2D& psi = pair.psi(1 + k % 2);
    ++k;
    const ConjugatedSymbol sym{psi, lam(rng)};
    const Eigen::Vector2d xi = Eigen::Vector2d{u(rng), u(rng)} * sym.grad_phi(x).norm();
    const double exact = poisson_bracket(sym, x, xi);
    const double fd = poisson_bracket_fd([&](const Point& p) { return psi.value(p); }, sym.lambda, x, xi);
    worst = std::max(worst, std::abs(fd - exact) / std::abs(exact));
  }
  const bool ok = check.valid() && !pair.critical1.empty() && cert && worst <= 1e-6;
  return {ok, fmt("%zu critical points, invariants %s (order gap %.3g, ball gap %.3g, hole d_n %.3g < 0, outer d_n %.3g > 0); "
                  "lambda %g / %g (<= 1024), min bracket %.3g / %.3g over %zu / %zu samples; FD oracle worst %.3g (<= 1e-6)",
                  pair.critical1.size(), check.valid() ? "hold" : "FAIL", check.min_order_gap, check.min_ball_gap,
                  check.max_hole_normal, check.min_outer_normal, c1.lambda_used, c2.lambda_used, c1.min_bracket,
                  c2.min_bracket, c1.samples, c2.samples, worst)};
}

Outcome carleman_ratio_bound() {
  using namespace carleman;
  const auto setup = make_carleman_setup(TransmissionModel1D{});
  const auto w = ManufacturedPair::cosine(setup);
  const auto terms = carleman_sweep(setup, {0.1, 0.05, 0.025, 0.0125}, w);
  double lo = INFINITY, hi = 0.0;
  for (const auto& t : terms) {
    lo = std::min(lo, t.ratio);
    hi = std::max(hi, t.ratio);
  }
  double drift = 0.0;
  for (double h : {0.1, 0.05, 0.025, 0.0125}) {
    const double a = carleman_ratio(setup, h, w).ratio;
    const double b = carleman_ratio(setup, h, w.scaled(2.0)).ratio;
    drift = std::max(drift, std::abs(a - b) / a);
  }
  const bool ok = lo > 0.0 && hi / lo <= 10.0 && drift <= 4.0 * std::numeric_limits<double>::epsilon();
  return {ok, fmt("ratios %.4g %.4g %.4g %.4g, max/min %.3f (<= 10); w -> 2w relative change %.3g", terms[0].ratio,
                  terms[1].ratio, terms[2].ratio, terms[3].ratio, hi / lo, drift)};
}

Outcome decay_harness() {
  double worst_c = 0.0, worst_res = 0.0;
  for (int k : {1, 2}) {
    EnergyTrace t;
    t.dt = 0.05;
    for (int i = 0; i <= 2000; ++i) {
      const double s = 0.05 * i;
      t.samples.push_back({s, 4.0 / std::pow(std::log(2.0 + s), 2 * k), 0.0, 0.0});
    }
    const DecayFit f = fit_decay(t, k);
    worst_c = std::max(worst_c, std::abs(f.log_law_constant - 4.0) / 4.0);
    worst_res = std::max(worst_res, f.log_law_residual);
  }
  const TransmissionModel1D m;
  const DiscreteGenerator gen = assemble_generator(m, build_grid(m, 200));
  const DecayFit real = fit_decay(simulate(gen, ModeData{1}, 50.0, 0.01), 1);
  const bool both = std::isfinite(real.log_law_residual) && std::isfinite(real.exp_residual);
  const auto rates = mode_decay_sweep(gen, {4, 8, 12}, 50.0, 6.25e-4);
  const bool mono = rates[0].rate >= rates[1].rate && rates[1].rate >= rates[2].rate;
  const bool ok = worst_c <= 0.01 && worst_res <= 1e-6 && both && mono;
  return {ok, fmt("synthetic C error %.3g (<= 1%%), residual %.3g (<= 1e-6); damped trace log-law residual %.3g, "
                  "exponential residual %.3g (rate %.4g); sigma(4,8,12) = %.5f %.5f %.5f nonincreasing: %s",
                  worst_c, worst_res, real.log_law_residual, real.exp_residual, real.exp_rate, rates[0].rate,
                  rates[1].rate, rates[2].rate, mono ? "yes" : "no")};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double budget;
    std::function<Outcome()> run;
  };
  const Criterion all[] = {
      {1, "discrete dissipativity identity", 5.0, dissipativity},
      {2, "energy law", 30.0, energy_law},
      {3, "spectrum oracle", 60.0, spectrum_oracle},
      {4, "resolvent identity and envelope", 300.0, resolvent_identity},
      {5, "reduction consistency", 60.0, reduction_order},
      {6, "weight construction", 120.0, weight_construction},
      {7, "Carleman ratio boundedness", 60.0, carleman_ratio_bound},
      {8, "decay-law harness", 120.0, decay_harness},
  };
  int failures = 0;
  for (const auto& c : all) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool pass = o.pass && secs < c.budget;
    failures += pass ? 0 : 1;
    std::printf("%s criterion %d (%s): %s; runtime %.2f s (< %.0f s)\n", pass ? "PASS" : "FAIL", c.id, c.name,
                o.detail.c_str(), secs, c.budget);
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
