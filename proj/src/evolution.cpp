#include "kvplate/evolution.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "kvplate/errors.hpp"

namespace kvplate {

namespace {

SparseMatrix shifted_identity(const SparseMatrix& a, double scale) {
  SparseMatrix id(a.rows(), a.cols());
  id.setIdentity();
  SparseMatrix out = id + scale * a;
  out.makeCompressed();
  return out;
}

}  // namespace

CayleyStepper::CayleyStepper(const DiscreteGenerator& gen, double dt) : gen_(&gen), dt_(dt) {
  if (!(dt > 0.0)) throw ConfigError("dt: must be > 0");
  explicit_part_ = shifted_identity(gen.matrix(), 0.5 * dt);
  const SparseMatrix lhs = shifted_identity(gen.matrix(), -0.5 * dt);
  implicit_.compute(lhs);
  if (implicit_.info() != Eigen::Success)
    throw NumericalError("step: factorization of I - dt/2 A failed (dt=" + std::to_string(dt) + ")");
}

State CayleyStepper::step(const State& s) const {
  const Eigen::VectorXd rhs = explicit_part_ * gen_->flatten(s);
  const Eigen::VectorXd next = implicit_.solve(rhs);
  if (implicit_.info() != Eigen::Success) throw NumericalError("step: implicit solve failed");
  return gen_->unflatten(next);
}

State step(const DiscreteGenerator& gen, const State& s, double dt) {
  return CayleyStepper(gen, dt).step(s);
}

double EnergyTrace::max_identity_residual() const {
  double r = 0.0;
  for (const auto& s : samples) r = std::max(r, s.identity_residual);
  return r;
}

double EnergyTrace::max_relative_increase() const {
  if (samples.size() < 2) return 0.0;
  const double e0 = samples.front().energy;
  double worst = 0.0;
  for (std::size_t i = 1; i < samples.size(); ++i)
    worst = std::max(worst, samples[i].energy - samples[i - 1].energy);
  return e0 > 0.0 ? worst / e0 : worst;
}

UndampedModes undamped_modes(const DiscreteGenerator& gen) {
  const auto& lap = gen.laplacian();
  const Eigen::VectorXd inv_sqrt = lap.mass.cwiseSqrt().cwiseInverse();
  const Eigen::MatrixXd s = inv_sqrt.asDiagonal() * Eigen::MatrixXd(lap.stiffness) * inv_sqrt.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(s);
  if (eig.info() != Eigen::Success) throw NumericalError("undamped_modes: eigensolver did not converge");
  UndampedModes out;
  out.frequencies = eig.eigenvalues();
  out.shapes = inv_sqrt.asDiagonal() * eig.eigenvectors();
  // Fix the sign so that each shape starts positive.
  for (Eigen::Index k = 0; k < out.shapes.cols(); ++k) {
    Eigen::Index first = 0;
    while (first < out.shapes.rows() && std::abs(out.shapes(first, k)) < 1e-14) ++first;
    if (first < out.shapes.rows() && out.shapes(first, k) < 0.0) out.shapes.col(k) *= -1.0;
  }
  return out;
}

State realize(const DiscreteGenerator& gen, const InitialData& init) {
  const int n = gen.unknowns();
  if (const auto* nodal = std::get_if<State>(&init)) {
    if (nodal->u.size() != n || nodal->v.size() != n)
      throw ConfigError("initial data: nodal samples do not match the grid (" + std::to_string(n) +
                        " unknowns expected)");
    return *nodal;
  }
  const UndampedModes modes = undamped_modes(gen);
  State s = State::zero(n);
  if (const auto* m = std::get_if<ModeData>(&init)) {
    if (m->mode < 1 || m->mode > n)
      throw ConfigError("initial.mode: must be in [1, " + std::to_string(n) + "]");
    const int k = m->mode - 1;
    s.u = modes.shapes.col(k) * (std::sqrt(2.0) / modes.frequencies[k]);
    return s;
  }
  const auto& sm = std::get<SmoothData>(init);
  if (sm.modes < 1 || sm.modes > n)
    throw ConfigError("initial.smooth: mode count must be in [1, " + std::to_string(n) + "]");
  std::mt19937_64 rng(sm.seed);
  std::normal_distribution<double> normal;
  for (int k = 0; k < sm.modes; ++k) {
    const double cu = normal(rng), cv = normal(rng);
    s.u += (cu / modes.frequencies[k]) * modes.shapes.col(k);
    s.v += cv * modes.shapes.col(k);
  }
  const double e = gen.energy(s);
  return (1.0 / std::sqrt(e)) * s;
}

EnergyTrace simulate(const DiscreteGenerator& gen, const InitialData& init, double T, double dt,
                     int record_every, State* final_state) {
  if (!(T > 0.0)) throw ConfigError("T: must be > 0");
  if (!(dt > 0.0)) throw ConfigError("dt: must be > 0");
  if (dt > T) throw ConfigError("dt: must not exceed T");
  if (record_every < 1) throw ConfigError("record_every: must be >= 1");

  const CayleyStepper stepper(gen, dt);
  State u = realize(gen, init);
  const auto steps = static_cast<long long>(std::llround(T / dt));

  EnergyTrace trace;
  trace.dt = dt;
  const double e0 = gen.energy(u);
  const double scale = e0 > 0.0 ? e0 : 1.0;
  trace.samples.push_back({0.0, e0, 0.0, 0.0});

  double dissipated = 0.0;
  for (long long n = 1; n <= steps; ++n) {
    State next = stepper.step(u);
    dissipated += dt * gen.dissipation_rate(0.5 * (u + next));
    u = std::move(next);
    if (n % record_every == 0 || n == steps) {
      const double e = gen.energy(u);
      if (!std::isfinite(e)) throw NumericalError("simulate: energy is not finite at step " + std::to_string(n));
      trace.samples.push_back(
          {static_cast<double>(n) * dt, e, dissipated, std::abs(e - e0 + dissipated) / scale});
    }
  }
  if (final_state) *final_state = std::move(u);
  return trace;
}

DecayFit fit_decay(const EnergyTrace& trace, int k) {
  if (k < 1) throw ConfigError("fit_decay: k must be >= 1");
  if (trace.samples.size() < 4 || trace.samples.back().t < 50.0)
    throw ConfigError("fit_decay: trace must cover t >= 50");
  const double t_end = trace.samples.back().t;
  std::vector<double> ts, logs;
  for (const auto& s : trace.samples) {
    if (s.t < 0.5 * t_end) continue;
    if (!(s.energy > 1e-300)) {
      std::ostringstream os;
      os << "fit_decay: degenerate trace, E(" << s.t << ") = " << s.energy << " is below 1e-300";
      throw NumericalError(os.str());
    }
    ts.push_back(s.t);
    logs.push_back(std::log(s.energy));
  }
  const auto m = static_cast<double>(ts.size());
  DecayFit fit;
  fit.k = k;
  fit.tail_samples = ts.size();

  std::vector<double> shift(ts.size());
  double mean_shift = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    shift[i] = logs[i] + 2.0 * k * std::log(std::log(2.0 + ts[i]));
    mean_shift += shift[i];
  }
  mean_shift /= m;
  double ss = 0.0;
  for (double s : shift) ss += (s - mean_shift) * (s - mean_shift);
  fit.log_law_constant = std::exp(mean_shift);
  fit.log_law_residual = std::sqrt(ss / m);

  double tbar = 0.0, ybar = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    tbar += ts[i];
    ybar += logs[i];
  }
  tbar /= m;
  ybar /= m;
  double stt = 0.0, sty = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    stt += (ts[i] - tbar) * (ts[i] - tbar);
    sty += (ts[i] - tbar) * (logs[i] - ybar);
  }
  const double slope = stt > 0.0 ? sty / stt : 0.0;
  const double intercept = ybar - slope * tbar;
  double se = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const double r = logs[i] - (intercept + slope * ts[i]);
    se += r * r;
  }
  fit.exp_rate = -slope;
  fit.exp_constant = std::exp(intercept);
  fit.exp_residual = std::sqrt(se / m);
  return fit;
}

std::vector<ModeDecay> mode_decay_sweep(const DiscreteGenerator& gen, const std::vector<int>& modes,
                                        double T, double dt, Exec exec) {
  std::vector<ModeDecay> out(modes.size());
  const int record_every = std::max(1, static_cast<int>(std::lround(0.01 / dt)));
  for_each_index(exec, static_cast<std::ptrdiff_t>(modes.size()), [&](std::ptrdiff_t j) {
    const auto i = static_cast<std::size_t>(j);
    const EnergyTrace trace = simulate(gen, ModeData{modes[i]}, T, dt, record_every);
    const DecayFit fit = fit_decay(trace, 1);
    out[i] = {modes[i], fit.exp_rate, trace.samples.back().energy, trace.max_identity_residual()};
  });
  return out;
}

}  // namespace kvplate
